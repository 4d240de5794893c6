import numpy as np
from pymoo.operators.sampling.lhs import sampling_lhs_unit
from problems.problem import ProblemDefinition


def lhs_unit(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
   """
   Latin hypercube in the unit cube: one point per stratum and dimension, uniform jitter inside each stratum.
   """
   if count < 1:
      raise ValueError("LHS needs at least one point")
   return sampling_lhs_unit(count, n, smooth=True, random_state=rng)


def lhs_sample(count: int, problem: ProblemDefinition, rng: np.random.Generator) -> np.ndarray:
   """
   Latin hypercube sample scaled to the problem box.

   Args:
      count: Number of points (>= 1).
      problem: Supplies n and the bounds.
      rng: Seeded generator.

   Returns:
      (count, n) decision vectors.
   """
   unit = lhs_unit(count, problem.n, rng)
   return problem.lower + unit * (problem.upper - problem.lower)


def uniform_sample(count: int, problem: ProblemDefinition, rng: np.random.Generator) -> np.ndarray:
   return problem.lower + rng.random((count, problem.n)) * (problem.upper - problem.lower)
