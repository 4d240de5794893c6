"""
Evolutionary search on the surrogate landscape.

A population seeded from the archive is varied with SBX and polynomial mutation,
and survivors are picked per reference vector by probabilistic ranking. The best
member of each reference vector in the final generation forms the candidate set
handed to infill selection.
"""
from dataclasses import dataclass
import logging
import math
import numpy as np
from pymoo.operators.crossover.sbx import cross_sbx
from pymoo.operators.mutation.pm import mut_pm
from scipy.spatial.distance import cdist
from handler.archive import ArchiveManager
from handler.config import SearchFlag, SubEAConfig, Variant
from handler.decomposition import (
   NormalizationBounds,
   ReferenceVectorSet,
   assign_to_rv,
   normalize,
   project,
)
from handler.kriging import SurrogateSet
from handler.probability import SolutionSummary, summarize
from handler.ranking import rank_cluster
from problems.problem import ProblemDefinition
from problems.sampling import lhs_sample, uniform_sample
from utils.utils import nondominated_sort

logger = logging.getLogger(__name__)


@dataclass
class CandidateSet:
   """Predicted individuals: decision vectors, their summaries and assigned reference vectors."""
   X: np.ndarray
   summary: SolutionSummary
   rv: np.ndarray

   def __len__(self) -> int:
      return len(self.X)

   def subset(self, index) -> "CandidateSet":
      index = np.asarray(index, dtype=int)
      return CandidateSet(self.X[index], self.summary.subset(index), self.rv[index])


@dataclass
class Selection:
   survivors: np.ndarray
   champions: np.ndarray
   champion_rvs: np.ndarray
   rounds: int


def predict_summary(models: SurrogateSet, X) -> SolutionSummary:
   return summarize(*models.predict(X))


def seed_order(F, cv, feasible, population: int, ratio: float) -> np.ndarray:
   """
   Infeasibility-driven ordering of the archive.

   The feasible first front leads, followed by the ceil(ratio * population) least violating
   infeasible solutions, then the remaining feasible fronts in rank order and finally the
   remaining infeasible solutions by violation. Ties keep archive order.
   """
   F = np.atleast_2d(np.asarray(F, dtype=float))
   cv = np.asarray(cv, dtype=float)
   feasible = np.asarray(feasible, dtype=bool)

   feasible_idx = np.flatnonzero(feasible)
   infeasible_idx = np.flatnonzero(~feasible)
   infeasible_idx = infeasible_idx[np.argsort(cv[infeasible_idx], kind="stable")]

   if len(feasible_idx):
      ranks = nondominated_sort(F[feasible_idx])
      feasible_idx = feasible_idx[np.argsort(ranks, kind="stable")]
      first_front = feasible_idx[np.sort(ranks) == 1]
      later_fronts = feasible_idx[np.sort(ranks) > 1]
   else:
      first_front = later_fronts = feasible_idx

   marginal = math.ceil(ratio * population)
   return np.concatenate([first_front, infeasible_idx[:marginal], later_fronts, infeasible_idx[marginal:]]).astype(int)


def seed_population(archive: ArchiveManager, problem: ProblemDefinition, config: SubEAConfig, rng: np.random.Generator) -> np.ndarray:
   """
   Initial SubEA population: the top of the archive ordering, topped up by LHS.

   Returns:
      (config.population, n) decision vectors.
   """
   order = seed_order(archive.F, archive.cv, archive.feasible, config.population, config.infeasible_ratio)
   inherited = archive.X[order[:config.population]]
   missing = config.population - len(inherited)
   if missing > 0:
      return np.vstack([inherited, lhs_sample(missing, problem, rng)])
   return inherited.copy()


def sbx_crossover(parent_a, parent_b, config: SubEAConfig, rng: np.random.Generator, lower, upper):
   """
   Simulated binary crossover on paired rows, built on pymoo's bounded SBX.

   Each pair crosses with probability `crossover_prob`; inside a crossing pair every variable
   is recombined with probability 1/2 and the two children swap a variable with probability 1/2.
   Pairs that do not cross are copied.

   Returns:
      Tuple of children arrays shaped like the parents.
   """
   a = np.atleast_2d(np.array(parent_a, dtype=float))
   b = np.atleast_2d(np.array(parent_b, dtype=float))
   k, n = a.shape
   lower = np.broadcast_to(np.asarray(lower, dtype=float), (n,)).copy()
   upper = np.broadcast_to(np.asarray(upper, dtype=float), (n,)).copy()

   crossing = np.flatnonzero(rng.random(k) < config.crossover_prob)
   child_a, child_b = a.copy(), b.copy()
   if len(crossing):
      pairs = len(crossing)
      Q = cross_sbx(
         np.stack([a[crossing], b[crossing]]), lower, upper,
         np.full((pairs, 1), config.eta_c), np.full((pairs, 1), 0.5), np.full((pairs, 1), 0.5),
         random_state=rng,
      )
      child_a[crossing], child_b[crossing] = Q[0], Q[1]

   if np.ndim(parent_a) == 1:
      return child_a[0], child_b[0]
   return child_a, child_b


def polynomial_mutation(child, config: SubEAConfig, rng: np.random.Generator, lower, upper):
   """
   Bounded polynomial mutation from pymoo, applied per variable with probability `mutation_prob`.
   """
   x = np.atleast_2d(np.array(child, dtype=float))
   k, n = x.shape
   lower = np.broadcast_to(np.asarray(lower, dtype=float), (n,)).copy()
   upper = np.broadcast_to(np.asarray(upper, dtype=float), (n,)).copy()

   x = mut_pm(x, lower, upper, np.full(k, float(config.eta_m)), np.full(k, config.mutation_prob), at_least_once=False, random_state=rng)
   return x[0] if np.ndim(child) == 1 else x


def replace_duplicates(
   offspring,
   references,
   problem: ProblemDefinition,
   rng: np.random.Generator,
   tolerance: float = 1e-4,
   retries: int = 100,
) -> np.ndarray:
   """
   Swaps offspring that crowd a parent, an archive member or an earlier offspring for uniform
   random points.

   Distances are Euclidean in the bounds-normalized space. After `retries` failed draws the last
   random point is kept.

   Args:
      offspring: (k, n) decision vectors.
      references: (m, n) parents and archive members.
      problem: Supplies the bounds.
      rng: Random source for replacements.
      tolerance: Minimum separation.
      retries: Draw attempts per duplicate.

   Returns:
      (k, n) offspring with duplicates replaced.
   """
   span = problem.upper - problem.lower
   scale = lambda X: (np.atleast_2d(X) - problem.lower) / span
   result = np.array(offspring, dtype=float, copy=True)
   known = scale(references) if len(references) else np.empty((0, problem.n))

   for i in range(len(result)):
      candidate = result[i]
      for attempt in range(retries + 1):
         if len(known) == 0 or cdist(scale(candidate), known).min() >= tolerance:
            break
         if attempt == retries:
            logger.debug("Duplicate replacement exhausted %d retries", retries)
            break
         candidate = uniform_sample(1, problem, rng)[0]
      result[i] = candidate
      known = np.vstack([known, scale(candidate)])

   return result


def environmental_selection(
   candidates: CandidateSet,
   rvs: ReferenceVectorSet,
   bounds: NormalizationBounds,
   flag: SearchFlag,
   population: int,
   rng: np.random.Generator,
   variant: Variant = Variant.PSCMOEA,
   pof_threshold: float = 0.99,
) -> Selection:
   """
   Picks `population` survivors by rounds of per-reference-vector ranking.

   Every round assigns the remaining candidates to the reference vectors still open,
   projects each member's normalized distributions on its vector and keeps the best ranked
   member of every occupied vector. Chosen members and their vectors leave the pool. Rounds
   stop when either runs out; shortfalls are filled at random from what is left, excess is cut
   in round order, then by vector index.

   Returns:
      Selection with survivor indices and the per-vector champions in pick order.
   """
   total = len(candidates)
   norm_mean, norm_var = normalize(candidates.summary.obj_mean, candidates.summary.obj_var, bounds)

   remaining = np.arange(total)
   open_rvs = np.arange(len(rvs))
   champions, champion_rvs = [], []
   rounds = 0

   while len(remaining) and len(open_rvs):
      rounds += 1
      open_set = ReferenceVectorSet(rvs.directions[open_rvs], rvs.H)
      assigned = open_rvs[assign_to_rv(norm_mean[remaining], open_set)]

      picked = []
      for rv in np.unique(assigned):
         members = remaining[assigned == rv]
         if len(members) == 1:
            best = members[0]
         else:
            direction = rvs.directions[rv]
            proj_mean, proj_var = project(norm_mean[members], norm_var[members], direction)
            summary = candidates.summary.subset(members).with_projection(proj_mean, proj_var)
            best = members[rank_cluster(summary, variant, flag, True, pof_threshold)[0]]
         picked.append(best)
         champions.append(best)
         champion_rvs.append(rv)

      remaining = np.setdiff1d(remaining, picked)
      open_rvs = np.setdiff1d(open_rvs, np.unique(assigned))

   champions = np.array(champions, dtype=int)
   champion_rvs = np.array(champion_rvs, dtype=int)

   if len(champions) >= population:
      survivors = champions[:population]
   else:
      fill = rng.choice(remaining, size=min(population - len(champions), len(remaining)), replace=False)
      survivors = np.concatenate([champions, np.sort(fill)]).astype(int)

   return Selection(survivors, champions, champion_rvs, rounds)


def run_subea(
   archive: ArchiveManager,
   models: SurrogateSet,
   bounds: NormalizationBounds,
   flag: SearchFlag,
   config: SubEAConfig,
   rng: np.random.Generator,
   problem: ProblemDefinition,
   rvs: ReferenceVectorSet,
   variant: Variant = Variant.PSCMOEA,
   pof_threshold: float = 0.99,
) -> CandidateSet:
   """
   Runs the surrogate-assisted search and returns the final per-vector champions.

   Champions that coincide with an archive member (within the duplicate tolerance) are
   dropped, so the returned set may be empty.
   """
   X = seed_population(archive, problem, config, rng)
   population = CandidateSet(X, predict_summary(models, X), np.zeros(len(X), dtype=int))
   selection = environmental_selection(population, rvs, bounds, flag, config.population, rng, variant, pof_threshold)

   for generation in range(config.generations):
      parents = population.subset(selection.survivors) if generation else population
      order = rng.permutation(len(parents))
      if len(order) % 2:
         order = np.append(order, rng.integers(len(parents)))
      pa, pb = parents.X[order[0::2]], parents.X[order[1::2]]

      child_a, child_b = sbx_crossover(pa, pb, config, rng, problem.lower, problem.upper)
      children = np.vstack([child_a, child_b])[:len(parents)]
      children = polynomial_mutation(children, config, rng, problem.lower, problem.upper)
      children = replace_duplicates(
         children, np.vstack([parents.X, archive.X]), problem, rng,
         config.duplicate_tolerance, config.duplicate_retries,
      )

      child_set = CandidateSet(children, predict_summary(models, children), np.zeros(len(children), dtype=int))
      population = _concat(parents, child_set)
      selection = environmental_selection(population, rvs, bounds, flag, config.population, rng, variant, pof_threshold)

   best = population.subset(selection.champions)
   best.rv = selection.champion_rvs

   span = problem.upper - problem.lower
   gap = cdist((best.X - problem.lower) / span, (archive.X - problem.lower) / span).min(axis=1)
   fresh = np.flatnonzero(gap >= config.duplicate_tolerance)
   logger.debug("SubEA produced %d champions, %d new", len(best), len(fresh))
   return best.subset(fresh)


def _concat(a: CandidateSet, b: CandidateSet) -> CandidateSet:
   sa, sb = a.summary, b.summary
   summary = SolutionSummary(
      np.vstack([sa.obj_mean, sb.obj_mean]),
      np.vstack([sa.obj_var, sb.obj_var]),
      np.vstack([sa.con_mean, sb.con_mean]),
      np.vstack([sa.con_var, sb.con_var]),
      np.concatenate([sa.pof, sb.pof]),
      np.concatenate([sa.cv_mean, sb.cv_mean]),
      np.concatenate([sa.cv_var, sb.cv_var]),
   )
   return CandidateSet(np.vstack([a.X, b.X]), summary, np.concatenate([a.rv, b.rv]))
