import numpy as np
from abc import ABC, abstractmethod
from utils.utils import nondominated_mask


class DomainError(ValueError):
   """Raised for decision vectors outside the box or invalid problem parameters."""


class UnknownProblemError(LookupError):
   """Raised when a problem name cannot be resolved."""


class EvaluatedSolution:
   """
   One true (expensive) evaluation: decision vector, objectives, constraints and its violation.
   """
   def __init__(self, x, F, G, eval_index: int):
      self.__x = np.array(x, dtype=float)
      self.__F = np.array(F, dtype=float)
      self.__G = np.array(G, dtype=float)
      if eval_index < 1:
         raise ValueError("eval_index is 1-based")
      self.__eval_index = int(eval_index)
      self.__cv = float(np.sum(np.maximum(self.__G, 0.0)))

      for array in (self.__x, self.__F, self.__G):
         array.setflags(write=False)

   @property
   def x(self) -> np.ndarray:
      return self.__x

   @property
   def F(self) -> np.ndarray:
      return self.__F

   @property
   def G(self) -> np.ndarray:
      return self.__G

   @property
   def cv(self) -> float:
      return self.__cv

   @property
   def feasible(self) -> bool:
      return self.__cv == 0.0

   @property
   def eval_index(self) -> int:
      return self.__eval_index

   def __repr__(self) -> str:
      return f"EvaluatedSolution(#{self.__eval_index}, F={np.round(self.__F, 4).tolist()}, cv={self.__cv:.4g})"


def stack_columns(*columns) -> np.ndarray:
   """
   Broadcasts objective or constraint columns against each other and stacks them on the last axis.
   """
   return np.stack(np.broadcast_arrays(*columns), axis=-1)


class ProblemDefinition(ABC):
   """
   Box-constrained CMOP: minimize F(x) subject to G(x) <= 0 for x in [lower, upper].

   Subclasses provide `_evaluate` for a batch of decision vectors and `_front_lines`,
   a dense family of candidate optimal lines used to build reference fronts.
   """
   M: int = 2
   p: int = 1

   def __init__(self, n: int = 10):
      if n < self.M:
         raise DomainError(f"{self.name} needs at least {self.M} variables, got {n}")
      self.n = int(n)
      self.lower = np.zeros(self.n)
      self.upper = np.ones(self.n)
      self.metadata: dict = {}

   @property
   def name(self) -> str:
      return type(self).__name__

   def evaluate_batch(self, X) -> tuple[np.ndarray, np.ndarray]:
      """
      Evaluates several decision vectors at once.

      Args:
         X: (k, n) decision vectors inside the box.

      Raises:
         DomainError: If a vector has the wrong length or leaves the box.

      Returns:
         Objective matrix (k, M) and constraint matrix (k, p).
      """
      X = np.atleast_2d(np.asarray(X, dtype=float))
      if X.shape[1] != self.n:
         raise DomainError(f"{self.name} expects {self.n} variables, got {X.shape[1]}")
      if np.any(X < self.lower) or np.any(X > self.upper) or not np.all(np.isfinite(X)):
         raise DomainError(f"decision vector outside the bounds of {self.name}")

      F, G = self._evaluate(X)
      return np.asarray(F, dtype=float).reshape(len(X), self.M), np.asarray(G, dtype=float).reshape(len(X), self.p)

   def reference_front(self, size: int = 1000) -> np.ndarray:
      """
      Samples the constrained Pareto front.

      Every line returned by `_front_lines` is walked from its best objective value outwards and
      contributes its first feasible point. The candidates are filtered for non-dominance and
      thinned to `size` points by farthest-point selection.

      Args:
         size: Number of points wanted.

      Returns:
         (k, M) mutually non-dominated points, k <= size.
      """
      lines, feasible = self._front_lines(size)
      has_feasible = feasible.any(axis=1)
      first = np.argmax(feasible, axis=1)
      rows = np.flatnonzero(has_feasible)
      points = lines[rows, first[rows]]

      points = np.unique(np.round(points, 12), axis=0)
      points = points[nondominated_mask(points)]
      return thin_front(points, size)

   @abstractmethod
   def _evaluate(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
      ...

   @abstractmethod
   def _front_lines(self, size: int) -> tuple[np.ndarray, np.ndarray]:
      """
      Returns objective vectors (lines, steps, M) and their feasibility (lines, steps).
      """
      ...

   def __repr__(self) -> str:
      return f"{self.name}(n={self.n}, M={self.M}, p={self.p})"


class PymooSuiteProblem(ProblemDefinition):
   """
   Suite problem whose true evaluation is delegated to the pymoo implementation.

   The box is taken from the pymoo instance, so it is not always the unit cube.
   Subclasses build the instance in `_backend` and keep `_front_lines` for
   reference-front sampling.
   """
   def __init__(self, n: int = 10):
      super().__init__(n)
      self.backend = self._backend()
      if self.backend.n_var != self.n:
         raise DomainError(f"{self.name} backend holds {self.backend.n_var} variables, expected {self.n}")
      self.lower = np.asarray(self.backend.xl, dtype=float).copy()
      self.upper = np.asarray(self.backend.xu, dtype=float).copy()

   @abstractmethod
   def _backend(self):
      ...

   def _evaluate(self, X):
      return self.backend.evaluate(X, return_values_of=["F", "G"])


def thin_front(points: np.ndarray, size: int) -> np.ndarray:
   """
   Picks `size` well spread points by greedy farthest-point selection.
   """
   if len(points) <= size:
      return points

   span = np.ptp(points, axis=0)
   span[span == 0] = 1.0
   scaled = (points - points.min(axis=0)) / span

   order = np.lexsort(scaled.T[::-1])
   chosen = [order[0]]
   distance = np.linalg.norm(scaled - scaled[order[0]], axis=1)
   for _ in range(size - 1):
      nxt = int(np.argmax(distance))
      chosen.append(nxt)
      distance = np.minimum(distance, np.linalg.norm(scaled - scaled[nxt], axis=1))

   chosen = np.sort(np.array(chosen))
   return points[chosen]


def evaluate(problem: ProblemDefinition, x, eval_index: int = 1) -> EvaluatedSolution:
   """
   Evaluates one decision vector.

   Raises:
      DomainError: If `x` leaves the problem bounds.
   """
   F, G = problem.evaluate_batch(np.asarray(x, dtype=float)[None, :])
   return EvaluatedSolution(x, F[0], G[0], eval_index)
