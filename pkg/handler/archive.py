import numpy as np
from problems.problem import EvaluatedSolution
from utils.utils import nondominated_mask


class ArchiveManager:
   """
   Append-only store of every true evaluation of a run, plus the shadow archive of
   infill results that turned out dominated or infeasible.
   """
   def __init__(self, n: int, M: int, p: int):
      self.n, self.M, self.p = n, M, p
      self.__solutions: list[EvaluatedSolution] = []
      self.__shadow: list[np.ndarray] = []
      self.__shadow_active = False
      self.__cache: dict[str, np.ndarray] = {}

   def add(self, solution: EvaluatedSolution) -> None:
      """
      Appends a new evaluation.

      Raises:
         ValueError: If the evaluation index does not follow the last stored one.
      """
      expected = len(self.__solutions) + 1
      if solution.eval_index != expected:
         raise ValueError(f"expected evaluation #{expected}, got #{solution.eval_index}")
      self.__solutions.append(solution)
      self.__cache.clear()

   def _column(self, key: str) -> np.ndarray:
      if key not in self.__cache:
         if key == "cv":
            self.__cache[key] = np.array([s.cv for s in self.__solutions])
         elif key == "feasible":
            self.__cache[key] = np.array([s.feasible for s in self.__solutions], dtype=bool)
         else:
            attribute, width = {"X": ("x", self.n), "F": ("F", self.M), "G": ("G", self.p)}[key]
            rows = [getattr(s, attribute) for s in self.__solutions]
            self.__cache[key] = np.array(rows).reshape(len(rows), width)
      return self.__cache[key]

   @property
   def size(self) -> int:
      return len(self.__solutions)

   @property
   def empty(self) -> bool:
      return len(self.__solutions) == 0

   @property
   def solutions(self) -> tuple[EvaluatedSolution, ...]:
      return tuple(self.__solutions)

   @property
   def latest(self) -> EvaluatedSolution | None:
      return self.__solutions[-1] if self.__solutions else None

   @property
   def X(self) -> np.ndarray:
      return self._column("X")

   @property
   def F(self) -> np.ndarray:
      return self._column("F")

   @property
   def G(self) -> np.ndarray:
      return self._column("G")

   @property
   def cv(self) -> np.ndarray:
      return self._column("cv")

   @property
   def feasible(self) -> np.ndarray:
      return self._column("feasible")

   @property
   def has_feasible(self) -> bool:
      return bool(self.feasible.any()) if self.__solutions else False

   @property
   def min_cv(self) -> float:
      return float(self.cv.min())

   @property
   def feasible_front(self) -> np.ndarray:
      """Objective vectors of the feasible non-dominated set."""
      F = self.F[self.feasible]
      if len(F) == 0:
         return np.empty((0, self.M))
      return F[nondominated_mask(F)]

   def first_feasible_index(self) -> int | None:
      for solution in self.__solutions:
         if solution.feasible:
            return solution.eval_index
      return None

   # Shadow archive

   @property
   def shadow_active(self) -> bool:
      return self.__shadow_active

   def activate_shadow(self, seeds: np.ndarray | None = None) -> None:
      self.__shadow_active = True
      if seeds is not None:
         for point in np.atleast_2d(seeds):
            self.__shadow.append(np.array(point, dtype=float))

   def add_shadow(self, point) -> None:
      if not self.__shadow_active:
         raise RuntimeError("shadow archive is inactive until a feasible solution exists")
      self.__shadow.append(np.array(point, dtype=float))

   @property
   def shadow(self) -> np.ndarray:
      if not self.__shadow:
         return np.empty((0, self.M))
      return np.array(self.__shadow)

   @property
   def shadow_size(self) -> int:
      return len(self.__shadow)
