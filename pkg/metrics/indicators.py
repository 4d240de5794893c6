"""
Front-quality indicators, computed in the objective space normalized by the ideal and nadir
points of the reference front.
"""
from dataclasses import asdict, dataclass
import numpy as np
from pymoo.indicators.hv import HV
from pymoo.indicators.igd import IGD
from pymoo.indicators.igd_plus import IGDPlus

# Hypervolume reference coordinate in normalized space
HV_REFERENCE = 1.1


@dataclass(frozen=True)
class MetricReport:
   igd: float
   igd_plus: float
   hv: float
   ffe: int
   st: bool

   def to_dict(self) -> dict:
      return asdict(self)


def igd(solutions, reference) -> float:
   """
   Mean distance from every reference point to its nearest solution (pymoo IGD).

   Raises:
      ValueError: If `solutions` is empty.
   """
   solutions = np.atleast_2d(np.asarray(solutions, dtype=float))
   reference = np.atleast_2d(np.asarray(reference, dtype=float))
   if solutions.size == 0:
      raise ValueError("IGD needs at least one solution")
   return float(IGD(reference).do(solutions))


def igd_plus(solutions, reference) -> float:
   """
   IGD with the dominance-aware distance: only the amounts by which a solution is worse
   than the reference point count.

   Raises:
      ValueError: If `solutions` is empty.
   """
   solutions = np.atleast_2d(np.asarray(solutions, dtype=float))
   reference = np.atleast_2d(np.asarray(reference, dtype=float))
   if solutions.size == 0:
      raise ValueError("IGD+ needs at least one solution")
   return float(IGDPlus(reference).do(solutions))


def hypervolume(solutions, reference_point=None) -> float:
   """
   Volume dominated by the solutions and bounded by the reference point, computed by pymoo.

   Args:
      solutions: (k, M) objective vectors.
      reference_point: Defaults to 1.1 in every coordinate.

   Returns:
      Nonnegative volume; 0 for an empty set or when no point beats the reference point.
   """
   solutions = np.asarray(solutions, dtype=float)
   if solutions.size == 0:
      return 0.0
   solutions = np.atleast_2d(solutions)
   M = solutions.shape[1]
   ref = np.full(M, HV_REFERENCE) if reference_point is None else np.asarray(reference_point, dtype=float)

   inside = solutions[np.all(solutions < ref, axis=1)]
   if len(inside) == 0:
      return 0.0
   return float(HV(ref_point=ref).do(inside))


def normalize_front(points, reference_front) -> np.ndarray:
   """Scales objective vectors by the ideal and nadir of the reference front."""
   reference_front = np.atleast_2d(np.asarray(reference_front, dtype=float))
   ideal = reference_front.min(axis=0)
   span = reference_front.max(axis=0) - ideal
   span = np.where(span > 0, span, 1.0)
   return (np.atleast_2d(np.asarray(points, dtype=float)) - ideal) / span


def ffe_st(feasible, budget: int) -> tuple[int, bool]:
   """
   First feasible evaluation and success flag from the per-evaluation feasibility sequence.

   Without a feasible evaluation the FFE is the budget and the flag is False.
   """
   feasible = np.asarray(feasible, dtype=bool)
   hits = np.flatnonzero(feasible)
   if len(hits) == 0:
      return int(budget), False
   return int(hits[0]) + 1, True


def evaluate_run(result, reference_front, budget: int | None = None) -> MetricReport:
   """
   Scores a finished run against the reference front.

   Indicators use the run's feasible non-dominated set; a run with no feasible solution
   reports NaN for them, to be filled by the penalty rule during aggregation.
   """
   archive = result.archive
   budget = budget if budget is not None else archive.size
   ffe, st = ffe_st(archive.feasible, budget)
   if not st:
      return MetricReport(np.nan, np.nan, np.nan, ffe, st)

   reference = normalize_front(reference_front, reference_front)
   front = normalize_front(archive.feasible_front, reference_front)
   return MetricReport(igd(front, reference), igd_plus(front, reference), hypervolume(front), ffe, st)
