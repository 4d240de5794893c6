import hashlib
import numpy as np
from pymoo.util.nds.non_dominated_sorting import NonDominatedSorting
from scipy.stats import kendalltau, rankdata


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
   """
   Pareto dominance for minimization: `a` is no worse everywhere and strictly better somewhere.
   """
   a = np.asarray(a, dtype=float)
   b = np.asarray(b, dtype=float)
   return bool(np.all(a <= b) and np.any(a < b))


def dominated_by(points: np.ndarray, reference: np.ndarray, chunk: int = 512) -> np.ndarray:
   """
   Marks every row of `points` that is dominated by at least one row of `reference`.

   Args:
      points: (n, M) objective vectors to test.
      reference: (k, M) objective vectors acting as dominators.
      chunk: number of rows of `points` handled per vectorized block.

   Returns:
      Boolean array of length n.
   """
   points = np.atleast_2d(np.asarray(points, dtype=float))
   reference = np.asarray(reference, dtype=float)
   mask = np.zeros(len(points), dtype=bool)
   if reference.size == 0 or points.size == 0:
      return mask
   reference = np.atleast_2d(reference)

   for start in range(0, len(points), chunk):
      block = points[start:start + chunk]
      no_worse = np.all(reference[:, None, :] <= block[None, :, :], axis=2)
      better = np.any(reference[:, None, :] < block[None, :, :], axis=2)
      mask[start:start + chunk] = np.any(no_worse & better, axis=0)
   return mask


def nondominated_mask(F: np.ndarray) -> np.ndarray:
   F = np.asarray(F, dtype=float)
   if F.size == 0:
      return np.zeros(0, dtype=bool)
   return ~dominated_by(F, F)


def nondominated_sort(F: np.ndarray) -> np.ndarray:
   """
   Pareto front ranks computed by pymoo's non-dominated sorting.

   Args:
      F: (n, M) objective vectors.

   Returns:
      Integer array of ranks, 1 for the non-dominated set.
   """
   F = np.atleast_2d(np.asarray(F, dtype=float))
   if len(F) == 0:
      return np.zeros(0, dtype=int)
   _, rank = NonDominatedSorting().do(F, return_rank=True)
   return np.asarray(rank, dtype=int) + 1


def kendall_tau(rank_a, rank_b) -> float:
   """
   Tie-corrected Kendall tau-b between two rankings.

   Raises:
      ValueError: If the rankings differ in length or hold fewer than two entries.

   Returns:
      Tau in [-1, 1]; 0 when either ranking is constant.
   """
   rank_a = np.asarray(rank_a, dtype=float)
   rank_b = np.asarray(rank_b, dtype=float)
   if rank_a.shape != rank_b.shape or rank_a.size < 2:
      raise ValueError("Kendall tau needs two rankings of equal length >= 2")

   tau = kendalltau(rank_a, rank_b).statistic
   if np.isnan(tau):
      return 0.0
   return float(tau)


def constraint_front_correlation(F: np.ndarray, cv: np.ndarray) -> float:
   """
   Correlation between the CV ordering (ascending) and the non-dominated front ordering.
   """
   F = np.atleast_2d(np.asarray(F, dtype=float))
   if len(F) < 2:
      return 0.0
   return kendall_tau(rankdata(cv), nondominated_sort(F))


def derive_seed(*parts) -> int:
   """
   Stable 63-bit seed from arbitrary key parts (problem name, seed, ...).
   """
   key = "|".join(str(part) for part in parts).encode("utf-8")
   return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def format_duration(seconds: float) -> str:
   """
   Formats a wall time as hh:mm:ss, or mm:ss below one hour.
   """
   if seconds is None or seconds < 0:
      return "-"

   m, s = divmod(int(round(seconds)), 60)
   h, m = divmod(m, 60)
   if h:
      return f"{h}:{m:02d}:{s:02d}"
   return f"{m}:{s:02d}"
