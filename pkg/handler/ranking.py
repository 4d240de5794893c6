"""
Orderings of predicted solutions inside one reference-vector cluster (or the whole
candidate set during infill). Index 0 of every ordering is the preferred member.
"""
import numpy as np
from handler.config import SearchFlag, Variant
from handler.probability import (
   SolutionSummary,
   constraint_pof,
   dominance_matrix,
   mean_pairwise,
   pcd_matrix,
)


def _location(summary: SolutionSummary, projected: bool) -> np.ndarray:
   if projected:
      return summary.proj_mean
   return summary.obj_mean.sum(axis=1)


def dominance_scores(summary: SolutionSummary, projected: bool) -> np.ndarray:
   return mean_pairwise(dominance_matrix(summary, summary, projected))


def pcd_scores(summary: SolutionSummary, projected: bool) -> np.ndarray:
   return mean_pairwise(pcd_matrix(summary, summary, projected))


def rank_pcd(summary: SolutionSummary, flag: SearchFlag, projected: bool = True) -> np.ndarray:
   """
   Orders members by mean pairwise PCD (Constrained) or mean pairwise dominance probability
   (Unconstrained), best first.

   Ties fall to the lower predicted CV mean (Constrained only), then the lower objective
   location, then input order.
   """
   index = np.arange(len(summary))
   location = _location(summary, projected)
   if flag is SearchFlag.UNCONSTRAINED:
      scores = dominance_scores(summary, projected)
      return np.lexsort((index, location, -scores))

   scores = pcd_scores(summary, projected)
   return np.lexsort((index, location, summary.cv_mean, -scores))


def rank_v1(summary: SolutionSummary, projected: bool = True, threshold: float = 0.99) -> np.ndarray:
   """
   Lexicographic ordering with a probability-of-feasibility threshold.

   Members whose every constraint reaches `threshold` come first, ordered by mean pairwise
   dominance probability among themselves. The rest follow, ordered by PoF product
   (descending), count of constraints with a nonpositive predicted mean (descending) and
   predicted CV mean (ascending). Remaining ties keep input order.

   Args:
      summary: Cluster members.
      projected: Whether dominance uses the projected distributions.
      threshold: Per-constraint PoF needed to count as feasible.

   Returns:
      Member indices, best first.
   """
   index = np.arange(len(summary))
   passes = np.all(constraint_pof(summary.con_mean, summary.con_var) >= threshold, axis=1)

   feasible = index[passes]
   ordered = []
   if len(feasible):
      scores = dominance_scores(summary.subset(feasible), projected)
      ordered.extend(feasible[np.lexsort((feasible, -scores))])

   rest = index[~passes]
   if len(rest):
      satisfied = np.sum(summary.con_mean[rest] <= 0, axis=1)
      keys = (rest, summary.cv_mean[rest], -satisfied, -summary.pof[rest])
      ordered.extend(rest[np.lexsort(keys)])

   return np.array(ordered, dtype=int)


def rank_v2(summary: SolutionSummary, projected: bool = True) -> np.ndarray:
   """PoF times mean pairwise dominance probability, descending; ties keep input order."""
   scores = summary.pof * dominance_scores(summary, projected)
   return np.argsort(-scores, kind="stable")


def rank_cluster(
   summary: SolutionSummary,
   variant: Variant,
   flag: SearchFlag,
   projected: bool = True,
   pof_threshold: float = 0.99,
) -> np.ndarray:
   """
   Ordering used by environmental selection and by infill scoring.

   Unconstrained search ignores the constraints for every variant; otherwise V1 and V2
   replace the PCD ranking with their own.
   """
   if flag is SearchFlag.CONSTRAINED and variant is Variant.V1:
      return rank_v1(summary, projected, pof_threshold)
   if flag is SearchFlag.CONSTRAINED and variant is Variant.V2:
      return rank_v2(summary, projected)
   return rank_pcd(summary, flag, projected)
