"""
Cross-run statistics: the penalty for runs without a feasible solution, the rank-sum
comparison against a baseline and performance-profile curves.
"""
from dataclasses import dataclass
from enum import Enum
import logging
import numpy as np
import pandas as pd
from scipy.stats import mannwhitneyu

logger = logging.getLogger(__name__)

# Added to (or, for HV, subtracted from) the worst observed value of a problem
PENALTY_MARGIN = 0.1
MAXIMIZED = frozenset({"hv"})


class MetricsError(ValueError):
   """Raised when a statistic has no data to work from."""


class Outcome(Enum):
   WIN = "win"
   TIE = "tie"
   LOSS = "loss"


@dataclass(frozen=True)
class RankSumResult:
   outcome: Outcome
   p_value: float


def penalize_infeasible_runs(values, metric: str) -> np.ndarray:
   """
   Fills the entries of runs that found no feasible solution (NaN).

   IGD-type entries become the worst observed value plus 0.1; HV entries the worst observed
   value minus 0.1, floored at 0.

   Args:
      values: (algorithms, runs) metric values of one problem.
      metric: Metric name; "hv" is treated as maximized.

   Raises:
      MetricsError: If no run of any algorithm has a value.

   Returns:
      A filled copy.
   """
   filled = np.array(values, dtype=float, copy=True)
   missing = np.isnan(filled)
   if not missing.any():
      return filled
   if missing.all():
      raise MetricsError(f"no observed {metric} value to derive a penalty from")

   if metric in MAXIMIZED:
      filled[missing] = max(np.nanmin(filled) - PENALTY_MARGIN, 0.0)
   else:
      filled[missing] = np.nanmax(filled) + PENALTY_MARGIN
   return filled


def wilcoxon_ranksum(sample_a, sample_b, alpha: float = 0.05, minimize: bool = True) -> RankSumResult:
   """
   Two-sided rank-sum test of `sample_a` against `sample_b`.

   The outcome is from `sample_a`'s point of view: a significant difference is a win when its
   median is better. Small tie-free samples use the exact distribution, larger ones the
   tie-corrected normal approximation.

   Returns:
      RankSumResult with the outcome and the p-value.
   """
   a = np.asarray(sample_a, dtype=float)
   b = np.asarray(sample_b, dtype=float)
   if len(a) == 0 or len(b) == 0:
      raise MetricsError("rank-sum test needs two nonempty samples")

   both = np.concatenate([a, b])
   if np.all(both == both[0]):
      return RankSumResult(Outcome.TIE, 1.0)

   p_value = float(mannwhitneyu(a, b, alternative="two-sided", method="auto").pvalue)
   if p_value >= alpha:
      return RankSumResult(Outcome.TIE, p_value)

   diff = np.median(a) - np.median(b)
   if diff == 0:
      diff = a.mean() - b.mean()
   if diff == 0:
      return RankSumResult(Outcome.TIE, p_value)
   better = diff < 0 if minimize else diff > 0
   return RankSumResult(Outcome.WIN if better else Outcome.LOSS, p_value)


@dataclass(frozen=True)
class PerformanceProfile:
   """Per-instance performance ratios of each algorithm to the best one on that instance."""
   algorithms: tuple[str, ...]
   ratios: np.ndarray

   def rho(self, lam: float) -> np.ndarray:
      """Fraction of instances each algorithm solves within ratio `lam`."""
      return np.mean(self.ratios <= lam, axis=0)

   def breakpoints(self) -> np.ndarray:
      finite = self.ratios[np.isfinite(self.ratios)]
      return np.unique(np.concatenate([[1.0], finite]))

   def to_frame(self) -> pd.DataFrame:
      lams = self.breakpoints()
      rows = [[lam, *self.rho(lam)] for lam in lams]
      return pd.DataFrame(rows, columns=["lambda", *self.algorithms])


def performance_profile(values, algorithms, maximize: bool = False) -> PerformanceProfile:
   """
   Performance ratios from a table of mean metric values.

   For minimized metrics the ratio is value / best. Tables with nonpositive entries are
   shifted first so their smallest entry becomes 1e-3 of the table's range. For maximized
   metrics the ratio is best / value, and a nonpositive value never counts as solved.

   Args:
      values: (instances, algorithms) mean metric values.
      algorithms: Column names.
      maximize: Whether larger is better.
   """
   values = np.atleast_2d(np.asarray(values, dtype=float))
   if values.shape[1] != len(algorithms):
      raise MetricsError("one column per algorithm expected")
   if np.isnan(values).any():
      raise MetricsError("performance profiles need complete tables; penalize missing runs first")

   if maximize:
      best = values.max(axis=1, keepdims=True)
      with np.errstate(divide="ignore", invalid="ignore"):
         ratios = np.where(values > 0, best / np.where(values > 0, values, 1.0), np.inf)
      ratios[(best <= 0).ravel()] = 1.0
   else:
      low = values.min()
      if low <= 0:
         span = values.max() - low
         offset = 1e-3 * span if span > 0 else 1.0
         logger.debug("Shifting profile table by %.4g for nonpositive entries", offset - low)
         values = values - low + offset
      ratios = values / values.min(axis=1, keepdims=True)

   return PerformanceProfile(tuple(algorithms), ratios)
