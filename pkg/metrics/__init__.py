from metrics.indicators import (
   MetricReport,
   evaluate_run,
   ffe_st,
   hypervolume,
   igd,
   igd_plus,
   normalize_front,
)
from metrics.statistics import (
   MetricsError,
   Outcome,
   PerformanceProfile,
   RankSumResult,
   penalize_infeasible_runs,
   performance_profile,
   wilcoxon_ranksum,
)

__all__ = [
   "MetricReport",
   "MetricsError",
   "Outcome",
   "PerformanceProfile",
   "RankSumResult",
   "evaluate_run",
   "ffe_st",
   "hypervolume",
   "igd",
   "igd_plus",
   "normalize_front",
   "penalize_infeasible_runs",
   "performance_profile",
   "wilcoxon_ranksum",
]
