from dataclasses import dataclass, field
import logging
import time
import numpy as np
from handler.archive import ArchiveManager
from handler.config import OptimizerConfig, SearchFlag, Variant
from handler.decomposition import NormalizationBounds, compute_bounds, generate_mirrored_rvs
from handler.infill import (
   RVTagState,
   build_reference_set,
   random_infill,
   select_infill_all_infeasible,
   shadow_seeds,
   two_stage_infill,
   update_shadow,
)
from handler.kriging import KrigingFitError, ModelDegeneracyError, SurrogateSet
from handler.subea import run_subea
from problems.problem import EvaluatedSolution, ProblemDefinition
from problems.sampling import lhs_sample
from utils.utils import constraint_front_correlation, kendall_tau, nondominated_sort

__all__ = [
   "Optimizer",
   "OptimizerError",
   "RunResult",
   "RunState",
   "kendall_tau",
   "nondominated_sort",
   "run",
   "update_search_flag",
]

logger = logging.getLogger(__name__)


class OptimizerError(RuntimeError):
   """Raised when the surrogate models cannot be trained even at the escalated nugget."""


@dataclass
class RunState:
   archive: ArchiveManager
   bounds: NormalizationBounds | None = None
   search_flag: SearchFlag = SearchFlag.CONSTRAINED
   tags: RVTagState = field(default_factory=RVTagState)
   initial_size: int = 0
   trace: list[dict] = field(default_factory=list)

   @property
   def fe(self) -> int:
      return self.archive.size


@dataclass
class RunResult:
   problem: str
   variant: Variant
   archive: ArchiveManager
   trace: list[dict]
   initial_size: int
   final_flag: SearchFlag
   wall_time: float = 0.0

   @property
   def flag_history(self) -> list[str]:
      return [row["search_flag"] for row in self.trace]

   @property
   def unconstrained_iterations(self) -> int:
      return sum(flag == SearchFlag.UNCONSTRAINED.label for flag in self.flag_history)

   @property
   def ffe(self) -> int | None:
      return self.archive.first_feasible_index()


def update_search_flag(
   flag: SearchFlag,
   tau: float | None,
   latest: EvaluatedSolution | None,
   archive: ArchiveManager,
   variant: Variant,
   threshold: float = 0.27,
) -> SearchFlag:
   """
   Next search flag after a true evaluation.

   Unconstrained search needs a fully infeasible archive and a switching variant. It
   continues while the latest evaluation holds the archive's minimum CV and otherwise falls
   back to Constrained; from Constrained it starts once tau reaches `threshold`.
   """
   if archive.has_feasible or not variant.switching_enabled:
      return SearchFlag.CONSTRAINED

   if flag is SearchFlag.UNCONSTRAINED:
      if latest is not None and latest.cv <= archive.min_cv:
         return SearchFlag.UNCONSTRAINED
      return SearchFlag.CONSTRAINED

   if tau is not None and tau >= threshold:
      return SearchFlag.UNCONSTRAINED
   return SearchFlag.CONSTRAINED


class Optimizer:
   """
   Steady-state loop: train the models, search the surrogate landscape, pick one infill,
   evaluate it and update the archive and the flags.
   """
   def __init__(self, problem: ProblemDefinition, config: OptimizerConfig | None = None, rng: np.random.Generator | None = None):
      self.problem = problem
      self.config = config or OptimizerConfig()
      self.config.validate(problem.n)
      self.__rng = rng if rng is not None else np.random.default_rng()

      self.__state = RunState(ArchiveManager(problem.n, problem.M, problem.p))
      self.__models = SurrogateSet(problem.lower, problem.upper, self.config.kriging)
      self.__rvs = generate_mirrored_rvs(problem.M, self.config.spacing(problem.M))
      self.__tau: float | None = None

   @property
   def state(self) -> RunState:
      return self.__state

   @property
   def archive(self) -> ArchiveManager:
      return self.__state.archive

   @property
   def search_flag(self) -> SearchFlag:
      return self.__state.search_flag

   @property
   def rv_tag_flag(self) -> bool:
      return self.__state.tags.flag

   @property
   def done(self) -> bool:
      return self.__state.fe >= self.config.max_evaluations

   def run(self) -> RunResult:
      """
      Runs the whole budget.

      Raises:
         OptimizerError: If model training fails at the escalated nugget.

      Returns:
         RunResult with the archive and one trace row per infill.
      """
      started = time.perf_counter()
      self.initialize()
      while not self.done:
         self.step()

      state = self.__state
      result = RunResult(
         self.problem.name, self.config.variant, state.archive, state.trace,
         state.initial_size, state.search_flag, time.perf_counter() - started,
      )
      logger.info(
         "%s/%s finished: %d evaluations, FFE=%s, %d unconstrained iterations",
         result.problem, result.variant.value, state.fe, result.ffe, result.unconstrained_iterations,
      )
      return result

   def initialize(self) -> None:
      state = self.__state
      size = self.config.initial_size(self.problem.n)
      X = lhs_sample(size, self.problem, self.__rng)
      for x in X:
         self.__evaluate(x)
      state.initial_size = size

      if state.archive.has_feasible:
         state.archive.activate_shadow(shadow_seeds(state.archive.F, state.archive.feasible))
      self.__refresh_flag(latest=None)
      logger.debug("Initial sample of %d, %d feasible", size, int(state.archive.feasible.sum()))

   def step(self) -> EvaluatedSolution:
      """
      One iteration of the loop. The current flags decide how the infill is chosen:
      ranking among candidates while nothing is feasible, two-stage selection afterwards.
      """
      state = self.__state
      archive = state.archive
      self.__fit_models()

      bounds = compute_bounds(archive.F, archive.feasible)
      bounds_changed = state.tags.observe_bounds(bounds)
      state.bounds = bounds

      config = self.config
      candidates = run_subea(
         archive, self.__models, bounds, state.search_flag, config.subea, self.__rng,
         self.problem, self.__rvs, config.variant, config.pof_threshold,
      )

      chosen_rv = -1
      if len(candidates) == 0:
         mode = "random"
         x = random_infill(archive, self.problem, self.__rng, config.epsilon)
      elif not archive.has_feasible:
         mode = "ranked"
         index = select_infill_all_infeasible(candidates, state.tags, state.search_flag, config.variant, config.pof_threshold)
         x, chosen_rv = candidates.X[index], int(candidates.rv[index])
      else:
         mode = "two_stage"
         reference = build_reference_set(archive.F, archive.feasible)
         index = two_stage_infill(candidates, reference, archive.shadow, bounds)
         x, chosen_rv = candidates.X[index], int(candidates.rv[index])

      flag_used = state.search_flag
      tau_used = self.__tau
      had_feasible = archive.has_feasible
      solution = self.__evaluate(x, bounds)

      if archive.has_feasible and not had_feasible:
         logger.info("First feasible solution at evaluation %d", solution.eval_index)
         state.tags.reset()
         archive.activate_shadow(shadow_seeds(archive.F, archive.feasible))

      self.__refresh_flag(latest=solution)

      row = {
         "fe": solution.eval_index,
         "search_flag": flag_used.label,
         "tau": np.nan if tau_used is None else tau_used,
         "rv_tag_flag": state.tags.flag,
         "bounds_changed": bounds_changed,
         "mode": mode,
         "candidates": len(candidates),
         "chosen_rv": chosen_rv,
         "cv": solution.cv,
         "feasible": solution.feasible,
         "shadow_size": archive.shadow_size,
      }
      for i, value in enumerate(solution.F, start=1):
         row[f"f{i}"] = float(value)
      state.trace.append(row)
      logger.debug("FE %d: %s infill via %s, cv=%.4g", solution.eval_index, flag_used.label, mode, solution.cv)
      return solution

   def __evaluate(self, x, bounds: NormalizationBounds | None = None) -> EvaluatedSolution:
      archive = self.__state.archive
      F, G = self.problem.evaluate_batch(np.atleast_2d(x))
      solution = EvaluatedSolution(x, F[0], G[0], archive.size + 1)
      if bounds is not None:
         update_shadow(archive, solution.F, solution.feasible, bounds)
      archive.add(solution)
      return solution

   def __refresh_flag(self, latest: EvaluatedSolution | None) -> None:
      state = self.__state
      archive = state.archive
      if archive.has_feasible:
         self.__tau = None
      else:
         self.__tau = constraint_front_correlation(archive.F, archive.cv)
      state.search_flag = update_search_flag(
         state.search_flag, self.__tau, latest, archive, self.config.variant, self.config.tau_threshold,
      )

   def __fit_models(self) -> None:
      archive = self.__state.archive
      kriging = self.config.kriging
      error = None
      for nugget in (None, kriging.max_nugget):
         try:
            self.__models.fit(archive.X, archive.F, archive.G, self.__rng, nugget=nugget)
            return
         except (KrigingFitError, ModelDegeneracyError) as e:
            if nugget is None:
               logger.warning("Model training failed at FE %d (%s), retrying with nugget %.1e", archive.size, e, kriging.max_nugget)
            error = e
      raise OptimizerError(f"{self.problem.name}: model training failed at FE {archive.size}: {error}") from error


def run(problem: ProblemDefinition, config: OptimizerConfig | None = None, rng: np.random.Generator | None = None) -> RunResult:
   return Optimizer(problem, config, rng).run()
