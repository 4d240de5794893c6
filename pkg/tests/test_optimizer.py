import numpy as np
import pandas as pd
import pytest
from handler.archive import ArchiveManager
from handler.config import KrigingConfig, OptimizerConfig, SearchFlag, SubEAConfig, Variant
from handler.kriging import KrigingFitError, SurrogateSet
from handler.optimizer import Optimizer, OptimizerError, run, update_search_flag
from metrics import evaluate_run
from problems import get_problem
from problems.problem import EvaluatedSolution, ProblemDefinition, stack_columns


class ChainProblem(ProblemDefinition):
   """
   Both objectives equal the mean of x, so the archive forms one dominance chain. The single
   constraint is never satisfied and its violation rises (slope +1) or falls (slope -1) along
   the chain.
   """
   def __init__(self, n: int = 2, slope: float = 1.0):
      super().__init__(n)
      self.slope = slope

   def _evaluate(self, X):
      s = X.mean(axis=1)
      g = 1 + s if self.slope > 0 else 10 - s
      return stack_columns(s, s), g[:, None]

   def _front_lines(self, size):
      return np.zeros((1, 1, self.M)), np.ones((1, 1), dtype=bool)


def small_config(budget: int, variant: Variant = Variant.PSCMOEA, **overrides) -> OptimizerConfig:
   return OptimizerConfig(
      max_evaluations=budget,
      variant=variant,
      rv_spacing=19,
      subea=SubEAConfig(population=20, generations=3),
      kriging=KrigingConfig(starts=1),
      **overrides,
   )


def archive_with(cvs):
   archive = ArchiveManager(1, 2, 1)
   for cv in cvs:
      archive.add(EvaluatedSolution([0.5], [0.0, 0.0], [cv], archive.size + 1))
   return archive


def test_update_search_flag_starts_unconstrained_search():
   archive = archive_with([0.4, 0.2])
   assert update_search_flag(SearchFlag.CONSTRAINED, 0.3, None, archive, Variant.PSCMOEA) is SearchFlag.UNCONSTRAINED
   assert update_search_flag(SearchFlag.CONSTRAINED, 0.27, None, archive, Variant.PSCMOEA) is SearchFlag.UNCONSTRAINED
   assert update_search_flag(SearchFlag.CONSTRAINED, 0.2, None, archive, Variant.PSCMOEA) is SearchFlag.CONSTRAINED
   assert update_search_flag(SearchFlag.CONSTRAINED, None, None, archive, Variant.PSCMOEA) is SearchFlag.CONSTRAINED


def test_update_search_flag_keeps_or_reverts():
   archive = archive_with([0.4, 0.2])
   latest = archive.latest
   assert update_search_flag(SearchFlag.UNCONSTRAINED, 0.0, latest, archive, Variant.PSCMOEA) is SearchFlag.UNCONSTRAINED

   archive = archive_with([0.2, 0.4])
   latest = archive.latest
   assert update_search_flag(SearchFlag.UNCONSTRAINED, 0.9, latest, archive, Variant.PSCMOEA) is SearchFlag.CONSTRAINED


def test_update_search_flag_constrained_once_feasible():
   archive = archive_with([0.4, -1.0])
   assert update_search_flag(SearchFlag.UNCONSTRAINED, 0.9, archive.latest, archive, Variant.PSCMOEA) is SearchFlag.CONSTRAINED


def test_update_search_flag_without_switching():
   archive = archive_with([0.4, 0.2])
   assert update_search_flag(SearchFlag.CONSTRAINED, 1.0, None, archive, Variant.V3) is SearchFlag.CONSTRAINED


def test_budget_must_cover_initial_sample():
   with pytest.raises(ValueError):
      Optimizer(ChainProblem(), small_config(20))


def test_initial_sample_only_run():
   problem = get_problem("MW1", 2)
   result = run(problem, small_config(21), np.random.default_rng(0))
   assert result.trace == []
   assert result.archive.size == 21
   assert result.initial_size == 21
   assert result.ffe is None or 1 <= result.ffe <= 21


def test_run_fills_the_budget():
   problem = get_problem("MW1", 2)
   result = run(problem, small_config(25), np.random.default_rng(1))
   assert result.archive.size == 25
   assert [row["fe"] for row in result.trace] == [22, 23, 24, 25]
   assert [s.eval_index for s in result.archive.solutions] == list(range(1, 26))
   assert all(row["mode"] in {"ranked", "two_stage", "random"} for row in result.trace)


def test_runs_are_reproducible():
   problem = get_problem("MW1", 2)
   first = run(problem, small_config(25), np.random.default_rng(7))
   second = run(problem, small_config(25), np.random.default_rng(7))
   assert pd.DataFrame(first.trace).equals(pd.DataFrame(second.trace))
   np.testing.assert_array_equal(first.archive.X, second.archive.X)


def test_negative_correlation_never_switches():
   result = run(ChainProblem(slope=-1.0), small_config(26), np.random.default_rng(3))
   assert result.unconstrained_iterations == 0
   np.testing.assert_allclose([row["tau"] for row in result.trace], -1.0)


def test_positive_correlation_switches_early():
   result = run(ChainProblem(slope=1.0), small_config(26), np.random.default_rng(3))
   assert result.trace[0]["tau"] == pytest.approx(1.0)
   assert SearchFlag.UNCONSTRAINED.label in result.flag_history[:3]


def test_disabled_switching_matches_default_without_switches():
   problem = ChainProblem(slope=-1.0)
   default = run(problem, small_config(26), np.random.default_rng(5))
   disabled = run(problem, small_config(26, Variant.V3), np.random.default_rng(5))
   assert default.unconstrained_iterations == 0
   assert pd.DataFrame(default.trace).equals(pd.DataFrame(disabled.trace))


def test_disabled_switching_stays_constrained():
   result = run(ChainProblem(slope=1.0), small_config(26, Variant.V3), np.random.default_rng(3))
   assert result.unconstrained_iterations == 0


def test_model_failure_raises(monkeypatch):
   def failing_fit(self, *args, **kwargs):
      raise KrigingFitError("singular")

   monkeypatch.setattr(SurrogateSet, "fit", failing_fit)
   optimizer = Optimizer(get_problem("MW1", 2), small_config(25), np.random.default_rng(0))
   optimizer.initialize()
   with pytest.raises(OptimizerError):
      optimizer.step()


def test_shadow_active_once_feasible():
   problem = get_problem("MW1", 2)
   result = run(problem, small_config(30), np.random.default_rng(2))
   archive = result.archive
   assert archive.shadow_active == archive.has_feasible
   if archive.has_feasible:
      assert all(row["mode"] != "ranked" for row in result.trace if row["fe"] > result.ffe)


SEEDS = range(1, 12)


@pytest.mark.slow
def test_mw3_is_feasible_in_every_seed():
   problem = get_problem("MW3", 10)
   ffe = [run(problem, OptimizerConfig(max_evaluations=300), np.random.default_rng(seed)).ffe for seed in SEEDS]
   assert all(value is not None for value in ffe)
   assert np.median(ffe) <= 160


@pytest.mark.slow
def test_mw3_reaches_the_front():
   problem = get_problem("MW3", 10)
   front = problem.reference_front(1000)
   igd = [
      evaluate_run(run(problem, OptimizerConfig(max_evaluations=500), np.random.default_rng(seed)), front, 500).igd
      for seed in SEEDS
   ]
   assert np.median(igd) <= 0.06


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_lircmop5_feasible_at_first_evaluation(seed):
   result = run(get_problem("LIRCMOP5", 10), OptimizerConfig(max_evaluations=109), np.random.default_rng(seed))
   assert result.ffe == 1


@pytest.mark.slow
def test_dascmop1_finds_feasible_solutions_early():
   problem = get_problem("DASCMOP1", 10)
   ffe = [run(problem, OptimizerConfig(max_evaluations=135), np.random.default_rng(seed)).ffe for seed in SEEDS]
   assert all(value is not None for value in ffe)
   assert np.median(ffe) <= 25
