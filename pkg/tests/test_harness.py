import json
import os
import warnings
import pandas as pd
import pytest
from harness import ExperimentConfig, Harness, HarnessError, run_cell
from handler.archive import ArchiveManager
from handler.config import SearchFlag, Variant
from handler.optimizer import RunResult
from harness.harness import cell_dir, parse_seeds, trace_frame
from problems.problem import EvaluatedSolution


def small_experiment(out, **overrides) -> ExperimentConfig:
   # Budget equal to the initial sample (11 * dim - 1), so no models are trained
   settings = {"problems": "MW1", "variants": "pscmoea", "seeds": "1", "budget": 21, "dim": 2, "out": str(out)}
   settings.update(overrides)
   return ExperimentConfig().merged(settings)


def write_summary(directory, problem, variant, seed, igd, hv=0.5, ffe=10, status="ok"):
   path = cell_dir(str(directory), problem, variant, seed)
   os.makedirs(path, exist_ok=True)
   summary = {
      "problem": problem, "variant": variant, "seed": seed, "status": status, "budget": 500,
      "igd": igd, "igd_plus": igd, "hv": hv, "ffe": ffe, "st": igd is not None, "unconstrained_iterations": 0,
   }
   with open(os.path.join(path, "summary.json"), "w", encoding="utf-8") as f:
      json.dump(summary, f)


@pytest.fixture
def harness(tmp_path):
   return Harness(str(tmp_path / "missing.env"))


def test_parse_seeds():
   assert parse_seeds("1..4") == [1, 2, 3, 4]
   assert parse_seeds("1,4,7") == [1, 4, 7]
   assert parse_seeds("1..3, 10") == [1, 2, 3, 10]
   assert parse_seeds([5, 6]) == [5, 6]


def test_experiment_config_merge():
   config = ExperimentConfig().merged({"problems": "mw3, dascmop1", "variants": "PSCMOEA,V3", "seeds": "1..3", "budget": None})
   assert config.problems == ["MW3", "DASCMOP1"]
   assert config.variants == ["pscmoea", "v3"]
   assert config.seeds == [1, 2, 3]
   assert config.budget == 500
   assert len(config.cells()) == 12
   config = config.merged({"subea": {"population": 20}}).merged({"subea": {"generations": 5}})
   assert config.subea == {"population": 20, "generations": 5}
   with pytest.raises(HarnessError):
      ExperimentConfig().merged({"budgets": 10})


@pytest.mark.parametrize("overrides", [
   {"problems": "ZDT1"},
   {"variants": "v9"},
   {"seeds": "1,1"},
   {"budget": 10},
   {"subea": {"population": 1}},
])
def test_experiment_config_validation(overrides, tmp_path):
   with pytest.raises(HarnessError):
      small_experiment(tmp_path, **overrides).validate()


def test_config_file(tmp_path):
   path = tmp_path / "experiment.json"
   path.write_text(json.dumps({"problems": ["MW1"], "seeds": "2..3", "budget": 30}))
   config = ExperimentConfig.from_file(str(path))
   assert config.problems == ["MW1"] and config.seeds == [2, 3] and config.budget == 30
   with pytest.raises(HarnessError):
      ExperimentConfig.from_file(str(tmp_path / "absent.json"))


def test_settings_from_env_file(tmp_path, monkeypatch):
   monkeypatch.delenv("PSCMOEA_WORKERS", raising=False)
   monkeypatch.delenv("PSCMOEA_LOG_LEVEL", raising=False)
   env = tmp_path / ".env"
   env.write_text("PSCMOEA_WORKERS=3\nPSCMOEA_LOG_LEVEL=debug\n")
   harness = Harness(str(env))
   assert harness.workers == 3
   assert harness.log_level == "DEBUG"

   monkeypatch.setenv("PSCMOEA_WORKERS", "2")
   assert Harness(str(env)).workers == 2
   monkeypatch.setenv("PSCMOEA_WORKERS", "many")
   assert Harness(str(env)).workers == 1


def test_run_cell_persists_trace_and_summary(tmp_path):
   summary = run_cell("MW1", "pscmoea", 1, 21, 2, {}, str(tmp_path))
   directory = cell_dir(str(tmp_path), "MW1", "pscmoea", 1)
   assert summary["status"] == "ok"
   assert summary["evaluations"] == 21

   trace = pd.read_csv(os.path.join(directory, "trace.csv"))
   assert len(trace) == 21
   assert trace["eval_index"].tolist() == list(range(1, 22))
   assert set(trace["search_flag"]) == {"init"}
   feasible = trace.index[trace["feasible"]]
   if len(feasible):
      assert summary["ffe"] == trace.loc[feasible[0], "eval_index"]
   else:
      assert summary["ffe"] == 21 and not summary["st"]

   with open(os.path.join(directory, "summary.json"), encoding="utf-8") as f:
      assert json.load(f) == summary
   with open(os.path.join(directory, "timing.json"), encoding="utf-8") as f:
      assert json.load(f)["wall_time"] >= 0


def test_run_cell_records_failures(tmp_path):
   summary = run_cell("MW4", "pscmoea", 1, 21, 2, {}, str(tmp_path))
   assert summary["status"] == "error"
   assert "DomainError" in summary["error"]


def test_summary_is_reproducible(tmp_path):
   first = run_cell("MW1", "pscmoea", 4, 21, 2, {}, str(tmp_path / "a"))
   second = run_cell("MW1", "pscmoea", 4, 21, 2, {}, str(tmp_path / "b"))
   paths = [os.path.join(cell_dir(str(tmp_path / d), "MW1", "pscmoea", 4), "summary.json") for d in "ab"]
   with open(paths[0], "rb") as a, open(paths[1], "rb") as b:
      assert a.read() == b.read()
   assert first == second


def test_run_experiment_matrix_and_resume(harness, tmp_path):
   config = small_experiment(tmp_path, problems="MW1,MW2", variants="pscmoea,v3", seeds="1..3")
   summaries = harness.run_experiment(config)
   assert len(summaries) == 12
   assert all(s["status"] == "ok" for s in summaries)
   assert [(s["problem"], s["variant"], s["seed"]) for s in summaries] == config.cells()
   for cell in config.cells():
      assert os.path.exists(os.path.join(cell_dir(str(tmp_path), *cell), "trace.csv"))

   # Completed cells are not run again
   assert harness.run_experiment(config) == []


def test_aggregate_tables(harness, tmp_path):
   for seed in range(1, 7):
      write_summary(tmp_path, "MW3", "pscmoea", seed, igd=0.1 * seed, hv=0.6)
      write_summary(tmp_path, "MW3", "v1", seed, igd=1.0 + 0.1 * seed, hv=0.3)
   write_summary(tmp_path, "MW3", "v1", 7, igd=None, hv=None, ffe=500)

   tables = harness.aggregate(str(tmp_path))
   assert {"table_igd.csv", "wilcoxon_igd.csv", "wilcoxon_igd_counts.csv", "profile_igd.csv", "switching.csv"} <= set(tables)

   wilcoxon = tables["wilcoxon_igd.csv"]
   assert wilcoxon.loc[0, "outcome"] == "loss"
   assert tables["wilcoxon_hv.csv"].loc[0, "outcome"] == "loss"
   counts = tables["wilcoxon_igd_counts.csv"].set_index("variant")
   assert counts.loc["v1", "loss"] == 1

   table = tables["table_igd.csv"].set_index("problem")
   assert table.loc["MW3", "pscmoea_mean"] == pytest.approx(0.35)
   # The infeasible run is charged the worst observed IGD plus 0.1
   assert table.loc["MW3", "v1_mean"] == pytest.approx((sum(1.0 + 0.1 * s for s in range(1, 7)) + 1.7) / 7)
   assert os.path.exists(tmp_path / "table_igd.csv")


def test_aggregate_single_seed_has_zero_std(harness, tmp_path):
   write_summary(tmp_path, "MW1", "pscmoea", 1, igd=0.2)
   table = harness.aggregate(str(tmp_path))["table_igd.csv"].set_index("problem")
   assert table.loc["MW1", "pscmoea_std"] == 0.0


def test_aggregate_empty_directory(harness, tmp_path):
   with pytest.raises(HarnessError):
      harness.aggregate(str(tmp_path))
   write_summary(tmp_path, "MW1", "pscmoea", 1, igd=None, status="error")
   with pytest.raises(HarnessError):
      harness.aggregate(str(tmp_path))


def test_command_line(harness, tmp_path, capsys):
   assert harness.run(["list-problems", "--dim", "10"]) == 0
   assert "DASCMOP9" in capsys.readouterr().out
   assert sorted(harness.commands) == ["aggregate", "fronts", "list_problems", "run"]

   out = tmp_path / "results"
   argv = ["run", "--problems", "MW1", "--seeds", "1", "--budget", "21", "--dim", "2", "--out", str(out)]
   assert harness.run(argv) == 0
   assert harness.run(["aggregate", "--in", str(out)]) == 0
   assert harness.run(["run", "--problems", "ZDT1", "--out", str(out)]) == 2


def test_fronts_command(harness, tmp_path):
   assert harness.run(["fronts", "--problems", "MW1", "--size", "50", "--dir", str(tmp_path)]) == 0
   assert os.path.exists(tmp_path / "MW1.txt")


def test_trace_frame_fills_missing_reference_vectors_without_warnings():
   archive = ArchiveManager(2, 2, 1)
   for k in range(1, 4):
      archive.add(EvaluatedSolution([0.1 * k, 0.2], [k, 1.0], [1.0 - k], k))
   trace = [
      {"fe": 2, "search_flag": "Constrained", "tau": float("nan"), "chosen_rv": None, "mode": "spread"},
      {"fe": 3, "search_flag": "Constrained", "tau": 0.5, "chosen_rv": 4, "mode": "two-stage"},
   ]
   result = RunResult("MW1", Variant.PSCMOEA, archive, trace, 1, SearchFlag.CONSTRAINED)

   with warnings.catch_warnings():
      warnings.simplefilter("error")
      frame = trace_frame(result)

   assert frame["chosen_rv"].dtype.kind == "i"
   assert frame["chosen_rv"].tolist() == [-1, -1, 4]
   assert frame["search_flag"].tolist() == ["init", "Constrained", "Constrained"]


def test_variants_of_a_cell_share_the_initial_design(tmp_path):
   summaries = [run_cell("MW1", variant, 2, 21, 2, {}, str(tmp_path)) for variant in ("pscmoea", "v3")]
   assert summaries[0]["cell_seed"] == summaries[1]["cell_seed"]

   traces = [pd.read_csv(os.path.join(cell_dir(str(tmp_path), "MW1", variant, 2), "trace.csv")) for variant in ("pscmoea", "v3")]
   pd.testing.assert_frame_equal(traces[0].filter(regex="^(x|f|g)\\d"), traces[1].filter(regex="^(x|f|g)\\d"))
