from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
import argparse
import importlib
import json
import logging
import os
import numpy as np
import pandas as pd
from dotenv import dotenv_values
from handler.config import OptimizerConfig, SubEAConfig, Variant
from handler.optimizer import Optimizer, RunResult
from metrics import (
   MetricsError,
   Outcome,
   evaluate_run,
   penalize_infeasible_runs,
   performance_profile,
   wilcoxon_ranksum,
)
from problems import PROBLEMS, get_problem
from problems.fronts import FrontManager
from utils.utils import derive_seed, format_duration

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SETTINGS_KEYS = ("PSCMOEA_WORKERS", "PSCMOEA_LOG_LEVEL", "PSCMOEA_FRONTS_DIR")
COMMANDS_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "commands")
METRICS = ("igd", "igd_plus", "hv", "ffe")


class HarnessError(RuntimeError):
   """Raised for invalid experiment settings or an unusable output directory."""


def parse_seeds(text) -> list[int]:
   """
   Seeds from "1..11", "1,4,7" or a mix of both ("1..3,10").
   """
   if isinstance(text, (list, tuple)):
      return [int(s) for s in text]
   seeds = []
   for part in str(text).split(","):
      part = part.strip()
      if not part:
         continue
      if ".." in part:
         start, stop = part.split("..", 1)
         seeds.extend(range(int(start), int(stop) + 1))
      else:
         seeds.append(int(part))
   return seeds


def parse_list(text) -> list[str]:
   if isinstance(text, (list, tuple)):
      return [str(item).strip() for item in text]
   return [item.strip() for item in str(text).split(",") if item.strip()]


@dataclass
class ExperimentConfig:
   problems: list[str] = field(default_factory=lambda: ["MW3"])
   variants: list[str] = field(default_factory=lambda: ["pscmoea"])
   seeds: list[int] = field(default_factory=lambda: [1])
   budget: int = 500
   dim: int = 10
   out: str = "results"
   subea: dict = field(default_factory=dict)
   workers: int | None = None

   @classmethod
   def from_file(cls, path: str) -> "ExperimentConfig":
      try:
         with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
      except (OSError, json.JSONDecodeError) as e:
         raise HarnessError(f"Failed to read experiment config {path}: {e}") from e
      return cls().merged(data)

   def merged(self, overrides: dict) -> "ExperimentConfig":
      """Copy with every non-None override applied; list-valued keys accept comma strings."""
      known = {k: v for k, v in overrides.items() if v is not None and k in self.__dataclass_fields__}
      unknown = set(overrides) - set(self.__dataclass_fields__)
      if unknown:
         raise HarnessError(f"Unknown experiment keys: {', '.join(sorted(unknown))}")
      if "problems" in known:
         known["problems"] = [p.upper() for p in parse_list(known["problems"])]
      if "variants" in known:
         known["variants"] = [v.lower() for v in parse_list(known["variants"])]
      if "seeds" in known:
         known["seeds"] = parse_seeds(known["seeds"])
      if "subea" in known:
         known["subea"] = {**self.subea, **known["subea"]}
      return replace(self, **known)

   def validate(self) -> None:
      if len(set(self.seeds)) != len(self.seeds):
         raise HarnessError("seeds must be distinct")
      for name in self.problems:
         if name.upper() not in PROBLEMS:
            raise HarnessError(f"Unknown problem: {name}")
      for variant in self.variants:
         try:
            Variant.parse(variant)
         except ValueError as e:
            raise HarnessError(str(e)) from e
      try:
         self.optimizer_config(Variant.PSCMOEA).validate(self.dim)
      except (TypeError, ValueError) as e:
         raise HarnessError(f"Invalid algorithm settings: {e}") from e

   def optimizer_config(self, variant) -> OptimizerConfig:
      return OptimizerConfig(
         max_evaluations=self.budget,
         variant=Variant.parse(variant),
         subea=replace(SubEAConfig(), **self.subea),
      )

   def cells(self) -> list[tuple[str, str, int]]:
      return [(p.upper(), v.lower(), s) for p in self.problems for v in self.variants for s in self.seeds]


def cell_dir(out: str, problem: str, variant: str, seed: int) -> str:
   return os.path.join(out, problem.upper(), variant.lower(), f"seed_{seed}")


def trace_frame(result: RunResult) -> pd.DataFrame:
   """
   One row per true evaluation: decision vector, objectives, constraints, violation and, for
   infill evaluations, the loop state at selection time.
   """
   archive = result.archive
   data = {"eval_index": np.arange(1, archive.size + 1)}
   for name, block in (("x", archive.X), ("f", archive.F), ("g", archive.G)):
      for j in range(block.shape[1]):
         data[f"{name}{j + 1}"] = block[:, j]
   data["cv"] = archive.cv
   data["feasible"] = archive.feasible
   frame = pd.DataFrame(data)

   loop = pd.DataFrame(result.trace, columns=["fe", "search_flag", "tau", "chosen_rv", "mode"])
   loop["fe"] = loop["fe"].astype(int)
   frame = frame.merge(loop.rename(columns={"fe": "eval_index"}), on="eval_index", how="left")
   frame["search_flag"] = frame["search_flag"].fillna("init")
   frame["mode"] = frame["mode"].fillna("lhs")
   frame["chosen_rv"] = frame["chosen_rv"].infer_objects().fillna(-1).astype(int)
   return frame


def run_cell(problem_name: str, variant: str, seed: int, budget: int, dim: int, subea: dict, out: str, fronts_dir: str | None = None) -> dict:
   """
   Runs one (problem, variant, seed) cell and persists its trace and summary.

   Failures are caught and written as an error summary so the matrix can continue.

   Returns:
      The summary dictionary.
   """
   directory = cell_dir(out, problem_name, variant, seed)
   os.makedirs(directory, exist_ok=True)
   # Variant is left out so every variant of a cell shares the initial design; a V3 run then
   # matches the PSCMOEA trace up to its first search switch.
   cell_seed = derive_seed(problem_name.upper(), seed)
   summary = {
      "schema_version": SCHEMA_VERSION,
      "problem": problem_name.upper(),
      "variant": variant.lower(),
      "seed": seed,
      "cell_seed": cell_seed,
      "budget": budget,
      "dim": dim,
   }

   try:
      problem = get_problem(problem_name, dim)
      config = OptimizerConfig(max_evaluations=budget, variant=Variant.parse(variant), subea=replace(SubEAConfig(), **subea))
      result = Optimizer(problem, config, np.random.default_rng(cell_seed)).run()

      front = FrontManager(fronts_dir).get(problem.name)
      report = evaluate_run(result, front, budget)
      trace_frame(result).to_csv(os.path.join(directory, "trace.csv"), index=False)

      summary.update(report.to_dict())
      summary.update({
         "evaluations": result.archive.size,
         "unconstrained_iterations": result.unconstrained_iterations,
         "status": "ok",
      })
      timing = {"wall_time": result.wall_time}
   except Exception as e:
      logger.error("Cell %s/%s/seed %d failed: %s", problem_name, variant, seed, e)
      summary.update({"status": "error", "error": f"{type(e).__name__}: {e}"})
      timing = {"wall_time": None}

   # NaN is not valid JSON
   clean = {k: (None if isinstance(v, float) and np.isnan(v) else v) for k, v in summary.items()}
   clean = {k: (bool(v) if isinstance(v, np.bool_) else v) for k, v in clean.items()}
   with open(os.path.join(directory, "summary.json"), "w", encoding="utf-8") as f:
      json.dump(clean, f, indent=2, sort_keys=True)
   with open(os.path.join(directory, "timing.json"), "w", encoding="utf-8") as f:
      json.dump(timing, f)
   return clean


def _completed(directory: str) -> bool:
   path = os.path.join(directory, "summary.json")
   if not os.path.exists(path):
      return False
   try:
      with open(path, "r", encoding="utf-8") as f:
         return json.load(f).get("status") == "ok"
   except (OSError, json.JSONDecodeError):
      return False


def load_summaries(directory: str) -> pd.DataFrame:
   rows = []
   for root, _, files in sorted(os.walk(directory)):
      if "summary.json" not in files:
         continue
      path = os.path.join(root, "summary.json")
      try:
         with open(path, "r", encoding="utf-8") as f:
            rows.append(json.load(f))
      except (OSError, json.JSONDecodeError) as e:
         logger.warning("Skipping unreadable summary %s: %s", path, e)
   return pd.DataFrame(rows)


class Harness:
   """
   Command-line application: reads the `.env` settings, loads the command modules and runs
   or aggregates experiment matrices.
   """
   def __init__(self, env_path: str = "./.env"):
      self.settings = self.load_settings(env_path)
      self.parser = argparse.ArgumentParser(prog="pscmoea", description="Probabilistic surrogate-assisted constrained multi-objective optimization")
      self.parser.add_argument("--log-level", default=None, help="Overrides PSCMOEA_LOG_LEVEL")
      self.subparsers = self.parser.add_subparsers(dest="command", required=True)
      self.commands: list[str] = []

   @staticmethod
   def load_settings(env_path: str) -> dict:
      """
      Reads the PSCMOEA_* keys from the .env file; process environment variables win.
      """
      config = dotenv_values(env_path) if os.path.exists(env_path) else {}
      settings = {key: config.get(key) for key in SETTINGS_KEYS}
      for key in SETTINGS_KEYS:
         if os.environ.get(key):
            settings[key] = os.environ[key]
      return settings

   @property
   def log_level(self) -> str:
      return (self.settings.get("PSCMOEA_LOG_LEVEL") or "INFO").upper()

   @property
   def workers(self) -> int:
      value = self.settings.get("PSCMOEA_WORKERS")
      try:
         return max(int(value), 1) if value else 1
      except ValueError:
         logger.warning("Ignoring invalid PSCMOEA_WORKERS=%r", value)
         return 1

   @property
   def fronts_dir(self) -> str | None:
      return self.settings.get("PSCMOEA_FRONTS_DIR") or None

   def load(self) -> None:
      """
      Imports every module in the commands package and lets it register its sub-command.
      """
      for filename in sorted(os.listdir(COMMANDS_DIR)):
         if filename.endswith(".py") and not filename.startswith("_"):
            module = importlib.import_module(f"commands.{filename[:-3]}")
            module.setup(self.subparsers, self)
            self.commands.append(filename[:-3])
            logger.debug("Loaded command: %s", filename[:-3])

   def run(self, argv=None) -> int:
      if not self.commands:
         self.load()
      args = self.parser.parse_args(argv)
      if args.log_level:
         logging.getLogger().setLevel(args.log_level.upper())
      return args.handler(args) or 0

   def run_experiment(self, config: ExperimentConfig) -> list[dict]:
      """
      Runs every cell of the matrix that has no completed summary yet.

      Raises:
         HarnessError: If the configuration is invalid or the output directory is not writable.

      Returns:
         Summaries of the cells run in this call, in matrix order.
      """
      config.validate()
      try:
         os.makedirs(config.out, exist_ok=True)
      except OSError as e:
         raise HarnessError(f"Cannot create output directory {config.out}: {e}") from e
      if not os.access(config.out, os.W_OK):
         raise HarnessError(f"Output directory {config.out} is not writable")

      pending = [c for c in config.cells() if not _completed(cell_dir(config.out, *c))]
      skipped = len(config.cells()) - len(pending)
      if skipped:
         logger.info("Skipping %d completed cells", skipped)

      workers = config.workers or self.workers
      jobs = [(p, v, s, config.budget, config.dim, config.subea, config.out, self.fronts_dir) for p, v, s in pending]
      summaries: dict[tuple, dict] = {}

      if workers <= 1 or len(jobs) <= 1:
         for job in jobs:
            logger.info("Running %s/%s seed %d", *job[:3])
            summaries[job[:3]] = run_cell(*job)
      else:
         with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(run_cell, *job): job[:3] for job in jobs}
            for future in as_completed(futures):
               key = futures[future]
               summaries[key] = future.result()
               logger.info("Finished %s/%s seed %d: FFE=%s", *key, summaries[key].get("ffe"))

      for key in (job[:3] for job in jobs):
         timing_path = os.path.join(cell_dir(config.out, *key), "timing.json")
         with open(timing_path, "r", encoding="utf-8") as f:
            logger.debug("%s/%s seed %d took %s", *key, format_duration(json.load(f)["wall_time"]))
      return [summaries[job[:3]] for job in jobs]

   def aggregate(self, directory: str, baseline: str = "pscmoea") -> dict[str, pd.DataFrame]:
      """
      Builds the comparison tables of a result directory and writes them next to the cells.

      Raises:
         HarnessError: If the directory holds no completed cell.

      Returns:
         Mapping from output file name to its table.
      """
      summaries = load_summaries(directory)
      if summaries.empty or "status" not in summaries:
         raise HarnessError(f"No completed cells under {directory}")
      failed = summaries[summaries["status"] != "ok"]
      if len(failed):
         logger.warning("Ignoring %d failed cells", len(failed))
      summaries = summaries[summaries["status"] == "ok"].copy()
      if summaries.empty:
         raise HarnessError(f"No completed cells under {directory}")
      if summaries["budget"].nunique() > 1:
         logger.warning("Cells use different budgets: %s", sorted(summaries["budget"].unique()))

      baseline = baseline.lower()
      variants = sorted(summaries["variant"].unique(), key=lambda v: (v != baseline, v))
      problems = sorted(summaries["problem"].unique())
      tables: dict[str, pd.DataFrame] = {}

      for metric in METRICS:
         filled = self.__penalized(summaries, metric, problems)
         tables[f"table_{metric}.csv"] = self.__mean_std_table(filled, metric, problems, variants)
         rows, counts = self.__wilcoxon(filled, metric, problems, variants, baseline)
         tables[f"wilcoxon_{metric}.csv"] = rows
         tables[f"wilcoxon_{metric}_counts.csv"] = counts
         means = filled.groupby(["problem", "variant"])[metric].mean().unstack("variant").reindex(index=problems, columns=variants)
         if means.isna().any().any():
            logger.warning("Skipping the %s profile: not every variant ran on every problem", metric)
         else:
            profile = performance_profile(means.to_numpy(), variants, maximize=metric == "hv")
            tables[f"profile_{metric}.csv"] = profile.to_frame()

      switching = summaries[["problem", "variant", "seed", "unconstrained_iterations"]]
      tables["switching.csv"] = switching.sort_values(["problem", "variant", "seed"]).reset_index(drop=True)

      for name, table in tables.items():
         table.to_csv(os.path.join(directory, name), index=False)
      logger.info("Aggregated %d cells into %d tables", len(summaries), len(tables))
      return tables

   def __penalized(self, summaries: pd.DataFrame, metric: str, problems: list[str]) -> pd.DataFrame:
      frame = summaries[["problem", "variant", "seed", metric]].copy()
      frame[metric] = frame[metric].astype(float)
      if metric == "ffe":
         return frame
      for problem in problems:
         rows = frame["problem"] == problem
         try:
            frame.loc[rows, metric] = penalize_infeasible_runs(frame.loc[rows, metric].to_numpy(), metric)
         except MetricsError:
            logger.warning("No run found a feasible solution on %s; %s left empty", problem, metric)
      return frame

   def __mean_std_table(self, frame, metric, problems, variants) -> pd.DataFrame:
      stats = frame.groupby(["problem", "variant"])[metric].agg(["mean", "std"])
      stats["std"] = stats["std"].fillna(0.0)
      rows = []
      for problem in problems:
         row = {"problem": problem}
         for variant in variants:
            if (problem, variant) in stats.index:
               mean, std = stats.loc[(problem, variant)]
               row[variant] = f"{mean:.4e}({std:.2e})"
               row[f"{variant}_mean"] = mean
               row[f"{variant}_std"] = std
         rows.append(row)
      return pd.DataFrame(rows)

   def __wilcoxon(self, frame, metric, problems, variants, baseline):
      rows = []
      for problem in problems:
         subset = frame[frame["problem"] == problem]
         reference = subset[subset["variant"] == baseline][metric].dropna().to_numpy()
         for variant in variants:
            if variant == baseline:
               continue
            sample = subset[subset["variant"] == variant][metric].dropna().to_numpy()
            if len(sample) == 0 or len(reference) == 0:
               continue
            test = wilcoxon_ranksum(sample, reference, minimize=metric != "hv")
            rows.append({"problem": problem, "variant": variant, "baseline": baseline, "outcome": test.outcome.value, "p_value": test.p_value})

      rows = pd.DataFrame(rows, columns=["problem", "variant", "baseline", "outcome", "p_value"])
      counts = []
      for variant in variants:
         if variant == baseline:
            continue
         outcomes = rows[rows["variant"] == variant]["outcome"]
         counts.append({"variant": variant, **{o.value: int((outcomes == o.value).sum()) for o in Outcome}})
      counts = pd.DataFrame(counts, columns=["variant", *(o.value for o in Outcome)])
      return rows, counts
