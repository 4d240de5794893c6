import logging
from harness.harness import ExperimentConfig, HarnessError

logger = logging.getLogger(__name__)


class RunCommand:
   """
   `run`: executes a problems x variants x seeds matrix and persists each cell.
   """
   def __init__(self, harness):
      self.harness = harness

   def register(self, subparsers) -> None:
      parser = subparsers.add_parser("run", help="Run an experiment matrix.")
      parser.add_argument("--config", help="JSON file with the same keys as the flags below.")
      parser.add_argument("--problems", help="Comma-separated problem names, e.g. MW3,DASCMOP1.")
      parser.add_argument("--variants", help="Comma-separated variants: pscmoea,v1,v2,v3.")
      parser.add_argument("--seeds", help="Seed list, e.g. 1..11 or 1,2,3.")
      parser.add_argument("--budget", type=int, help="Maximum number of true evaluations.")
      parser.add_argument("--dim", type=int, help="Number of decision variables.")
      parser.add_argument("--out", help="Output directory.")
      parser.add_argument("--workers", type=int, help="Worker processes (default from PSCMOEA_WORKERS).")
      parser.add_argument("--population", type=int, help="SubEA population size.")
      parser.add_argument("--generations", type=int, help="SubEA generations per iteration.")
      parser.set_defaults(handler=self.handle)

   def handle(self, args) -> int:
      try:
         config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
         subea = {k: v for k, v in (("population", args.population), ("generations", args.generations)) if v is not None}
         config = config.merged({
            "problems": args.problems,
            "variants": args.variants,
            "seeds": args.seeds,
            "budget": args.budget,
            "dim": args.dim,
            "out": args.out,
            "workers": args.workers,
            "subea": subea or None,
         })
         summaries = self.harness.run_experiment(config)
      except HarnessError as e:
         logger.error("%s", e)
         return 2

      failed = [s for s in summaries if s.get("status") != "ok"]
      logger.info("Ran %d cells (%d failed) into %s", len(summaries), len(failed), config.out)
      return 1 if failed else 0


def setup(subparsers, harness):
   RunCommand(harness).register(subparsers)
