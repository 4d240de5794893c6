import logging
from harness.harness import parse_list
from problems import PROBLEMS, UnknownProblemError
from problems.fronts import FrontManager

logger = logging.getLogger(__name__)


class FrontsCommand:
   """
   `fronts`: generates reference fronts and stores them as text tables.
   """
   def __init__(self, harness):
      self.harness = harness

   def register(self, subparsers) -> None:
      parser = subparsers.add_parser("fronts", help="Write reference-front tables.")
      parser.add_argument("--problems", help="Comma-separated names (default: every problem).")
      parser.add_argument("--size", type=int, default=1000, help="Points per front.")
      parser.add_argument("--dir", dest="data_dir", help="Target directory (default PSCMOEA_FRONTS_DIR or the package data).")
      parser.set_defaults(handler=self.handle)

   def handle(self, args) -> int:
      manager = FrontManager(args.data_dir or self.harness.fronts_dir)
      names = parse_list(args.problems) if args.problems else list(PROBLEMS)
      try:
         for name in names:
            manager.save(name, args.size)
      except UnknownProblemError as e:
         logger.error("%s", e)
         return 2
      return 0


def setup(subparsers, harness):
   FrontsCommand(harness).register(subparsers)
