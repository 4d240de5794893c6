import logging
from harness.harness import HarnessError

logger = logging.getLogger(__name__)


class AggregateCommand:
   def __init__(self, harness):
      self.harness = harness

   def register(self, subparsers) -> None:
      parser = subparsers.add_parser("aggregate", help="Build comparison tables from a result directory.")
      parser.add_argument("--in", dest="directory", required=True, help="Result directory written by `run`.")
      parser.add_argument("--baseline", default="pscmoea", help="Variant the others are tested against.")
      parser.set_defaults(handler=self.handle)

   def handle(self, args) -> int:
      try:
         tables = self.harness.aggregate(args.directory, args.baseline)
      except HarnessError as e:
         logger.error("%s", e)
         return 2

      for name in sorted(tables):
         logger.info("Wrote %s", name)
      return 0


def setup(subparsers, harness):
   AggregateCommand(harness).register(subparsers)
