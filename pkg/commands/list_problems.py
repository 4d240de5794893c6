import pandas as pd
from problems import list_problems


class ListProblemsCommand:
   """
   `list-problems`: prints every suite problem with its objective and constraint counts.
   """
   def __init__(self, harness):
      self.harness = harness

   def register(self, subparsers) -> None:
      parser = subparsers.add_parser("list-problems", help="List the benchmark problems.")
      parser.add_argument("--dim", type=int, default=10, help="Number of decision variables.")
      parser.set_defaults(handler=self.handle)

   def handle(self, args) -> int:
      table = pd.DataFrame(list_problems(args.dim))
      print(table.to_string(index=False))
      return 0


def setup(subparsers, harness):
   ListProblemsCommand(harness).register(subparsers)
