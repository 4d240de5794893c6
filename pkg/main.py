import logging
import sys
from harness.harness import Harness


def main(argv=None) -> int:
   harness = Harness()
   logging.basicConfig(
      level=harness.log_level,
      format="%(asctime)s %(levelname)s %(name)s: %(message)s",
   )
   return harness.run(argv)


if __name__ == "__main__":
   sys.exit(main())
