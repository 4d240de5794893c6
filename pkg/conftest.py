import os
import sys
import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

collect_ignore = ["examples"]


def pytest_addoption(parser):
   parser.addoption("--runslow", action="store_true", default=False, help="run the desk-scale optimizer runs")


def pytest_configure(config):
   config.addinivalue_line("markers", "slow: desk-scale optimizer runs, enabled with --runslow")


def pytest_collection_modifyitems(config, items):
   if config.getoption("--runslow"):
      return
   skip_slow = pytest.mark.skip(reason="needs --runslow")
   for item in items:
      if "slow" in item.keywords:
         item.add_marker(skip_slow)


@pytest.fixture
def rng():
   return np.random.default_rng(12345)
