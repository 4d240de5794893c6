from harness.harness import ExperimentConfig, Harness, HarnessError, run_cell

__all__ = ["ExperimentConfig", "Harness", "HarnessError", "run_cell"]
