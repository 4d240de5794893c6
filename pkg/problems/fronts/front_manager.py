import logging
import os
import threading
import numpy as np
from problems import PROBLEMS, UnknownProblemError, get_problem
from problems.problem import thin_front

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
DEFAULT_SIZE = 1000


class FrontManager:
   """
   File-backed cache of reference fronts.

   Fronts are read from `<name>.txt` tables (one objective vector per line) in the data
   directory. A missing table is generated from the problem's analytic description and kept
   in memory; at the default size it is also written to the data directory, so the tables
   are materialized by the first run that needs them. `save` writes any size explicitly.
   """
   def __init__(self, data_dir: str | None = None):
      self.data_dir = data_dir or os.environ.get("PSCMOEA_FRONTS_DIR") or DATA_DIR
      self.__fronts: dict[tuple[str, int], np.ndarray] = {}
      self.__lock = threading.Lock()

   def path_for(self, name: str) -> str:
      return os.path.join(self.data_dir, f"{name.upper()}.txt")

   def get(self, name: str, size: int = DEFAULT_SIZE) -> np.ndarray:
      """
      Returns the reference front of a problem.

      Args:
         name: Problem name.
         size: Requested number of points; stored tables are thinned to it when larger.

      Raises:
         UnknownProblemError: If the problem is not part of any suite.

      Returns:
         (k, M) array of mutually non-dominated objective vectors.
      """
      key = (str(name).upper(), int(size))
      if key[0] not in PROBLEMS:
         raise UnknownProblemError(f"No reference front for {name}")

      with self.__lock:
         if key not in self.__fronts:
            self.__fronts[key] = self._load(*key)
         return self.__fronts[key]

   def _load(self, name: str, size: int) -> np.ndarray:
      path = self.path_for(name)
      if os.path.exists(path):
         try:
            points = np.atleast_2d(np.loadtxt(path, ndmin=2))
            logger.info("Loaded reference front %s (%d points)", name, len(points))
            if len(points) > size:
               points = thin_front(points, size)
            return points
         except ValueError as e:
            logger.warning("Failed to parse front table %s: %s; regenerating", path, e)

      points = get_problem(name).reference_front(size)
      logger.info("Generated reference front %s (%d points)", name, len(points))
      if size == DEFAULT_SIZE:
         try:
            self._write(name, points)
         except OSError as e:
            logger.warning("Could not store reference front %s: %s", name, e)
      return points

   def _write(self, name: str, points: np.ndarray) -> str:
      os.makedirs(self.data_dir, exist_ok=True)
      path = self.path_for(name)
      # Parallel cells may write the same table
      temporary = f"{path}.{os.getpid()}.tmp"
      np.savetxt(temporary, points, fmt="%.10e")
      os.replace(temporary, path)
      return path

   def save(self, name: str, size: int = DEFAULT_SIZE) -> str:
      points = self.get(name, size)
      path = self._write(name, points)
      logger.info("Saved reference front %s to %s", name, path)
      return path


_default_manager: FrontManager | None = None


def load_reference_front(name: str, size: int = DEFAULT_SIZE) -> np.ndarray:
   """
   Reference front for a suite problem through the process-wide FrontManager.
   """
   global _default_manager
   if _default_manager is None:
      _default_manager = FrontManager()
   return _default_manager.get(name, size)
