import logging
import numpy as np
from scipy import linalg, optimize
from scipy.spatial.distance import cdist
from handler.config import KrigingConfig

logger = logging.getLogger(__name__)

LN10 = np.log(10.0)
# Likelihood value returned where the correlation matrix cannot be factorized
FAILED_LIKELIHOOD = 1e20


class ModelDegeneracyError(ValueError):
   """Raised when too few distinct training points remain to build a model."""


class KrigingFitError(RuntimeError):
   """Raised when the correlation matrix stays singular at the largest nugget."""


def prescreen(points, responses, tolerance: float = 1e-4, min_points: int = 2):
   """
   Removes training points that crowd earlier ones.

   A point is dropped when it lies closer than `tolerance` (Euclidean) to any earlier point,
   so the earliest evaluation of a cluster is the one kept.

   Args:
      points: (n, d) inputs normalized to the unit cube.
      responses: (n,) or (n, k) outputs aligned with `points`.
      tolerance: Minimum separation.
      min_points: Survivors required.

   Raises:
      ModelDegeneracyError: If fewer than `min_points` points survive.

   Returns:
      Tuple of kept points, kept responses and their original indices.
   """
   points = np.atleast_2d(np.asarray(points, dtype=float))
   responses = np.asarray(responses, dtype=float)
   close = np.triu(cdist(points, points) < tolerance, k=1)
   keep = np.flatnonzero(~close.any(axis=0))

   if len(keep) < min_points:
      raise ModelDegeneracyError(f"only {len(keep)} distinct training points after prescreening")
   return points[keep], responses[keep], keep


def correlation(A: np.ndarray, B: np.ndarray, theta: np.ndarray) -> np.ndarray:
   """Anisotropic squared-exponential correlation exp(-sum_k theta_k (a_k - b_k)^2)."""
   diff = A[:, None, :] - B[None, :, :]
   return np.exp(-np.einsum("ijk,k->ij", diff ** 2, theta))


def _factor(R: np.ndarray, nugget: float, max_nugget: float):
   n = len(R)
   while True:
      try:
         L = linalg.cholesky(R + nugget * np.eye(n), lower=True)
         return L, nugget
      except linalg.LinAlgError:
         if nugget >= max_nugget:
            raise KrigingFitError(f"correlation matrix not positive definite at nugget {nugget:.1e}")
         nugget = min(nugget * 10.0, max_nugget)


class KrigingModel:
   """
   Ordinary kriging predictor with a constant trend.

   Inputs are expected in the unit cube; outputs are standardized internally and every
   prediction is returned on the original scale.
   """
   def __init__(self, X, y, theta, nugget: float = 1e-10, max_nugget: float = 1e-4):
      self.X = np.atleast_2d(np.asarray(X, dtype=float))
      y = np.asarray(y, dtype=float).ravel()
      self.theta = np.asarray(theta, dtype=float)

      self.__y_mean = float(y.mean())
      std = float(y.std())
      self.__y_std = std if std > 0 else 1.0
      self.__y = (y - self.__y_mean) / self.__y_std

      R = correlation(self.X, self.X, self.theta)
      self.__L, self.nugget = _factor(R, nugget, max_nugget)
      self.__fit_trend()

   def __fit_trend(self):
      L = self.__L
      ones = np.ones(len(self.__y))
      self.__rinv_one = linalg.cho_solve((L, True), ones)
      self.one_rinv_one = float(ones @ self.__rinv_one)
      self.beta = float(self.__rinv_one @ self.__y) / self.one_rinv_one
      resid = self.__y - self.beta
      self.__gamma = linalg.cho_solve((L, True), resid)
      self.sigma2 = max(float(resid @ self.__gamma) / len(resid), 0.0)

   @property
   def process_variance(self) -> float:
      return self.sigma2 * self.__y_std ** 2

   @classmethod
   def from_hyperparameters(cls, X, y, theta, nugget: float = 1e-10, max_nugget: float = 1e-4) -> "KrigingModel":
      return cls(X, y, theta, nugget, max_nugget)

   @classmethod
   def fit(
      cls,
      X,
      y,
      rng: np.random.Generator,
      config: KrigingConfig | None = None,
      theta0=None,
      nugget: float | None = None,
   ) -> "KrigingModel":
      """
      Trains a model by maximizing the concentrated log-likelihood over log10 theta.

      Args:
         X: (n, d) prescreened inputs in the unit cube.
         y: (n,) responses.
         rng: Draws the random starting points.
         config: Search settings.
         theta0: Previous optimum; when given it seeds the first start and only
            `config.warm_starts` starts are run.
         nugget: Starting nugget, overriding the configured one.

      Raises:
         ModelDegeneracyError: With fewer than two points.
         KrigingFitError: If no candidate theta gives a factorizable matrix.
      """
      config = config or KrigingConfig()
      X = np.atleast_2d(np.asarray(X, dtype=float))
      y = np.asarray(y, dtype=float).ravel()
      if len(X) < 2:
         raise ModelDegeneracyError("kriging needs at least two training points")
      start_nugget = config.nugget if nugget is None else nugget

      likelihood = _Likelihood(X, y, start_nugget, config.max_nugget)
      lo, hi = config.log10_theta_bounds
      d = X.shape[1]

      if theta0 is None:
         first = np.full(d, 0.5 * (lo + hi))
         count = config.starts
      else:
         first = np.clip(np.log10(np.asarray(theta0, dtype=float)), lo, hi)
         count = config.warm_starts
      starts = [first] + [rng.uniform(lo, hi, d) for _ in range(max(count, 1) - 1)]

      best_t, best_value = None, np.inf
      for t0 in starts:
         result = optimize.minimize(
            likelihood,
            t0,
            jac=True,
            method="L-BFGS-B",
            bounds=[(lo, hi)] * d,
            options={"maxiter": config.max_iter},
         )
         if result.fun < best_value:
            best_t, best_value = result.x, float(result.fun)

      if best_t is None or best_value >= FAILED_LIKELIHOOD:
         raise KrigingFitError("no factorizable correlation matrix during the likelihood search")

      return cls(X, y, 10.0 ** best_t, start_nugget, config.max_nugget)

   def predict(self, x) -> tuple[np.ndarray, np.ndarray]:
      """
      Predictive mean and variance.

      Args:
         x: (m, d) or (d,) points in the unit cube.

      Returns:
         Means (m,) and nonnegative variances (m,).
      """
      x = np.atleast_2d(np.asarray(x, dtype=float))
      r = correlation(x, self.X, self.theta)
      mean = self.beta + r @ self.__gamma

      v = linalg.solve_triangular(self.__L, r.T, lower=True)
      u = 1.0 - r @ self.__rinv_one
      mse = self.sigma2 * (1.0 - np.sum(v ** 2, axis=0) + u ** 2 / self.one_rinv_one)

      return mean * self.__y_std + self.__y_mean, np.maximum(mse, 0.0) * self.__y_std ** 2


class _Likelihood:
   """Negative concentrated log-likelihood and its gradient in log10 theta."""

   def __init__(self, X, y, nugget, max_nugget):
      std = y.std()
      self.y = (y - y.mean()) / (std if std > 0 else 1.0)
      self.nugget = nugget
      self.max_nugget = max_nugget
      diff = X[:, None, :] - X[None, :, :]
      self.D = np.moveaxis(diff ** 2, -1, 0)
      self.ones = np.ones(len(y))

   def __call__(self, t):
      theta = 10.0 ** t
      R0 = np.exp(-np.einsum("kij,k->ij", self.D, theta))
      try:
         L, _ = _factor(R0, self.nugget, self.max_nugget)
      except KrigingFitError:
         return FAILED_LIKELIHOOD, np.zeros_like(t)

      n = len(self.y)
      rinv_one = linalg.cho_solve((L, True), self.ones)
      beta = (rinv_one @ self.y) / (self.ones @ rinv_one)
      alpha = linalg.cho_solve((L, True), self.y - beta)
      sigma2 = max(float((self.y - beta) @ alpha) / n, 1e-12)

      value = 0.5 * n * np.log(sigma2) + np.sum(np.log(np.diag(L)))

      Rinv = linalg.cho_solve((L, True), np.eye(n))
      P = R0 * (Rinv - np.outer(alpha, alpha) / sigma2)
      grad_theta = -0.5 * np.einsum("kij,ij->k", self.D, P)
      return float(value), grad_theta * theta * LN10


class SurrogateSet:
   """
   One kriging model per objective and per constraint over a shared, prescreened training set.

   Each refit warm-starts a model's search from its previous optimum.
   """
   def __init__(self, lower, upper, config: KrigingConfig | None = None):
      self.lower = np.asarray(lower, dtype=float)
      self.upper = np.asarray(upper, dtype=float)
      self.config = config or KrigingConfig()
      self.objective_models: list[KrigingModel] = []
      self.constraint_models: list[KrigingModel] = []
      self.__previous_theta: dict[tuple[str, int], np.ndarray] = {}

   def normalize(self, X) -> np.ndarray:
      return (np.asarray(X, dtype=float) - self.lower) / (self.upper - self.lower)

   def fit(self, X, F, G, rng: np.random.Generator, nugget: float | None = None) -> "SurrogateSet":
      """
      Trains all models on the archive.

      Raises:
         ModelDegeneracyError: If prescreening leaves fewer than two points.
         KrigingFitError: If a model cannot be factorized.
      """
      F = np.atleast_2d(np.asarray(F, dtype=float))
      G = np.atleast_2d(np.asarray(G, dtype=float))
      points, responses, kept = prescreen(
         self.normalize(X), np.hstack([F, G]), self.config.prescreen_tolerance
      )
      if len(kept) < len(F):
         logger.debug("Prescreening dropped %d of %d training points", len(F) - len(kept), len(F))

      M = F.shape[1]
      models = []
      for column in range(responses.shape[1]):
         key = ("f", column) if column < M else ("g", column - M)
         model = KrigingModel.fit(
            points, responses[:, column], rng, self.config,
            theta0=self.__previous_theta.get(key), nugget=nugget,
         )
         if model.nugget > (self.config.nugget if nugget is None else nugget):
            logger.warning("Nugget escalated to %.1e for %s%d", model.nugget, *key)
         self.__previous_theta[key] = model.theta
         models.append(model)

      self.objective_models = models[:M]
      self.constraint_models = models[M:]
      return self

   def predict(self, X) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
      """
      Predicts every output for a batch of decision vectors.

      Returns:
         Objective means and variances (k, M), constraint means and variances (k, p).
      """
      unit = np.atleast_2d(self.normalize(X))
      obj = [model.predict(unit) for model in self.objective_models]
      con = [model.predict(unit) for model in self.constraint_models]
      return (
         np.column_stack([m for m, _ in obj]),
         np.column_stack([v for _, v in obj]),
         np.column_stack([m for m, _ in con]),
         np.column_stack([v for _, v in con]),
      )
