"""
Probabilistic comparison kernels on Gaussian predictions.

All kernels are vectorized: means and variances are arrays whose last axis
runs over objectives or constraints, and every leading axis broadcasts.
"""
from dataclasses import dataclass, replace
import numpy as np
from scipy import special

SQRT2 = np.sqrt(2.0)
INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)
# Upper rectification limit in standard deviations
RECTIFY_SIGMAS = 6.0


@dataclass(frozen=True)
class GaussianScalar:
   mean: float
   variance: float

   def __post_init__(self):
      if self.variance < 0:
         raise ValueError("variance must be nonnegative")


def erf(x):
   return special.erf(x)


def _compare(diff, variance):
   """P(X < Y) for independent Gaussians with mean difference diff = mu_y - mu_x."""
   diff = np.asarray(diff, dtype=float)
   variance = np.asarray(variance, dtype=float)
   degenerate = variance <= 0
   safe = np.where(degenerate, 1.0, variance)
   smooth = 0.5 + 0.5 * special.erf(diff / np.sqrt(2.0 * safe))
   step = np.where(diff > 0, 1.0, np.where(diff < 0, 0.0, 0.5))
   return np.where(degenerate, step, smooth)


def constraint_pof(mean, variance):
   """Per-constraint P(g <= 0); a zero-variance constraint gives the indicator of mean <= 0."""
   mean = np.asarray(mean, dtype=float)
   variance = np.asarray(variance, dtype=float)
   sigma = np.sqrt(np.maximum(variance, 0.0))
   degenerate = sigma <= 0
   return np.where(
      degenerate,
      (mean <= 0).astype(float),
      special.ndtr(-mean / np.where(degenerate, 1.0, sigma)),
   )


def pof(mean, variance):
   """
   Probability of feasibility: product over constraints of P(g <= 0).

   Args:
      mean: (..., p) predicted constraint means.
      variance: (..., p) predicted constraint variances.

   Returns:
      (...) probabilities; a zero-variance factor is the indicator of mean <= 0.
   """
   return np.prod(constraint_pof(mean, variance), axis=-1)


def prob_dominance(mean_x, var_x, mean_y, var_y):
   """
   Probability that x dominates y, taken objective-wise and multiplied.

   Returns:
      (...) probabilities; both-degenerate objectives become indicators with 1/2 on ties.
   """
   mean_x = np.asarray(mean_x, dtype=float)
   mean_y = np.asarray(mean_y, dtype=float)
   return np.prod(_compare(mean_y - mean_x, np.asarray(var_x) + np.asarray(var_y)), axis=-1)


def rectified_moments(mean, sigma):
   """
   Mean and variance of max(0, N(mean, sigma^2)), censored between 0 and mean + 6 sigma.

   Args:
      mean: Gaussian means.
      sigma: Positive standard deviations.

   Returns:
      Tuple (rectified mean, rectified variance).
   """
   mean = np.asarray(mean, dtype=float)
   sigma = np.asarray(sigma, dtype=float)

   c = -mean / sigma
   d = np.full_like(c, RECTIFY_SIGMAS)
   ec = np.exp(-0.5 * c ** 2)
   ed = np.exp(-0.5 * d ** 2)
   low = special.erfc(-c / SQRT2)     # 1 + erf(c / sqrt2)
   high = special.erfc(d / SQRT2)     # 1 - erf(d / sqrt2)
   inside = special.erf(d / SQRT2) - special.erf(c / SQRT2)

   mu_t = INV_SQRT_2PI * (ec - ed) + 0.5 * c * low + 0.5 * d * high
   var_t = (
      0.5 * (mu_t ** 2 + 1) * inside
      - INV_SQRT_2PI * ((d - 2 * mu_t) * ed - (c - 2 * mu_t) * ec)
      + 0.5 * (c - mu_t) ** 2 * low
      + 0.5 * (d - mu_t) ** 2 * high
   )
   return mean + sigma * mu_t, np.maximum(sigma ** 2 * var_t, 0.0)


def cv_distribution(mean, variance):
   """
   Gaussian model of the total violation: sum of the per-constraint rectified moments.

   Zero-variance constraints contribute their exact violation max(0, mean) with no variance.
   """
   mean = np.asarray(mean, dtype=float)
   variance = np.asarray(variance, dtype=float)
   sigma = np.sqrt(np.maximum(variance, 0.0))
   degenerate = sigma <= 0

   rect_mean, rect_var = rectified_moments(mean, np.where(degenerate, 1.0, sigma))
   rect_mean = np.where(degenerate, np.maximum(mean, 0.0), rect_mean)
   rect_var = np.where(degenerate, 0.0, rect_var)
   return rect_mean.sum(axis=-1), rect_var.sum(axis=-1)


def prob_cv_less(mean_x, var_x, mean_y, var_y):
   """P(CV(x) < CV(y)) for independent Gaussian CV models."""
   return _compare(np.asarray(mean_y, dtype=float) - np.asarray(mean_x, dtype=float), np.asarray(var_x) + np.asarray(var_y))


@dataclass(frozen=True)
class SolutionSummary:
   """
   Predicted distributions of k solutions plus the quantities derived from them.

   Objective arrays are (k, M), constraint arrays (k, p). `proj_mean`/`proj_var` hold the
   distributions projected on each solution's reference vector once assigned.
   """
   obj_mean: np.ndarray
   obj_var: np.ndarray
   con_mean: np.ndarray
   con_var: np.ndarray
   pof: np.ndarray
   cv_mean: np.ndarray
   cv_var: np.ndarray
   proj_mean: np.ndarray | None = None
   proj_var: np.ndarray | None = None

   def __len__(self) -> int:
      return len(self.pof)

   def subset(self, index) -> "SolutionSummary":
      index = np.asarray(index)
      pick = lambda a: None if a is None else a[index]
      return SolutionSummary(
         self.obj_mean[index], self.obj_var[index], self.con_mean[index], self.con_var[index],
         self.pof[index], self.cv_mean[index], self.cv_var[index],
         pick(self.proj_mean), pick(self.proj_var),
      )

   def with_projection(self, mean, var) -> "SolutionSummary":
      return replace(self, proj_mean=np.asarray(mean, dtype=float), proj_var=np.asarray(var, dtype=float))

   def objectives(self, projected: bool) -> tuple[np.ndarray, np.ndarray]:
      if projected:
         if self.proj_mean is None:
            raise ValueError("summary has no projected distributions")
         return self.proj_mean[:, None], self.proj_var[:, None]
      return self.obj_mean, self.obj_var


def summarize(obj_mean, obj_var, con_mean, con_var) -> SolutionSummary:
   obj_mean = np.atleast_2d(np.asarray(obj_mean, dtype=float))
   obj_var = np.atleast_2d(np.maximum(np.asarray(obj_var, dtype=float), 0.0))
   con_mean = np.atleast_2d(np.asarray(con_mean, dtype=float))
   con_var = np.atleast_2d(np.maximum(np.asarray(con_var, dtype=float), 0.0))
   cv_mean, cv_var = cv_distribution(con_mean, con_var)
   return SolutionSummary(obj_mean, obj_var, con_mean, con_var, pof(con_mean, con_var), cv_mean, cv_var)


def dominance_matrix(a: SolutionSummary, b: SolutionSummary, projected: bool = False) -> np.ndarray:
   """(len(a), len(b)) matrix of P(F(a_i) dominates F(b_j))."""
   mean_a, var_a = a.objectives(projected)
   mean_b, var_b = b.objectives(projected)
   return prob_dominance(mean_a[:, None, :], var_a[:, None, :], mean_b[None, :, :], var_b[None, :, :])


def pcd_matrix(a: SolutionSummary, b: SolutionSummary, projected: bool = False) -> np.ndarray:
   """
   Probability of constrained domination for every pair (a_i, b_j).

   PoF_a (1 - PoF_b) + PoF_a PoF_b P(F(a) dominates F(b)) + (1 - PoF_a)(1 - PoF_b) P(CV(a) < CV(b))
   """
   pa = a.pof[:, None]
   pb = b.pof[None, :]
   cv_less = prob_cv_less(a.cv_mean[:, None], a.cv_var[:, None], b.cv_mean[None, :], b.cv_var[None, :])
   return pa * (1 - pb) + pa * pb * dominance_matrix(a, b, projected) + (1 - pa) * (1 - pb) * cv_less


def pcd(x: SolutionSummary, y: SolutionSummary, projected: bool = False) -> float:
   return float(pcd_matrix(x.subset([0]), y.subset([0]), projected)[0, 0])


def mean_pairwise(matrix: np.ndarray) -> np.ndarray:
   """
   Row means of a square pairwise matrix excluding the diagonal; a single member scores 1.
   """
   k = len(matrix)
   if k == 1:
      return np.ones(1)
   return (matrix.sum(axis=1) - np.diag(matrix)) / (k - 1)
