from dataclasses import dataclass
import numpy as np
from pymoo.util.ref_dirs import get_reference_directions
from utils.utils import dominated_by, nondominated_mask

# Nadir extension applied once a feasible solution exists
BOUNDARY_EXTENSION = 0.1


@dataclass(frozen=True)
class ReferenceVectorSet:
   """
   Unit directions from a simplex lattice. Each direction stands for the full line through
   the normalized ideal point, so points behind the ideal are assigned and projected too.
   """
   directions: np.ndarray
   H: int

   def __len__(self) -> int:
      return len(self.directions)

   @property
   def M(self) -> int:
      return self.directions.shape[1]


@dataclass(frozen=True)
class NormalizationBounds:
   zi: np.ndarray
   zn: np.ndarray

   def __eq__(self, other) -> bool:
      if not isinstance(other, NormalizationBounds):
         return NotImplemented
      return bool(np.array_equal(self.zi, other.zi) and np.array_equal(self.zn, other.zn))

   def __hash__(self):
      return hash((self.zi.tobytes(), self.zn.tobytes()))

   @property
   def span(self) -> np.ndarray:
      return self.zn - self.zi


def generate_mirrored_rvs(M: int, H: int) -> ReferenceVectorSet:
   """
   Das-Dennis simplex-lattice directions with spacing 1/H, scaled to unit length.

   Args:
      M: Objective count.
      H: Divisions per objective.

   Returns:
      ReferenceVectorSet with C(H + M - 1, M - 1) directions.
   """
   if M < 2 or H < 1:
      raise ValueError("need M >= 2 and H >= 1")

   W = get_reference_directions("das-dennis", M, n_partitions=H)
   W = W / np.linalg.norm(W, axis=1, keepdims=True)
   return ReferenceVectorSet(W, H)


def _repair(zi: np.ndarray, zn: np.ndarray) -> NormalizationBounds:
   zn = zn.copy()
   flat = zn <= zi
   zn[flat] = zi[flat] + np.maximum(1e-12, 1e-6 * np.abs(zi[flat]))
   return NormalizationBounds(zi, zn)


def compute_bounds(F, feasible) -> NormalizationBounds:
   """
   Ideal and nadir estimates used to normalize predictions.

   Without feasible solutions the bounds span every archived objective vector. Otherwise
   they span the feasible non-dominated set together with the infeasible solutions no
   feasible non-dominated point dominates, and the nadir is pushed out by 10% of the range.

   Args:
      F: (n, M) archive objectives.
      feasible: (n,) feasibility flags.

   Returns:
      NormalizationBounds with zi < zn componentwise.
   """
   F = np.atleast_2d(np.asarray(F, dtype=float))
   feasible = np.asarray(feasible, dtype=bool)
   if len(F) == 0:
      raise ValueError("bounds need a nonempty archive")

   if not feasible.any():
      return _repair(F.min(axis=0), F.max(axis=0))

   feasible_F = F[feasible]
   front = feasible_F[nondominated_mask(feasible_F)]
   infeasible_F = F[~feasible]
   qualifying = infeasible_F[~dominated_by(infeasible_F, front)] if len(infeasible_F) else infeasible_F
   combined = np.vstack([front, qualifying]) if len(qualifying) else front

   zi = combined.min(axis=0)
   zn = combined.max(axis=0)
   zn = zn + BOUNDARY_EXTENSION * (zn - zi)
   return _repair(zi, zn)


def normalize(mean, variance, bounds: NormalizationBounds) -> tuple[np.ndarray, np.ndarray]:
   span = bounds.span
   return (np.asarray(mean) - bounds.zi) / span, np.asarray(variance) / span ** 2


def denormalize(mean, bounds: NormalizationBounds) -> np.ndarray:
   return np.asarray(mean) * bounds.span + bounds.zi


def assign_to_rv(points, rvs: ReferenceVectorSet) -> np.ndarray:
   """
   Index of the direction line with the smallest acute angle to each point.

   Ties go to the lowest index; a point at the origin is assigned to direction 0.
   """
   points = np.atleast_2d(np.asarray(points, dtype=float))
   norms = np.linalg.norm(points, axis=1)
   safe = np.where(norms > 0, norms, 1.0)
   cosine = np.abs(points @ rvs.directions.T) / safe[:, None]
   index = np.argmax(cosine, axis=1)
   index[norms == 0] = 0
   return index


def project(mean, variance, direction) -> tuple[np.ndarray, np.ndarray]:
   """
   Signed projection of independent Gaussians on unit directions.

   Args:
      mean: (..., M) normalized means.
      variance: (..., M) normalized variances.
      direction: (..., M) unit directions, broadcast against `mean`.

   Returns:
      Projected means w . mu and variances sum w^2 sigma^2.
   """
   direction = np.asarray(direction, dtype=float)
   return np.sum(direction * mean, axis=-1), np.sum(direction ** 2 * variance, axis=-1)
