"""
Choice of the single candidate that receives the next expensive evaluation.

While the archive holds no feasible solution the candidates are ranked against each other
and spread across reference vectors with the tag list. Afterwards a two-stage filter keeps
the candidates predicted non-dominated with respect to the reference set and picks the one
farthest (Mahalanobis) from everything already known.
"""
from dataclasses import dataclass, field
import logging
import numpy as np
from scipy.spatial.distance import cdist
from handler.archive import ArchiveManager
from handler.config import SearchFlag, Variant
from handler.decomposition import NormalizationBounds, normalize
from handler.ranking import rank_cluster
from handler.subea import CandidateSet, replace_duplicates
from problems.problem import ProblemDefinition
from problems.sampling import uniform_sample
from utils.utils import dominated_by, nondominated_mask

logger = logging.getLogger(__name__)

# Smallest predictive variance used in the Mahalanobis distance
VARIANCE_FLOOR = 1e-12


@dataclass
class RVTagState:
   """Reference vectors that already received an infill since the bounds last changed."""
   tags: list[int] = field(default_factory=list)
   flag: bool = False
   bounds: NormalizationBounds | None = None

   def reset(self) -> None:
      self.tags.clear()
      self.flag = False

   def observe_bounds(self, bounds: NormalizationBounds) -> bool:
      """
      Clears the tags when the bounds differ from the last ones seen.

      Returns:
         True if the bounds changed.
      """
      changed = self.bounds is not None and self.bounds != bounds
      if changed:
         self.reset()
      self.bounds = bounds
      return changed


def select_infill_all_infeasible(
   candidates: CandidateSet,
   tags: RVTagState,
   flag: SearchFlag,
   variant: Variant = Variant.PSCMOEA,
   pof_threshold: float = 0.99,
) -> int:
   """
   Ranks the candidates against each other in the full objective space and returns the best
   one whose reference vector is not tagged yet.

   With every candidate's vector tagged the tags are cleared and the top candidate wins.
   The chosen vector is appended to the tags and the tag flag is switched on.

   Args:
      candidates: Non-empty candidate set.
      tags: Tag state, updated in place.
      flag: Current search flag.
      variant: Ranking variant.
      pof_threshold: Threshold of the lexicographic variant.

   Returns:
      Index into `candidates`.
   """
   if len(candidates) == 0:
      raise ValueError("infill selection needs at least one candidate")

   order = rank_cluster(candidates.summary, variant, flag, False, pof_threshold)
   chosen = order[0]
   if tags.flag and len(candidates) > 1:
      untagged = [i for i in order if candidates.rv[i] not in tags.tags]
      if untagged:
         chosen = untagged[0]
      else:
         logger.debug("All candidate reference vectors tagged, clearing %d tags", len(tags.tags))
         tags.tags.clear()

   tags.tags.append(int(candidates.rv[chosen]))
   tags.flag = True
   return int(chosen)


def build_reference_set(F, feasible) -> np.ndarray:
   """
   Feasible non-dominated objective vectors plus every infeasible one that no member of that
   set dominates.
   """
   F = np.atleast_2d(np.asarray(F, dtype=float))
   feasible = np.asarray(feasible, dtype=bool)
   if not feasible.any():
      raise ValueError("reference set needs a feasible solution")

   front = F[feasible][nondominated_mask(F[feasible])]
   infeasible = F[~feasible]
   if len(infeasible) == 0:
      return front
   return np.vstack([front, infeasible[~dominated_by(infeasible, front)]])


def mahalanobis_min_distance(mean, variance, references) -> np.ndarray:
   """
   Smallest distance from each candidate distribution to the reference points, scaled by the
   candidate's own diagonal variance.
   """
   mean = np.atleast_2d(np.asarray(mean, dtype=float))
   scale = np.sqrt(np.maximum(np.atleast_2d(variance), VARIANCE_FLOOR))
   references = np.atleast_2d(np.asarray(references, dtype=float))
   if references.size == 0:
      return np.full(len(mean), np.inf)

   # Per-candidate scaling, so each row has its own metric
   distance = np.array([
      cdist(mean[i:i + 1] / scale[i], references / scale[i]).min()
      for i in range(len(mean))
   ])
   return distance


def two_stage_infill(
   candidates: CandidateSet,
   reference: np.ndarray,
   shadow: np.ndarray,
   bounds: NormalizationBounds,
) -> int:
   """
   Stage one keeps the candidates whose predicted means no reference point dominates, falling
   back to the non-dominated candidates. Stage two returns the member with the largest minimum
   Mahalanobis distance to the reference and shadow points, all in normalized space.

   Returns:
      Index into `candidates`.
   """
   if len(candidates) == 0:
      raise ValueError("infill selection needs at least one candidate")

   mean = candidates.summary.obj_mean
   stage_one = np.flatnonzero(~dominated_by(mean, reference))
   if len(stage_one) == 0:
      stage_one = np.flatnonzero(nondominated_mask(mean))
   if len(stage_one) == 1:
      return int(stage_one[0])

   known = np.vstack([reference, shadow]) if len(shadow) else reference
   norm_mean, norm_var = normalize(mean[stage_one], candidates.summary.obj_var[stage_one], bounds)
   norm_known = (known - bounds.zi) / bounds.span
   distance = mahalanobis_min_distance(norm_mean, norm_var, norm_known)
   return int(stage_one[np.argmax(distance)])


def shadow_seeds(F, feasible) -> np.ndarray:
   """Infeasible objective vectors that no feasible solution dominates."""
   F = np.atleast_2d(np.asarray(F, dtype=float))
   feasible = np.asarray(feasible, dtype=bool)
   infeasible = F[~feasible]
   if len(infeasible) == 0 or not feasible.any():
      return np.empty((0, F.shape[1]))
   return infeasible[~dominated_by(infeasible, F[feasible])]


def belongs_in_shadow(f, feasible: bool, archive: ArchiveManager, bounds: NormalizationBounds) -> bool:
   """
   Decides whether a new evaluation, not yet archived, joins the shadow archive.

   It does when a feasible archive member dominates it, when it is infeasible, or when its
   nearest archive neighbour (normalized objective space) is itself dominated by a feasible
   archive member.
   """
   f = np.asarray(f, dtype=float)
   feasible_F = archive.F[archive.feasible]
   if len(feasible_F) and dominated_by(f[None, :], feasible_F)[0]:
      return True
   if not feasible:
      return True

   scaled = (archive.F - bounds.zi) / bounds.span
   nearest = int(np.argmin(cdist(((f - bounds.zi) / bounds.span)[None, :], scaled)[0]))
   return bool(len(feasible_F) and dominated_by(archive.F[nearest:nearest + 1], feasible_F)[0])


def update_shadow(archive: ArchiveManager, f, feasible: bool, bounds: NormalizationBounds) -> bool:
   """
   Applies the shadow rules to a new evaluation before it enters the archive.

   Returns:
      True if the point was added.
   """
   if not archive.shadow_active:
      return False
   if belongs_in_shadow(f, feasible, archive, bounds):
      archive.add_shadow(f)
      return True
   return False


def random_infill(archive: ArchiveManager, problem: ProblemDefinition, rng: np.random.Generator, tolerance: float = 1e-4) -> np.ndarray:
   """Uniform random decision vector kept away from the archive."""
   point = uniform_sample(1, problem, rng)
   return replace_duplicates(point, archive.X, problem, rng, tolerance)[0]
