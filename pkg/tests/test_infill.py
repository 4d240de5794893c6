import numpy as np
import pytest
from scipy.spatial.distance import cdist
from handler.archive import ArchiveManager
from handler.config import SearchFlag, Variant
from handler.decomposition import NormalizationBounds
from handler.infill import (
   RVTagState,
   build_reference_set,
   mahalanobis_min_distance,
   random_infill,
   select_infill_all_infeasible,
   shadow_seeds,
   two_stage_infill,
   update_shadow,
)
from handler.probability import summarize
from handler.ranking import rank_cluster
from handler.subea import CandidateSet
from problems import get_problem
from problems.problem import EvaluatedSolution

UNIT = NormalizationBounds(np.zeros(2), np.ones(2))
QUANTILE_90 = 1.2815515655446004


def candidate_set(obj_mean, con_mean, con_var=None, rv=None, obj_var=1.0):
   obj_mean = np.asarray(obj_mean, dtype=float)
   con_mean = np.asarray(con_mean, dtype=float)
   con_var = np.ones_like(con_mean) if con_var is None else np.asarray(con_var, dtype=float)
   summary = summarize(obj_mean, np.full_like(obj_mean, obj_var), con_mean, con_var)
   rv = np.arange(len(obj_mean)) if rv is None else np.asarray(rv)
   return CandidateSet(obj_mean.copy(), summary, rv)


def archive_of(rows):
   archive = ArchiveManager(2, 2, 1)
   for F, g in rows:
      archive.add(EvaluatedSolution(np.full(2, 0.01 * (archive.size + 1)), F, [g], archive.size + 1))
   return archive


def test_high_pof_candidate_wins():
   candidates = candidate_set([[0.5, 0.5], [0.5, 0.5]], [[QUANTILE_90], [-QUANTILE_90]])
   np.testing.assert_allclose(candidates.summary.pof, [0.1, 0.9])
   assert select_infill_all_infeasible(candidates, RVTagState(), SearchFlag.CONSTRAINED) == 1


def test_tagged_top_candidate_yields_to_second():
   candidates = candidate_set([[0.1, 0.9], [0.5, 0.5], [0.9, 0.1]], [[0.2], [0.5], [1.0]], rv=[5, 6, 7])
   order = rank_cluster(candidates.summary, Variant.PSCMOEA, SearchFlag.CONSTRAINED, False)
   tags = RVTagState([int(candidates.rv[order[0]])], True)

   chosen = select_infill_all_infeasible(candidates, tags, SearchFlag.CONSTRAINED)
   assert chosen == order[1]
   assert tags.tags[-1] == candidates.rv[order[1]]
   assert tags.flag


def test_single_candidate_ignores_tags():
   candidates = candidate_set([[0.5, 0.5]], [[1.0]], rv=[3])
   tags = RVTagState([3], True)
   assert select_infill_all_infeasible(candidates, tags, SearchFlag.CONSTRAINED) == 0


def test_all_tagged_clears_tags():
   candidates = candidate_set([[0.1, 0.9], [0.9, 0.1]], [[0.2], [0.4]], rv=[1, 2])
   order = rank_cluster(candidates.summary, Variant.PSCMOEA, SearchFlag.CONSTRAINED, False)
   tags = RVTagState([1, 2], True)
   assert select_infill_all_infeasible(candidates, tags, SearchFlag.CONSTRAINED) == order[0]
   assert tags.tags == [int(candidates.rv[order[0]])]


def test_first_selection_switches_tag_flag_on():
   candidates = candidate_set([[0.1, 0.9], [0.9, 0.1]], [[0.2], [0.4]], rv=[1, 2])
   tags = RVTagState()
   select_infill_all_infeasible(candidates, tags, SearchFlag.CONSTRAINED)
   assert tags.flag and len(tags.tags) == 1
   with pytest.raises(ValueError):
      select_infill_all_infeasible(candidates.subset([]), tags, SearchFlag.CONSTRAINED)


def test_tags_reset_when_bounds_change():
   tags = RVTagState()
   assert not tags.observe_bounds(UNIT)
   tags.tags.append(4)
   tags.flag = True
   assert not tags.observe_bounds(NormalizationBounds(np.zeros(2), np.ones(2)))
   assert tags.tags == [4]
   assert tags.observe_bounds(NormalizationBounds(np.zeros(2), np.full(2, 2.0)))
   assert tags.tags == [] and not tags.flag


def test_build_reference_set():
   F = np.array([[1, 1], [0.5, 2], [2, 2]])
   np.testing.assert_array_equal(build_reference_set(F, [True, False, False]), [[1, 1], [0.5, 2]])
   np.testing.assert_array_equal(build_reference_set(F, [True, True, True]), [[1, 1], [0.5, 2]])
   np.testing.assert_array_equal(build_reference_set(F, [True, True, False]), [[1, 1], [0.5, 2]])
   np.testing.assert_array_equal(build_reference_set([[0, 0], [1, 1]], [True, False]), [[0, 0]])
   with pytest.raises(ValueError):
      build_reference_set(F, [False, False, False])


def test_mahalanobis_with_unit_variance_is_euclidean(rng):
   mean = rng.random((10, 2))
   references = rng.random((25, 2))
   expected = cdist(mean, references).min(axis=1)
   np.testing.assert_allclose(mahalanobis_min_distance(mean, np.ones_like(mean), references), expected)
   np.testing.assert_allclose(mahalanobis_min_distance(mean, np.full_like(mean, 4.0), references), expected / 2)
   assert np.all(np.isinf(mahalanobis_min_distance(mean, np.ones_like(mean), np.empty((0, 2)))))


def test_two_stage_single_non_dominated_candidate():
   reference = np.array([[0.0, 1.0], [1.0, 0.0]])
   candidates = candidate_set([[0.4, 0.4], [2.0, 2.0]], [[-1.0], [-1.0]])
   assert two_stage_infill(candidates, reference, np.empty((0, 2)), UNIT) == 0


def test_two_stage_falls_back_to_candidate_front():
   reference = np.array([[0.0, 1.0], [1.0, 0.0]])
   candidates = candidate_set([[2.0, 2.0], [3.0, 3.0]], [[-1.0], [-1.0]])
   assert two_stage_infill(candidates, reference, np.empty((0, 2)), UNIT) == 0
   candidates = candidate_set([[2.0, 2.0], [1.5, 3.0]], [[-1.0], [-1.0]])
   # Nearest reference distances: sqrt(5) against 2.5
   assert two_stage_infill(candidates, reference, np.empty((0, 2)), UNIT) == 1


def test_two_stage_prefers_far_candidate():
   reference = np.array([[0.0, 1.0], [1.0, 0.0]])
   shadow = np.array([[0.2, 0.75]])
   candidates = candidate_set([[0.2, 0.7], [0.45, 0.45]], [[-1.0], [-1.0]])
   assert two_stage_infill(candidates, reference, shadow, UNIT) == 1
   assert two_stage_infill(candidates, reference, np.empty((0, 2)), UNIT) == 1


def test_shadow_seeds():
   F = np.array([[0, 1], [1, 0], [0.5, 0.5], [2, 2]])
   np.testing.assert_array_equal(shadow_seeds(F, [True, True, False, False]), [[0.5, 0.5]])
   assert shadow_seeds(F, [False] * 4).shape == (0, 2)


@pytest.fixture
def shadow_archive():
   archive = archive_of([([0.0, 1.0], -1.0), ([1.0, 0.0], -1.0), ([0.1, 1.05], 0.5)])
   archive.activate_shadow()
   return archive


def test_shadow_takes_dominated_point(shadow_archive):
   assert update_shadow(shadow_archive, [2.0, 2.0], True, UNIT)
   assert shadow_archive.shadow_size == 1


def test_shadow_skips_point_extending_front(shadow_archive):
   assert not update_shadow(shadow_archive, [0.6, 0.3], True, UNIT)
   assert shadow_archive.shadow_size == 0


def test_shadow_takes_infeasible_point(shadow_archive):
   assert update_shadow(shadow_archive, [0.1, 0.1], False, UNIT)


def test_shadow_takes_point_next_to_dominated_neighbour(shadow_archive):
   assert update_shadow(shadow_archive, [0.09, 0.99], True, UNIT)


def test_inactive_shadow_ignores_points():
   archive = archive_of([([0.0, 1.0], 1.0)])
   assert not update_shadow(archive, [2.0, 2.0], False, UNIT)
   assert archive.shadow_size == 0


def test_random_infill_stays_in_bounds(rng):
   problem = get_problem("MW1", 3)
   archive = ArchiveManager(3, 2, 1)
   x = random_infill(archive, problem, rng)
   assert x.shape == (3,)
   assert np.all(x >= problem.lower) and np.all(x <= problem.upper)
