import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm
from handler.probability import (
   GaussianScalar,
   constraint_pof,
   cv_distribution,
   erf,
   mean_pairwise,
   pcd,
   pof,
   prob_cv_less,
   prob_dominance,
   rectified_moments,
   summarize,
)

DRAWS = 10 ** 6


def chunked_mean(sampler, chunks=4):
   return np.mean([sampler() for _ in range(chunks)], axis=0)


def test_gaussian_scalar_rejects_negative_variance():
   with pytest.raises(ValueError):
      GaussianScalar(0.0, -1.0)


def test_pof_examples():
   assert pof([0.0], [1.0]) == pytest.approx(0.5)
   assert pof([0.0, 0.0], [1.0, 1.0]) == pytest.approx(0.25)
   assert pof([-3.0], [1.0]) == pytest.approx(norm.cdf(3.0), abs=1e-12)


def test_pof_degenerate_constraints():
   assert pof([-0.1], [0.0]) == 1.0
   assert pof([0.0], [0.0]) == 1.0
   assert pof([0.2], [0.0]) == 0.0


def test_pof_decreases_with_mean():
   means = np.linspace(-3, 3, 50)
   values = constraint_pof(means, np.ones_like(means))
   assert np.all(np.diff(values) < 0)


def test_prob_dominance_examples():
   assert prob_dominance([1.0], [2.0], [1.0], [2.0]) == pytest.approx(0.5)
   assert prob_dominance([1.0, 1.0], [2.0, 2.0], [1.0, 1.0], [2.0, 2.0]) == pytest.approx(0.25)
   assert prob_dominance([0.0], [1.0], [2.0], [1.0]) == pytest.approx(norm.cdf(np.sqrt(2)), abs=1e-12)


def test_prob_dominance_degenerate_tie_is_half():
   assert prob_dominance([1.0], [0.0], [1.0], [0.0]) == 0.5
   assert prob_dominance([0.0], [0.0], [1.0], [0.0]) == 1.0


def test_prob_dominance_matches_monte_carlo():
   rng = np.random.default_rng(7)
   mean_x, var_x = np.array([0.2, 0.5]), np.array([0.3, 0.1])
   mean_y, var_y = np.array([0.4, 0.4]), np.array([0.2, 0.4])

   def sample():
      x = rng.normal(mean_x, np.sqrt(var_x), (DRAWS, 2))
      y = rng.normal(mean_y, np.sqrt(var_y), (DRAWS, 2))
      # Objective-wise product of marginal probabilities
      return np.prod(np.mean(x < y, axis=0))

   assert prob_dominance(mean_x, var_x, mean_y, var_y) == pytest.approx(chunked_mean(sample), abs=3e-3)


def test_rectified_moments_standard_normal():
   mean, var = rectified_moments(0.0, 1.0)
   assert mean == pytest.approx(0.3989, abs=3e-3)
   assert var == pytest.approx(0.3408, abs=3e-3)


def test_rectified_moments_limits():
   mean, var = rectified_moments(10.0, 1e-3)
   assert mean == pytest.approx(10.0, abs=1e-6)
   assert var == pytest.approx(1e-6, abs=1e-6)
   mean, var = rectified_moments(-10.0, 1e-3)
   assert mean == pytest.approx(0.0, abs=1e-6)
   assert var == pytest.approx(0.0, abs=1e-6)


def test_rectified_moments_match_monte_carlo():
   rng = np.random.default_rng(3)
   for mu, sigma in [(0.3, 0.5), (-0.4, 1.0), (1.0, 2.0)]:
      draws = np.maximum(rng.normal(mu, sigma, 4 * DRAWS), 0.0)
      mean, var = rectified_moments(mu, sigma)
      assert mean == pytest.approx(draws.mean(), abs=3e-3 * max(sigma, 1))
      assert var == pytest.approx(draws.var(), abs=1e-2 * max(sigma, 1) ** 2)


def test_rectified_moments_bounds(rng):
   mu = rng.uniform(-5, 5, 10 ** 4)
   sigma = rng.uniform(1e-3, 3, 10 ** 4)
   mean, var = rectified_moments(mu, sigma)
   assert np.all(mean >= np.maximum(0, mu) - 1e-9)
   assert np.all(var <= sigma ** 2 + 1e-9)


def test_cv_distribution_examples():
   mean, var = cv_distribution(np.array([-10.0]), np.array([1e-6]))
   assert mean == pytest.approx(0.0, abs=1e-6)
   assert var == pytest.approx(0.0, abs=1e-6)

   mean, var = cv_distribution(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
   assert mean == pytest.approx(0.7979, abs=3e-3)
   assert var == pytest.approx(0.6817, abs=3e-3)


def test_cv_distribution_matches_monte_carlo():
   rng = np.random.default_rng(11)
   mu = np.array([-0.5, 0.2, 1.0])
   sigma = np.array([1.0, 0.3, 0.8])
   draws = np.maximum(rng.normal(mu, sigma, (4 * DRAWS, 3)), 0.0).sum(axis=1)
   mean, _ = cv_distribution(mu, sigma ** 2)
   assert mean == pytest.approx(draws.mean(), abs=3e-3)


def test_cv_distribution_degenerate_constraint_is_exact():
   mean, var = cv_distribution(np.array([0.4, -1.0]), np.array([0.0, 0.0]))
   assert mean == pytest.approx(0.4)
   assert var == 0.0


def test_prob_cv_less_examples():
   assert prob_cv_less(1.0, 0.5, 1.0, 0.5) == pytest.approx(0.5)
   assert prob_cv_less(0.0, 1.0, 2.0, 1.0) == pytest.approx(norm.cdf(np.sqrt(2)), abs=1e-12)
   assert prob_cv_less(1.0, 0.0, 3.0, 0.0) == 1.0


def test_prob_cv_less_is_complementary(rng):
   a, b = rng.normal(size=100), rng.normal(size=100)
   va, vb = rng.uniform(0.01, 2, 100), rng.uniform(0.01, 2, 100)
   np.testing.assert_allclose(prob_cv_less(a, va, b, vb) + prob_cv_less(b, vb, a, va), 1.0, atol=1e-12)


def make_summary(obj_mean, obj_var, con_mean, con_var):
   return summarize([obj_mean], [obj_var], [con_mean], [con_var])


def test_pcd_feasible_beats_infeasible():
   x = make_summary([1.0, 1.0], [0.1, 0.1], [-1.0], [0.0])
   y = make_summary([0.0, 0.0], [0.1, 0.1], [1.0], [0.0])
   assert pcd(x, y) == 1.0
   assert pcd(y, x) == 0.0


def test_pcd_both_feasible_identical_projection_is_half():
   x = make_summary([1.0, 2.0], [0.1, 0.1], [-1.0], [0.0])
   x = x.with_projection([0.5], [0.2])
   assert pcd(x, x, projected=True) == pytest.approx(0.5)


def test_pcd_both_infeasible_identical_cv_is_half():
   x = make_summary([1.0, 2.0], [0.1, 0.1], [1.0], [0.0])
   y = make_summary([0.0, 0.0], [0.1, 0.1], [1.0], [0.0])
   assert pcd(x, y) == pytest.approx(0.5)


def test_summary_pof_consistent_with_constraints(rng):
   con_mean, con_var = rng.normal(size=(10, 3)), rng.uniform(0, 1, (10, 3))
   summary = summarize(rng.normal(size=(10, 2)), np.ones((10, 2)), con_mean, con_var)
   np.testing.assert_allclose(summary.pof, pof(con_mean, con_var), atol=1e-12)


def test_probabilities_stay_in_unit_interval(rng):
   m = rng.normal(size=(10 ** 4, 2))
   v = rng.uniform(0, 2, (10 ** 4, 2))
   values = prob_dominance(m, v, m[::-1], v[::-1])
   assert np.all((values >= 0) & (values <= 1))
   values = pof(m, v)
   assert np.all((values >= 0) & (values <= 1))


def test_mean_pairwise_singleton_scores_one():
   assert mean_pairwise(np.array([[0.5]])).tolist() == [1.0]
   np.testing.assert_allclose(mean_pairwise(np.array([[0.5, 0.2], [0.8, 0.5]])), [0.2, 0.8])


def test_erf():
   assert erf(0.0) == 0.0
   xs = np.linspace(0.1, 3, 7)
   np.testing.assert_allclose(erf(-xs), -erf(xs))
   quad, _ = integrate.quad(lambda t: 2 / np.sqrt(np.pi) * np.exp(-t * t), 0, 1)
   assert erf(1.0) == pytest.approx(quad, abs=1e-12)
   assert erf(1.0) == pytest.approx(0.8427007929, abs=1e-10)
