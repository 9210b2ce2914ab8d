"""Tests for the simplex bound, the Chernoff exponent and its closed form minimizer."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize

from simplex_hoeffding.bounds import (
    NUM_TOL,
    CompletedPoint,
    SimplexPoint,
    TailDirection,
    chernoff_log_bound,
    complete,
    exponent_M,
    hoeffding_binary_bound,
    kl_divergence,
    lemma1_gap,
    mgf_envelope,
    optimal_t,
    theorem1_bound,
)
from simplex_hoeffding.exceptions import (
    DegenerateTarget,
    InvalidSimplexPoint,
    PreconditionOrderViolated,
    RequiresStrictInterior,
)


def _random_interior_pair(rng, k, direction):
    """Mean and target with completed coordinates bounded away from 0, ordered as `direction` requires."""
    mu_c = rng.dirichlet(np.full(k + 1, 2.0))
    mu = mu_c[1:]
    if direction is TailDirection.LOWER:
        z = mu * rng.uniform(0.05, 1.0, size=k)
    else:
        z = mu + rng.uniform(0.0, 0.95, size=k) * mu_c[0] / k
    return mu, z


class TestComplete:

    def test_completion_coordinate_first(self):
        np.testing.assert_allclose(complete([0.3, 0.3]).coords, [0.4, 0.3, 0.3], rtol=1e-15)

    def test_vertex(self):
        np.testing.assert_array_equal(complete([1.0]).coords, [0.0, 1.0])

    def test_sum_exceeds_one(self):
        with pytest.raises(InvalidSimplexPoint):
            complete([0.6, 0.6])

    def test_negative_coordinate(self):
        with pytest.raises(InvalidSimplexPoint):
            SimplexPoint([0.2, -0.1])

    def test_tiny_negative_is_clamped(self):
        point = SimplexPoint([0.5, -1e-12])
        assert point.coords[1] == 0.0

    def test_completed_point_must_sum_to_one(self):
        with pytest.raises(InvalidSimplexPoint):
            CompletedPoint([0.5, 0.4])

    def test_points_are_immutable(self):
        point = complete([0.2, 0.2])
        with pytest.raises(ValueError):
            point.coords[0] = 0.0


class TestKLDivergence:

    def test_identical_points(self):
        p = complete([0.2, 0.5])
        assert kl_divergence(p, p) == 0.0

    def test_two_cells(self):
        expected = 0.3 * math.log(0.6) + 0.7 * math.log(1.4)
        result = kl_divergence(CompletedPoint([0.7, 0.3]), CompletedPoint([0.5, 0.5]))
        np.testing.assert_allclose(result, expected, rtol=1e-12)
        np.testing.assert_allclose(result, 0.08228, atol=1e-5)

    def test_zero_coordinate_contributes_nothing(self):
        result = kl_divergence(CompletedPoint([1.0, 0.0]), CompletedPoint([0.5, 0.5]))
        np.testing.assert_allclose(result, math.log(2), rtol=1e-12)

    def test_infinite_divergence(self):
        assert kl_divergence(CompletedPoint([0.5, 0.5]), CompletedPoint([1.0, 0.0])) == math.inf

    def test_dimension_mismatch(self):
        with pytest.raises(DegenerateTarget):
            kl_divergence(CompletedPoint([0.5, 0.5]), CompletedPoint([0.2, 0.3, 0.5]))


class TestTheorem1Bound:

    @pytest.mark.parametrize("direction", ["lower", "upper"])
    def test_target_equals_mean(self, direction):
        result = theorem1_bound([0.2, 0.3], [0.2, 0.3], 7, direction)
        assert result.bound == 1.0
        assert result.log_bound == 0.0
        assert result.kl == 0.0

    def test_scalar_lower_tail(self):
        expected = (0.5 / 0.3) ** 3 * (0.5 / 0.7) ** 7
        result = theorem1_bound([0.5], [0.3], 10, TailDirection.LOWER)
        np.testing.assert_allclose(result.bound, expected, rtol=1e-12)
        np.testing.assert_allclose(result.bound, 0.4392, atol=1e-4)
        np.testing.assert_allclose(result.bound, math.exp(-10 * kl_divergence(complete([0.3]), complete([0.5]))),
                                   rtol=1e-12)

    def test_scalar_upper_tail(self):
        expected = (0.5 / 0.7) ** 7 * (0.5 / 0.3) ** 3
        result = theorem1_bound([0.5], [0.7], 10, "upper")
        np.testing.assert_allclose(result.bound, expected, rtol=1e-12)

    def test_exponent_terms_cover_completed_vectors(self):
        result = theorem1_bound([0.3, 0.3], [0.2, 0.1], 4, "lower")
        z, mu = np.array([0.7, 0.2, 0.1]), np.array([0.4, 0.3, 0.3])
        np.testing.assert_allclose(result.per_coordinate_exponent, z * np.log(mu / z), rtol=1e-12)
        np.testing.assert_allclose(result.mu.coords, mu, rtol=1e-15)
        np.testing.assert_allclose(result.z.coords, z, rtol=1e-15)

    def test_lower_precondition_violated(self):
        with pytest.raises(PreconditionOrderViolated) as excinfo:
            theorem1_bound([0.3, 0.3], [0.4, 0.4], 5, "lower")
        assert excinfo.value.index == 1
        assert excinfo.value.direction == "lower"

    def test_upper_precondition_reports_first_violation(self):
        with pytest.raises(PreconditionOrderViolated) as excinfo:
            theorem1_bound([0.3, 0.3], [0.4, 0.2], 5, "upper")
        assert excinfo.value.index == 2

    def test_order_tolerance(self):
        with pytest.raises(PreconditionOrderViolated):
            theorem1_bound([0.3], [0.3 + 1e-10], 5, "lower")
        result = theorem1_bound([0.3], [0.3 + 1e-10], 5, "lower", order_tol=1e-9)
        np.testing.assert_allclose(result.bound, 1.0, atol=1e-12)

    def test_impossible_event_has_zero_bound(self):
        # mu_0 = 0 forces every sample mean onto the face sum = 1
        result = theorem1_bound([0.5, 0.5], [0.3, 0.3], 3, "lower")
        assert result.divergence_infinite
        assert result.bound == 0.0
        assert result.log_bound == -math.inf
        assert result.kl == math.inf

    def test_dimension_mismatch(self):
        with pytest.raises(DegenerateTarget):
            theorem1_bound([0.3, 0.3], [0.2], 5, "lower")

    def test_empty_vectors(self):
        with pytest.raises(DegenerateTarget):
            theorem1_bound([], [], 5, "lower")

    @pytest.mark.parametrize("n", [0, -3, 2.5])
    def test_invalid_sample_count(self, n):
        with pytest.raises(ValueError):
            theorem1_bound([0.5], [0.3], n, "lower")

    def test_unknown_direction(self):
        with pytest.raises(ValueError):
            theorem1_bound([0.5], [0.3], 5, "sideways")

    def test_bound_decreases_with_n(self):
        bounds = [theorem1_bound([0.2, 0.4], [0.1, 0.3], n, "lower").bound for n in (1, 2, 5, 10, 50)]
        assert all(a > b for a, b in zip(bounds, bounds[1:]))

    @pytest.mark.parametrize("direction", [TailDirection.LOWER, TailDirection.UPPER])
    def test_kl_identity(self, direction):
        rng = np.random.default_rng(0)
        for _ in range(5000):
            k = int(rng.integers(1, 6))
            mu, z = _random_interior_pair(rng, k, direction)
            n = int(rng.integers(1, 1000))
            result = theorem1_bound(mu, z, n, direction)
            expected = -n * kl_divergence(complete(z), complete(mu))
            assert abs(result.log_bound - expected) <= 1e-12 * max(1.0, abs(result.log_bound))

    def test_hoeffding_reduction(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            mu = float(rng.uniform(0.01, 0.9))
            z = mu * float(rng.uniform(0.01, 0.999))
            n = int(rng.integers(1, 50))
            expected = (mu / z) ** (n * z) * ((1 - mu) / (1 - z)) ** (n * (1 - z))
            np.testing.assert_allclose(theorem1_bound([mu], [z], n, "lower").bound, expected, rtol=1e-12)
            np.testing.assert_allclose(hoeffding_binary_bound(mu, z, n), expected, rtol=1e-12)


class TestExponentFunction:

    def test_zero_argument(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            k = int(rng.integers(1, 6))
            mu, z = _random_interior_pair(rng, k, TailDirection.LOWER)
            np.testing.assert_allclose(exponent_M(np.zeros(k), mu, z), 0.0, atol=1e-15)

    def test_scalar_value(self):
        expected = -0.5 + math.log(0.5 + 0.5 * math.e)
        result = exponent_M([1.0], [0.5], [0.5])
        np.testing.assert_allclose(result, expected, rtol=1e-12)
        np.testing.assert_allclose(result, 0.12011, atol=1e-5)

    def test_mgf_envelope(self):
        t = np.array([0.5, -1.0])
        expected = math.log(0.4 + 0.3 * math.exp(0.5) + 0.3 * math.exp(-1.0))
        np.testing.assert_allclose(mgf_envelope(t, [0.3, 0.3]), expected, rtol=1e-12)

    def test_minimum_is_negative_kl(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            k = int(rng.integers(1, 6))
            direction = TailDirection.LOWER if rng.random() < 0.5 else TailDirection.UPPER
            mu, z = _random_interior_pair(rng, k, direction)
            value = exponent_M(optimal_t(mu, z), mu, z)
            expected = -kl_divergence(complete(z), complete(mu))
            np.testing.assert_allclose(value, expected, rtol=1e-12, atol=1e-15)

    def test_chernoff_log_bound_at_optimum(self):
        mu, z = [0.3, 0.3], [0.2, 0.1]
        t = optimal_t(mu, z)
        np.testing.assert_allclose(chernoff_log_bound(t, mu, z, 6, "lower"),
                                   theorem1_bound(mu, z, 6, "lower").log_bound, rtol=1e-12)

    def test_chernoff_log_bound_dominates_optimum(self):
        rng = np.random.default_rng(8)
        mu, z = [0.3, 0.2], [0.1, 0.15]
        best = theorem1_bound(mu, z, 5, "lower").log_bound
        for t in -rng.exponential(2.0, size=(200, 2)):
            assert chernoff_log_bound(t, mu, z, 5, "lower") >= best - 1e-12

    def test_chernoff_log_bound_sign_restriction(self):
        with pytest.raises(ValueError):
            chernoff_log_bound([0.5], [0.5], [0.3], 4, "lower")
        with pytest.raises(ValueError):
            chernoff_log_bound([-0.5], [0.5], [0.7], 4, "upper")


class TestOptimalT:

    def test_target_equals_mean(self):
        np.testing.assert_array_equal(optimal_t([0.2, 0.3], [0.2, 0.3]).t, [0.0, 0.0])

    def test_closed_form(self):
        np.testing.assert_allclose(optimal_t([0.3, 0.3], [0.2, 0.2]).t, [math.log(4 / 9)] * 2, rtol=1e-12)
        np.testing.assert_allclose(optimal_t([0.3, 0.3], [0.2, 0.2]).t, [-0.81093] * 2, atol=1e-5)

    def test_zero_target_coordinate(self):
        with pytest.raises(RequiresStrictInterior):
            optimal_t([0.3, 0.3], [0.2, 0.0])

    def test_zero_completion_coordinate(self):
        with pytest.raises(RequiresStrictInterior) as excinfo:
            optimal_t([0.5, 0.5], [0.3, 0.3])
        assert excinfo.value.index == 0

    def test_agrees_with_numerical_minimizer(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            k = int(rng.integers(1, 4))
            mu, z = _random_interior_pair(rng, k, TailDirection.LOWER)
            numeric = minimize(lambda t: exponent_M(t, mu, z), np.zeros(k), method="BFGS", options={"gtol": 1e-10})
            np.testing.assert_allclose(exponent_M(optimal_t(mu, z), mu, z), numeric.fun, atol=1e-9)
            assert exponent_M(optimal_t(mu, z), mu, z) <= numeric.fun + 1e-12

    @pytest.mark.slow
    def test_stationarity_and_minimality(self):
        rng = np.random.default_rng(5)
        h = 1e-5
        for _ in range(1000):
            k = int(rng.integers(1, 5))
            direction = TailDirection.LOWER if rng.random() < 0.5 else TailDirection.UPPER
            mu, z = _random_interior_pair(rng, k, direction)
            t_opt = optimal_t(mu, z).t
            best = exponent_M(t_opt, mu, z)
            gradient = np.empty(k)
            for i in range(k):
                step = np.zeros(k)
                step[i] = h
                gradient[i] = (exponent_M(t_opt + step, mu, z) - exponent_M(t_opt - step, mu, z)) / (2 * h)
            assert np.max(np.abs(gradient)) <= 1e-6
            for perturbation in rng.normal(scale=0.5, size=(200, k)):
                assert exponent_M(t_opt + perturbation, mu, z) >= best - NUM_TOL


class TestLemma1Gap:

    def test_zero_argument(self):
        np.testing.assert_allclose(lemma1_gap([0.2, 0.3], [0.0, 0.0]), 0.0, atol=1e-15)

    @pytest.mark.parametrize("x", [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    def test_vertices(self, x):
        rng = np.random.default_rng(6)
        for t in rng.uniform(-5, 5, size=(20, 3)):
            np.testing.assert_allclose(lemma1_gap(x, t), 0.0, atol=1e-12)

    def test_scalar_value(self):
        expected = (0.5 + 0.5 * math.e ** 2) - math.e
        np.testing.assert_allclose(lemma1_gap([0.5], [2.0]), expected, rtol=1e-12)
        np.testing.assert_allclose(lemma1_gap([0.5], [2.0]), 1.47625, atol=1e-5)

    @pytest.mark.parametrize("x", [[1.0], [0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    def test_vertices_at_large_arguments(self, x):
        for scale in (800.0, -800.0, 1500.0, 1e4):
            t = np.full(len(x), scale)
            t[0] = -t[0] / 2
            assert lemma1_gap(x, t) == 0.0

    def test_interior_at_large_arguments(self):
        assert lemma1_gap([0.5], [1500.0]) == math.inf
        assert lemma1_gap([0.001, 0.2], [800.0, -900.0]) == math.inf
        np.testing.assert_allclose(lemma1_gap([0.5], [-1500.0]), 0.5, rtol=1e-12)
        expected = 0.75 + 0.25 * math.exp(600.0) - math.exp(150.0)
        np.testing.assert_allclose(lemma1_gap([0.25], [600.0]), expected, rtol=1e-12)

    @pytest.mark.slow
    def test_nonnegative(self):
        rng = np.random.default_rng(7)
        for _ in range(100_000):
            k = int(rng.integers(1, 6))
            x = rng.dirichlet(np.ones(k + 1))[1:]
            t = rng.uniform(-20, 20, size=k)
            assert lemma1_gap(x, t) >= -NUM_TOL
