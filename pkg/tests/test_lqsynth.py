"""Riccati kernel, finite-horizon oracle, and feedback gain."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import solve_discrete_are

import sampstab as st

from conftest import random_stabilizable_pair

GOLDEN = (1 + np.sqrt(5)) / 2


def scalar_pair(phi, d):
    return st.SampledSystem([[phi]], [[d]], 1.0)


class TestRiccatiSolve:
    def test_nilpotent_transition(self):
        sol = st.riccati_solve(scalar_pair(0.0, 0.0))
        assert sol.converged and sol.iterations <= 2
        assert_allclose(sol.K, [[1.0]], atol=1e-15)

    def test_scalar_golden_ratio(self):
        sol = st.riccati_solve(scalar_pair(1.0, 1.0))
        assert sol.converged
        assert_allclose(sol.K[0, 0].real, GOLDEN, atol=1e-10)
        assert sol.residual <= 10 * st.lqsynth.DEFAULT_TOL

    def test_uncontrolled_neutral_mode_diverges(self):
        sol = st.riccati_solve(scalar_pair(1.0, 0.0), max_iter=500)
        assert not sol.converged
        # K_j = j for this recursion.
        assert_allclose(sol.K[0, 0].real, 500.0, atol=1e-9)

    def test_unstable_uncontrolled_trips_trace_guard(self):
        sol = st.riccati_solve(scalar_pair(2.0, 0.0))
        assert not sol.converged
        assert sol.iterations < 100

    def test_kernel_dominates_identity(self):
        for seed in range(6):
            pair = random_stabilizable_pair(seed)
            sol = st.riccati_solve(pair)
            assert sol.converged
            K = sol.K
            assert np.abs(K - K.conj().T).max() <= 1e-12 * np.linalg.norm(K, 2)
            w = np.linalg.eigvalsh(K)
            assert w.min() >= -1e-10
            assert np.linalg.eigvalsh(K - np.eye(K.shape[0])).min() >= -1e-8

    def test_against_scipy_dare(self):
        # Same fixed point as the standard DARE with unit weights.
        for seed in range(5):
            pair = random_stabilizable_pair(seed)
            sol = st.riccati_solve(pair)
            n = pair.state_dim
            X = solve_discrete_are(pair.Phi, pair.D, np.eye(n), np.eye(pair.input_dim))
            assert np.linalg.norm(sol.K - X, 2) <= 1e-8 * np.linalg.norm(X, 2)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            st.riccati_solve(scalar_pair(1.0, 1.0), tol=0.0)
        with pytest.raises(ValueError):
            st.riccati_solve(scalar_pair(1.0, 1.0), max_iter=0)


class TestValueIteration:
    def test_one_step_is_identity(self):
        pair = random_stabilizable_pair(2)
        assert_allclose(st.dp_value_iterate(pair, 1), np.eye(pair.state_dim), atol=1e-15)

    def test_scalar_two_steps(self):
        assert_allclose(st.dp_value_iterate(scalar_pair(1.0, 1.0), 2), [[1.5]], atol=1e-14)

    def test_scalar_limit_is_golden(self):
        P = st.dp_value_iterate(scalar_pair(1.0, 1.0), 60)
        assert_allclose(P[0, 0].real, GOLDEN, atol=1e-12)

    def test_monotone_and_bounded_by_kernel(self):
        for seed in range(4):
            pair = random_stabilizable_pair(seed)
            sol = st.riccati_solve(pair)
            prev = st.dp_value_iterate(pair, 1)
            for n in (2, 5, 12, 40):
                cur = st.dp_value_iterate(pair, n)
                assert np.linalg.eigvalsh(cur - prev).min() >= -1e-9
                assert np.linalg.eigvalsh(sol.K - cur).min() >= -1e-9
                prev = cur

    def test_converges_to_kernel(self):
        for seed in range(6):
            pair = random_stabilizable_pair(seed)
            sol = st.riccati_solve(pair)
            gap = np.linalg.norm(st.dp_value_iterate(pair, 200) - sol.K, 2)
            assert gap <= 1e-6


class TestFeedbackGain:
    def test_scalar_golden_gain(self):
        pair = scalar_pair(1.0, 1.0)
        gain = st.feedback_gain(st.riccati_solve(pair), pair)
        assert_allclose(gain.F[0, 0].real, -GOLDEN / (1 + GOLDEN), atol=1e-10)
        assert_allclose(gain.closed_loop[0, 0].real, 1 / (1 + GOLDEN), atol=1e-10)
        assert_allclose(gain.spectral_radius, 1 / (1 + GOLDEN), atol=1e-10)

    def test_nilpotent_gives_zero_gain(self):
        pair = st.SampledSystem(np.zeros((2, 2)), np.array([[1.0], [0.5]]), 1.0)
        gain = st.feedback_gain(st.riccati_solve(pair), pair)
        assert_allclose(gain.F, 0.0, atol=1e-14)
        assert gain.spectral_radius == 0.0

    def test_oscillator_sampled_at_regular_period(self):
        pair = st.sample(st.harmonic_oscillator(), 1.0)
        gain = st.feedback_gain(st.riccati_solve(pair), pair)
        assert gain.spectral_radius < 1.0
        # Independent eigenvalue check of the stated radius.
        radius = np.abs(np.linalg.eigvals(pair.Phi + pair.D @ gain.F)).max()
        assert abs(radius - gain.spectral_radius) <= 1e-10

    def test_gain_formula_consistency(self):
        for seed in range(5):
            pair = random_stabilizable_pair(seed)
            sol = st.riccati_solve(pair)
            gain = st.feedback_gain(sol, pair)
            m = pair.input_dim
            lhs = (np.eye(m) + pair.D.conj().T @ sol.K @ pair.D) @ gain.F
            rhs = -pair.D.conj().T @ sol.K @ pair.Phi
            assert np.abs(lhs - rhs).max() <= 1e-10 * max(np.linalg.norm(rhs, 2), 1.0)
            assert gain.spectral_radius < 1.0

    def test_requires_convergence(self):
        bad = st.riccati_solve(scalar_pair(1.0, 0.0), max_iter=50)
        with pytest.raises(ValueError):
            st.feedback_gain(bad, scalar_pair(1.0, 0.0))

    def test_closed_loop_powers_decay(self):
        for seed in range(3):
            pair = random_stabilizable_pair(seed)
            gain = st.feedback_gain(st.riccati_solve(pair), pair)
            M = gain.closed_loop
            rng = np.random.default_rng(seed)
            y0 = rng.standard_normal(pair.state_dim)
            norms = []
            y = y0.astype(complex)
            for _ in range(60):
                y = M @ y
                norms.append(np.linalg.norm(y))
            r_fit = (norms[-1] / norms[19]) ** (1.0 / 40)
            assert r_fit < 1.0


class TestOptimalCost:
    def test_zero_state(self):
        sol = st.riccati_solve(scalar_pair(1.0, 1.0))
        assert st.lq_optimal_cost(sol, [0.0]) == 0.0

    def test_scalar_values(self):
        sol = st.riccati_solve(scalar_pair(1.0, 1.0))
        assert_allclose(st.lq_optimal_cost(sol, [1.0]), GOLDEN, atol=1e-10)
        assert_allclose(st.lq_optimal_cost(sol, [2.0]), 2 * (1 + np.sqrt(5)), atol=1e-9)

    def test_simulated_cost_within_kernel_bound(self):
        for seed in range(4):
            pair = random_stabilizable_pair(seed)
            sol = st.riccati_solve(pair)
            gain = st.feedback_gain(sol, pair)
            rng = np.random.default_rng(seed)
            y0 = rng.standard_normal(pair.state_dim)
            simulated = st.closed_loop_cost(gain, pair, y0)
            assert 0.0 <= simulated <= st.lq_optimal_cost(sol, y0) + 1e-6
