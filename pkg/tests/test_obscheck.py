"""Gramians, weak observability feasibility, and period pathology."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs
from numpy.testing import assert_allclose

import sampstab as st
from sampstab.obscheck import brute_force_max_violation

from conftest import (random_mixed_system, random_neutral_system,
                      random_stable_system, random_unit_states)

OSC = st.harmonic_oscillator()


def scalar_system(a, b):
    return st.ContinuousSystem([[a]], [[b]])


class TestDiscreteGramian:
    def test_scalar_integrator(self):
        g = st.discrete_gramian(scalar_system(0.0, 1.0), 1.0, 3)
        assert_allclose(g.G, [[3.0]], atol=1e-13)
        assert_allclose(g.R, [[1.0]], atol=1e-14)

    def test_oscillator_degenerate_period(self):
        g = st.discrete_gramian(OSC, np.pi, 2)
        assert g.kernel_dim == 1
        # The kernel is the cos-component direction (0, 1).
        assert abs(abs(g.kernel_basis[1, 0]) - 1.0) < 1e-12

    def test_oscillator_regular_period(self):
        g = st.discrete_gramian(OSC, np.pi / 2, 2)
        assert g.kernel_dim == 0

    def test_psd_and_hermitian(self):
        for seed in range(4):
            sys = random_mixed_system(seed)
            g = st.discrete_gramian(sys, 0.5, 3)
            assert np.abs(g.G - g.G.conj().T).max() < 1e-14
            w = np.linalg.eigvalsh(g.G)
            assert w.min() >= -1e-12 * max(np.linalg.norm(g.G, 2), 1.0)

    def test_kernel_basis_orthonormal(self):
        g = st.discrete_gramian(OSC, np.pi, 3)
        P = g.kernel_basis
        assert_allclose(P.conj().T @ P, np.eye(P.shape[1]), atol=1e-12)


class TestCheckInequality:
    def test_scalar_stable_no_control(self):
        g = st.discrete_gramian(scalar_system(-1.0, 0.0), 1.0, 1)
        cert = st.check_inequality(g, 0.0, 0.5)
        assert cert.feasible
        assert_allclose(cert.margin, np.exp(-2) - 0.5, atol=1e-12)

    def test_scalar_neutral_no_control(self):
        g = st.discrete_gramian(scalar_system(0.0, 0.0), 1.0, 1)
        for C in (0.0, 10.0, 1e6):
            assert not st.check_inequality(g, C, 0.5).feasible

    def test_oscillator_degenerate_always_infeasible(self):
        for N in (1, 2, 5):
            g = st.discrete_gramian(OSC, np.pi, N)
            for C in (0.0, 1.0, 1e9):
                assert not st.check_inequality(g, C, 0.99).feasible

    def test_parameter_validation(self):
        g = st.discrete_gramian(scalar_system(-1.0, 1.0), 1.0, 1)
        with pytest.raises(ValueError):
            st.check_inequality(g, -1.0, 0.5)
        with pytest.raises(ValueError):
            st.check_inequality(g, 1.0, 1.0)

    @settings(max_examples=40, deadline=None)
    @given(
        C=hs.floats(0.0, 50.0),
        dC=hs.floats(0.0, 50.0),
        delta=hs.floats(0.05, 0.9),
        ddelta=hs.floats(0.0, 0.09),
    )
    def test_monotone_in_constants(self, C, dC, delta, ddelta):
        g = st.discrete_gramian(OSC, 1.0, 2)
        if st.check_inequality(g, C, delta).feasible:
            assert st.check_inequality(g, C + dC, delta + ddelta).feasible


class TestMinDeltaOnKernel:
    def test_trivial_kernel(self):
        g = st.discrete_gramian(OSC, np.pi / 2, 2)
        assert st.min_delta_on_kernel(g) == 0.0

    def test_oscillator_rotation_preserves_kernel_norm(self):
        g = st.discrete_gramian(OSC, np.pi, 2)
        assert_allclose(st.min_delta_on_kernel(g), 1.0, atol=1e-10)

    def test_scalar_decay(self):
        g = st.discrete_gramian(scalar_system(-1.0, 0.0), 1.0, 2)
        assert_allclose(st.min_delta_on_kernel(g), np.exp(-4), atol=1e-12)

    def test_unitary_group_without_control(self):
        for seed in range(4):
            base = random_neutral_system(seed)
            sys = st.ContinuousSystem(base.A, np.zeros((base.state_dim, 1)))
            g = st.discrete_gramian(sys, 0.7, 2)
            assert abs(st.min_delta_on_kernel(g) - 1.0) <= 1e-10


class TestDecideDc:
    def test_scalar_stable_costs_nothing(self):
        cert = st.decide_dc(scalar_system(-1.0, 0.0), 1.0, N_max=5, delta_target=0.5)
        assert cert.feasible and cert.N == 1 and cert.C == 0.0

    def test_oscillator_regular_period(self):
        cert = st.decide_dc(OSC, 1.0, N_max=4, delta_target=0.9)
        assert cert.feasible and cert.N == 2

    def test_oscillator_degenerate_period(self):
        cert = st.decide_dc(OSC, np.pi, N_max=8, delta_target=0.9)
        assert not cert.feasible
        assert_allclose(cert.kernel_norm, 1.0, atol=1e-9)

    def test_search_exhausted_is_distinct(self):
        # Slowly stable, no control: a longer horizon would succeed.
        with pytest.raises(st.SearchExhausted):
            st.decide_dc(scalar_system(-0.001, 0.0), 1.0, N_max=2, delta_target=0.5)

    def test_invariant_under_input_phase(self):
        for seed in range(3):
            sys = random_mixed_system(seed)
            rot = st.ContinuousSystem(sys.A, np.exp(0.73j) * sys.B)
            g1 = st.discrete_gramian(sys, 0.8, 3)
            g2 = st.discrete_gramian(rot, 0.8, 3)
            assert np.abs(g1.G - g2.G).max() <= 1e-12 * max(np.linalg.norm(g1.G, 2), 1.0)
            c1 = st.decide_dc(sys, 0.8, N_max=6, delta_target=0.9)
            c2 = st.decide_dc(rot, 0.8, N_max=6, delta_target=0.9)
            assert c1.N == c2.N
            assert_allclose(c1.C, c2.C, rtol=1e-6, atol=1e-9)


class TestContinuousGramian:
    def test_scalar_integrator(self):
        g = st.continuous_gramian(scalar_system(0.0, 1.0), 2.0)
        assert_allclose(g.G, [[2.0]], atol=1e-13)

    def test_scalar_decay(self):
        g = st.continuous_gramian(scalar_system(-1.0, 1.0), 1.0)
        assert_allclose(g.G[0, 0], (1 - np.exp(-2)) / 2, atol=1e-13)

    def test_oscillator_full_turn(self):
        g = st.continuous_gramian(OSC, 2 * np.pi)
        assert_allclose(g.G, np.pi * np.eye(2), atol=1e-10)
        assert np.linalg.eigvalsh(g.G).min() >= -1e-12
        assert_allclose(np.trace(g.G).real, 2 * np.pi, atol=1e-10)

    def test_against_quadrature_oracle(self):
        from scipy.integrate import quad
        for seed in range(2):
            sys = random_stable_system(seed, n=3)
            T_h = 0.9
            g = st.continuous_gramian(sys, T_h)

            def entry(p, q):
                def f(t, part):
                    S = st.semigroup(sys, t)
                    M = S @ sys.B @ sys.B.conj().T @ S.conj().T
                    return getattr(M[p, q], part)
                re = quad(f, 0, T_h, args=("real",), epsabs=1e-11, limit=200)[0]
                im = quad(f, 0, T_h, args=("imag",), epsabs=1e-11, limit=200)[0]
                return re + 1j * im

            ref = np.array([[entry(p, q) for q in range(3)] for p in range(3)])
            assert np.abs(g.G - ref).max() <= 1e-8

    def test_holder_bridge(self, rng):
        # Interval-integrated blocks are dominated by T times the running
        # continuous energy over the same window.
        for seed in range(6):
            sys = random_mixed_system(seed)
            T = float(np.random.default_rng(seed).uniform(0.1, 2.0))
            N = seed % 4 + 1
            gd = st.discrete_gramian(sys, T, N)
            gc = st.continuous_gramian(sys, N * T)
            phis = random_unit_states(rng, sys.state_dim, 50)
            lhs = np.real(np.einsum("ij,ik,kj->j", phis.conj(), gd.G, phis))
            rhs = np.real(np.einsum("ij,ik,kj->j", phis.conj(), gc.G, phis))
            assert np.all(lhs <= T * rhs + 1e-10)


class TestBruteForceAgreement:
    def test_feasible_certificate_never_contradicted(self, rng):
        for seed in range(4):
            sys = random_mixed_system(seed)
            cert = st.decide_dc(sys, 0.7, N_max=8, delta_target=0.9)
            assert cert.feasible
            g = st.discrete_gramian(sys, 0.7, int(cert.N))
            worst = brute_force_max_violation(g, cert.C, cert.delta, 10_000, seed)
            assert worst <= 1e-8


class TestPathologicalPeriods:
    def test_oscillator(self):
        periods = st.pathological_periods(OSC.A, 10.0)
        assert_allclose(periods, [np.pi, 2 * np.pi, 3 * np.pi], atol=1e-12)

    def test_real_distinct_eigenvalues(self):
        assert st.pathological_periods(np.diag([-1.0, -2.0]), 100.0) == []

    def test_three_imaginary_modes(self):
        # Pairs (i,-i), (i,3i), (-i,3i) give gaps 2, 2, 4: periods k pi and k pi/2.
        periods = st.pathological_periods(np.diag([1j, -1j, 3j]), 7.0)
        expected = sorted({np.pi, 2 * np.pi} | {np.pi / 2, np.pi, 3 * np.pi / 2, 2 * np.pi})
        assert_allclose(periods, expected, atol=1e-12)

    def test_tolerance_on_real_parts(self):
        A = np.diag([1j, 5e-10 - 1j])
        assert len(st.pathological_periods(A, 10.0)) == 3  # treated as equal real parts

    def test_validation(self):
        with pytest.raises(ValueError):
            st.pathological_periods(OSC.A, 0.0)


class TestLocalOpenness:
    def test_feasible_points_have_feasible_neighbors_near_pi(self):
        # Fine grid straddling the degenerate period pi.
        grid = np.round(np.arange(2.95, 3.36, 0.01), 10)
        feas = {}
        for T in grid:
            try:
                feas[T] = st.decide_dc(OSC, float(T), N_max=8, delta_target=0.9).feasible
            except st.SearchExhausted:
                feas[T] = False
        for T in grid[1:-1]:
            if feas[T] and abs(T - np.pi) > 0.05:
                assert feas[round(T - 0.01, 10)] and feas[round(T + 0.01, 10)]
