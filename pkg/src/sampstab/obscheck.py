"""Observability Gramians and weak observability feasibility checks.

The decision problem: do constants (N, C, delta) with delta < 1 exist so that

    || exp(A NT)* phi ||^2  <=  C * sum_i || W_i phi ||^2  +  delta * ||phi||^2

holds for every phi, where W_i integrates B* exp(At)* over the i-th sampling
interval?  Quantifying over phi reduces to one Hermitian eigenvalue: the
inequality holds iff lambda_max(R R* - C G - delta I) <= 0 with R the
N-period transition and G the Gramian sum of W_i* W_i.  A continuous-mode
variant replaces the sum with int_0^T exp(At) B B* exp(At)* dt.

Feasibility searches walk N upward and bisect C.  The kernel of G supplies a
structural obstruction: on ker G the inequality collapses to
||R* phi||^2 <= delta ||phi||^2, so if the transition preserves norm on the
kernel no constant C can help at that horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import linsys
from .errors import SearchExhausted
from .linsys import ContinuousSystem, SpectralSystem, observation_block, semigroup

__all__ = [
    "GramianBundle",
    "ObservabilityCertificate",
    "discrete_gramian",
    "continuous_gramian",
    "check_inequality",
    "min_delta_on_kernel",
    "decide_dc",
    "decide_cc",
    "pathological_periods",
]

# Relative singular-value cutoff separating a structural kernel from noise.
RANK_RTOL = 1e-10
# Margin below which lambda_max(R R* - C G - delta I) counts as feasible.
PSD_TOL = 1e-10
# Kernel transition norm within this of 1 certifies structural infeasibility.
KERNEL_ONE_TOL = 1e-9
_BISECT_STEPS = 60
_MAX_DOUBLINGS = 60


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True, eq=False)
class GramianBundle:
    """Transition R, PSD Gramian G, and an orthonormal basis of ker G.

    mode is "discrete" (horizon = N periods of length T) or "continuous"
    (horizon = integration time, and T echoes it).
    """

    R: np.ndarray
    G: np.ndarray
    kernel_basis: np.ndarray
    mode: str
    T: float
    horizon: float

    def __post_init__(self):
        G = _hermitize(np.asarray(self.G, dtype=complex))
        scale = np.linalg.norm(G, 2)
        w = np.linalg.eigvalsh(G)
        if w.min() < -1e-12 * max(scale, 1.0):
            raise ValueError("Gramian has a significantly negative eigenvalue")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "R", np.asarray(self.R, dtype=complex))

    @property
    def kernel_dim(self) -> int:
        return self.kernel_basis.shape[1]


@dataclass(frozen=True)
class ObservabilityCertificate:
    """Outcome of one weak-observability inequality check.

    margin = lambda_max(R R* - C G - delta I); feasible iff margin <= PSD_TOL.
    N is the horizon in periods for discrete mode, or the horizon time for
    continuous mode.  kernel_norm records the worst transition norm found on
    ker G during a search (None when not probed).
    """

    mode: str
    T: float
    N: float
    C: float
    delta: float
    margin: float
    feasible: bool
    kernel_dim: int = 0
    kernel_norm: float | None = None

    def __post_init__(self):
        if self.feasible:
            if not (0 < self.delta < 1):
                raise ValueError("feasible certificate requires delta in (0, 1)")
            if self.C < 0:
                raise ValueError("feasible certificate requires C >= 0")
            if self.margin > PSD_TOL:
                raise ValueError("feasible certificate requires margin <= 0 (tolerance)")

    def to_json(self) -> dict:
        out = {
            "mode": self.mode,
            "T": self.T,
            "N": self.N,
            "C": self.C,
            "delta": self.delta,
            "margin": self.margin,
            "feasible": self.feasible,
            "kernel_dim": self.kernel_dim,
        }
        if self.kernel_norm is not None:
            out["kernel_norm"] = self.kernel_norm
        return out


def _kernel_basis(G: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(_hermitize(G))
    thresh = RANK_RTOL * max(w.max(initial=0.0), 0.0)
    return V[:, w <= thresh]


def discrete_gramian(sys: ContinuousSystem | SpectralSystem, T: float, N: int) -> GramianBundle:
    """Gramian of the N interval-integrated observation blocks, G = sum W_i* W_i."""
    if not T > 0:
        raise ValueError("T must be > 0")
    if N < 1:
        raise ValueError("N must be >= 1")
    W = observation_block(sys, T, 1)
    Phi_adj = semigroup(sys, T).conj().T
    G = np.zeros((W.shape[1], W.shape[1]), dtype=complex)
    for _ in range(N):
        G += W.conj().T @ W
        W = W @ Phi_adj
    G = _hermitize(G)
    R = semigroup(sys, N * T)
    return GramianBundle(R, G, _kernel_basis(G), "discrete", T, float(N))


def continuous_gramian(sys: ContinuousSystem | SpectralSystem, T_h: float) -> GramianBundle:
    """G = int_0^{T_h} exp(At) B B* exp(At)* dt via the block-exponential construction."""
    if not T_h > 0:
        raise ValueError("horizon T_h must be > 0")
    dense = linsys.to_dense(sys) if isinstance(sys, SpectralSystem) else sys
    n = dense.state_dim
    aug = np.zeros((2 * n, 2 * n), dtype=complex)
    aug[:n, :n] = -dense.A
    aug[:n, n:] = dense.B @ dense.B.conj().T
    aug[n:, n:] = dense.A.conj().T
    F = expm(aug * T_h)
    G = _hermitize(F[n:, n:].conj().T @ F[:n, n:])
    R = semigroup(sys, T_h)
    return GramianBundle(R, G, _kernel_basis(G), "continuous", T_h, T_h)


def check_inequality(g: GramianBundle, C: float, delta: float) -> ObservabilityCertificate:
    """Decide the inequality at fixed constants by the eigenvalue reformulation."""
    if C < 0:
        raise ValueError("C must be >= 0")
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    n = g.R.shape[0]
    M = _hermitize(g.R @ g.R.conj().T - C * g.G - delta * np.eye(n))
    margin = float(np.linalg.eigvalsh(M).max())
    return ObservabilityCertificate(
        mode=g.mode, T=g.T, N=g.horizon, C=float(C), delta=float(delta),
        margin=margin, feasible=margin <= PSD_TOL, kernel_dim=g.kernel_dim,
    )


def min_delta_on_kernel(g: GramianBundle) -> float:
    """Largest ||R* phi||^2 over unit phi in ker G; 0 when the kernel is trivial.

    This is the infimum of admissible delta in the C -> infinity limit: some
    (C, delta < 1) satisfies the inequality only if this value is < 1.
    """
    P = g.kernel_basis
    if P.shape[1] == 0:
        return 0.0
    M = P.conj().T @ g.R @ g.R.conj().T @ P
    return float(np.linalg.eigvalsh(_hermitize(M)).max())


def _bisect_constant(g: GramianBundle, delta: float):
    """Smallest feasible C for a bundle at fixed delta, or None.

    Tries C = 0, grows the bracket by doubling from C = 1, then bisects.
    Returns (certificate or None, most negative margin seen).
    """
    best_margin = np.inf
    cert = check_inequality(g, 0.0, delta)
    best_margin = min(best_margin, cert.margin)
    if cert.feasible:
        return cert, best_margin
    hi = 1.0
    cert_hi = check_inequality(g, hi, delta)
    best_margin = min(best_margin, cert_hi.margin)
    doublings = 0
    while not cert_hi.feasible and doublings < _MAX_DOUBLINGS:
        hi *= 2.0
        cert_hi = check_inequality(g, hi, delta)
        best_margin = min(best_margin, cert_hi.margin)
        doublings += 1
    if not cert_hi.feasible:
        return None, best_margin
    lo = 0.0 if hi == 1.0 else hi / 2.0
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        cert_mid = check_inequality(g, mid, delta)
        if cert_mid.feasible:
            hi, cert_hi = mid, cert_mid
        else:
            lo = mid
    return cert_hi, best_margin


def _search_horizons(bundles, delta_target: float):
    """Walk Gramian bundles in order of preference, bisecting C at each.

    Returns ("feasible", certificate) for the first horizon that admits a
    constant, ("blocked", margin, kernel_norm, kernel_dim) when every horizon
    carried a norm-preserving kernel (a structural proof that no (C, delta<1)
    works at the searched horizons), or ("exhausted", margin) otherwise.
    """
    best_margin = np.inf
    worst_kernel = 0.0
    worst_dim = 0
    all_blocked = True
    for g in bundles:
        kn = min_delta_on_kernel(g)
        if kn > worst_kernel:
            worst_kernel, worst_dim = kn, g.kernel_dim
        if kn >= 1.0 - KERNEL_ONE_TOL:
            # No C can rescue this horizon; record a margin data point.
            best_margin = min(best_margin, check_inequality(g, 1.0, delta_target).margin)
            continue
        if kn > delta_target:
            # Kernel slack already exceeds the requested delta: C-search futile
            # here, but a larger delta < 1 might work, so this is not proof.
            all_blocked = False
            best_margin = min(best_margin, kn - delta_target)
            continue
        all_blocked = False
        cert, margin = _bisect_constant(g, delta_target)
        best_margin = min(best_margin, margin)
        if cert is not None:
            feasible = ObservabilityCertificate(
                mode=cert.mode, T=cert.T, N=cert.N, C=cert.C, delta=cert.delta,
                margin=cert.margin, feasible=True, kernel_dim=g.kernel_dim,
                kernel_norm=kn,
            )
            return "feasible", feasible, worst_kernel, worst_dim
    state = "blocked" if all_blocked else "exhausted"
    return state, float(best_margin), worst_kernel, worst_dim


def decide_dc(sys: ContinuousSystem | SpectralSystem, T: float, N_max: int = 16,
              delta_target: float = 0.9) -> ObservabilityCertificate:
    """Search horizons N = 1..N_max for a feasible (N, C) at the target delta.

    Returns the first feasible certificate (smallest N, then smallest C).  If
    every horizon is blocked by a norm-preserving kernel (transition norm on
    ker G within KERNEL_ONE_TOL of 1), returns an infeasible certificate:
    growing N or C provably cannot help at the searched horizons.  Otherwise a
    fruitless search raises SearchExhausted, which does not claim anything
    beyond the horizon.
    """
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    if not (0 < delta_target < 1):
        raise ValueError("delta_target must lie in (0, 1)")
    bundles = (discrete_gramian(sys, T, N) for N in range(1, N_max + 1))
    state, payload, kernel, dim = _search_horizons(bundles, delta_target)
    if state == "feasible":
        return payload
    if state == "blocked":
        return ObservabilityCertificate(
            mode="discrete", T=T, N=float(N_max), C=0.0, delta=delta_target,
            margin=payload, feasible=False, kernel_dim=dim, kernel_norm=kernel,
        )
    raise SearchExhausted(
        f"no feasible (N, C) with N <= {N_max} at delta = {delta_target}; "
        "infeasibility not proven",
        best_margin=payload, best_horizon=N_max,
    )


def decide_cc(sys: ContinuousSystem | SpectralSystem, T: float, N_max: int = 16,
              delta_target: float = 0.9) -> ObservabilityCertificate:
    """Continuous-mode analogue of decide_dc over horizons T_h = k T, k <= N_max."""
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    if not (0 < delta_target < 1):
        raise ValueError("delta_target must lie in (0, 1)")
    bundles = (continuous_gramian(sys, k * T) for k in range(1, N_max + 1))
    state, payload, kernel, dim = _search_horizons(bundles, delta_target)
    if state == "feasible":
        return payload
    if state == "blocked":
        return ObservabilityCertificate(
            mode="continuous", T=N_max * T, N=N_max * T, C=0.0, delta=delta_target,
            margin=payload, feasible=False, kernel_dim=dim, kernel_norm=kernel,
        )
    raise SearchExhausted(
        f"no feasible horizon k*T with k <= {N_max} at delta = {delta_target}",
        best_margin=payload, best_horizon=N_max * T,
    )


def pathological_periods(A: np.ndarray, T_max: float) -> list[float]:
    """Sampling periods 2 k pi / |Im(lam_i - lam_j)| up to T_max.

    Eigenvalue pairs qualify when their real parts agree within
    1e-9 * (1 + |lam|) and their imaginary parts differ.  Sorted, deduplicated.
    """
    if not T_max > 0:
        raise ValueError("T_max must be > 0")
    lam = np.linalg.eigvals(np.asarray(A, dtype=complex))
    periods: list[float] = []
    for i in range(lam.size):
        for j in range(i + 1, lam.size):
            scale = 1.0 + max(abs(lam[i]), abs(lam[j]))
            if abs(lam[i].real - lam[j].real) > 1e-9 * scale:
                continue
            gap = abs(lam[i].imag - lam[j].imag)
            if gap <= 1e-9 * scale:
                continue
            base = 2.0 * np.pi / gap
            k = 1
            while k * base <= T_max * (1 + 1e-12):
                periods.append(k * base)
                k += 1
    periods.sort()
    out: list[float] = []
    for p in periods:
        if not out or p - out[-1] > 1e-9 * (1.0 + p):
            out.append(p)
    return out


def gramian_quadratic_form(g: GramianBundle, phis: np.ndarray) -> np.ndarray:
    """phi* G phi for each column of phis (brute-force evaluation helper)."""
    return np.real(np.einsum("ij,ik,kj->j", phis.conj(), g.G, phis))


def transition_quadratic_form(g: GramianBundle, phis: np.ndarray) -> np.ndarray:
    """||R* phi||^2 for each column of phis."""
    v = g.R.conj().T @ phis
    return np.real(np.einsum("ij,ij->j", v.conj(), v))


def brute_force_max_violation(g: GramianBundle, C: float, delta: float,
                              n_samples: int, seed: int) -> float:
    """Max over random unit phi of ||R* phi||^2 - C phi*G phi - delta.

    Random sampling can only under-detect violations; it never exceeds the
    eigenvalue margin (up to roundoff).
    """
    rng = np.random.default_rng(seed)
    n = g.R.shape[0]
    phis = rng.standard_normal((n, n_samples)) + 1j * rng.standard_normal((n, n_samples))
    phis /= np.linalg.norm(phis, axis=0)
    vals = transition_quadratic_form(g, phis) - C * gramian_quadratic_form(g, phis) - delta
    return float(vals.max())
