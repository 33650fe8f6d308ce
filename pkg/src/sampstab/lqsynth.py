"""Discrete LQ synthesis for a sampled pair (Phi, D) with unit cost weights.

The stabilizing kernel is the fixed point of

    K = Phi* K (I + D D* K)^{-1} Phi + I,

found by value iteration from K_0 = 0 (the same backward recursion that
represents the finite-horizon optimal cost, so the finite-horizon iterates
double as a brute-force oracle).  The feedback gain is

    F_K = -(I + D* K D)^{-1} D* K Phi,

and stability of Phi + D F_K is certified by its spectral radius.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpectralRadiusError
from .linsys import SampledSystem
from .serialize import matrix_to_json

__all__ = [
    "RiccatiSolution",
    "FeedbackGain",
    "riccati_solve",
    "dp_value_iterate",
    "feedback_gain",
    "lq_optimal_cost",
    "closed_loop_cost",
]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
# trace(K) beyond this reports structural divergence rather than slow progress.
_DIVERGENCE_TRACE = 1e12


@dataclass(frozen=True, eq=False)
class RiccatiSolution:
    """Hermitian PSD kernel K with the fixed-point residual of the final iterate."""

    K: np.ndarray
    residual: float
    iterations: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "K": matrix_to_json(self.K),
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass(frozen=True, eq=False)
class FeedbackGain:
    """Gain F with its closed-loop matrix Phi + D F and spectral radius."""

    F: np.ndarray
    closed_loop: np.ndarray
    spectral_radius: float

    def to_json(self) -> dict:
        return {
            "F": matrix_to_json(self.F),
            "closed_loop": matrix_to_json(self.closed_loop),
            "spectral_radius": self.spectral_radius,
        }


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _value_step(K: np.ndarray, Phi: np.ndarray, D: np.ndarray) -> np.ndarray:
    """One backward step K -> Phi* K (I + D D* K)^{-1} Phi + I."""
    n = Phi.shape[0]
    X = np.linalg.solve(np.eye(n) + D @ D.conj().T @ K, Phi)
    return _hermitize(Phi.conj().T @ K @ X + np.eye(n))


def riccati_solve(sys: SampledSystem, tol: float = DEFAULT_TOL,
                  max_iter: int = DEFAULT_MAX_ITER) -> RiccatiSolution:
    """Iterate the value recursion from K = 0 until the step norm drops below tol.

    A non-converged result (iteration cap, or trace blow-up past 1e12) signals
    that the sampled pair is likely not stabilizable; cross-check with the
    observability decision procedure.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    Phi, D = sys.Phi, sys.D
    n = Phi.shape[0]
    K = np.zeros((n, n), dtype=complex)
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        K_next = _value_step(K, Phi, D)
        step = np.linalg.norm(K_next - K, 2)
        K = K_next
        if step < tol:
            converged = True
            break
        if np.trace(K).real > _DIVERGENCE_TRACE:
            break
    residual = float(np.linalg.norm(K - _value_step(K, Phi, D), 2))
    return RiccatiSolution(K=K, residual=residual, iterations=iterations,
                           converged=converged)


def dp_value_iterate(sys: SampledSystem, n: int) -> np.ndarray:
    """Finite-horizon optimal cost operator after n backward steps from P = 0.

    Identical recursion to riccati_solve; serves as its brute-force oracle.
    """
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    P = np.zeros((sys.state_dim, sys.state_dim), dtype=complex)
    for _ in range(n):
        P = _value_step(P, sys.Phi, sys.D)
    return P


def feedback_gain(sol: RiccatiSolution, sys: SampledSystem) -> FeedbackGain:
    """F = -(I + D* K D)^{-1} D* K Phi, with the spectral-radius < 1 certificate."""
    if not sol.converged:
        raise ValueError("feedback gain requires a converged Riccati solution")
    Phi, D, K = sys.Phi, sys.D, sol.K
    m = D.shape[1]
    F = -np.linalg.solve(np.eye(m) + D.conj().T @ K @ D, D.conj().T @ K @ Phi)
    closed = Phi + D @ F
    radius = float(np.abs(np.linalg.eigvals(closed)).max())
    if radius >= 1.0:
        raise SpectralRadiusError(
            f"closed-loop spectral radius {radius:.6g} >= 1 "
            f"(Riccati residual {sol.residual:.3g}); numerical pathology"
        )
    return FeedbackGain(F=F, closed_loop=closed, spectral_radius=radius)


def lq_optimal_cost(sol: RiccatiSolution, y0: np.ndarray) -> float:
    """Quadratic form <K y0, y0> of the kernel at the initial state."""
    if not sol.converged:
        raise ValueError("optimal cost requires a converged Riccati solution")
    y0 = np.asarray(y0, dtype=complex).ravel()
    return float(np.real(y0.conj() @ sol.K @ y0))


def closed_loop_cost(gain: FeedbackGain, sys: SampledSystem, y0: np.ndarray,
                     max_steps: int = 100_000, rtol: float = 1e-16) -> float:
    """Accumulated cost sum(||y_i||^2 + ||u_i||^2) of the feedback recursion.

    The loop y_i = (Phi + D F) y_{i-1}, u_i = F y_{i-1} is run until the state
    energy falls below rtol relative to ||y0||^2.  Reported alongside the
    kernel quadratic form; equality of the two is not asserted anywhere.
    """
    y = np.asarray(y0, dtype=complex).ravel()
    scale = np.linalg.norm(y) ** 2
    if scale == 0.0:
        return 0.0
    total = 0.0
    for _ in range(max_steps):
        u = gain.F @ y
        y = sys.Phi @ y + sys.D @ u
        total += float(np.linalg.norm(y) ** 2 + np.linalg.norm(u) ** 2)
        if np.linalg.norm(y) ** 2 <= rtol * scale:
            break
    return total
