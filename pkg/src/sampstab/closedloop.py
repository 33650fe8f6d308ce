"""Closed-loop simulation under four observation/feedback regimes.

Regimes (gain F constant unless noted):

* cc: y' = (A + B F) y                      -- continuous observation
* dc: y' = A y + B F y(kT) on [kT,(k+1)T)   -- sampled observation
* dp: y' = A y + B F(t) y(kT), F(t) T-periodic operator-valued
* cp: y' = A y + B F(t) y,     F(t) T-periodic operator-valued

cc and dc propagate exactly through matrix exponentials.  dp evaluates the
forced term, a product of two exponentials with no elementary closed form,
by composite Gauss-Legendre panels that are doubled until the one-period
propagator stabilizes.  cp integrates the time-varying generator with a
fixed-step classical Runge-Kutta scheme whose grid is locked to the period.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm

from .linsys import ContinuousSystem, sample, semigroup, transition_integral

__all__ = [
    "FeedbackLaw",
    "Trajectory",
    "ObservationOperator",
    "build_periodic_feedback",
    "simulate_cc",
    "simulate_dc",
    "simulate_dp",
    "simulate_cp",
    "fit_decay",
    "trajectory_to_csv",
]

# Target defect of the one-period propagator under panel doubling.
_PERIOD_DEFECT_TOL = 1e-10
_MAX_PANELS = 256
# 8-point Gauss-Legendre nodes/weights on [-1, 1].
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class ObservationOperator:
    """Sample-and-hold in time: maps f to t -> f(floor(t/T) T)."""

    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("observation period T must be > 0")

    def latest_sample_time(self, t: float) -> float:
        return math.floor(t / self.T) * self.T

    def __call__(self, f, t: float):
        return f(self.latest_sample_time(t))


@dataclass(frozen=True, eq=False)
class FeedbackLaw:
    """Constant gain, or a T-periodic operator-valued schedule.

    The periodic kind carries the closed-loop generator A + B F and realizes
    schedule(t) = F exp((A + B F) (t mod T)); the mod reduction makes
    T-periodicity exact by construction.
    """

    kind: str
    F: np.ndarray
    T: float | None = None
    closed_loop_generator: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "periodic"):
            raise ValueError("kind must be 'constant' or 'periodic'")
        if self.kind == "periodic":
            if self.T is None or not self.T > 0:
                raise ValueError("periodic law requires a period T > 0")
            if self.closed_loop_generator is None:
                raise ValueError("periodic law requires its closed-loop generator")

    def schedule(self, t: float) -> np.ndarray:
        if self.kind == "constant":
            return self.F
        u = t / self.T
        frac = u - math.floor(u)
        # A float t sitting just under a period boundary wraps to 0, not T.
        if frac > 1.0 - 1e-12 * max(1.0, abs(u)):
            frac = 0.0
        return self.F @ expm(self.closed_loop_generator * (frac * self.T))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Simulated states/controls on a time grid, with an optional decay fit."""

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    decay_rate: float | None = None
    decay_constant: float | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must start at 0 and increase strictly")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", np.asarray(self.states, dtype=complex))
        object.__setattr__(self, "controls", np.asarray(self.controls, dtype=complex))

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)


def build_periodic_feedback(sys: ContinuousSystem, F: np.ndarray, T: float) -> FeedbackLaw:
    """Periodic law schedule(tau) = F exp((A + B F) tau) on [0, T)."""
    F = np.atleast_2d(np.asarray(F, dtype=complex))
    if F.shape != (sys.input_dim, sys.state_dim):
        raise ValueError(f"gain must be {sys.input_dim}x{sys.state_dim}, got {F.shape}")
    if not T > 0:
        raise ValueError("period T must be > 0")
    return FeedbackLaw(kind="periodic", F=F, T=T,
                       closed_loop_generator=sys.A + sys.B @ F)


def _num_periods(horizon: float, T: float) -> int:
    K = int(np.ceil(horizon / T - 1e-12))
    return max(K, 1)


def simulate_cc(sys: ContinuousSystem, F: np.ndarray, y0: np.ndarray,
                horizon: float, dt: float) -> Trajectory:
    """Closed loop y' = (A + B F) y, exact on the grid via the closed-loop flow."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    F = np.atleast_2d(np.asarray(F, dtype=complex))
    y0 = np.asarray(y0, dtype=complex).ravel()
    n_steps = max(int(np.ceil(horizon / dt - 1e-12)), 1)
    E = expm((sys.A + sys.B @ F) * dt)
    states = np.empty((n_steps + 1, sys.state_dim), dtype=complex)
    states[0] = y0
    for j in range(n_steps):
        states[j + 1] = E @ states[j]
    times = np.arange(n_steps + 1) * dt
    controls = states @ F.T
    return Trajectory(times, states, controls)


def simulate_dc(sys: ContinuousSystem, F: np.ndarray, T: float, y0: np.ndarray,
                horizon: float, steps_per_period: int) -> Trajectory:
    """Sampled-observation loop with constant gain, propagated exactly.

    On [kT, (k+1)T): y(kT + tau) = exp(A tau) y(kT) + J_tau B F y(kT) with
    J_tau the integrated flow; successive samples follow
    y((k+1)T) = (Phi + D F) y(kT).
    """
    if not T > 0:
        raise ValueError("T must be > 0")
    if horizon < T:
        raise ValueError("horizon must cover at least one period")
    if steps_per_period < 1:
        raise ValueError("steps_per_period must be >= 1")
    F = np.atleast_2d(np.asarray(F, dtype=complex))
    y0 = np.asarray(y0, dtype=complex).ravel()
    sampled = sample(sys, T)
    M = sampled.Phi + sampled.D @ F

    h = T / steps_per_period
    E_h = semigroup(sys, h)
    J_h = transition_integral(sys, h)
    # Intra-period propagators at tau = j h: state = (E_j + J_j B F) y(kT).
    intra = []
    E_j = np.eye(sys.state_dim, dtype=complex)
    J_j = np.zeros_like(E_j)
    for _ in range(steps_per_period - 1):
        J_j = J_h + E_h @ J_j
        E_j = E_h @ E_j
        intra.append(E_j + J_j @ sys.B @ F)

    K = _num_periods(horizon, T)
    n_points = K * steps_per_period + 1
    times = np.arange(n_points) * h
    states = np.empty((n_points, sys.state_dim), dtype=complex)
    controls = np.empty((n_points, sys.input_dim), dtype=complex)
    y_k = y0
    for k in range(K):
        base = k * steps_per_period
        states[base] = y_k
        u_k = F @ y_k
        controls[base:base + steps_per_period] = u_k
        for j, P in enumerate(intra, start=1):
            states[base + j] = P @ y_k
        y_k = M @ y_k
    states[-1] = y_k
    controls[-1] = F @ y_k
    return Trajectory(times, states, controls)


def _period_family(sys: ContinuousSystem, law: FeedbackLaw,
                   steps_per_period: int, panels: int) -> list[np.ndarray]:
    """Propagators P_j with y(kT + j h) = P_j y(kT), forced term by composite GL.

    The forced term over one substep reduces to a single integral on [0, h]:
    Q_j = exp(A h) Q_{j-1} + R1 exp(Acl (j-1) h) with
    R1 = int_0^h exp(A (h - s)) B F exp(Acl s) ds.
    """
    h = law.T / steps_per_period
    A, BF, Acl = sys.A, sys.B @ law.F, law.closed_loop_generator
    width = h / panels
    R1 = np.zeros_like(A)
    for p in range(panels):
        a = p * width
        for x, w in zip(_GL_NODES, _GL_WEIGHTS):
            s = a + 0.5 * width * (x + 1.0)
            R1 += (0.5 * width * w) * (expm(A * (h - s)) @ BF @ expm(Acl * s))
    E_h = semigroup(sys, h)
    Scl_h = expm(Acl * h)
    family = []
    Q = np.zeros_like(A)
    E_acc = np.eye(sys.state_dim, dtype=complex)   # exp(A j h)
    S_prev = np.eye(sys.state_dim, dtype=complex)  # exp(Acl (j-1) h)
    for _ in range(steps_per_period):
        Q = E_h @ Q + R1 @ S_prev
        E_acc = E_h @ E_acc
        S_prev = Scl_h @ S_prev
        family.append(E_acc + Q)
    return family


def simulate_dp(sys: ContinuousSystem, law: FeedbackLaw, y0: np.ndarray,
                horizon: float, steps_per_period: int) -> Trajectory:
    """Sampled observation under a periodic law: y' = A y + B F(t) y(kT).

    Variation of constants over each period; the Gauss-Legendre panel count
    starts at one per substep and doubles until the one-period propagator
    changes by less than the defect tolerance, then the finer family is kept.
    """
    if law.kind != "periodic":
        raise ValueError("simulate_dp requires a periodic feedback law")
    if steps_per_period < 1:
        raise ValueError("steps_per_period must be >= 1")
    T = law.T
    if horizon < T:
        raise ValueError("horizon must cover at least one period")
    y0 = np.asarray(y0, dtype=complex).ravel()

    panels = 1
    family = _period_family(sys, law, steps_per_period, panels)
    while panels < _MAX_PANELS:
        finer = _period_family(sys, law, steps_per_period, 2 * panels)
        defect = np.linalg.norm(finer[-1] - family[-1], 2)
        family, panels = finer, 2 * panels
        if defect < _PERIOD_DEFECT_TOL:
            break

    h = T / steps_per_period
    # Control weights on the substep grid: F(tau_j) = F exp(Acl tau_j).
    Scl_h = expm(law.closed_loop_generator * h)
    F_sched = [law.F.copy()]
    for _ in range(steps_per_period):
        F_sched.append(F_sched[-1] @ Scl_h)

    K = _num_periods(horizon, T)
    n_points = K * steps_per_period + 1
    times = np.arange(n_points) * h
    states = np.empty((n_points, sys.state_dim), dtype=complex)
    controls = np.empty((n_points, law.F.shape[0]), dtype=complex)
    y_k = y0
    for k in range(K):
        base = k * steps_per_period
        states[base] = y_k
        for j in range(steps_per_period):
            controls[base + j] = F_sched[j] @ y_k
            states[base + j + 1] = family[j] @ y_k
        y_k = states[base + steps_per_period]
    controls[-1] = F_sched[0] @ y_k
    return Trajectory(times, states, controls)


def simulate_cp(sys: ContinuousSystem, law: FeedbackLaw, y0: np.ndarray,
                horizon: float, dt: float) -> Trajectory:
    """Continuous observation under a periodic law: y' = (A + B F(t)) y.

    Classical fixed-step 4th-order Runge-Kutta; dt must divide the period so
    period boundaries land on grid points.
    """
    if law.kind != "periodic":
        raise ValueError("simulate_cp requires a periodic feedback law")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    T = law.T
    steps = int(round(T / dt))
    if steps < 1 or abs(steps * dt - T) > 1e-12 * T:
        raise ValueError("dt must divide the period T to within 1e-12")
    y0 = np.asarray(y0, dtype=complex).ravel()

    # Schedule on the half-step grid over one period, reused every period.
    E_half = expm(law.closed_loop_generator * (dt / 2.0))
    sched = [law.F.copy()]
    for _ in range(2 * steps):
        sched.append(sched[-1] @ E_half)
    M = [sys.A + sys.B @ S for S in sched]

    n_steps = max(int(np.ceil(horizon / dt - 1e-12)), 1)
    states = np.empty((n_steps + 1, sys.state_dim), dtype=complex)
    controls = np.empty((n_steps + 1, law.F.shape[0]), dtype=complex)
    states[0] = y0
    for j in range(n_steps):
        idx = 2 * (j % steps)
        M0, M1, M2 = M[idx], M[idx + 1], M[idx + 2]
        y = states[j]
        k1 = M0 @ y
        k2 = M1 @ (y + 0.5 * dt * k1)
        k3 = M1 @ (y + 0.5 * dt * k2)
        k4 = M2 @ (y + dt * k3)
        states[j + 1] = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        controls[j] = sched[idx] @ y
    controls[-1] = sched[2 * (n_steps % steps)] @ states[-1]
    times = np.arange(n_steps + 1) * dt
    return Trajectory(times, states, controls)


def fit_decay(traj: Trajectory) -> tuple[float, float]:
    """Least-squares decay fit over the trailing half of the horizon.

    Fits log||y(t)|| = log c - omega t; omega is clipped to 0 when the slope
    is not meaningfully negative.  A state hitting exact zero in the window
    makes the fit degenerate, reported as omega = inf.
    """
    norms = traj.norms()
    t = traj.times
    window = t >= 0.5 * t[-1]
    if np.count_nonzero(norms) < 10:
        raise ValueError("decay fit needs at least 10 grid points with nonzero states")
    t_w, n_w = t[window], norms[window]
    if np.any(n_w == 0.0):
        return math.inf, 0.0
    slope, intercept = np.polyfit(t_w, np.log(n_w), 1)
    omega = -slope if slope < -1e-9 else 0.0
    return float(omega), float(np.exp(intercept))


def with_decay(traj: Trajectory) -> Trajectory:
    omega, c = fit_decay(traj)
    return replace(traj, decay_rate=omega, decay_constant=c)


def system_hash(sys: ContinuousSystem) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(sys.A).tobytes())
    digest.update(np.ascontiguousarray(sys.B).tobytes())
    return digest.hexdigest()[:12]


def trajectory_to_csv(traj: Trajectory, path, header: dict | None = None) -> None:
    """CSV export: t, ||y||, Re/Im of each state and control component.

    A JSON header line (prefixed '#') records provenance metadata plus the
    fitted decay parameters when present.
    """
    meta = dict(header or {})
    meta.setdefault("schema", 1)
    if traj.decay_rate is not None:
        meta["omega"] = traj.decay_rate
        meta["c"] = traj.decay_constant
    n = traj.states.shape[1]
    m = traj.controls.shape[1]
    cols = ["t", "norm_y"]
    cols += [f"y{i}_{p}" for i in range(n) for p in ("re", "im")]
    cols += [f"u{j}_{p}" for j in range(m) for p in ("re", "im")]
    norms = traj.norms()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        fh.write(",".join(cols) + "\n")
        for idx, t in enumerate(traj.times):
            row = [f"{t:.16g}", f"{norms[idx]:.16g}"]
            for z in traj.states[idx]:
                row += [f"{z.real:.16g}", f"{z.imag:.16g}"]
            for z in traj.controls[idx]:
                row += [f"{z.real:.16g}", f"{z.imag:.16g}"]
            fh.write(",".join(row) + "\n")
