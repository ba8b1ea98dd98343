"""The saturated flow vector field and a fixed-step RK4 integrator.

The state x lives on the box lattice {0 <= x <= w} and evolves by

    dx/dt = clamp(R' x + c, 0, w) - x

which keeps the lattice invariant: the net flow f satisfies
-x <= f(x) <= w - x entrywise by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, PreconditionError
from .model import NetworkSpec

#: membership slack for "x is on the lattice"
LATTICE_TOL = 1e-9


def saturate(y: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Entrywise clamp of y to [lo, hi]; idempotent, monotone in y."""
    y = np.asarray(y, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        i = int(np.argmax(lo > hi))
        raise ValueError(f"saturation bounds inverted at index {i}: lo={lo.flat[i]} > hi={hi.flat[i]}")
    return np.minimum(np.maximum(y, lo), hi)


def in_lattice(x: np.ndarray, w: np.ndarray, tol: float = LATTICE_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all(x >= -tol) and np.all(x <= np.asarray(w) + tol))


def net_flow(spec: NetworkSpec, x: np.ndarray) -> np.ndarray:
    """Net flow f(x) = clamp(R'x + c, 0, w) - x.

    The flow constraints -x <= f <= w - x hold exactly (the clamp output
    lies in [0, w]); asserted here so debug runs catch any regression.
    """
    x = np.asarray(x, dtype=float)
    f = np.clip(spec.routing.T @ x + spec.demand, 0.0, spec.capacity) - x
    assert np.all(f >= -x) and np.all(f <= spec.capacity - x)
    return f


def linear_rhs(spec: NetworkSpec, x: np.ndarray) -> np.ndarray:
    """Unsaturated field (R' - I)x + c.

    Coincides with net_flow wherever R'x + c lies strictly inside (0, w),
    i.e. wherever no clamp is active.
    """
    x = np.asarray(x, dtype=float)
    return spec.routing.T @ x + spec.demand - x


@dataclass
class IntegratorConfig:
    dt: float = 0.01
    t_end: float = 200.0
    sample_every: int = 10
    residual_tol: float = 1e-10

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0 or self.residual_tol <= 0:
            raise ValueError("dt, t_end and residual_tol must be positive")
        if self.sample_every < 1:
            raise ValueError("sample_every must be a positive integer")
        if self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")


@dataclass
class Trajectory:
    """Time-sampled solution of the flow dynamics.

    converged is true iff the l1 residual ||f(x(T))||_1 dropped below the
    configured tolerance at some sampled time, at which point integration
    stopped early.
    """

    times: np.ndarray
    states: np.ndarray  # shape (len(times), n)
    converged: bool
    final_residual: float

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def integrate(spec: NetworkSpec, x0: np.ndarray, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Fixed-step RK4 on the saturated flow field, sampled on a uniform grid.

    States are clamped back onto the lattice after each step; since the
    exact flow never leaves the lattice, any clamp is integration error and
    its magnitude is guarded by 10*dt^2*max|f| (plus a roundoff floor).
    Integration stops early once a sampled residual drops below
    cfg.residual_tol.
    """
    if cfg is None:
        cfg = IntegratorConfig()
    x = np.asarray(x0, dtype=float).copy()
    w = spec.capacity
    if x.shape != w.shape:
        raise PreconditionError(f"initial state must have length {spec.n}")
    if not in_lattice(x, w):
        raise PreconditionError("initial state outside the lattice [0, w]")

    dt = cfg.dt
    n_steps = max(1, int(round(cfg.t_end / dt)))
    times = [0.0]
    states = [x.copy()]
    converged = False
    residual = float(np.abs(net_flow(spec, x)).sum())
    if residual < cfg.residual_tol:
        converged = True
        n_steps = 0

    # inlined net_flow: the integrator loop dominates runtime
    R_t = np.ascontiguousarray(spec.routing.T)
    c = spec.demand

    def rhs(y):
        return np.clip(R_t @ y + c, 0.0, w) - y

    for k in range(1, n_steps + 1):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        x_new = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x_new)):
            raise NumericalError(f"non-finite state at t={k * dt:.6g}")
        clamped = np.clip(x_new, 0.0, w)
        clamp_mag = float(np.abs(clamped - x_new).max())
        guard = 10.0 * dt * dt * float(np.abs(k1).max()) + 1e-12
        if clamp_mag > guard:
            raise NumericalError(f"lattice clamp {clamp_mag:.3g} exceeds guard {guard:.3g} at t={k * dt:.6g}")
        x = clamped
        if k % cfg.sample_every == 0 or k == n_steps:
            times.append(k * dt)
            states.append(x.copy())
            residual = float(np.abs(net_flow(spec, x)).sum())
            if residual < cfg.residual_tol:
                converged = True
                break

    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        converged=converged,
        final_residual=residual,
    )
