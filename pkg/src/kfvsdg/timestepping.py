"""Time integrators: SSP-RK3, backward Euler with damped Newton, step control.

The explicit path is the three-stage strong-stability-preserving Runge-Kutta
scheme; for linear autonomous operators an algebraically identical one-matrix
propagator is provided so long scalar runs cost one sparse matvec per step.

The implicit path solves the backward-Euler update with a damped Newton
iteration whose Jacobian is assembled by finite differences over a banded
coloring (the DG stencil couples nearest neighbors only, so the Jacobian is
block tridiagonal).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded

from .meshbasis import InvalidArgumentError


class StageFailure(RuntimeError):
    """A right-hand-side evaluation failed inside a Runge-Kutta stage."""

    def __init__(self, stage: int, original: Exception):
        super().__init__(f"rhs evaluation failed in RK stage {stage}: {original}")
        self.stage = stage
        self.original = original


class StepFailure(RuntimeError):
    """Newton did not reach the requested residual within the iteration cap."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class TimeControls:
    """CFL number, horizon and solver tolerances for a run."""

    cfl: float = 0.3
    t_final: float = 1.0
    mode: str = "explicit_rk3"            # or "implicit_be"
    newton_tol: float = 1e-8
    newton_max_iters: int = 25
    steady_tol: float | None = None

    def __post_init__(self):
        if self.cfl <= 0:
            raise InvalidArgumentError("CFL must be positive")
        if self.newton_tol <= 0 or (self.steady_tol is not None and self.steady_tol <= 0):
            raise InvalidArgumentError("tolerances must be positive")
        if self.mode not in ("explicit_rk3", "implicit_be"):
            raise InvalidArgumentError(f"unknown time integration mode {self.mode!r}")


def rk3_step(y: np.ndarray, dt: float, rhs) -> np.ndarray:
    """One Shu-Osher SSP-RK3 step for dy/dt = rhs(y)."""
    def call(stage, state):
        try:
            return rhs(state)
        except Exception as exc:  # attach the failing stage for diagnostics
            raise StageFailure(stage, exc) from exc

    y1 = y + dt * call(1, y)
    y2 = 0.75 * y + 0.25 * (y1 + dt * call(2, y1))
    return y / 3.0 + (2.0 / 3.0) * (y2 + dt * call(3, y2))


def default_cfl(degree: int) -> float:
    """Convective CFL guideline for RK3-DG, 0.9 / (2k + 1)."""
    return 0.9 / (2 * degree + 1)


def scalar_dt(h: float, c: float, mu: float, cfl: float) -> float:
    """dt = CFL * min(h/|c|, h^2/mu); an absent mechanism drops its limit."""
    limits = []
    if c != 0.0:
        limits.append(h / abs(c))
    if mu > 0.0:
        limits.append(h * h / mu)
    if not limits:
        raise InvalidArgumentError("time step needs either convection or diffusion")
    return cfl * min(limits)


def ns_dt(h: float, max_signal_speed: float, cfl: float) -> float:
    """dt = CFL * h / max(|u| + sound speed)."""
    return cfl * h / max_signal_speed


def compute_dt(field, physics, controls: TimeControls) -> float:
    """Step size for a DG field under either scalar or gas physics."""
    from .gas import GasModel, conserved_to_primitive
    from .scalar_kfvs import ScalarKinetics

    h = field.mesh.h
    if isinstance(physics, ScalarKinetics):
        return scalar_dt(h, physics.c, physics.mu, controls.cfl)
    if isinstance(physics, GasModel):
        prim = conserved_to_primitive(field.at_quadrature(), physics)
        speed = float(np.max(np.abs(prim.u) + physics.sound_speed(prim.T)))
        return ns_dt(h, speed, controls.cfl)
    raise InvalidArgumentError(f"no time-step rule for physics {type(physics).__name__}")


# -- linear fast path ---------------------------------------------------------

class LinearRK3Propagator:
    """One-matrix SSP-RK3 step for a linear operator dc/dt = L c.

    For linear autonomous L the three Shu-Osher stages compose to
    R(dt L) = I + dt L + (dt L)^2/2 + (dt L)^3/6 exactly, so a step is a
    single sparse matvec.  Equality with :func:`rk3_step` is covered by tests.
    """

    def __init__(self, op: sp.spmatrix, dt: float):
        z = sp.csr_matrix(op) * dt
        z2 = z @ z
        eye = sp.identity(op.shape[0], format="csr")
        self.matrix = (eye + z + 0.5 * z2 + (z2 @ z) / 6.0).tocsr()
        self.dt = dt

    def step(self, c: np.ndarray) -> np.ndarray:
        return self.matrix @ c


def evolve_linear(op: sp.spmatrix, c0: np.ndarray, dt: float, t_final: float,
                  observer=None, observe_stride: int = 1):
    """March dc/dt = L c to exactly t_final with RK3 steps of size <= dt.

    The last partial step is clamped so runs land on the requested horizon.
    ``observer(t, c)`` is called at t = 0, every ``observe_stride`` full
    steps, and at the final time.
    """
    if t_final < 0:
        raise InvalidArgumentError("t_final must be nonnegative")
    n_full = int(np.floor(t_final / dt + 1e-12))
    remainder = t_final - n_full * dt
    if remainder < 1e-12 * max(t_final, dt):
        remainder = 0.0
    c = c0.copy()
    t = 0.0
    if observer is not None:
        observer(t, c)
    if n_full:
        prop = LinearRK3Propagator(op, dt)
        for i in range(n_full):
            c = prop.step(c)
            t += dt
            if observer is not None and (i + 1) % observe_stride == 0:
                observer(t, c)
    if remainder > 0.0:
        c = LinearRK3Propagator(op, remainder).step(c)
        t = t_final
        if observer is not None:
            observer(t, c)
    return c


def evolve_rk3(rhs, c0: np.ndarray, dt: float, t_final: float,
               observer=None, observe_stride: int = 1):
    """Matrix-free RK3 march with the same clamping contract as evolve_linear."""
    n_full = int(np.floor(t_final / dt + 1e-12))
    remainder = t_final - n_full * dt
    if remainder < 1e-12 * max(t_final, dt):
        remainder = 0.0
    c = c0.copy()
    t = 0.0
    if observer is not None:
        observer(t, c)
    for i in range(n_full):
        c = rk3_step(c, dt, rhs)
        t += dt
        if observer is not None and (i + 1) % observe_stride == 0:
            observer(t, c)
    if remainder > 0.0:
        c = rk3_step(c, remainder, rhs)
        t = t_final
        if observer is not None:
            observer(t, c)
    return c


# -- implicit path -------------------------------------------------------------

def banded_fd_jacobian(rhs, y: np.ndarray, bandwidth: int, f0: np.ndarray | None = None,
                       fd_step: float = 1e-7) -> np.ndarray:
    """Finite-difference Jacobian of rhs in solve_banded layout.

    ``bandwidth`` is the number of sub/superdiagonals.  Columns a full
    stencil apart are probed together (banded coloring), so the cost is
    2*bandwidth + 1 rhs evaluations regardless of problem size.  Column j
    uses step fd_step * (1 + |y_j|).
    """
    n = y.size
    if f0 is None:
        f0 = rhs(y)
    ncolors = min(2 * bandwidth + 1, n)
    ab = np.zeros((2 * bandwidth + 1, n))
    steps = fd_step * (1.0 + np.abs(y))
    for color in range(ncolors):
        mask = np.zeros(n)
        cols = np.arange(color, n, ncolors)
        mask[cols] = steps[cols]
        df = (rhs(y + mask) - f0)
        for j in cols:
            lo = max(0, j - bandwidth)
            hi = min(n, j + bandwidth + 1)
            rows = np.arange(lo, hi)
            ab[bandwidth + rows - j, j] = df[rows] / steps[j]
    return ab


def be_step(y: np.ndarray, dt: float, rhs, newton_tol: float = 1e-8,
            newton_max_iters: int = 25, bandwidth: int | None = None,
            jacobian_ab: np.ndarray | None = None) -> np.ndarray:
    """Backward-Euler step: solve z - y - dt*rhs(z) = 0 by damped Newton.

    The Newton matrix I - dt*J is LU-solved in banded form; pass
    ``jacobian_ab`` (layout of :func:`banded_fd_jacobian`) to reuse a frozen
    rhs Jacobian across steps, else it is rebuilt from ``bandwidth``.
    Convergence: ||r|| <= newton_tol * ||r0|| (with an absolute floor);
    stagnation raises StepFailure carrying the last residual norm.
    """
    z = y.copy()
    r = z - y - dt * rhs(z)
    rnorm0 = np.linalg.norm(r)
    floor = 1e-14 * (1.0 + np.linalg.norm(y))
    if rnorm0 <= floor:
        return z
    rnorm = rnorm0
    ab = jacobian_ab
    bw = bandwidth if bandwidth is not None else (ab.shape[0] // 2 if ab is not None else None)
    if ab is None:
        if bw is None:
            raise InvalidArgumentError("be_step needs a bandwidth or a prebuilt Jacobian")
        ab = banded_fd_jacobian(rhs, z, bw)
    for _ in range(newton_max_iters):
        newton_ab = -dt * ab
        newton_ab[bw, :] += 1.0
        delta = solve_banded((bw, bw), newton_ab, -r)
        damping = 1.0
        for _ in range(8):
            z_try = z + damping * delta
            r_try = z_try - y - dt * rhs(z_try)
            if np.linalg.norm(r_try) < rnorm or damping < 1e-3:
                break
            damping *= 0.5
        z, r = z_try, r_try
        rnorm = np.linalg.norm(r)
        if rnorm <= max(newton_tol * rnorm0, floor):
            return z
    raise StepFailure(f"Newton stalled at relative residual {rnorm / rnorm0:.3e}", rnorm)
