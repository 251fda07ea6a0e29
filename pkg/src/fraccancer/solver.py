"""Implicit L1 time stepping for the state (Newton) and adjoint (linear) systems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NonConvergence, SingularSystem
from .fracops import L1Stencil, build_stencil, caputo_left_split, caputo_right_split
from .model import ModelParams, rhs_scale, state_jacobian, state_rhs
from .trajectories import AdjointTrajectory, ControlSchedule, Grid, StateTrajectory

__all__ = [
    "NewtonConfig",
    "solve_state",
    "solve_adjoint",
    "state_residuals",
    "residual_floor",
    "COST_GRADIENT",
]

#: d(running cost)/dx: the cost is linear in T and independent of the other states.
COST_GRADIENT = np.array([1.0, 0.0, 0.0, 0.0, 0.0])

PIVOT_RTOL = 1e-14
#: residuals within this many ulps of the size of their terms count as zero
ROUNDOFF_ULPS = 64.0


@dataclass(frozen=True)
class NewtonConfig:
    max_iter: int = 25
    tol: float = 1e-10
    damping: float = 0.5

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")


def _solve5(A: np.ndarray, b: np.ndarray, step: int) -> np.ndarray:
    # rows are equilibrated first: T and F reach ~1e9 while the drug rows
    # stay O(1), so pivots are judged against a unit-scaled matrix
    row = np.abs(A).max(axis=1)
    if not np.all(row > 0):
        raise SingularSystem(step)
    As, bs = A / row[:, None], b / row
    lu, piv = scipy.linalg.lu_factor(As, check_finite=False)
    if np.abs(np.diag(lu)).min() < PIVOT_RTOL:
        raise SingularSystem(step)
    return scipy.linalg.lu_solve((lu, piv), bs, check_finite=False)


def residual_floor(c0: float, x, hist, u, params: ModelParams) -> np.ndarray:
    """Per-equation roundoff level of the step residual ``c0*x + hist - f``.

    When a component reaches ~1e8 an absolute tolerance of 1e-10 lies below
    what double precision can resolve, so Newton accepts a residual at this
    floor as converged.
    """
    terms = np.maximum(np.abs(c0 * np.asarray(x)), np.abs(hist))
    terms = np.maximum(terms, rhs_scale(x, u, params))
    return ROUNDOFF_ULPS * np.finfo(float).eps * terms


def _controls_array(controls, grid: Grid) -> np.ndarray:
    if isinstance(controls, ControlSchedule):
        if controls.grid != grid:
            raise ValueError("controls live on a different grid")
        return controls.values
    arr = np.asarray(controls, dtype=float)
    if arr.shape != (grid.n + 1, 2):
        raise ValueError(f"controls must have shape {(grid.n + 1, 2)}")
    return arr


def solve_state(
    params: ModelParams,
    controls,
    x0,
    grid: Grid,
    cfg: NewtonConfig = NewtonConfig(),
    stencil: L1Stencil | None = None,
) -> StateTrajectory:
    """March the L1-discretised state system forward from ``x0``.

    At each step the nonlinear residual ``c0*x_k + history - f(x_k, u_k)`` is
    driven below ``cfg.tol`` (max-norm) by full Newton with backtracking,
    starting from ``x_{k-1}``. A component whose residual cannot get below
    ``cfg.tol`` in double precision is accepted at :func:`residual_floor`.
    """
    u = _controls_array(controls, grid)
    stencil = stencil or build_stencil(params.alpha, grid.dt, grid.n)
    xs = np.zeros((grid.n + 1, 5))
    xs[0] = np.asarray(x0, dtype=float)
    eye = np.eye(5)

    for k in range(1, grid.n + 1):
        c0, hist = caputo_left_split(xs, stencil, k)
        uk = u[k]

        def residual(x):
            return c0 * x + hist - state_rhs(x, uk, params)

        def merit(x, res):
            # residual in units of its acceptance threshold, so roundoff in a
            # large component cannot veto progress in a small one
            return float(np.max(np.abs(res) / np.maximum(cfg.tol, residual_floor(c0, x, hist, uk, params))))

        x = xs[k - 1].copy()
        res = residual(x)
        m = merit(x, res)
        for _ in range(cfg.max_iter):
            if m <= 1.0:
                break
            dx = _solve5(c0 * eye - state_jacobian(x, uk, params), res, k)
            step = 1.0
            while True:
                x_try = x - step * dx
                res_try = residual(x_try)
                m_try = merit(x_try, res_try)
                if m_try < m or step < 1e-6:
                    break
                step *= cfg.damping
            x, res, m = x_try, res_try, m_try
        if not m <= 1.0:
            raise NonConvergence(k, float(np.abs(res).max()))
        xs[k] = x
    return StateTrajectory(grid, xs)


def state_residuals(params: ModelParams, controls, states: StateTrajectory, floors: bool = False):
    """Discrete residuals of every step, shape ``(n, 5)``, recomputed from scratch.

    With ``floors=True`` the matching :func:`residual_floor` array is returned too.
    """
    grid = states.grid
    u = _controls_array(controls, grid)
    stencil = build_stencil(params.alpha, grid.dt, grid.n)
    xs = states.values
    out = np.empty((grid.n, 5))
    floor = np.empty((grid.n, 5))
    for k in range(1, grid.n + 1):
        c0, hist = caputo_left_split(xs, stencil, k)
        out[k - 1] = c0 * xs[k] + hist - state_rhs(xs[k], u[k], params)
        floor[k - 1] = residual_floor(c0, xs[k], hist, u[k], params)
    return (out, floor) if floors else out


def solve_adjoint(
    params: ModelParams,
    states: StateTrajectory,
    grid: Grid | None = None,
    forcing=None,
    stencil: L1Stencil | None = None,
) -> AdjointTrajectory:
    """March the adjoint backward from ``lambda(t_f) = 0``.

    Solves ``(c0*I - J(x_k)^T) lambda_k = forcing_k - history_k`` for
    ``k = N-1 .. 0``, the right L1 operator collocated at ``t_k``. ``forcing``
    is the running-cost gradient, ``(1, 0, 0, 0, 0)`` by default; pass a
    5-vector or an ``(n + 1, 5)`` array to override.
    """
    grid = grid or states.grid
    if states.grid != grid:
        raise ValueError("states live on a different grid")
    stencil = stencil or build_stencil(params.alpha, grid.dt, grid.n)
    n = grid.n
    if forcing is None:
        forcing = COST_GRADIENT
    forcing = np.broadcast_to(np.asarray(forcing, dtype=float), (n + 1, 5))

    lam = np.zeros((n + 1, 5))
    eye = np.eye(5)
    xs = states.values
    # unused controls: the Jacobian does not depend on u
    u0 = (0.0, 0.0)
    for k in range(n - 1, -1, -1):
        c0, hist = caputo_right_split(lam, stencil, k)
        A = c0 * eye - state_jacobian(xs[k], u0, params).T
        lam[k] = _solve5(A, forcing[k] - hist, k)
    return AdjointTrajectory(grid, lam)
