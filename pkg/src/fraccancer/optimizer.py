"""Projected forward-backward sweep for the dosing problem.

Each sweep solves the state forward, the adjoint backward, projects the
stationarity condition ``u1 = -lambda4 / (2 omega1)``,
``u2 = -lambda5 / (2 omega2)`` onto ``[0, 1]`` and relaxes towards it. The
loop stops once every state, adjoint and control component changes by less
than ``delta`` times its own 1-norm.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import SweepNotConverged
from .fracops import build_stencil
from .model import ModelParams, cost_integrand
from .solver import NewtonConfig, solve_adjoint, solve_state
from .trajectories import AdjointTrajectory, ControlSchedule, Grid, StateTrajectory

__all__ = [
    "Scenario",
    "SweepConfig",
    "OptimalSolution",
    "project_controls",
    "evaluate_cost",
    "scenario_controls",
    "forward_backward_sweep",
    "psi_criterion",
    "stationarity_gap",
]


class Scenario(str, enum.Enum):
    UNCONTROLLED = "none"
    IMMUNOTHERAPY = "immuno"
    CHEMOTHERAPY = "chemo"
    COMBINED = "combined"

    @property
    def active(self) -> tuple[bool, bool]:
        """Which of ``(u1, u2)`` the optimiser may move."""
        return {
            Scenario.UNCONTROLLED: (False, False),
            Scenario.IMMUNOTHERAPY: (False, True),
            Scenario.CHEMOTHERAPY: (True, False),
            Scenario.COMBINED: (True, True),
        }[self]

    @classmethod
    def parse(cls, text) -> "Scenario":
        if isinstance(text, cls):
            return text
        aliases = {
            "none": cls.UNCONTROLLED, "uncontrolled": cls.UNCONTROLLED,
            "immuno": cls.IMMUNOTHERAPY, "immunotherapy": cls.IMMUNOTHERAPY,
            "chemo": cls.CHEMOTHERAPY, "chemotherapy": cls.CHEMOTHERAPY,
            "combined": cls.COMBINED,
        }
        try:
            return aliases[str(text).strip().lower()]
        except KeyError:
            raise ValueError(f"unknown scenario {text!r}") from None


@dataclass(frozen=True)
class SweepConfig:
    """Sweep controls.

    ``relaxation`` is the weight of the projected control in the update
    ``u <- w*u_proj + (1-w)*u``. With ``safeguard`` on, ``w`` is halved
    (down to ``min_relaxation``) whenever the update would raise the cost,
    and doubled back towards ``relaxation`` after each accepted sweep. A rise
    below ``cost_rtol`` relative is accepted: the projected update uses the
    continuous adjoint, which is only an O(dt) approximation of the discrete
    gradient, so near the optimum it may raise the discrete cost slightly.

    ``psi >= 0`` bounds the average control change only, so the sweep also
    waits until the pointwise first-order gap (:func:`stationarity_gap`) is
    at most ``stationarity_tol``; ``None`` stops on ``psi`` alone.
    """

    delta: float = 0.001
    max_sweeps: int = 500
    relaxation: float = 0.5
    safeguard: bool = True
    min_relaxation: float = 2.0**-10
    cost_rtol: float = 1e-6
    stationarity_tol: float | None = 5e-4

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if not 0.0 <= self.relaxation <= 1.0:
            raise ValueError("relaxation must lie in [0, 1]")
        if not 0.0 < self.min_relaxation <= 1.0:
            raise ValueError("min_relaxation must lie in (0, 1]")
        if not self.cost_rtol >= 0:
            raise ValueError("cost_rtol must be non-negative")
        if self.stationarity_tol is not None and not self.stationarity_tol > 0:
            raise ValueError("stationarity_tol must be positive")


@dataclass(frozen=True, eq=False)
class OptimalSolution:
    controls: ControlSchedule
    states: StateTrajectory
    adjoints: AdjointTrajectory
    cost: float
    sweeps_used: int
    psi_final: float
    converged: bool = True


def project_controls(adjoints: AdjointTrajectory, params: ModelParams) -> ControlSchedule:
    lam = adjoints.values
    u = np.empty((lam.shape[0], 2))
    u[:, 0] = np.clip(-lam[:, 3] / (2.0 * params.omega1), 0.0, 1.0)
    u[:, 1] = np.clip(-lam[:, 4] / (2.0 * params.omega2), 0.0, 1.0)
    return ControlSchedule(adjoints.grid, u)


def evaluate_cost(states: StateTrajectory, controls: ControlSchedule, params: ModelParams) -> float:
    """Composite-trapezoid value of the cost functional on the solver grid."""
    if states.grid != controls.grid:
        raise ValueError("states and controls live on different grids")
    vals = cost_integrand(states.values, controls.values, params)
    return float(trapezoid(vals, dx=states.grid.dt))


def scenario_controls(kind, schedule: ControlSchedule) -> ControlSchedule:
    """Zero the control channels that ``kind`` keeps switched off."""
    active = Scenario.parse(kind).active
    vals = np.array(schedule.values)
    for ch, on in enumerate(active):
        if not on:
            vals[:, ch] = 0.0
    return ControlSchedule(schedule.grid, vals)


def psi_criterion(new: np.ndarray, old: np.ndarray, delta: float) -> float:
    """``min_c  delta*||new_c||_1 - ||new_c - old_c||_1`` over columns ``c``."""
    norms = np.abs(new).sum(axis=0)
    change = np.abs(new - old).sum(axis=0)
    return float((delta * norms - change).min())


def stationarity_gap(controls, adjoints, params: ModelParams, scenario="combined") -> float:
    """Largest ``|2*omega*u + lambda| / max(1, |lambda|)`` over interior samples of active channels."""
    u = controls.values if isinstance(controls, ControlSchedule) else np.asarray(controls)
    lam = adjoints.values if isinstance(adjoints, AdjointTrajectory) else np.asarray(adjoints)
    worst = 0.0
    for ch, (on, omega, col) in enumerate(zip(Scenario.parse(scenario).active, (params.omega1, params.omega2), (3, 4))):
        inner = (u[:, ch] > 0.0) & (u[:, ch] < 1.0)
        if on and inner.any():
            gap = np.abs(2.0 * omega * u[inner, ch] + lam[inner, col]) / np.maximum(1.0, np.abs(lam[inner, col]))
            worst = max(worst, float(gap.max()))
    return worst


def forward_backward_sweep(
    params: ModelParams,
    x0,
    u_init: ControlSchedule,
    grid: Grid,
    cfg: SweepConfig = SweepConfig(),
    newton_cfg: NewtonConfig = NewtonConfig(),
    scenario="combined",
    raise_on_cap: bool = True,
) -> OptimalSolution:
    """Iterate state/adjoint solves and projected control updates to convergence.

    Channels inactive in ``scenario`` are pinned to zero throughout. The
    returned controls are the iterate that passed the convergence test, not
    its relaxed successor. After the loop, samples whose last projection
    lies on a bound are set to it. On
    hitting ``cfg.max_sweeps`` a :class:`SweepNotConverged` carrying the last
    iterate is raised (or the iterate is returned with ``converged=False``
    when ``raise_on_cap`` is false).
    """
    active = np.array(Scenario.parse(scenario).active)
    stencil = build_stencil(params.alpha, grid.dt, grid.n)
    u = scenario_controls(scenario, u_init).values

    def forward(controls):
        st = solve_state(params, controls, x0, grid, newton_cfg, stencil)
        return st, float(trapezoid(cost_integrand(st.values, controls, params), dx=grid.dt))

    states, cost = forward(u)
    x_old = lam_old = None
    weight = cfg.relaxation
    psi = -1.0
    sweeps = 0
    converged = False
    while True:
        adjoints = solve_adjoint(params, states, grid, stencil=stencil)
        proj = np.where(active, project_controls(adjoints, params).values, 0.0)
        if x_old is not None:
            psi = min(
                psi_criterion(states.values, x_old, cfg.delta),
                # control change measured on the unrelaxed update, so a small
                # relaxation weight cannot fake convergence
                psi_criterion(proj, u, cfg.delta),
                psi_criterion(adjoints.values, lam_old, cfg.delta),
            )
            # samples whose projection is on a bound are snapped there at the
            # end, so the gap is measured on the snapped control
            snapped = np.where(proj >= 1.0, 1.0, np.where(proj <= 0.0, 0.0, u))
            stationary = cfg.stationarity_tol is None or (
                stationarity_gap(snapped, adjoints, params, scenario) <= cfg.stationarity_tol
            )
            if psi >= 0.0 and stationary:
                converged = True
                break
        if sweeps == cfg.max_sweeps:
            break
        sweeps += 1
        while True:
            u_new = np.where(active, weight * proj + (1.0 - weight) * u, 0.0)
            states_new, cost_new = forward(u_new)
            if (
                not cfg.safeguard
                or cost_new <= cost * (1.0 + cfg.cost_rtol)
                or weight <= cfg.min_relaxation
            ):
                break
            weight = max(0.5 * weight, cfg.min_relaxation)
        x_old, lam_old = states.values, adjoints.values
        u, states, cost = u_new, states_new, cost_new
        weight = min(2.0 * weight, cfg.relaxation)

    # relaxation only approaches a bound geometrically; put samples whose
    # projection sits on a bound exactly there
    at_upper = active & (proj >= 1.0)
    at_lower = active & (proj <= 0.0)
    if np.any(at_upper & (u < 1.0)) or np.any(at_lower & (u > 0.0)):
        u = np.where(at_upper, 1.0, np.where(at_lower, 0.0, u))
        states, cost = forward(u)
        adjoints = solve_adjoint(params, states, grid, stencil=stencil)
    controls = ControlSchedule(grid, u)
    solution = OptimalSolution(
        controls=controls,
        states=states,
        adjoints=adjoints,
        cost=evaluate_cost(states, controls, params),
        sweeps_used=sweeps,
        psi_final=psi,
        converged=converged,
    )
    if not solution.converged and raise_on_cap:
        raise SweepNotConverged(solution)
    return solution


def default_initial_controls(grid: Grid, scenario="combined", level: float = 0.5) -> ControlSchedule:
    """Constant initial guess on active channels, zero elsewhere."""
    return scenario_controls(scenario, ControlSchedule.constant(grid, level, level))


__all__.append("default_initial_controls")
