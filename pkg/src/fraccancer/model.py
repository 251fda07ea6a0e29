"""Cancer-obesity dynamics with five compartments.

State ``x = (T, I, F, D1, D2)``: tumour cells, immune cells, fat cells,
chemotherapeutic and immunotherapeutic drug concentrations. Control
``u = (u1, u2)``: chemo and immuno doses in ``[0, 1]``.

Every rate constant enters the dynamics raised to the fractional order
``alpha``; only the base values are stored and ``ModelParams.rates`` derives
the effective coefficients. The cost weights ``omega1``/``omega2`` are not
exponentiated.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

__all__ = [
    "C1_DEFAULT",
    "C2_DEFAULT",
    "FAT_COUPLING_DEFAULT",
    "ProvenanceWarning",
    "ModelParams",
    "Rates",
    "StatePoint",
    "ControlPoint",
    "AdjointPoint",
    "default_params",
    "state_rhs",
    "rhs_scale",
    "state_jacobian",
    "adjoint_rhs",
    "cost_integrand",
]

# Fat/tumour competition: c1 = tumour growth boost from fat, c2 = fat loss to
# tumour. The published parameter table lists both only symbolically, so these
# defaults are NOT published values. Without treatment the tumour reaches
# ~1e10 cells while fat keeps growing; that needs c2**alpha * T < d**alpha,
# i.e. c2 below ~3e-16. c1 is the value that reproduces the chemo-only optimal
# cost 81.3347 at alpha = 0.9, gamma1 = 0.1 on the default grid
# (demos/calibrate_fat_coupling.py).
C1_DEFAULT = 0.2764092
C2_DEFAULT = 1e-16
FAT_COUPLING_DEFAULT = {"c1": C1_DEFAULT, "c2": C2_DEFAULT}

RATE_FIELDS = (
    "r", "p", "xi1", "xi2", "c1", "c2", "q1", "q2", "q3", "s", "rho", "h",
    "mu", "beta", "g", "d", "eps", "gamma1", "gamma2",
)


class ProvenanceWarning(UserWarning):
    """A coefficient without a published numeric value was filled in."""


class StatePoint(NamedTuple):
    T: float
    I: float
    F: float
    D1: float
    D2: float


class ControlPoint(NamedTuple):
    u1: float
    u2: float


class AdjointPoint(NamedTuple):
    l1: float
    l2: float
    l3: float
    l4: float
    l5: float


@dataclass(frozen=True)
class Rates:
    """Effective coefficients ``base ** alpha``."""

    r: float
    p: float
    xi1: float
    xi2: float
    c1: float
    c2: float
    q1: float
    q2: float
    q3: float
    s: float
    rho: float
    h: float
    mu: float
    beta: float
    g: float
    d: float
    eps: float
    gamma1: float
    gamma2: float


@dataclass(frozen=True)
class ModelParams:
    """Base parameter values and fractional order.

    ``c1``/``c2`` have no published values; leaving them ``None`` substitutes
    :data:`C1_DEFAULT`/:data:`C2_DEFAULT` and emits a :class:`ProvenanceWarning`.
    """

    alpha: float = 0.9
    r: float = 0.00431
    p: float = 1.02e-9
    xi1: float = 6.41e-11
    xi2: float = 3.42e-6
    c1: float | None = None
    c2: float | None = None
    q1: float = 0.08
    q2: float = 2e-11
    q3: float = 2e-11
    s: float = 0.33
    rho: float = 0.0125
    h: float = 2.02e7
    mu: float = 0.204
    beta: float = 0.125
    g: float = 2e7
    d: float = 0.00431 / 100
    eps: float = 1.02e-9
    gamma1: float = 0.1
    gamma2: float = 1.0
    omega1: float = 1.0
    omega2: float = 2.0

    def __post_init__(self):
        missing = [name for name in ("c1", "c2") if getattr(self, name) is None]
        if missing:
            filled = ", ".join(f"{n}={FAT_COUPLING_DEFAULT[n]:g}" for n in missing)
            warnings.warn(
                f"no published value for {', '.join(missing)}; using calibrated default {filled}",
                ProvenanceWarning,
                stacklevel=3,
            )
            for name in missing:
                object.__setattr__(self, name, FAT_COUPLING_DEFAULT[name])
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0,1), got {self.alpha!r}")
        for name in RATE_FIELDS + ("omega1", "omega2"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @cached_property
    def rates(self) -> Rates:
        a = self.alpha
        return Rates(**{name: getattr(self, name) ** a for name in RATE_FIELDS})

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def default_params(**overrides) -> ModelParams:
    """Parameter set of the reference scenario, with optional overrides."""
    return ModelParams(**overrides)


def _split(x):
    x = np.asarray(x, dtype=float)
    return x, (x[..., 0], x[..., 1], x[..., 2], x[..., 3], x[..., 4])


def state_rhs(x, u, params: ModelParams) -> np.ndarray:
    """Right-hand side ``f(x, u)``; broadcasts over leading axes."""
    x, (T, I, F, D1, D2) = _split(x)
    u = np.asarray(u, dtype=float)
    u1, u2 = u[..., 0], u[..., 1]
    k = params.rates
    hill = k.h + T * T + F * F
    out = np.empty(np.broadcast_shapes(x.shape, u.shape[:-1] + (5,)))
    out[..., 0] = k.r * T * (1.0 - k.p * T) - k.xi1 * T * I + k.c1 * T * F - k.q1 * D1 * T
    out[..., 1] = (
        k.s
        + k.rho * T * T * I / hill
        + k.beta * D2 * I / (k.g + D2)
        - k.xi2 * T * I
        - k.mu * I
        - k.q2 * D1 * I
    )
    out[..., 2] = k.d * F * (1.0 - k.eps * F) - k.c2 * F * T - k.q3 * D1 * F
    out[..., 3] = u1 - k.gamma1 * D1
    out[..., 4] = u2 - k.gamma2 * D2
    return out


def rhs_scale(x, u, params: ModelParams) -> np.ndarray:
    """Largest absolute term in each equation, used for relative residuals."""
    x, (T, I, F, D1, D2) = _split(x)
    u1, u2 = float(u[0]), float(u[1])
    k = params.rates
    hill = k.h + T * T + F * F
    terms = (
        (k.r * T, k.r * k.p * T * T, k.xi1 * T * I, k.c1 * T * F, k.q1 * D1 * T),
        (k.s, k.rho * T * T * I / hill, k.beta * D2 * I / (k.g + D2), k.xi2 * T * I,
         k.mu * I, k.q2 * D1 * I),
        (k.d * F, k.d * k.eps * F * F, k.c2 * F * T, k.q3 * D1 * F),
        (u1, k.gamma1 * D1),
        (u2, k.gamma2 * D2),
    )
    return np.array([max(abs(float(t)) for t in row) for row in terms])


def state_jacobian(x, u, params: ModelParams) -> np.ndarray:
    """Jacobian ``df/dx`` at a single point (5x5)."""
    _, (T, I, F, D1, D2) = _split(x)
    k = params.rates
    hill = k.h + T * T + F * F
    gd = k.g + D2
    J = np.zeros((5, 5))
    J[0, 0] = k.r - 2.0 * k.r * k.p * T - k.xi1 * I + k.c1 * F - k.q1 * D1
    J[0, 1] = -k.xi1 * T
    J[0, 2] = k.c1 * T
    J[0, 3] = -k.q1 * T
    J[1, 0] = 2.0 * k.rho * T * I * (k.h + F * F) / hill**2 - k.xi2 * I
    J[1, 1] = k.rho * T * T / hill + k.beta * D2 / gd - k.xi2 * T - k.mu - k.q2 * D1
    J[1, 2] = -2.0 * k.rho * T * T * I * F / hill**2
    J[1, 3] = -k.q2 * I
    J[1, 4] = k.beta * k.g * I / gd**2
    J[2, 0] = -k.c2 * F
    J[2, 2] = k.d - 2.0 * k.d * k.eps * F - k.c2 * T - k.q3 * D1
    J[2, 3] = -k.q3 * F
    J[3, 3] = -k.gamma1
    J[4, 4] = -k.gamma2
    return J


def adjoint_rhs(lam, x, params: ModelParams) -> np.ndarray:
    """Right Caputo derivative of the adjoint: ``J(x)^T lam + e_T``.

    Written out row by row. The lambda1 row carries ``-c2 F lambda3``, the
    transpose of the fat equation's dependence on T.
    """
    l1, l2, l3, l4, l5 = (float(v) for v in np.asarray(lam, dtype=float))
    _, (T, I, F, D1, D2) = _split(x)
    k = params.rates
    hill = k.h + T * T + F * F
    gd = k.g + D2
    return np.array([
        (k.r - 2.0 * k.r * k.p * T - k.xi1 * I + k.c1 * F - k.q1 * D1) * l1
        + (2.0 * k.rho * T * I * (k.h + F * F) / hill**2 - k.xi2 * I) * l2
        - k.c2 * F * l3
        + 1.0,
        -k.xi1 * T * l1
        + (k.rho * T * T / hill + k.beta * D2 / gd - k.xi2 * T - k.mu - k.q2 * D1) * l2,
        k.c1 * T * l1
        - 2.0 * k.rho * T * T * I * F / hill**2 * l2
        + (k.d - 2.0 * k.d * k.eps * F - k.c2 * T - k.q3 * D1) * l3,
        -k.q1 * T * l1 - k.q2 * I * l2 - k.q3 * F * l3 - k.gamma1 * l4,
        k.beta * k.g * I / gd**2 * l2 - k.gamma2 * l5,
    ])


def cost_integrand(x, u, params: ModelParams):
    """Running cost ``T + omega1 u1^2 + omega2 u2^2``; broadcasts."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    return x[..., 0] + params.omega1 * u[..., 0] ** 2 + params.omega2 * u[..., 1] ** 2
