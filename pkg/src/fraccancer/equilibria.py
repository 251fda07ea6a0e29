"""Equilibria of the constant-dose system and their fractional-order stability.

A fractional system with order ``alpha`` is locally asymptotically stable at
an equilibrium when every Jacobian eigenvalue satisfies
``|arg(lambda)| > alpha * pi / 2``.

Tumour-free equilibria are closed form. Coexisting equilibria reduce to a
quartic in the immune level ``I``: the fat and tumour equations are linear
in ``F`` and ``T``, giving ``T = k4 + k5*I`` and ``F = k6 + k7*I``, and the
immune equation then becomes ``m4 I^4 + ... + m0 = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import MarginalCase, NonexistentEquilibrium
from .model import ModelParams, StatePoint, rhs_scale, state_jacobian, state_rhs

__all__ = [
    "MARGINAL_TOL",
    "Condition",
    "EquilibriumPoint",
    "StabilityReport",
    "QuarticSystem",
    "matignon_margin",
    "stability_verdict",
    "tumor_free_equilibrium",
    "tumor_free_existence",
    "tumor_free_stability",
    "tumor_free_eigenvalues",
    "coexisting_quartic",
    "coexisting_candidates",
    "coexisting_stability",
    "descartes_case",
    "sign_changes",
    "companion_roots",
    "cubic_discriminant",
    "relative_residual",
]

MARGINAL_TOL = 1e-9


class Condition(NamedTuple):
    holds: bool
    margin: float


@dataclass(frozen=True, eq=False)
class EquilibriumPoint:
    kind: str  # "tumor_free" | "coexisting"
    point: StatePoint
    controls: tuple[float, float]
    residual: float
    details: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class StabilityReport:
    eigenvalues: np.ndarray
    matignon_margin: float
    verdict: str  # "stable" | "unstable" | "marginal"
    conditions: dict


def matignon_margin(eigenvalues, alpha: float) -> float:
    """``min_i |arg(lambda_i)| - alpha*pi/2``; positive means stable."""
    eig = np.asarray(eigenvalues, dtype=complex)
    return float(np.min(np.abs(np.angle(eig))) - alpha * math.pi / 2.0)


def stability_verdict(margin: float, tol: float = MARGINAL_TOL) -> str:
    if margin > tol:
        return "stable"
    if margin < -tol:
        return "unstable"
    return "marginal"


def relative_residual(x, u, params: ModelParams) -> float:
    """Largest equation residual, each scaled by its largest term."""
    f = state_rhs(np.asarray(x, dtype=float), np.asarray(u, dtype=float), params)
    scale = rhs_scale(x, u, params)
    scale = np.where(scale > 0.0, scale, 1.0)
    return float(np.max(np.abs(f) / scale))


# --- tumour-free -----------------------------------------------------------


def tumor_free_existence(params: ModelParams, u1: float, u2: float) -> dict:
    """Both existence inequalities with their margins (lhs - rhs)."""
    k = params.rates
    lhs = (
        k.mu * k.g * k.gamma1 * k.gamma2
        + k.q2 * k.g * u1 * k.gamma2
        + k.q2 * u1 * u2
        + u2 * k.gamma1 * k.mu
    )
    rhs = u2 * k.gamma1 * k.beta
    immune = lhs - rhs
    fat = k.d * k.gamma1 - k.q3 * u1
    return {
        "immune_positive": Condition(immune > 0.0, float(immune)),
        "fat_positive": Condition(fat > 0.0, float(fat)),
    }


def tumor_free_equilibrium(params: ModelParams, u1: float = 0.0, u2: float = 0.0) -> EquilibriumPoint:
    if u1 < 0 or u2 < 0:
        raise ValueError("doses must be non-negative")
    k = params.rates
    cond = tumor_free_existence(params, u1, u2)
    for name, c in cond.items():
        if not c.holds:
            raise NonexistentEquilibrium(name, c.margin)
    D1 = u1 / k.gamma1
    D2 = u2 / k.gamma2
    F = 1.0 / k.eps - k.q3 / (k.d * k.eps) * D1
    I = k.s * (k.g + D2) / ((k.mu + k.q2 * D1) * (k.g + D2) - k.beta * D2)
    point = StatePoint(0.0, float(I), float(F), float(D1), float(D2))
    return EquilibriumPoint(
        "tumor_free", point, (u1, u2), relative_residual(point, (u1, u2), params)
    )


def tumor_free_eigenvalues(params: ModelParams, u1: float = 0.0, u2: float = 0.0) -> np.ndarray:
    """Closed-form Jacobian eigenvalues at the tumour-free point (all real)."""
    k = params.rates
    eq = tumor_free_equilibrium(params, u1, u2)
    I_hat = eq.point.I
    return np.array([
        -k.gamma1,
        -k.gamma2,
        k.beta * u2 / (k.gamma2 * k.g + u2) - (k.mu + k.q2 * u1 / k.gamma1),
        k.q3 * u1 / k.gamma1 - k.d,
        # substituting F_hat gives c1*q3*u1 / (d*eps*gamma1)
        -k.xi1 * I_hat + k.r + k.c1 / k.eps
        - (k.c1 * k.q3 / (k.d * k.eps * k.gamma1) + k.q1 / k.gamma1) * u1,
    ])


def _match_eigenvalues(a, b) -> float:
    """Max relative distance after greedy nearest matching."""
    a = list(np.asarray(a, dtype=complex))
    worst = 0.0
    for lam in np.asarray(b, dtype=complex):
        i = int(np.argmin([abs(lam - x) for x in a]))
        worst = max(worst, abs(lam - a[i]) / max(abs(lam), 1e-300))
        a.pop(i)
    return worst


def tumor_free_stability(params: ModelParams, u1: float = 0.0, u2: float = 0.0) -> StabilityReport:
    eq = tumor_free_equilibrium(params, u1, u2)
    k = params.rates
    closed = tumor_free_eigenvalues(params, u1, u2)
    numeric = np.linalg.eigvals(state_jacobian(eq.point, (u1, u2), params))
    threshold = (
        k.r / k.xi1
        + k.c1 / (k.xi1 * k.eps)
        - (k.c1 * k.q3 / (k.xi1 * k.d * k.eps * k.gamma1) + k.q1 / (k.xi1 * k.gamma1)) * u1
    )
    immune_margin = (k.gamma1 * k.mu + k.q2 * u1) * (k.gamma2 * k.g + u2) - k.beta * k.gamma1 * u2
    conditions = dict(tumor_free_existence(params, u1, u2))
    conditions.update({
        "fat_decay": Condition(k.q3 * u1 < k.d * k.gamma1, float(k.d * k.gamma1 - k.q3 * u1)),
        "immune_decay": Condition(immune_margin > 0.0, float(immune_margin)),
        "tumor_decay": Condition(eq.point.I > threshold, float(eq.point.I - threshold)),
    })
    mismatch = _match_eigenvalues(numeric, closed)
    conditions["numeric_agreement"] = Condition(mismatch <= 1e-9, mismatch)
    margin = matignon_margin(closed, params.alpha)
    return StabilityReport(closed.astype(complex), margin, stability_verdict(margin), conditions)


# --- coexisting ------------------------------------------------------------


@dataclass(frozen=True)
class QuarticSystem:
    """Reduction of the coexisting equilibrium to a quartic in ``I``.

    ``coeffs`` are ``(m4, m3, m2, m1, m0)``, highest degree first.
    """

    D1: float
    D2: float
    k: tuple  # k1..k7
    theta: tuple  # theta1..theta7
    coeffs: tuple

    @property
    def descartes_case(self) -> int | None:
        m4, m3, m2, m1, m0 = self.coeffs
        return descartes_case(m1, m2, m3)

    @property
    def tumor_bound(self) -> float:
        """Upper bound on ``T`` for ``F > 0``: ``-k1/k2``."""
        return -self.k[0] / self.k[1]

    @property
    def immune_bound(self) -> float:
        """Upper bound on ``I`` for ``T > 0``: ``-k4/k5``."""
        return -self.k[3] / self.k[4]


def coexisting_quartic(params: ModelParams, u1: float, u2: float) -> QuarticSystem:
    k = params.rates
    D1 = u1 / k.gamma1
    D2 = u2 / k.gamma2
    pr = k.p * k.r
    ed = k.eps * k.d
    k1 = 1.0 / k.eps - k.q3 / ed * D1
    k2 = -k.c2 / ed
    k3 = 1.0 / k.p - k.q1 / pr * D1
    # k3 enters unexponentiated: it is a derived composite, not a base rate
    k4 = (k3 * pr + k1 * k.c1) / (pr - k.c1 * k2)
    k5 = -k.xi1 / (pr - k.c1 * k2)
    k6 = k1 + k2 * k4
    k7 = k2 * k5

    G = k.g + D2
    th1 = G * k.xi2
    th2 = G * (k.mu + k.q2 * D1) - k.beta * D2
    th3 = G * (k.mu + k.q2 * D1) - (k.rho * k.g + k.rho * D2 + k.beta * D2)
    th4 = G * k.xi2 * k.h
    th5 = -G * k.s
    th6 = G * (k.h * k.mu + k.q2 * k.h * D1) - k.beta * k.h * D2
    th7 = -G * k.s * k.h

    m4 = th1 * k5 * (k5**2 + k7**2)
    m3 = th1 * (3 * k4 * k5**2 + k4 * k7**2 + 2 * k5 * k6 * k7) + th2 * k7**2 + th3 * k5**2
    m2 = (
        th1 * (3 * k4**2 * k5 + 2 * k4 * k6 * k7 + k5 * k6**2)
        + th2 * (2 * k6 * k7)
        + th3 * (2 * k4 * k5)
        + th4 * k5
        + th5 * (k5**2 + k7**2)
    )
    # expanding theta3*T^2 gives theta3*k4^2 in the linear coefficient
    m1 = (
        th1 * (k4**3 + k4 * k6**2)
        + th2 * k6**2
        + th3 * k4**2
        + th4 * k4
        + th5 * (2 * k4 * k5 + 2 * k6 * k7)
        + th6
    )
    m0 = th5 * (k4**2 + k6**2) + th7
    return QuarticSystem(
        D1=D1,
        D2=D2,
        k=(k1, k2, k3, k4, k5, k6, k7),
        theta=(th1, th2, th3, th4, th5, th6, th7),
        coeffs=(m4, m3, m2, m1, m0),
    )


def sign_changes(coeffs) -> int:
    signs = [np.sign(c) for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def descartes_case(m1: float, m2: float, m3: float) -> int | None:
    """Case index 1..8 of the sign pattern of ``(m1, m2, m3)``; ``None`` if any is zero."""
    if 0.0 in (m1, m2, m3):
        return None
    table = {
        (False, False, False): 1,
        (True, False, False): 2,
        (False, True, False): 3,
        (True, True, False): 4,
        (False, False, True): 5,
        (False, True, True): 6,
        (True, True, True): 7,
        (True, False, True): 8,
    }
    return table[(m1 > 0, m2 > 0, m3 > 0)]


def companion_roots(coeffs) -> np.ndarray:
    """All roots of a polynomial (highest degree first) via companion eigenvalues.

    The variable is rescaled so the leading and constant coefficients have
    equal magnitude before the eigensolve.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    deg = c.size - 1
    if deg < 1:
        return np.array([], dtype=complex)
    if c[-1] != 0.0:
        scale = abs(c[-1] / c[0]) ** (1.0 / deg)
    else:
        scale = 1.0
    scaled = c * scale ** np.arange(deg, -1, -1)
    scaled = scaled / scaled[0]
    comp = np.zeros((deg, deg))
    comp[0, :] = -scaled[1:]
    comp[1:, :-1] = np.eye(deg - 1)
    return np.linalg.eigvals(comp) * scale


def _polish(coeffs, root: float, iters: int = 3) -> float:
    dc = np.polyder(coeffs)
    for _ in range(iters):
        d = np.polyval(dc, root)
        if d == 0.0:
            break
        step = np.polyval(coeffs, root) / d
        if not np.isfinite(step):
            break
        root -= step
    return root


def coexisting_candidates(params: ModelParams, u1: float = 0.0, u2: float = 0.0) -> list[EquilibriumPoint]:
    """Positive coexisting equilibria, each with its residual certificate.

    ``details`` of every point carries the quartic root, the Descartes case
    and both existence bounds.
    """
    if u1 < 0 or u2 < 0:
        raise ValueError("doses must be non-negative")
    quart = coexisting_quartic(params, u1, u2)
    coeffs = np.array(quart.coeffs)
    k1, k2, k3, k4, k5, k6, k7 = quart.k
    out = []
    for root in companion_roots(coeffs):
        if abs(root.imag) > 1e-8 * max(abs(root), 1.0):
            continue
        I = _polish(coeffs, float(root.real))
        T = k4 + k5 * I
        F = k6 + k7 * I
        if not (I > 0.0 and T > 0.0 and F > 0.0):
            continue
        if not (T < quart.tumor_bound and I < quart.immune_bound):
            continue
        point = StatePoint(float(T), float(I), float(F), quart.D1, quart.D2)
        out.append(
            EquilibriumPoint(
                "coexisting",
                point,
                (u1, u2),
                relative_residual(point, (u1, u2), params),
                details={
                    "root": I,
                    "descartes_case": quart.descartes_case,
                    "tumor_bound": quart.tumor_bound,
                    "immune_bound": quart.immune_bound,
                },
            )
        )
    out.sort(key=lambda e: e.point.I)
    return out


def cubic_discriminant(a1: float, a2: float, a3: float) -> float:
    """Discriminant of ``l^3 + a1 l^2 + a2 l + a3``."""
    return 18 * a1 * a2 * a3 + (a1 * a2) ** 2 - 4 * a3 * a1**3 - 4 * a2**3 - 27 * a3**2


def coexisting_stability(eq: EquilibriumPoint, params: ModelParams) -> StabilityReport:
    """Stability of a coexisting equilibrium: Routh-Hurwitz branches plus eigenvalues.

    The cubic factor is ``det(l*I - A)`` of the (T, I, F) block ``A``; its
    coefficients are named ``a1..a3`` to keep them apart from the model's
    ``c1``/``c2``. Raises :class:`MarginalCase` when the margin is within
    :data:`MARGINAL_TOL` of zero.
    """
    if eq.kind != "coexisting":
        raise ValueError("expected a coexisting equilibrium")
    J = state_jacobian(eq.point, eq.controls, params)
    A = J[:3, :3]
    a1 = -np.trace(A)
    a2 = (
        A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
        + A[0, 0] * A[2, 2] - A[0, 2] * A[2, 0]
        + A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1]
    )
    a3 = -np.linalg.det(A)
    disc = cubic_discriminant(a1, a2, a3)
    alpha = params.alpha
    hurwitz = a1 > 0 and a3 > 0 and a1 * a2 > a3
    scale = max(abs(a1 * a2), abs(a3), 1e-300)
    conditions = {
        "a1": a1,
        "a2": a2,
        "a3": a3,
        "discriminant": disc,
        "branch_i": disc > 0 and hurwitz,
        "branch_ii": disc < 0 and a1 >= 0 and a2 >= 0 and a3 > 0 and alpha < 2.0 / 3.0,
        "branch_iii": disc < 0 and a1 > 0 and a2 > 0 and abs(a1 * a2 - a3) <= 1e-12 * scale,
    }
    if disc > 0:
        branch = "i"
    elif disc < 0 and conditions["branch_iii"]:
        branch = "iii"
    elif disc < 0:
        branch = "ii"
    else:
        branch = None
    conditions["branch"] = branch
    conditions["analytic_stable"] = bool(
        conditions["branch_i"] or conditions["branch_ii"] or conditions["branch_iii"]
    )
    eig = np.linalg.eigvals(J)
    margin = matignon_margin(eig, alpha)
    report = StabilityReport(eig, margin, stability_verdict(margin), conditions)
    if report.verdict == "marginal":
        raise MarginalCase(report)
    return report
