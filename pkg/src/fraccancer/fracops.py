"""L1 discretisation of the left and right Caputo derivatives on a uniform grid.

For a grid ``t_j = j * dt`` the left operator at ``t_k`` is

    B0 * sum_{j=1..k} (phi_j - phi_{j-1}) * w[k - j],
    B0 = -dt**(-alpha) / Gamma(2 - alpha),
    w[m] = m**(1 - alpha) - (m + 1)**(1 - alpha),

and the right operator is its time reflection. Samples may be 1-D or carry
extra trailing axes (time always on axis 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

__all__ = [
    "L1Stencil",
    "build_stencil",
    "caputo_left",
    "caputo_left_split",
    "caputo_right",
    "caputo_right_split",
]


@dataclass(frozen=True)
class L1Stencil:
    """Cached L1 coefficients for a fixed ``(alpha, dt, n)``.

    ``weights[m]`` is the lag-``m`` weight; ``weights[0] == -1`` and all
    weights are negative and increase monotonically towards zero.
    """

    alpha: float
    dt: float
    b0: float
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.size - 1

    @property
    def c0(self) -> float:
        """Diagonal coefficient ``-b0`` on the newest (or oldest) sample."""
        return -self.b0


def build_stencil(alpha: float, dt: float, n: int) -> L1Stencil:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha!r}")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")

    m = np.arange(n + 1, dtype=float)
    weights = m ** (1.0 - alpha) - (m + 1.0) ** (1.0 - alpha)
    weights[0] = -1.0
    weights.setflags(write=False)
    b0 = -(dt ** (-alpha)) / gamma(2.0 - alpha)
    return L1Stencil(alpha=float(alpha), dt=float(dt), b0=float(b0), weights=weights)


def _check_left(samples: np.ndarray, stencil: L1Stencil, k: int, need: int) -> None:
    if k < 1:
        raise ValueError("left Caputo operator needs k >= 1 (no history at k = 0)")
    if k > stencil.n:
        raise ValueError(f"step {k} exceeds stencil length {stencil.n}")
    if samples.shape[0] < need:
        raise ValueError(f"need at least {need} samples, got {samples.shape[0]}")


def caputo_left(samples, stencil: L1Stencil, k: int):
    """Discrete left Caputo derivative at ``t_k`` from ``samples[0..k]``."""
    phi = np.asarray(samples, dtype=float)
    _check_left(phi, stencil, k, k + 1)
    diffs = np.diff(phi[: k + 1], axis=0)
    return stencil.b0 * np.tensordot(stencil.weights[k - 1 :: -1], diffs, axes=(0, 0))


def caputo_left_split(samples, stencil: L1Stencil, k: int):
    """Split the left operator at ``t_k`` into ``(diag, history)``.

    ``caputo_left == diag * phi_k + history``. Only ``samples[0..k-1]`` are
    read, so ``samples[k]`` may hold anything (e.g. a Newton iterate).
    """
    phi = np.asarray(samples, dtype=float)
    _check_left(phi, stencil, k, k)
    # w[0] = -1 multiplies (phi_k - phi_{k-1}); the phi_{k-1} part is history
    hist = phi[k - 1].copy() if phi.ndim > 1 else float(phi[k - 1])
    if k > 1:
        diffs = np.diff(phi[:k], axis=0)
        hist = hist + np.tensordot(stencil.weights[k - 1 : 0 : -1], diffs, axes=(0, 0))
    return stencil.c0, stencil.b0 * hist


def _check_right(lam: np.ndarray, stencil: L1Stencil, k: int) -> int:
    n = lam.shape[0] - 1
    if n < 1 or n > stencil.n:
        raise ValueError(f"sample count {n + 1} incompatible with stencil length {stencil.n}")
    if not 0 <= k <= n - 1:
        raise ValueError(
            f"right Caputo split needs 0 <= k <= {n - 1}; the terminal sample is fixed, not solved"
        )
    return n


def caputo_right(samples, stencil: L1Stencil, k: int):
    """Discrete right Caputo derivative at ``t_k`` from ``samples[k..N]``.

    Uses the sign convention of ``-1/Gamma(1-alpha) int_t^B phi'(s) (s-t)^-alpha ds``,
    so it equals the left operator applied to the time-reversed samples.
    """
    lam = np.asarray(samples, dtype=float)
    n = _check_right(lam, stencil, k)
    diffs = np.diff(lam[k:], axis=0)  # lam_j - lam_{j-1}, j = k+1..N
    w = stencil.weights[: n - k]
    return stencil.c0 * np.tensordot(w, diffs, axes=(0, 0))


def caputo_right_split(samples, stencil: L1Stencil, k: int):
    """Split the right operator at ``t_k`` into ``(diag, history)``.

    The unknown is ``samples[k]``; only ``samples[k+1..N]`` are read.
    """
    lam = np.asarray(samples, dtype=float)
    n = _check_right(lam, stencil, k)
    hist = -lam[k + 1].copy() if lam.ndim > 1 else -float(lam[k + 1])
    if n - k > 1:
        diffs = np.diff(lam[k + 1 :], axis=0)  # j = k+2..N
        hist = hist + np.tensordot(stencil.weights[1 : n - k], diffs, axes=(0, 0))
    return stencil.c0, stencil.c0 * hist
