"""Uniform time grid and the sampled trajectories living on it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Grid", "StateTrajectory", "AdjointTrajectory", "ControlSchedule"]


@dataclass(frozen=True)
class Grid:
    t_f: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"grid needs n >= 2 steps, got {self.n}")
        if not self.t_f > 0:
            raise ValueError(f"t_f must be positive, got {self.t_f}")

    @classmethod
    def from_step(cls, t_f: float, dt: float) -> "Grid":
        n = round(t_f / dt)
        if n < 1 or abs(n * dt - t_f) > 1e-9 * max(1.0, t_f):
            raise ValueError(f"t_f={t_f} is not an integer multiple of dt={dt}")
        return cls(float(t_f), int(n))

    @property
    def dt(self) -> float:
        return self.t_f / self.n

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_f, self.n + 1)


def _as_samples(values, grid: Grid, width: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (grid.n + 1, width):
        raise ValueError(f"{what} must have shape {(grid.n + 1, width)}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateTrajectory:
    """Samples of ``(T, I, F, D1, D2)``, shape ``(n + 1, 5)``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_samples(self.values, self.grid, 5, "states"))

    T = property(lambda self: self.values[:, 0])
    I = property(lambda self: self.values[:, 1])
    F = property(lambda self: self.values[:, 2])
    D1 = property(lambda self: self.values[:, 3])
    D2 = property(lambda self: self.values[:, 4])


@dataclass(frozen=True, eq=False)
class AdjointTrajectory:
    """Samples of ``(lambda1..lambda5)``, shape ``(n + 1, 5)``; zero at ``t_f``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_samples(self.values, self.grid, 5, "adjoints"))


@dataclass(frozen=True, eq=False)
class ControlSchedule:
    """Samples of ``(u1, u2)`` in ``[0, 1]^2``, shape ``(n + 1, 2)``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = _as_samples(self.values, self.grid, 2, "controls")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("controls must lie in [0, 1]")
        object.__setattr__(self, "values", arr)

    @classmethod
    def constant(cls, grid: Grid, u1: float, u2: float) -> "ControlSchedule":
        vals = np.empty((grid.n + 1, 2))
        vals[:, 0] = u1
        vals[:, 1] = u2
        return cls(grid, vals)

    u1 = property(lambda self: self.values[:, 0])
    u2 = property(lambda self: self.values[:, 1])
