"""Fixed-step RK4 integration of 3-D vector fields.

States are float arrays with a trailing axis of length 3.  Vector fields are
callables ``field(t, state) -> derivative`` that broadcast over any leading
axes, so the same field integrates one trajectory or a batch of them.
Scalar-driven fields take the drive sample as a third argument,
``field(t, state, s)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

VectorField = Callable[[float, np.ndarray], np.ndarray]
DrivenField = Callable[[float, np.ndarray, "float | np.ndarray"], np.ndarray]

HOLD_MODES = ("zero", "linear", "cubic")


class IntegrationError(FloatingPointError):
    """Raised when an integration step produces a non-finite state."""

    def __init__(self, t: float, step: int | None = None):
        self.t = t
        self.step = step
        where = f"t={t:.6g}" if step is None else f"step {step} (t={t:.6g})"
        super().__init__(f"integration blew up at {where}: non-finite state")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sample grid: sample ``i`` sits at ``t0 + i*dt``."""

    t0: float
    dt: float
    n: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n) * self.dt

    @property
    def duration(self) -> float:
        return (self.n - 1) * self.dt

    def time(self, i: int) -> float:
        return self.t0 + i * self.dt


@dataclass(frozen=True)
class ScalarSeries:
    """A uniformly sampled scalar signal."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"series has {values.shape} values for a grid of {self.grid.n}")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.grid.n

    def with_values(self, values) -> "ScalarSeries":
        return ScalarSeries(self.grid, values)


@dataclass(frozen=True)
class Trajectory:
    grid: TimeGrid
    states: np.ndarray  # shape (n, 3)

    def __post_init__(self):
        if self.states.shape != (self.grid.n, 3):
            raise ValueError(
                f"states shape {self.states.shape} does not match grid n={self.grid.n}")

    def __len__(self):
        return self.grid.n

    def component(self, j: int) -> ScalarSeries:
        return ScalarSeries(self.grid, self.states[:, j].copy())


def _check_finite(s: np.ndarray, t: float, step: int | None = None):
    if not np.all(np.isfinite(s)):
        raise IntegrationError(t, step)


def rk4_step(field: VectorField, s, t: float, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of ``field`` from ``(t, s)``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    s = np.asarray(s, dtype=float)
    h = 0.5 * dt
    k1 = field(t, s)
    k2 = field(t + h, s + h * k1)
    k3 = field(t + h, s + h * k2)
    k4 = field(t + dt, s + dt * k3)
    out = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    _check_finite(out, t)
    return out


def _driven_step(field: DrivenField, s, t, dt, s_start, s_mid, s_end):
    h = 0.5 * dt
    k1 = field(t, s, s_start)
    k2 = field(t + h, s + h * k1, s_mid)
    k3 = field(t + h, s + h * k2, s_mid)
    k4 = field(t + dt, s + dt * k3, s_end)
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(field: VectorField, s0, grid: TimeGrid) -> Trajectory:
    """Integrate an autonomous (or explicitly time-dependent) field over ``grid``."""
    states = np.empty((grid.n, 3))
    s = np.asarray(s0, dtype=float).copy()
    _check_finite(s, grid.t0, 0)
    states[0] = s
    dt = grid.dt
    for i in range(grid.n - 1):
        t = grid.t0 + i * dt
        try:
            s = rk4_step(field, s, t, dt)
        except IntegrationError:
            raise IntegrationError(t, i) from None
        states[i + 1] = s
    return Trajectory(grid, states)


def hold_values(drive: np.ndarray, hold: str = "zero"):
    """Drive values at the start, midpoint and end of every step.

    ``zero`` holds sample ``i`` across step ``i``; ``linear`` interpolates
    between samples ``i`` and ``i+1``; ``cubic`` uses the four-point Lagrange
    midpoint where neighbours exist and falls back to linear at the edges.
    """
    if hold not in HOLD_MODES:
        raise ValueError(f"hold must be one of {HOLD_MODES}, got {hold!r}")
    drive = np.asarray(drive, dtype=float)
    start = drive[:-1]
    if hold == "zero":
        return start, start, start
    end = drive[1:]
    mid = 0.5 * (start + end)
    if hold == "cubic" and len(drive) >= 4:
        mid = mid.copy()
        mid[1:-1] = (-drive[:-3] + 9.0 * drive[1:-2] + 9.0 * drive[2:-1] - drive[3:]) / 16.0
    return start, mid, end


def integrate_driven(field: DrivenField, s0, drive: ScalarSeries,
                     hold: str = "zero") -> Trajectory:
    """Integrate a scalar-driven field on the drive's grid.

    Exactly one drive sample is consumed per step, so the trajectory has the
    same length as ``drive``.
    """
    grid = drive.grid
    states = np.empty((grid.n, 3))
    s = np.asarray(s0, dtype=float).copy()
    _check_finite(s, grid.t0, 0)
    states[0] = s
    if grid.n == 1:
        return Trajectory(grid, states)
    start, mid, end = hold_values(drive.values, hold)
    dt = grid.dt
    for i in range(grid.n - 1):
        t = grid.t0 + i * dt
        s = _driven_step(field, s, t, dt, start[i], mid[i], end[i])
        _check_finite(s, t, i)
        states[i + 1] = s
    return Trajectory(grid, states)
