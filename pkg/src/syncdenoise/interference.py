"""Interference generation, DC translation, sign convention and SNR."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .ode import ScalarSeries, TimeGrid

__all__ = [
    "NoiseKind", "NoiseSpec", "ScalarSeries", "generate_noise", "add_series",
    "add_dc", "sign_of", "snr_db", "amplitude_for_snr",
]


class NoiseKind(enum.Enum):
    UNIFORM = "uniform"
    SINE = "sine"
    NONE = "none"


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind = NoiseKind.UNIFORM
    amplitude: float = 1.0
    frequency: float = 50.0  # Hz, sine only
    phase: float = 0.0  # rad, sine only
    seed: int = 0  # uniform only

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not self.amplitude >= 0:
            raise ValueError(f"noise amplitude must be >= 0, got {self.amplitude}")


def generate_noise(spec: NoiseSpec, grid: TimeGrid) -> ScalarSeries:
    """Sample interference on ``grid``.

    Uniform noise is drawn i.i.d. on ``[-A, A]`` from a PCG64 generator seeded
    with ``spec.seed``, so equal seeds give equal series on any platform.
    """
    if spec.kind is NoiseKind.NONE:
        values = np.zeros(grid.n)
    elif spec.kind is NoiseKind.UNIFORM:
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        values = rng.uniform(-spec.amplitude, spec.amplitude, grid.n)
    else:
        values = spec.amplitude * np.sin(
            2.0 * np.pi * spec.frequency * grid.times + spec.phase)
    return ScalarSeries(grid, values)


def _same_grid(a: ScalarSeries, b: ScalarSeries):
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


def add_series(a: ScalarSeries, b: ScalarSeries) -> ScalarSeries:
    _same_grid(a, b)
    return ScalarSeries(a.grid, a.values + b.values)


def add_dc(u: ScalarSeries, d: float) -> ScalarSeries:
    return ScalarSeries(u.grid, u.values + d)


def sign_of(value: float) -> int:
    """+1 for ``value >= 0``, otherwise -1 (zero counts as positive)."""
    return 1 if value >= 0 else -1


def snr_db(signal: ScalarSeries, noise: ScalarSeries) -> float:
    """``10 log10(sum s^2 / sum u^2)``; ``math.inf`` when the noise has no power."""
    _same_grid(signal, noise)
    noise_power = float(np.sum(noise.values ** 2))
    if noise_power == 0.0:
        return math.inf
    return 10.0 * math.log10(float(np.sum(signal.values ** 2)) / noise_power)


def amplitude_for_snr(signal: ScalarSeries, spec: NoiseSpec, target_db: float) -> float:
    """Amplitude that gives exactly ``target_db`` for this signal and noise shape.

    Both noise kinds are linear in the amplitude for a fixed seed/phase, so the
    unit-amplitude series is rescaled analytically.
    """
    if spec.kind is NoiseKind.NONE:
        raise ValueError("cannot tune the amplitude of an empty noise spec")
    unit = generate_noise(
        NoiseSpec(spec.kind, 1.0, spec.frequency, spec.phase, spec.seed), signal.grid)
    ps = float(np.sum(signal.values ** 2))
    pu = float(np.sum(unit.values ** 2))
    return math.sqrt(ps / (pu * 10.0 ** (target_db / 10.0)))
