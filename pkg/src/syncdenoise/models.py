"""Lorenz drive, Pecora-Carroll response and the autonomous auxiliary copy.

The default preset is (sigma, r, b) = (10, 60, 8/3).  ``AS_PRINTED_PARAMS``
keeps the literal (10, 8/3, 60) triple and ``CouplingVariant.AS_PRINTED``
keeps the literal equation forms, for side-by-side comparison runs only.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .ode import DrivenField, VectorField


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    r: float = 60.0
    b: float = 8.0 / 3.0

    def __post_init__(self):
        for name in ("sigma", "r", "b"):
            if not getattr(self, name) > 0:
                raise ValueError(f"Lorenz parameter {name} must be positive")


DEFAULT_PARAMS = LorenzParams()
AS_PRINTED_PARAMS = LorenzParams(sigma=10.0, r=8.0 / 3.0, b=60.0)

PRESETS = {
    "standard": DEFAULT_PARAMS,
    "as-printed": AS_PRINTED_PARAMS,
}


class CouplingVariant(enum.Enum):
    STANDARD = "standard"
    AS_PRINTED = "as-printed"


def _fill(out, a, b, c):
    out[..., 0] = a
    out[..., 1] = b
    out[..., 2] = c
    return out


def _like(s, u=None):
    if u is None or np.ndim(u) == 0:
        return np.empty(s.shape)
    return np.empty(np.broadcast_shapes(s.shape[:-1], np.shape(u)) + (3,))


def drive_field(p: LorenzParams = DEFAULT_PARAMS,
                variant: CouplingVariant = CouplingVariant.STANDARD) -> VectorField:
    sigma, r, b = p.sigma, p.r, p.b
    if variant is CouplingVariant.STANDARD:
        def field(t, s):
            x, y, z = s[..., 0], s[..., 1], s[..., 2]
            return _fill(_like(s), sigma * (y - x), r * x - y - x * z, x * y - b * z)

        def scalar(x, y, z):
            return sigma * (y - x), r * x - y - x * z, x * y - b * z
    else:
        # dy/dt = -xz + ry - y, literally
        def field(t, s):
            x, y, z = s[..., 0], s[..., 1], s[..., 2]
            return _fill(_like(s), sigma * (y - x), -x * z + r * y - y, x * y - b * z)

        def scalar(x, y, z):
            return sigma * (y - x), -x * z + r * y - y, x * y - b * z
    # plain-float form for long single-trajectory loops
    field.scalar = scalar
    return field


def response_field(p: LorenzParams = DEFAULT_PARAMS,
                   variant: CouplingVariant = CouplingVariant.STANDARD) -> DrivenField:
    """Receiver driven by the transmitted scalar ``u`` in place of x."""
    sigma, r, b = p.sigma, p.r, p.b
    if variant is CouplingVariant.STANDARD:
        def field(t, s, u):
            y1, y2, y3 = s[..., 0], s[..., 1], s[..., 2]
            return _fill(_like(s, u), sigma * (y2 - y1), r * u - y2 - u * y3, u * y2 - b * y3)
    else:
        def field(t, s, u):
            y1, y2, y3 = s[..., 0], s[..., 1], s[..., 2]
            return _fill(_like(s, u), sigma * (y2 - u), -u * y3 + r * y2 - y2, u * y2 - b * y3)
    return field


def auxiliary_field(p: LorenzParams = DEFAULT_PARAMS) -> VectorField:
    """Free-running copy of the drive system (standard form)."""
    return drive_field(p, CouplingVariant.STANDARD)
