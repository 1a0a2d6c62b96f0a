"""Largest Lyapunov exponent: two-trajectory model oracle and Wolf time-series estimator."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .ode import IntegrationError, ScalarSeries, VectorField


@dataclass
class LyapunovEstimate:
    lambda_max: float
    n_segments: int  # renormalizations (Benettin) or replacements (Wolf)
    ci_halfwidth: float
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EmbeddingSpec:
    dimension: int = 3
    delay: int = 1

    def __post_init__(self):
        if self.dimension < 1 or self.delay < 1:
            raise ValueError("embedding dimension and delay must be >= 1")

    def span(self) -> int:
        return (self.dimension - 1) * self.delay


def _halfwidth(rates) -> float:
    rates = np.asarray(rates, dtype=float)
    if rates.size < 2:
        return math.inf
    return float(1.96 * rates.std(ddof=1) / math.sqrt(rates.size))


def _rk4(field, s, t, dt):
    # unchecked step; callers check finiteness once per block
    h = 0.5 * dt
    k1 = field(t, s)
    k2 = field(t + h, s + h * k1)
    k3 = field(t + h, s + h * k2)
    k4 = field(t + dt, s + dt * k3)
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_scalar(f, x, y, z, dt):
    # autonomous fields only; plain floats avoid numpy call overhead
    h = 0.5 * dt
    a1, b1, c1 = f(x, y, z)
    a2, b2, c2 = f(x + h * a1, y + h * b1, z + h * c1)
    a3, b3, c3 = f(x + h * a2, y + h * b2, z + h * c2)
    a4, b4, c4 = f(x + dt * a3, y + dt * b3, z + dt * c3)
    w = dt / 6.0
    return (x + w * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            y + w * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
            z + w * (c1 + 2.0 * c2 + 2.0 * c3 + c4))


def _advance(field, pair, t, dt, steps):
    scalar = getattr(field, "scalar", None)
    if scalar is None:
        for _ in range(steps):
            pair = _rk4(field, pair, t, dt)
            t += dt
        return pair
    p, q = tuple(pair[0]), tuple(pair[1])
    for _ in range(steps):
        p = _rk4_scalar(scalar, *p, dt)
        q = _rk4_scalar(scalar, *q, dt)
    return np.array([p, q])


def lyapunov_benettin(field: VectorField, s0, dt: float = 1e-3, t_total: float = 200.0,
                      renorm_every: int = 100, delta0: float = 1e-8,
                      transient: float = 10.0, seed: int = 0) -> LyapunovEstimate:
    """Largest exponent from a fiducial/perturbed pair with periodic renormalization.

    The pair is integrated as one (2, 3) batch.  Every ``renorm_every`` steps
    ``ln(d / delta0)`` is accumulated and the perturbation is pulled back to
    ``delta0`` along the current separation.  A collapsed separation is
    reseeded in a random direction and counted in ``diagnostics["reseeds"]``.
    Fields carrying a ``scalar`` attribute (autonomous, plain-float form)
    take a faster loop.
    """
    if renorm_every < 1:
        raise ValueError("renorm_every must be >= 1")
    rng = np.random.default_rng(seed)
    s = np.asarray(s0, dtype=float).copy()
    n_transient = int(round(transient / dt))
    s = _advance(field, np.stack([s, s]), 0.0, dt, n_transient)[0]
    t = n_transient * dt
    if not np.all(np.isfinite(s)):
        raise IntegrationError(t)

    n_renorm = int(round(t_total / (dt * renorm_every)))
    if n_renorm < 1:
        raise ValueError("t_total shorter than one renormalization interval")
    direction = np.zeros(3)
    direction[0] = 1.0
    pair = np.stack([s, s + delta0 * direction])
    logs = np.empty(n_renorm)
    reseeds = 0
    for j in range(n_renorm):
        pair = _advance(field, pair, t, dt, renorm_every)
        t += renorm_every * dt
        if not np.all(np.isfinite(pair)):
            raise IntegrationError(t)
        sep = pair[1] - pair[0]
        d = float(np.sqrt(sep @ sep))
        if d == 0.0:
            reseeds += 1
            sep = rng.standard_normal(3)
            d_dir = float(np.sqrt(sep @ sep))
            pair[1] = pair[0] + delta0 * sep / d_dir
            logs[j] = 0.0
            continue
        logs[j] = math.log(d / delta0)
        pair[1] = pair[0] + sep * (delta0 / d)
    span = renorm_every * dt
    return LyapunovEstimate(
        lambda_max=float(logs.sum() / (n_renorm * span)),
        n_segments=n_renorm,
        ci_halfwidth=_halfwidth(logs / span),
        diagnostics={"reseeds": reseeds},
    )


def autocorrelation_zero(values) -> int:
    """First lag at which the sample autocorrelation is <= 0."""
    v = np.asarray(values, dtype=float)
    v = v - v.mean()
    n = v.size
    spec = np.fft.rfft(v, 2 * n)
    acf = np.fft.irfft(spec * np.conj(spec))[:n]
    if acf[0] == 0.0:
        return 1
    crossings = np.nonzero(acf <= 0.0)[0]
    return int(crossings[0]) if crossings.size else n - 1


def delay_embed(values, emb: EmbeddingSpec) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    m = v.size - emb.span()
    if m <= 0:
        raise ValueError(
            f"series of length {v.size} too short for embedding span {emb.span()}")
    return np.column_stack([v[i * emb.delay:i * emb.delay + m] for i in range(emb.dimension)])


def lyapunov_wolf(series: ScalarSeries, emb: EmbeddingSpec | None = None,
                  evolve_steps: int = 1000, min_sep: float | None = None,
                  max_sep: float | None = None,
                  theiler_window: int | None = None) -> LyapunovEstimate:
    """Wolf-style fixed-evolution-time estimate from a scalar series.

    Defaults: dimension 3 with delay at the first autocorrelation zero,
    ``min_sep = 0.03*std``, ``max_sep = 0.2*std``, Theiler window equal to the
    delay.  After every evolution segment the neighbour is replaced by the
    admissible point whose direction from the fiducial best matches the
    evolved separation vector.  If no admissible point exists ``max_sep`` is
    doubled once; failing that the segment is skipped (counted in
    ``diagnostics["skipped"]``).
    """
    x = series.values
    std = float(x.std())
    if emb is None:
        emb = EmbeddingSpec(3, max(1, autocorrelation_zero(x)))
    if min_sep is None:
        min_sep = 0.03 * std
    if max_sep is None:
        max_sep = 0.2 * std
    if not min_sep < max_sep:
        raise ValueError("min_sep must be smaller than max_sep")
    if theiler_window is None:
        theiler_window = emb.delay
    if evolve_steps < 1:
        raise ValueError("evolve_steps must be >= 1")

    E = delay_embed(x, emb)
    M = len(E)
    if M <= evolve_steps + 1:
        raise ValueError("series too short for the requested evolution time")
    tree = cKDTree(E)

    def candidates(i, radius):
        idx = np.asarray(tree.query_ball_point(E[i], radius), dtype=int)
        idx = idx[(np.abs(idx - i) > theiler_window) & (idx + evolve_steps < M)]
        dist = np.sqrt(np.sum((E[idx] - E[i]) ** 2, axis=1))
        keep = dist >= min_sep
        return idx[keep], dist[keep]

    def nearest(i):
        idx, dist = candidates(i, max_sep)
        if idx.size == 0:
            idx, dist = candidates(i, 2.0 * max_sep)
        return int(idx[np.argmin(dist)]) if idx.size else None

    logs = []
    skipped = 0
    widened = 0
    i = 0
    nb = nearest(i)
    while i + evolve_steps < M:
        if nb is None:
            skipped += 1
            i += evolve_steps
            if i + evolve_steps >= M:
                break
            nb = nearest(i)
            continue
        d0 = float(np.linalg.norm(E[nb] - E[i]))
        d1 = float(np.linalg.norm(E[nb + evolve_steps] - E[i + evolve_steps]))
        logs.append(math.log(d1 / d0))
        i += evolve_steps
        if i + evolve_steps >= M:
            break
        heading = E[nb + evolve_steps] - E[i]
        idx, dist = candidates(i, max_sep)
        if idx.size == 0:
            widened += 1
            idx, dist = candidates(i, 2.0 * max_sep)
        if idx.size == 0:
            nb = None
            continue
        norm = float(np.linalg.norm(heading))
        if norm == 0.0:
            nb = int(idx[np.argmin(dist)])
            continue
        cosines = ((E[idx] - E[i]) @ heading) / (dist * norm)
        nb = int(idx[np.argmax(cosines)])

    if not logs:
        raise ValueError("no admissible neighbour pairs found; series too short or too sparse")
    span = evolve_steps * series.grid.dt
    rates = np.asarray(logs) / span
    return LyapunovEstimate(
        lambda_max=float(np.sum(logs) / (len(logs) * span)),
        n_segments=len(logs),
        ci_halfwidth=_halfwidth(rates),
        diagnostics={"skipped": skipped, "widened": widened,
                     "dimension": emb.dimension, "delay": emb.delay},
    )
