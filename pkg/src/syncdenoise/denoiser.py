"""Interference removal from the transmitted scalar of a synchronized pair.

Each "large" received sample seeds a free-running copy of the drive system at
``(received, y2, y3)``, where ``y`` is the synchronized response.  The time
``tau`` that copy needs to drift a distance ``L`` from the response fixes the
deviation magnitude ``L * exp(-lambda * (tau + eta))``, which is subtracted
from the sample.  Passes repeat with ``L`` stepped down.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .interference import add_dc, add_series, sign_of, snr_db
from .models import (DEFAULT_PARAMS, CouplingVariant, LorenzParams, auxiliary_field,
                     response_field)
from .ode import (HOLD_MODES, IntegrationError, ScalarSeries, TimeGrid, Trajectory, VectorField,
                  integrate_driven)


class InsufficientLookahead(ValueError):
    """The reference trajectory ends before the escape could be decided."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"not enough reference data after sample {index} to reach tau_max")


@dataclass(frozen=True)
class DenoiseConfig:
    k: int = 20
    eta: float = 1.0
    d: float = 2.0
    L0: float = 6.0
    dL: float = 1.0
    L_min: float = 1.0
    passes: int = 5
    lambda_max: float = 1.40
    tau_max: float | None = None  # None -> 12 / lambda_max
    resimulate_response: bool = True
    hold: str = "zero"
    restore_dc: bool = False

    def __post_init__(self):
        problems = []
        if self.k < 2:
            problems.append("k must be >= 2")
        if not self.L0 > 0:
            problems.append("L0 must be > 0")
        if not self.L_min > 0:
            problems.append("L_min must be > 0")
        if self.passes < 0:
            problems.append("passes must be >= 0")
        if not self.lambda_max > 0:
            problems.append("lambda_max must be > 0")
        if not self.eta >= 0:
            problems.append("eta must be >= 0")
        if self.tau_max is not None and not self.tau_max > 0:
            problems.append("tau_max must be > 0")
        if self.dL < 0:
            problems.append("dL must be >= 0")
        if self.hold not in HOLD_MODES:
            problems.append(f"hold must be one of {HOLD_MODES}")
        if problems:
            raise ValueError("invalid DenoiseConfig: " + "; ".join(problems))

    @property
    def escape_cap(self) -> float:
        return self.tau_max if self.tau_max is not None else 12.0 / self.lambda_max

    def L_schedule(self) -> list[float]:
        return [max(self.L0 - p * self.dL, self.L_min) for p in range(self.passes)]


@dataclass(frozen=True)
class EscapeMeasurement:
    tau: float
    reached: bool
    final_separation: float


@dataclass
class EscapeBatch:
    """Escape results for many start indices; ``truncated`` marks lookahead failures."""

    tau: np.ndarray
    reached: np.ndarray
    final_separation: np.ndarray
    truncated: np.ndarray


@dataclass
class PassDiagnostics:
    L: float
    n_large: int = 0
    n_small: int = 0
    n_reduced: int = 0
    n_unreached: int = 0
    n_no_lookahead: int = 0
    mean_tau: float = math.nan
    max_subtraction: float = 0.0
    reduced: np.ndarray | None = field(default=None, repr=False, compare=False)

    def summary(self) -> dict:
        """Scalar fields only."""
        return {k: v for k, v in dataclasses.asdict(self).items() if k != "reduced"}


@dataclass
class StageReport:
    snr_initial: float
    snr_after_dc: float
    snr_per_pass: list[float]
    lambda_used: float
    passes: list[PassDiagnostics] = field(default_factory=list)

    @property
    def snr_final(self) -> float:
        return self.snr_per_pass[-1] if self.snr_per_pass else self.snr_initial

    @property
    def gain(self) -> float:
        if self.snr_final == self.snr_initial:
            return 0.0
        return self.snr_final - self.snr_initial


def partition_sections(series: ScalarSeries | np.ndarray | int, k: int) -> list[range]:
    """Consecutive length-``k`` index ranges; a short remainder is its own section."""
    if k < 2:
        raise ValueError(f"section length k must be >= 2, got {k}")
    n = series if isinstance(series, int) else len(series)
    return [range(a, min(a + k, n)) for a in range(0, n, k)]


def classify_large(series: ScalarSeries | np.ndarray, ranges) -> np.ndarray:
    """True where a sample is at or above its section mean.

    Constant sections are all False.
    """
    values = series.values if isinstance(series, ScalarSeries) else np.asarray(series, float)
    mask = np.zeros(values.size, dtype=bool)
    for rg in ranges:
        w = values[rg.start:rg.stop]
        if w.size == 0 or np.all(w == w[0]):
            continue
        mask[rg.start:rg.stop] = w >= w.mean()
    return mask


def seed_auxiliary(received_sample: float, response_state) -> np.ndarray:
    state = np.array(response_state, dtype=float)
    state[..., 0] = received_sample
    return state


def _rk4(f, s, t, dt):
    h = 0.5 * dt
    k1 = f(t, s)
    k2 = f(t + h, s + h * k1)
    k3 = f(t + h, s + h * k2)
    k4 = f(t + dt, s + dt * k3)
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _distance(a, b):
    diff = a - b
    return np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2 + diff[..., 2] ** 2)


def measure_escape_times(aux_starts, reference: Trajectory, start_indices, L: float,
                         tau_max: float, field: VectorField | None = None) -> EscapeBatch:
    """Escape times for a batch of auxiliary starts, integrated side by side.

    Row ``j`` starts at ``reference`` sample ``start_indices[j]`` and is
    compared to the stored reference at every later grid point.  ``tau`` is
    the first grid time at which the separation is ``>= L``.  A row whose
    reference runs out before ``tau_max`` without escaping is ``truncated``.
    Rows never interact, so results do not depend on batch composition.
    """
    if field is None:
        field = auxiliary_field(DEFAULT_PARAMS)
    ref = reference.states
    n = len(ref)
    dt = reference.grid.dt
    idx = np.asarray(start_indices, dtype=int)
    Z = np.array(aux_starts, dtype=float).reshape(len(idx), 3)
    max_steps = int(math.floor(tau_max / dt + 1e-9))

    final_sep = _distance(Z, ref[idx])
    reached = final_sep >= L
    tau = np.where(reached, 0.0, np.nan)
    truncated = np.zeros(len(idx), dtype=bool)
    active = ~reached
    for m in range(1, max_steps + 1):
        act = np.nonzero(active)[0]
        if act.size == 0:
            break
        j = idx[act] + m
        short = j >= n
        if short.any():
            truncated[act[short]] = True
            active[act[short]] = False
            act, j = act[~short], j[~short]
            if act.size == 0:
                break
        Z[act] = _rk4(field, Z[act], (m - 1) * dt, dt)
        if not np.all(np.isfinite(Z[act])):
            raise IntegrationError(reference.grid.time(int(j[0])), m)
        sep = _distance(Z[act], ref[j])
        final_sep[act] = sep
        hit = sep >= L
        tau[act[hit]] = m * dt
        reached[act[hit]] = True
        active[act[hit]] = False
    return EscapeBatch(tau, reached, final_sep, truncated)


def measure_escape_time(aux_start, reference: Trajectory, start_index: int, L: float,
                        tau_max: float, field: VectorField | None = None) -> EscapeMeasurement:
    """Time for one auxiliary start to drift ``L`` away from the reference.

    Raises ``InsufficientLookahead`` when the reference ends before either
    the escape or ``tau_max``.
    """
    batch = measure_escape_times([aux_start], reference, [start_index], L, tau_max, field)
    if batch.truncated[0]:
        raise InsufficientLookahead(start_index)
    reached = bool(batch.reached[0])
    tau = float(batch.tau[0]) if reached else tau_max
    return EscapeMeasurement(tau, reached, float(batch.final_separation[0]))


def estimate_deviation(L, lambda_max, tau, eta):
    """``L * exp(-lambda_max * (tau + eta))``; broadcasts over arrays."""
    return L * np.exp(-lambda_max * (np.asarray(tau) + eta))


def signed_estimate(L, lambda_max, tau, eta, sign: int):
    return sign * estimate_deviation(L, lambda_max, tau, eta)


def denoise_pass(received: ScalarSeries, response: Trajectory, cfg: DenoiseConfig,
                 L_current: float, field: VectorField | None = None):
    """One reduction round over ``received``.

    Returns ``(cleaned, PassDiagnostics)``.  Small samples, unreached escapes
    and samples without enough lookahead pass through untouched.
    """
    if response.grid.n != received.grid.n:
        raise ValueError("response trajectory and received series differ in length")
    values = received.values
    mask = classify_large(values, partition_sections(len(values), cfg.k))
    idx = np.nonzero(mask)[0]
    diag = PassDiagnostics(L=L_current, n_large=int(idx.size),
                           n_small=int(values.size - idx.size))
    cleaned = values.copy()
    if idx.size == 0:
        diag.reduced = np.zeros(values.size, dtype=bool)
        return received.with_values(cleaned), diag

    starts = seed_auxiliary(values[idx], response.states[idx])
    batch = measure_escape_times(starts, response, idx, L_current, cfg.escape_cap, field)
    ok = batch.reached
    sign = sign_of(cfg.d)
    est = signed_estimate(L_current, cfg.lambda_max, batch.tau[ok], cfg.eta, sign)
    cleaned[idx[ok]] -= est
    diag.reduced = np.zeros(values.size, dtype=bool)
    diag.reduced[idx[ok]] = True

    diag.n_reduced = int(ok.sum())
    diag.n_no_lookahead = int(batch.truncated.sum())
    diag.n_unreached = int(idx.size - diag.n_reduced - diag.n_no_lookahead)
    if diag.n_reduced:
        diag.mean_tau = float(np.mean(batch.tau[ok]))
        diag.max_subtraction = float(np.max(np.abs(est)))
    return received.with_values(cleaned), diag


@dataclass
class DenoiseResult:
    cleaned: ScalarSeries
    report: StageReport
    # series entering each pass, then the final one (only with keep_history)
    history: list[ScalarSeries] = field(default_factory=list)


def synchronize(received: ScalarSeries, params: LorenzParams = DEFAULT_PARAMS,
                variant: CouplingVariant = CouplingVariant.STANDARD,
                state0=None, hold: str = "zero") -> np.ndarray:
    """Response state at the end of ``received`` after listening to all of it."""
    if state0 is None:
        state0 = (received.values[0], 0.0, 0.0)
    traj = integrate_driven(response_field(params, variant), state0, received, hold)
    return traj.states[-1].copy()


def denoise(signal_plus_noise: ScalarSeries, cfg: DenoiseConfig = DenoiseConfig(),
            response_params: LorenzParams = DEFAULT_PARAMS,
            variant: CouplingVariant = CouplingVariant.STANDARD,
            lead_in: ScalarSeries | None = None,
            clean: ScalarSeries | None = None,
            keep_history: bool = False) -> DenoiseResult:
    """Full multi-pass procedure.

    The received series is shifted by ``cfg.d`` so every deviation has the
    sign of ``d``; the response is driven by the shifted series and
    ``cfg.passes`` rounds of ``denoise_pass`` follow, with
    ``L = max(L0 - p*dL, L_min)``.  The estimates remove the shifted
    deviation, DC included, so the offset is not subtracted again unless
    ``cfg.restore_dc`` is set.

    ``lead_in`` holds received samples immediately before the window; the
    response listens to them (also shifted) to synchronize before sample 0.
    ``clean`` is ground truth used only to fill the SNR fields of the report.
    With ``keep_history`` the result also holds the series entering each
    pass followed by the final pass output.
    """
    def snr_of(series):
        if clean is None:
            return math.nan
        return snr_db(clean, add_series(series, clean.with_values(-clean.values)))

    shifted = add_dc(signal_plus_noise, cfg.d)
    report = StageReport(snr_initial=snr_of(signal_plus_noise), snr_after_dc=snr_of(shifted),
                         snr_per_pass=[], lambda_used=cfg.lambda_max)
    if cfg.passes == 0:
        return DenoiseResult(signal_plus_noise, report)

    rfield = response_field(response_params, variant)
    afield = auxiliary_field(response_params)
    grid = signal_plus_noise.grid
    if lead_in is not None:
        pre = add_dc(lead_in, cfg.d)
        joined = ScalarSeries(TimeGrid(pre.grid.t0, grid.dt, pre.grid.n + 1),
                              np.append(pre.values, shifted.values[0]))
        y0 = synchronize(joined, response_params, variant, hold=cfg.hold)
    else:
        y0 = np.array([shifted.values[0], 0.0, 0.0])

    current = shifted
    history = [current] if keep_history else []
    response = integrate_driven(rfield, y0, current, cfg.hold)
    for p, L in enumerate(cfg.L_schedule()):
        if p > 0 and cfg.resimulate_response:
            response = integrate_driven(rfield, y0, current, cfg.hold)
        current, diag = denoise_pass(current, response, cfg, L, afield)
        report.passes.append(diag)
        if keep_history:
            history.append(current)
        out = add_dc(current, -cfg.d) if cfg.restore_dc else current
        report.snr_per_pass.append(snr_of(out))
    if cfg.restore_dc:
        current = add_dc(current, -cfg.d)
    return DenoiseResult(current, report, history)
