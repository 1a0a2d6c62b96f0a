"""Experiment orchestration: drive simulation, interference, denoising, reports."""
from __future__ import annotations

import csv
import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, save
from .denoiser import DenoiseResult, StageReport, denoise
from .interference import NoiseKind, generate_noise
from .lyapunov import lyapunov_wolf
from .models import drive_field
from .ode import ScalarSeries, TimeGrid, Trajectory, integrate

log = logging.getLogger(__name__)


def fmt(value) -> str:
    """17 significant digits, so floats survive a CSV round trip."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(value)
    return "%.17g" % value


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    drive: Trajectory  # clean drive over the analysis window
    noise: ScalarSeries
    received: ScalarSeries
    cleaned: ScalarSeries
    report: StageReport
    history: list[ScalarSeries] = dataclasses.field(default_factory=list)

    @property
    def clean(self) -> ScalarSeries:
        return self.drive.component(0)


def simulate_drive(cfg: ExperimentConfig) -> tuple[Trajectory, Trajectory]:
    """Drive trajectory after the warm-up, split into (lead-in, window)."""
    pre = cfg.warmup + cfg.lead_in
    grid = TimeGrid(cfg.t0 - pre * cfg.dt, cfg.dt, pre + cfg.n)
    traj = integrate(drive_field(cfg.params, cfg.coupling), cfg.initial_state, grid)
    lead_grid = TimeGrid(cfg.t0 - cfg.lead_in * cfg.dt, cfg.dt, max(cfg.lead_in, 1))
    lead_states = traj.states[cfg.warmup:pre] if cfg.lead_in else traj.states[pre - 1:pre]
    return (Trajectory(lead_grid, lead_states.copy()),
            Trajectory(cfg.grid, traj.states[pre:].copy()))


def make_noise(cfg: ExperimentConfig, clean: ScalarSeries) -> tuple[np.ndarray, float]:
    """Interference over lead-in + window, and the amplitude used.

    With ``noise_target_snr_db`` set, the amplitude is chosen so the window
    part alone hits that SNR exactly.
    """
    grid = TimeGrid(cfg.t0 - cfg.lead_in * cfg.dt, cfg.dt, cfg.lead_in + cfg.n)
    amplitude = cfg.noise_amplitude
    kind = NoiseKind(cfg.noise_kind)
    if cfg.noise_target_snr_db is not None and kind is not NoiseKind.NONE:
        unit = generate_noise(cfg.noise_spec(1.0), grid).values[cfg.lead_in:]
        ps = float(np.sum(clean.values ** 2))
        pu = float(np.sum(unit ** 2))
        amplitude = math.sqrt(ps / (pu * 10.0 ** (cfg.noise_target_snr_db / 10.0)))
    return generate_noise(cfg.noise_spec(amplitude), grid).values, amplitude


def run_experiment(cfg: ExperimentConfig, write: bool = True,
                   keep_history: bool = False) -> ExperimentResult:
    cfg.validate()
    lead_drive, drive = simulate_drive(cfg)
    clean = drive.component(0)
    full_noise, amplitude = make_noise(cfg, clean)
    noise = ScalarSeries(cfg.grid, full_noise[cfg.lead_in:])
    received = ScalarSeries(cfg.grid, clean.values + noise.values)
    lead_in = None
    if cfg.lead_in:
        lead_in = ScalarSeries(lead_drive.grid,
                               lead_drive.states[:, 0] + full_noise[:cfg.lead_in])

    lam = cfg.lambda_max
    if cfg.lambda_mode == "wolf":
        series = received if lead_in is None else ScalarSeries(
            TimeGrid(lead_in.grid.t0, cfg.dt, cfg.lead_in + cfg.n),
            np.concatenate([lead_in.values, received.values]))
        lam = lyapunov_wolf(series).lambda_max
        log.info("estimated lambda_max = %.4f from the received series", lam)

    result: DenoiseResult = denoise(received, cfg.denoise_config(lam), cfg.params,
                                    cfg.coupling, lead_in=lead_in, clean=clean,
                                    keep_history=keep_history)
    out = ExperimentResult(dataclasses.replace(cfg, noise_amplitude=amplitude),
                           drive, noise, received, result.cleaned, result.report,
                           result.history)
    if write:
        write_outputs(out, Path(cfg.out_dir))
    return out


def write_report(report: StageReport, path) -> None:
    """Stage SNRs, one row per stage; the last row is the gain."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["stage", "label", "L", "snr_db"])
        w.writerow([1, "received", "", fmt(report.snr_initial)])
        w.writerow([2, "dc_added", "", fmt(report.snr_after_dc)])
        for p, (snr, diag) in enumerate(zip(report.snr_per_pass, report.passes), start=1):
            w.writerow([3, f"pass{p}", fmt(diag.L), fmt(snr)])
        w.writerow(["gain", "final_minus_received", "", fmt(report.gain)])


def read_report(path) -> dict:
    rows = list(csv.DictReader(open(path, newline="")))
    return {
        "snr_initial": float(rows[0]["snr_db"]),
        "snr_after_dc": float(rows[1]["snr_db"]),
        "snr_per_pass": [float(r["snr_db"]) for r in rows[2:-1]],
        "gain": float(rows[-1]["snr_db"]),
    }


def write_pass_diagnostics(report: StageReport, path) -> None:
    names = list(report.passes[0].summary()) if report.passes else ["L"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pass"] + names + ["lambda_used"])
        for p, diag in enumerate(report.passes, start=1):
            w.writerow([p] + [fmt(getattr(diag, n)) for n in names] + [fmt(report.lambda_used)])


def emit_phase_portrait(trajectory: Trajectory, path, first: ScalarSeries | None = None) -> None:
    """Write ``t, x1, x2, x3`` rows; ``first`` replaces the x1 column when given."""
    states = trajectory.states
    col = states[:, 0] if first is None else first.values
    if len(col) != len(states):
        raise ValueError("replacement column length differs from the trajectory")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x1", "x2", "x3"])
        for t, a, row in zip(trajectory.grid.times, col, states):
            w.writerow([fmt(t), fmt(a), fmt(row[1]), fmt(row[2])])


def write_series(path, grid: TimeGrid, **columns) -> None:
    names = list(columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + names)
        data = [columns[c].values for c in names]
        for i, t in enumerate(grid.times):
            w.writerow([fmt(t)] + [fmt(col[i]) for col in data])


def write_outputs(res: ExperimentResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    save(res.config, out_dir / "config.txt")
    write_report(res.report, out_dir / "report.csv")
    write_pass_diagnostics(res.report, out_dir / "passes.csv")
    if res.config.emit_series:
        write_series(out_dir / "series.csv", res.config.grid, clean=res.clean,
                     noise=res.noise, received=res.received, cleaned=res.cleaned)
        emit_phase_portrait(res.drive, out_dir / "portrait_clean.csv")
        emit_phase_portrait(res.drive, out_dir / "portrait_before.csv", res.received)
        emit_phase_portrait(res.drive, out_dir / "portrait_after.csv", res.cleaned)


SWEEP_COLUMNS = ["level", "d", "L", "stage1", "stage2", "stage3"]


def level_config(cfg: ExperimentConfig, level: float, d: float | None = None,
                 L: float | None = None) -> ExperimentConfig:
    """Uniform noise of amplitude ``level``; default ``d = level`` and ``L = 3 d``."""
    d = level if d is None else d
    L = 3.0 * d if L is None else L
    return dataclasses.replace(cfg, noise_kind="uniform", noise_amplitude=level,
                               noise_target_snr_db=None, d=d, L0=L, emit_series=False)


def _sweep_row(cfg: ExperimentConfig) -> dict:
    rep = run_experiment(cfg, write=False).report
    return {"level": cfg.noise_amplitude, "d": cfg.d, "L": cfg.L0,
            "stage1": rep.snr_initial, "stage2": rep.snr_after_dc, "stage3": rep.snr_final}


def sweep_noise_levels(levels, cfg: ExperimentConfig, d_values=None, L_values=None,
                       workers: int = 1, path=None) -> list[dict]:
    """One stage-SNR row per uniform noise level; optionally written as CSV."""
    levels = list(levels)
    d_values = list(d_values) if d_values is not None else [None] * len(levels)
    L_values = list(L_values) if L_values is not None else [None] * len(levels)
    if not (len(d_values) == len(L_values) == len(levels)):
        raise ValueError("d_values and L_values must match levels in length")
    configs = [level_config(cfg, lv, d, L) for lv, d, L in zip(levels, d_values, L_values)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, configs))
    else:
        rows = [_sweep_row(c) for c in configs]
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SWEEP_COLUMNS)
            for row in rows:
                w.writerow([fmt(row[c]) for c in SWEEP_COLUMNS])
    return rows
