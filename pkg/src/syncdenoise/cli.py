"""Command line entry point: ``syncdenoise {simulate,denoise,lyapunov,sweep}``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import config as config_io
from .config import ConfigError, ExperimentConfig
from .harness import emit_phase_portrait, fmt, run_experiment, simulate_drive, sweep_noise_levels
from .lyapunov import lyapunov_benettin, lyapunov_wolf
from .models import drive_field
from .ode import IntegrationError, ScalarSeries, TimeGrid, integrate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="key = value experiment file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--passes", type=int)
    p.add_argument("--noise-kind", choices=["uniform", "sine", "none"])
    p.add_argument("--noise-amplitude", type=float,
                   help="fixed amplitude; disables noise_target_snr_db")
    p.add_argument("--emit-series", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="syncdenoise", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    _common(sub.add_parser("simulate", help="integrate the drive system only"))
    _common(sub.add_parser("denoise", help="full noise-reduction pipeline"))

    p = sub.add_parser("lyapunov", help="largest Lyapunov exponent estimates")
    _common(p)
    p.add_argument("--method", choices=["benettin", "wolf", "both"], default="both")
    p.add_argument("--t-total", type=float, default=200.0, help="Benettin run length")
    p.add_argument("--samples", type=int, default=100_000, help="Wolf series length")

    p = sub.add_parser("sweep", help="stage SNRs over uniform noise levels")
    _common(p)
    p.add_argument("--levels", default="1,2,4,8", help="comma-separated amplitudes")
    p.add_argument("--workers", type=int, default=1)
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = config_io.load(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out_dir is not None:
        overrides["out_dir"] = args.out_dir
    if args.passes is not None:
        overrides["passes"] = args.passes
    if args.noise_kind is not None:
        overrides["noise_kind"] = args.noise_kind
    if args.noise_amplitude is not None:
        overrides["noise_amplitude"] = args.noise_amplitude
        overrides["noise_target_snr_db"] = None
    if args.emit_series:
        overrides["emit_series"] = True
    return dataclasses.replace(cfg, **overrides).validate()


def cmd_simulate(cfg: ExperimentConfig, args) -> None:
    _, drive = simulate_drive(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_phase_portrait(drive, out / "drive.csv")
    print(f"wrote {out / 'drive.csv'} ({drive.grid.n} samples)")


def cmd_denoise(cfg: ExperimentConfig, args) -> None:
    rep = run_experiment(cfg).report
    print(f"stage 1 (received)   SNR = {rep.snr_initial:8.3f} dB")
    print(f"stage 2 (DC added)   SNR = {rep.snr_after_dc:8.3f} dB")
    for p, snr in enumerate(rep.snr_per_pass, start=1):
        print(f"stage 3 pass {p}       SNR = {snr:8.3f} dB")
    print(f"gain                      {rep.gain:+8.3f} dB  (outputs in {cfg.out_dir})")


def cmd_lyapunov(cfg: ExperimentConfig, args) -> None:
    field = drive_field(cfg.params, cfg.coupling)
    if args.method in ("benettin", "both"):
        est = lyapunov_benettin(field, cfg.initial_state, dt=cfg.dt, t_total=args.t_total)
        print(f"benettin lambda_max = {fmt(est.lambda_max)} +/- {est.ci_halfwidth:.3g}")
    if args.method in ("wolf", "both"):
        grid = TimeGrid(0.0, cfg.dt, cfg.warmup + args.samples)
        x1 = integrate(field, cfg.initial_state, grid).states[cfg.warmup:, 0]
        est = lyapunov_wolf(ScalarSeries(TimeGrid(0.0, cfg.dt, args.samples), x1))
        print(f"wolf     lambda_max = {fmt(est.lambda_max)} +/- {est.ci_halfwidth:.3g}"
              f" ({est.n_segments} segments, delay {est.diagnostics['delay']})")


def cmd_sweep(cfg: ExperimentConfig, args) -> None:
    try:
        levels = [float(v) for v in args.levels.split(",")]
    except ValueError:
        raise ConfigError(f"bad --levels value {args.levels!r}") from None
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = sweep_noise_levels(levels, cfg, workers=args.workers, path=out / "sweep.csv")
    print("level       d       L   stage1   stage2   stage3")
    for r in rows:
        print(f"{r['level']:5.2f} {r['d']:7.2f} {r['L']:7.2f} "
              f"{r['stage1']:8.2f} {r['stage2']:8.2f} {r['stage3']:8.2f}")


COMMANDS = {"simulate": cmd_simulate, "denoise": cmd_denoise,
            "lyapunov": cmd_lyapunov, "sweep": cmd_sweep}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        cfg = resolve_config(args)
        COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, FloatingPointError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
