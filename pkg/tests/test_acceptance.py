"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from syncdenoise.config import reproduction_config
from syncdenoise.denoiser import (classify_large, estimate_deviation, measure_escape_times,
                                  partition_sections)
from syncdenoise.harness import run_experiment, sweep_noise_levels
from syncdenoise.interference import sign_of, snr_db
from syncdenoise.lyapunov import lyapunov_benettin, lyapunov_wolf
from syncdenoise.models import auxiliary_field, drive_field, response_field
from syncdenoise.ode import ScalarSeries, TimeGrid, Trajectory, integrate, rk4_step

DT = 1e-3


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE_LINES[n] = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {detail}"
    assert ok, detail


@pytest.fixture(scope="module")
def benettin():
    start = time.perf_counter()
    est = lyapunov_benettin(drive_field(), [1.0, 1.0, 1.0], dt=DT, t_total=200.0)
    return est, time.perf_counter() - start


def test_1_lyapunov_oracle(benettin):
    est, elapsed = benettin
    ok = 1.25 <= est.lambda_max <= 1.55 and elapsed < 10.0
    record(1, ok, f"Benettin lambda = {est.lambda_max:.4f} (need [1.25, 1.55]), "
                  f"runtime {elapsed:.2f} s (need < 10 s)")


def test_2_wolf_cross_validation(benettin):
    warm = 10_000
    n = 100_000
    x1 = integrate(drive_field(), [1.0, 1.0, 1.0], TimeGrid(0.0, DT, warm + n)).states[warm:, 0]
    wolf = lyapunov_wolf(ScalarSeries(TimeGrid(0.0, DT, n), x1)).lambda_max
    ref = benettin[0].lambda_max
    rel = abs(wolf - ref) / ref
    t = np.arange(n) * DT
    sine = lyapunov_wolf(ScalarSeries(TimeGrid(0.0, DT, n), np.sin(2 * np.pi * t))).lambda_max
    ok = rel <= 0.25 and sine <= 0.05
    record(2, ok, f"Wolf lambda = {wolf:.4f}, {100 * rel:.1f}% from Benettin (need <= 25%); "
                  f"sine lambda = {sine:.4f} (need <= 0.05)")


def _coupled_field():
    f, g = drive_field(), response_field()

    def field(t, s):
        x, y = s[..., :3], s[..., 3:]
        return np.concatenate([f(t, x), g(t, y, x[..., 0])], axis=-1)
    return field


def test_3_synchronization_premise(attractor):
    # drive and response integrated together: the response sees the exact x1(t)
    field = _coupled_field()
    steps = int(round(5.0 / DT))
    mismatches = [(1.0, 1.0, 1.0), (-5.0, 5.0, -5.0), (0.0, 10.0, 10.0)]
    worst_final, worst_first = 0.0, 0.0
    for m in mismatches:
        x0 = attractor.states[0]
        s = np.concatenate([x0, x0 + m])
        first = math.inf
        for i in range(1, steps + 1):
            s = rk4_step(field, s, (i - 1) * DT, DT)
            err = float(np.linalg.norm(s[3:] - s[:3]))
            if err < 1e-6 and first == math.inf:
                first = i * DT
        worst_final = max(worst_final, err)
        worst_first = max(worst_first, first)
    ok = worst_final < 1e-6
    record(3, ok, f"worst |y - x| at t = 5 is {worst_final:.3g} (need < 1e-6); "
                  f"first below 1e-6 at t = {worst_first:.3g}")


def test_4_uniform_noise_gain(uniform_run):
    rep = uniform_run.report
    ok = rep.gain >= 4.0 and abs(rep.snr_initial - 19.7) < 0.05
    record(4, ok, f"uniform noise {rep.snr_initial:.2f} -> {rep.snr_final:.2f} dB, "
                  f"gain {rep.gain:+.2f} dB (need >= +4, reported +6.4)")


def test_5_sine_interference_gain(sine_run):
    rep = sine_run.report
    ok = rep.gain >= 5.0 and abs(rep.snr_initial - 18.0) < 0.05
    record(5, ok, f"sine interference {rep.snr_initial:.2f} -> {rep.snr_final:.2f} dB, "
                  f"gain {rep.gain:+.2f} dB (need >= +5, reported +9.3)")


def test_6_stage_ordering():
    levels = [1.0, 2.0, 4.0, 8.0]
    rows = sweep_noise_levels(levels, reproduction_config("uniform"))
    good = [r["stage2"] < r["stage1"] < r["stage3"] for r in rows]
    table = ", ".join(f"A={r['level']:g}: {r['stage1']:.1f}/{r['stage2']:.1f}/{r['stage3']:.1f}"
                      for r in rows)
    ok = all(good) and len(rows) >= 3
    record(6, ok, f"stage1/stage2/stage3 dB {table} (need stage2 < stage1 < stage3)")


def test_7_deviation_round_trip(attractor):
    ref = Trajectory(attractor.grid, attractor.states)
    L, lam = 6.0, 1.40
    idx = np.random.default_rng(3).choice(np.arange(40_000), 100, replace=False)
    parts, ok = [], True
    for delta in (0.01, 0.1, 0.5):
        starts = ref.states[idx] + [delta, 0.0, 0.0]
        batch = measure_escape_times(starts, ref, idx, L, 12.0 / lam)
        est = estimate_deviation(L, lam, np.where(batch.reached, batch.tau, np.inf), 0.0)
        ratio = float(np.median(est / delta))
        good = 1.0 / 3.0 <= ratio <= 3.0
        ok &= good
        # brute-force per-point rates: independent auxiliary run, scanned for the crossing
        rates = []
        for j in range(10):
            i = int(idx[j])
            aux = integrate(auxiliary_field(), starts[j], TimeGrid(0.0, DT, 8000)).states
            sep = np.linalg.norm(aux - ref.states[i:i + 8000], axis=1)
            hit = int(np.argmax(sep >= L))
            assert sep[hit] >= L and hit * DT == pytest.approx(batch.tau[j], abs=1e-9)
            rates.append(math.log(L / delta) / (hit * DT))
        parts.append(f"delta={delta}: median est/delta {ratio:.2f}, "
                     f"local rates {min(rates):.2f}..{max(rates):.2f}")
    record(7, ok, "; ".join(parts) + " (need median within factor 3)")


def test_8_formula_units():
    grid = TimeGrid(0.0, DT, 1000)
    sig = ScalarSeries(grid, np.sin(np.arange(1000) * 0.1) + 2.0)
    checks = {
        "estimate(tau+eta=0) == L": estimate_deviation(6.0, 1.4, 0.0, 0.0) == 6.0,
        "snr equal power == 0 dB": abs(snr_db(sig, sig)) < 1e-12,
        "snr power ratio 10 == 10 dB":
            abs(snr_db(sig, sig.with_values(sig.values / math.sqrt(10.0))) - 10.0) < 1e-12,
        "5000/20 -> 250 sections": len(partition_sections(5000, 20)) == 250,
        "sign_of(0) == +1": sign_of(0.0) == 1,
    }
    failed = [k for k, v in checks.items() if not v]
    record(8, not failed, "all formula checks hold" if not failed else f"failed: {failed}")


def _oscillator_error(dt):
    # harmonic oscillator in the first two coordinates over one full period
    def field(t, s):
        out = np.zeros(np.shape(s))
        out[..., 0], out[..., 1] = s[..., 1], -s[..., 0]
        return out
    n = int(round(2 * math.pi / dt))
    tr = integrate(field, [1.0, 0.0, 0.0], TimeGrid(0.0, 2 * math.pi / n, n + 1))
    return float(np.linalg.norm(tr.states[-1] - [1.0, 0.0, 0.0]))


def test_9_numerics(uniform_run):
    dts = np.array([0.08, 0.04, 0.02, 0.01])
    errs = np.array([_oscillator_error(h) for h in dts])
    order = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    again = run_experiment(reproduction_config("uniform"), write=False)
    same = (np.array_equal(again.cleaned.values, uniform_run.cleaned.values)
            and np.array_equal(again.received.values, uniform_run.received.values)
            and again.report.snr_per_pass == uniform_run.report.snr_per_pass)
    ok = abs(order - 4.0) <= 0.2 and same
    record(9, ok, f"RK4 order {order:.3f} (need 4.0 +/- 0.2); "
                  f"pipeline rerun bit-identical: {same}")


def test_10_skip_safety(uniform_run, sine_run):
    # a short escape cap leaves some large samples unreached
    capped = run_experiment(reproduction_config("uniform", tau_max=0.15, passes=2),
                            write=False, keep_history=True)
    bad, untouched, unreached = 0, 0, 0
    for run in (uniform_run, sine_run, capped):
        k = run.config.k
        hist = run.history
        for before, after, diag in zip(hist, hist[1:], run.report.passes):
            large = classify_large(before.values, partition_sections(len(before), k))
            keep = ~diag.reduced
            # small and unreached samples are exactly the large ones not reduced
            assert diag.n_large == int(large.sum())
            assert diag.n_reduced + diag.n_unreached + diag.n_no_lookahead == diag.n_large
            bad += int(np.count_nonzero(diag.reduced & ~large))
            bad += int(np.count_nonzero(before.values[keep] != after.values[keep]))
            untouched += int(keep.sum())
            unreached += diag.n_unreached
    ok = bad == 0 and unreached > 0
    record(10, ok, f"{untouched} skipped samples over 12 passes ({unreached} unreached), "
                   f"{bad} altered (need 0)")
