import math

import numpy as np
import pytest

from syncdenoise.models import drive_field, response_field
from syncdenoise.ode import (IntegrationError, ScalarSeries, TimeGrid, hold_values,
                             integrate, integrate_driven, rk4_step)


def oscillator(t, s):
    out = np.empty(np.shape(s))
    out[..., 0] = s[..., 1]
    out[..., 1] = -s[..., 0]
    out[..., 2] = 0.0
    return out


def oscillator_error(dt):
    n = int(round(2 * math.pi / dt))
    dt = 2 * math.pi / n
    traj = integrate(oscillator, [1.0, 0.0, 0.0], TimeGrid(0.0, dt, n + 1))
    return np.max(np.abs(traj.states[-1] - [1.0, 0.0, 0.0]))


def test_zero_field_fixes_point():
    s = rk4_step(lambda t, s: np.zeros(3), np.array([1.0, 2.0, 3.0]), 0.0, 0.1)
    assert np.array_equal(s, [1.0, 2.0, 3.0])


def test_oscillator_full_period():
    assert oscillator_error(1e-3) < 1e-9


def test_rk4_order_four():
    steps = [0.08, 0.04, 0.02, 0.01]
    errs = [oscillator_error(h) for h in steps]
    slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
    assert slope == pytest.approx(4.0, abs=0.2)
    # halving dt shrinks the error ~16x
    assert 12 < errs[0] / errs[1] < 20


def test_rk4_step_rejects_bad_dt():
    with pytest.raises(ValueError):
        rk4_step(oscillator, np.zeros(3), 0.0, 0.0)


def test_integrate_single_sample():
    traj = integrate(oscillator, [1.0, 2.0, 3.0], TimeGrid(0.0, 0.1, 1))
    assert traj.states.shape == (1, 3)
    assert np.array_equal(traj.states[0], [1.0, 2.0, 3.0])


def test_exponential_growth_closed_form():
    traj = integrate(lambda t, s: s.copy(), [1.0, 1.0, 1.0], TimeGrid(0.0, 1e-3, 1001))
    assert np.allclose(traj.states[-1], math.e, atol=1e-6)


def test_lorenz_stays_bounded():
    traj = integrate(drive_field(), [1.0, 1.0, 1.0], TimeGrid(0.0, 1e-3, 5001))
    assert np.all(np.isfinite(traj.states))
    assert np.max(np.linalg.norm(traj.states, axis=1)) < 200


def test_integrate_is_deterministic():
    grid = TimeGrid(0.0, 1e-3, 2000)
    a = integrate(drive_field(), [1.0, 2.0, 3.0], grid)
    b = integrate(drive_field(), [1.0, 2.0, 3.0], grid)
    assert np.array_equal(a.states, b.states)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_blowup_is_located():
    grid = TimeGrid(0.0, 0.1, 200)
    with pytest.raises(IntegrationError) as info:
        integrate(lambda t, s: s ** 3, [10.0, 0.0, 0.0], grid)
    assert info.value.step is not None
    assert "t=" in str(info.value)


def test_driven_single_sample():
    drive = ScalarSeries(TimeGrid(0.0, 1e-3, 1), [3.0])
    traj = integrate_driven(response_field(), [1.0, 2.0, 3.0], drive)
    assert np.array_equal(traj.states, [[1.0, 2.0, 3.0]])


def test_driven_length_matches_drive():
    drive = ScalarSeries(TimeGrid(0.0, 1e-3, 123), np.linspace(-1, 1, 123))
    traj = integrate_driven(response_field(), [0.0, 0.0, 0.0], drive)
    assert len(traj) == 123


def test_zero_order_hold_uses_sample_i():
    seen = []

    def field(t, s, u):
        seen.append(u)
        return np.zeros(3)

    drive = ScalarSeries(TimeGrid(0.0, 0.1, 4), [1.0, 2.0, 3.0, 4.0])
    integrate_driven(field, np.zeros(3), drive)
    assert seen == [1.0] * 4 + [2.0] * 4 + [3.0] * 4


def test_hold_modes_agree_on_linear_drive():
    v = np.linspace(0.0, 1.0, 11)
    _, lin_mid, _ = hold_values(v, "linear")
    _, cub_mid, _ = hold_values(v, "cubic")
    assert np.allclose(lin_mid, cub_mid)
    with pytest.raises(ValueError):
        hold_values(v, "spline")


def test_zero_drive_decays_to_fixed_point():
    # with s = 0 the (y2, y3) subsystem is linear and stable, y1 follows y2
    drive = ScalarSeries(TimeGrid(0.0, 1e-3, 20001), np.zeros(20001))
    traj = integrate_driven(response_field(), [5.0, 5.0, 5.0], drive)
    assert np.linalg.norm(traj.states[-1]) < 1e-6
    norms = np.linalg.norm(traj.states[::2000], axis=1)
    assert np.all(np.diff(norms) < 0)


def test_driven_by_own_output_tracks_drive(attractor):
    # response started on the drive state, fed the drive's own x1:
    # the only error is the sample-and-hold, which the cubic hold makes tiny
    n = 5000
    grid = TimeGrid(0.0, 1e-3, n)
    x = attractor.states[:n]
    drive = ScalarSeries(grid, x[:, 0])
    errs = {}
    for hold in ("zero", "linear", "cubic"):
        traj = integrate_driven(response_field(), x[0], drive, hold)
        errs[hold] = np.max(np.linalg.norm(traj.states - x, axis=1))
    assert errs["cubic"] < errs["linear"] < errs["zero"]
    assert errs["cubic"] < 1e-3
