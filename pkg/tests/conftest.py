import hypothesis
import numpy as np
import pytest

from syncdenoise.models import drive_field
from syncdenoise.ode import TimeGrid, integrate

hypothesis.settings.register_profile("default", max_examples=50, deadline=None)
hypothesis.settings.load_profile("default")

ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def attractor():
    """Default-preset drive trajectory after a 10 s warm-up, 60 s long."""
    grid = TimeGrid(0.0, 1e-3, 70_000)
    traj = integrate(drive_field(), [1.0, 1.0, 1.0], grid)
    return type(traj)(TimeGrid(0.0, 1e-3, 60_000), traj.states[10_000:].copy())


@pytest.fixture(scope="session")
def uniform_run():
    from syncdenoise.config import reproduction_config
    from syncdenoise.harness import run_experiment
    return run_experiment(reproduction_config("uniform"), write=False, keep_history=True)


@pytest.fixture(scope="session")
def sine_run():
    from syncdenoise.config import reproduction_config
    from syncdenoise.harness import run_experiment
    return run_experiment(reproduction_config("sine"), write=False, keep_history=True)
