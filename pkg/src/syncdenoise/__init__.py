"""Lyapunov-exponent-based interference removal for synchronized chaotic systems."""
from .config import ExperimentConfig, reproduction_config
from .denoiser import DenoiseConfig, StageReport, denoise
from .harness import run_experiment, sweep_noise_levels
from .interference import NoiseKind, NoiseSpec, generate_noise, snr_db
from .lyapunov import lyapunov_benettin, lyapunov_wolf
from .models import CouplingVariant, LorenzParams
from .ode import ScalarSeries, TimeGrid, Trajectory

__version__ = "0.1.0"
