"""Flicker-coded temporal super-resolution: simulation, reconstruction and analysis."""

from . import analysis, scanning, sensor, signals, solver
from .analysis import (
    APPENDIX_PATTERNS,
    CHOSEN_PATTERNS,
    SIMULATION_PATTERNS,
    EnsembleSpec,
    ErrorProfile,
    alpha_sweep,
    band_winner_table,
    cosine_error,
    enumerate_patterns,
    evaluate_baseline,
    evaluate_pattern,
    l2_error,
)
from .scanning import StitchedSpectrum, TemporalWindow, anti_alias, plan_windows, run_scan, stitch
from .sensor import (
    CameraConfig,
    ChannelFrame,
    FlickerPattern,
    IlluminationModel,
    NoiseModel,
    capture_frame,
    estimate_gammas,
    simulate_sequence,
    snr_ratio_bound,
    substep_averages,
)
from .signals import FineSignal, SpectrumView, gen_sinusoid_mix, gen_square_wave, spectrum
from .solver import (
    ReconstructedTrace,
    SpatialPatch,
    build_m_spatial,
    build_m_temporal,
    reconstruct,
    reconstruct_sequence,
    reconstruct_spatial,
)

__version__ = "0.1.0"
