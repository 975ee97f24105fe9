"""
Camera simulator for flicker-coded capture.

A frame of duration T is split into N equal sub-steps. The scene intensity
averaged over sub-step n is ``i_n``; channel m collects

    C^m = gamma^m * (T/N) * sum_n s[n, m] * i_n * (i_flicker + i_env)

under the default ``"gated"`` environment model, where ambient light scales
every channel by the same ``1 + 1/alpha`` factor. The ``"continuous"`` model
instead lets ambient light reach the sensor during every sub-step:

    C^m += gamma^m * (T/N) * sum_n i_n * i_env

Noise is the Gaussian approximation of shot + dark + read noise with variance
``clean + D*T + N_r**2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .signals import FineSignal

__all__ = [
    "CameraConfig",
    "FlickerPattern",
    "IlluminationModel",
    "NoiseModel",
    "ChannelFrame",
    "channel_scale",
    "fine_grid_rate",
    "substep_averages",
    "capture_frame",
    "capture_unflickered",
    "simulate_sequence",
    "simulate_channels",
    "estimate_gammas",
    "snr_ratio_bound",
]

ENV_MODELS = ("gated", "continuous")


@dataclass(frozen=True)
class CameraConfig:
    fps: float
    n_factor: int
    exposure_fill: float = 1.0

    def __post_init__(self):
        if not self.fps > 0:
            raise ValueError(f"fps must be > 0, got {self.fps}")
        if int(self.n_factor) != self.n_factor or self.n_factor < 1:
            raise ValueError(f"n_factor must be a positive integer, got {self.n_factor}")
        if not 0 < self.exposure_fill <= 1:
            raise ValueError(f"exposure_fill must be in (0, 1], got {self.exposure_fill}")
        object.__setattr__(self, "n_factor", int(self.n_factor))

    @property
    def frame_period(self) -> float:
        return 1.0 / self.fps

    @property
    def exposure(self) -> float:
        return self.exposure_fill / self.fps

    @property
    def trace_rate(self) -> float:
        """Sample rate of a reconstructed trace (fps * N)."""
        return self.fps * self.n_factor


@dataclass(frozen=True)
class FlickerPattern:
    """Binary code matrix: ``s_matrix[n, m] = 1`` when channel m flickers in sub-step n."""

    s_matrix: np.ndarray
    channel_names: tuple = ()
    pattern_id: str = ""

    def __post_init__(self):
        s = np.asarray(self.s_matrix)
        if s.ndim != 2:
            raise ValueError("s_matrix must be 2-D (N rows x M channels)")
        if not np.isin(s, (0, 1)).all():
            raise ValueError("s_matrix entries must be 0 or 1")
        s = s.astype(float)
        s.setflags(write=False)
        object.__setattr__(self, "s_matrix", s)
        names = tuple(self.channel_names) or tuple(f"C{m + 1}" for m in range(s.shape[1]))
        if len(names) != s.shape[1]:
            raise ValueError("one channel name per column required")
        object.__setattr__(self, "channel_names", names)

    @classmethod
    def from_channels(cls, channels: Sequence[Sequence[int]], names=("b", "g", "r"), pattern_id=""):
        """Build from per-channel on/off vectors, e.g. ``b=(1,0,0), g=(0,1,0), r=(0,0,1)``."""
        s = np.array(channels).T
        return cls(s, tuple(names)[: s.shape[1]], pattern_id)

    @property
    def n(self) -> int:
        return self.s_matrix.shape[0]

    @property
    def m(self) -> int:
        return self.s_matrix.shape[1]

    @property
    def full_rank(self) -> bool:
        return np.linalg.matrix_rank(self.s_matrix) == self.m

    @property
    def has_dark_substep(self) -> bool:
        return bool((self.s_matrix.sum(axis=1) == 0).any())

    def validate(self):
        """Raise if the pattern cannot be used for reconstruction."""
        if not self.full_rank:
            raise ValueError(f"pattern {self.pattern_id or ''} not full rank".replace("  ", " "))
        if self.has_dark_substep:
            raise ValueError("pattern has a sub-step with no flicker")
        return self


@dataclass(frozen=True)
class IlluminationModel:
    flicker_intensity: float = 1.0
    env_intensity: float = 0.0
    gammas: tuple = (1.0, 1.0, 1.0)
    env_model: str = "gated"

    def __post_init__(self):
        if not self.flicker_intensity > 0:
            raise ValueError("flicker_intensity must be > 0")
        if self.env_intensity < 0:
            raise ValueError("env_intensity must be >= 0")
        g = tuple(float(v) for v in self.gammas)
        if any(not 0 < v <= 1 for v in g):
            raise ValueError(f"gammas must lie in (0, 1], got {g}")
        object.__setattr__(self, "gammas", g)
        if self.env_model not in ENV_MODELS:
            raise ValueError(f"env_model must be one of {ENV_MODELS}")

    @property
    def alpha(self) -> float:
        if self.env_intensity == 0:
            return math.inf
        return self.flicker_intensity / self.env_intensity

    @classmethod
    def from_alpha(cls, alpha, flicker_intensity=1.0, gammas=(1.0, 1.0, 1.0), env_model="gated"):
        env = 0.0 if math.isinf(alpha) else flicker_intensity / alpha
        return cls(flicker_intensity, env, gammas, env_model)


@dataclass(frozen=True)
class NoiseModel:
    dark_coeff: float = 0.0
    read_noise: float = 0.0
    shot_noise_on: bool = False

    def __post_init__(self):
        if self.dark_coeff < 0 or self.read_noise < 0:
            raise ValueError("dark_coeff and read_noise must be >= 0")

    @property
    def enabled(self) -> bool:
        return self.shot_noise_on or self.dark_coeff > 0 or self.read_noise > 0

    def variance(self, clean, exposure_s):
        shot = np.maximum(clean, 0.0) if self.shot_noise_on else 0.0
        return shot + self.dark_coeff * exposure_s + self.read_noise ** 2


@dataclass(frozen=True)
class ChannelFrame:
    c_values: np.ndarray
    frame_index: int = 0

    def __post_init__(self):
        c = np.asarray(self.c_values, dtype=float)
        if c.ndim != 1 or not np.isfinite(c).all():
            raise ValueError("c_values must be a finite 1-D array")
        object.__setattr__(self, "c_values", c)


def channel_scale(cam: CameraConfig, illum: IlluminationModel) -> float:
    """Channel value of a unit scene lit in one sub-step: ``i_flicker * T / N``."""
    return illum.flicker_intensity * cam.exposure / cam.n_factor


def fine_grid_rate(max_freq_hz, fps, n_factors=(1,), oversample=100):
    """Smallest rate >= ``oversample * max_freq_hz`` that is a multiple of fps*N for every N.

    ``fps`` must be an integer number of Hz for the lcm construction.
    """
    if float(fps) != int(fps):
        raise ValueError("fine_grid_rate needs an integer fps; pass grid_rate explicitly")
    base = int(fps) * reduce(math.lcm, [int(n) for n in n_factors], 1)
    target = max(oversample * max_freq_hz, base)
    return float(base * math.ceil(target / base - 1e-12))


def _samples_per_substep(grid_rate, cam: CameraConfig):
    sps = grid_rate / (cam.fps * cam.n_factor)
    k = int(round(sps))
    if k < 1 or abs(sps - k) > 1e-9 * max(1.0, sps):
        raise ValueError(
            f"grid rate {grid_rate} is not an integer multiple of fps*N = {cam.trace_rate}"
        )
    return k


def _frame_count(sig: FineSignal, cam: CameraConfig):
    spf = _samples_per_substep(sig.grid_rate, cam) * cam.n_factor
    return len(sig) // spf, spf


def _all_substeps(sig: FineSignal, cam: CameraConfig, n_frames=None):
    """Sub-step averages for the first ``n_frames`` frames, shape (frames, N)."""
    sps = _samples_per_substep(sig.grid_rate, cam)
    avail, spf = _frame_count(sig, cam)
    n_frames = avail if n_frames is None else n_frames
    x = sig.samples[: n_frames * spf]
    if cam.exposure_fill == 1.0:
        return x.reshape(n_frames, cam.n_factor, sps).mean(axis=2)
    # partial exposure: integrate only the leading fraction of each frame
    used = cam.exposure_fill * spf
    sub = used / cam.n_factor
    if abs(sub - round(sub)) > 1e-9:
        raise ValueError("exposure_fill must leave an integer number of fine samples per sub-step")
    sub = int(round(sub))
    frames = x.reshape(n_frames, spf)[:, : sub * cam.n_factor]
    return frames.reshape(n_frames, cam.n_factor, sub).mean(axis=2)


def substep_averages(sig: FineSignal, cam: CameraConfig, frame: int) -> np.ndarray:
    """Mean scene intensity in each of the N sub-steps of exposure ``frame``.

    Frame ``f`` owns fine samples ``[f*spf, (f+1)*spf)``, ``spf = grid_rate/fps``.
    """
    avail, _ = _frame_count(sig, cam)
    if frame < 0 or frame >= avail:
        raise ValueError(f"signal does not cover frame {frame} (has {avail} whole frames)")
    return _all_substeps(sig, cam, frame + 1)[frame]


def _clean_channels(i_mat, s, illum: IlluminationModel, exposure_s):
    """Noise-free channel values for sub-step averages ``i_mat`` of shape (F, N)."""
    n = s.shape[0]
    gam = np.asarray(illum.gammas, dtype=float)
    if gam.size != s.shape[1]:
        raise ValueError(f"{gam.size} gammas given for {s.shape[1]} channels")
    dt = exposure_s / n
    coded = i_mat @ s
    if illum.env_model == "gated":
        c = coded * (illum.flicker_intensity + illum.env_intensity)
    else:
        c = coded * illum.flicker_intensity + i_mat.sum(axis=1, keepdims=True) * illum.env_intensity
    return c * gam * dt


def _frame_rng(seed, frame_index):
    return np.random.default_rng([int(seed), int(frame_index)])


def capture_frame(i_vec, pattern: FlickerPattern, illum: IlluminationModel,
                  noise: NoiseModel = NoiseModel(), rng_seed=0, *,
                  exposure_s=1.0, frame_index=0) -> ChannelFrame:
    """Channel values measured for one exposure with sub-step averages ``i_vec``.

    Deterministic for a given ``(rng_seed, frame_index)``.
    """
    i_vec = np.asarray(i_vec, dtype=float)
    if i_vec.shape != (pattern.n,):
        raise ValueError(f"i_vec must have length N={pattern.n}")
    clean = _clean_channels(i_vec[None, :], pattern.s_matrix, illum, exposure_s)[0]
    if noise.enabled:
        std = np.sqrt(noise.variance(clean, exposure_s))
        clean = clean + _frame_rng(rng_seed, frame_index).normal(0.0, 1.0, clean.size) * std
    return ChannelFrame(clean, frame_index)


def capture_unflickered(i_vec, illum: IlluminationModel, noise: NoiseModel = NoiseModel(),
                        rng_seed=0, *, exposure_s=1.0, frame_index=0, gamma=1.0) -> float:
    """One monochrome reading of the scene under ambient light only."""
    i_vec = np.asarray(i_vec, dtype=float)
    clean = gamma * illum.env_intensity * exposure_s * i_vec.mean()
    if noise.enabled:
        std = math.sqrt(noise.variance(clean, exposure_s))
        clean += _frame_rng(rng_seed, frame_index).normal() * std
    return float(clean)


def simulate_channels(sig: FineSignal, cam: CameraConfig, pattern: FlickerPattern,
                      illum: IlluminationModel, noise: NoiseModel = NoiseModel(),
                      seed=0) -> np.ndarray:
    """Vectorised :func:`simulate_sequence`: channel values as an (F, M) array."""
    if pattern.n != cam.n_factor:
        raise ValueError(f"pattern has {pattern.n} sub-steps, camera N={cam.n_factor}")
    avail, _ = _frame_count(sig, cam)
    if avail == 0:
        raise ValueError("signal shorter than one exposure")
    i_mat = _all_substeps(sig, cam)
    c = _clean_channels(i_mat, pattern.s_matrix, illum, cam.exposure)
    if noise.enabled:
        std = np.sqrt(noise.variance(c, cam.exposure))
        z = np.stack([_frame_rng(seed, f).normal(0.0, 1.0, c.shape[1]) for f in range(c.shape[0])])
        c = c + z * std
    return c


def simulate_sequence(sig: FineSignal, cam: CameraConfig, pattern: FlickerPattern,
                      illum: IlluminationModel, noise: NoiseModel = NoiseModel(),
                      seed=0) -> list:
    """One :class:`ChannelFrame` per whole exposure contained in ``sig``."""
    c = simulate_channels(sig, cam, pattern, illum, noise, seed)
    return [ChannelFrame(row, f) for f, row in enumerate(c)]


def estimate_gammas(reference_frame: ChannelFrame, white_reference: ChannelFrame) -> np.ndarray:
    """Per-channel reflectivity relative to a white target, clamped to (0, 1].

    Ratios above 1 indicate a calibration problem; they are clamped with a warning.
    """
    ref = np.asarray(reference_frame.c_values, dtype=float)
    white = np.asarray(white_reference.c_values, dtype=float)
    if ref.shape != white.shape:
        raise ValueError("reference and white frames have different channel counts")
    if (white == 0).any():
        raise ValueError("white reference has a zero channel")
    ratio = ref / white
    if (ratio <= 0).any():
        raise ValueError(f"non-positive reflectivity ratio {ratio}")
    if (ratio > 1).any():
        warnings.warn(f"reflectivity ratio above 1 clamped: {ratio}", RuntimeWarning, stacklevel=2)
    return np.minimum(ratio, 1.0)


def snr_ratio_bound(illum: IlluminationModel, exponent=1.5) -> float:
    """``[(1 + alpha) * min(gamma)] ** exponent``.

    ``exponent=1.5`` is the nominal bound. For Gaussian shot noise the
    measured ratio actually follows the square root of the signal gain, i.e.
    ``exponent=0.5``.
    """
    a = illum.alpha
    if not (math.isfinite(a) and a > 0):
        raise ValueError("alpha must be finite and > 0")
    return float(((1 + a) * min(illum.gammas)) ** exponent)
