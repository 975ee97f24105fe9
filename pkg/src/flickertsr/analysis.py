"""
Error metrics, flicker-pattern enumeration and the ensemble harnesses that
compare up-sample factors and patterns.

Ensembles are batches of random single tones. Every trial is simulated on the
fine grid, reconstructed, rendered back onto the fine grid and compared with
the fine signal itself, so that the non-up-sampled camera and every N are
judged against the same ground truth.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .sensor import (
    CameraConfig,
    FlickerPattern,
    IlluminationModel,
    NoiseModel,
    fine_grid_rate,
    snr_ratio_bound,
)
from .signals import FineSignal
from .solver import ReconstructedTrace, reconstruction_operator

__all__ = [
    "APPENDIX_PATTERNS",
    "CHOSEN_PATTERNS",
    "SIMULATION_PATTERNS",
    "EnsembleSpec",
    "ErrorProfile",
    "BandWin",
    "AlphaPoint",
    "l2_error",
    "cosine_error",
    "render_trace",
    "baseline_trace",
    "pattern_matrices",
    "enumerate_patterns",
    "sample_patterns",
    "evaluate_pattern",
    "evaluate_baseline",
    "band_error",
    "default_bands",
    "band_winner_table",
    "measure_snr_ratio",
    "alpha_sweep",
]

# largest N*M for exhaustive enumeration (2**18 candidate matrices)
EXHAUSTIVE_MAX_BITS = 18


def _bgr(pid, b, g, r):
    return FlickerPattern.from_channels([b, g, r], ("b", "g", "r"), pid)


def _appendix():
    raw = {
        4: [
            ((1, 0, 0, 1), (0, 1, 0, 0), (0, 0, 1, 0)),
            ((1, 0, 0, 1), (1, 0, 1, 0), (0, 1, 0, 1)),
            ((1, 0, 0, 0), (0, 1, 1, 0), (0, 0, 0, 1)),
            ((1, 1, 0, 0), (0, 1, 1, 0), (0, 0, 1, 1)),
            ((0, 0, 1, 0), (0, 1, 0, 0), (1, 1, 1, 1)),
        ],
        5: [
            ((1, 0, 0, 0, 1), (0, 1, 1, 0, 0), (0, 0, 1, 1, 0)),
            ((1, 0, 0, 1, 0), (1, 0, 1, 0, 1), (0, 1, 0, 0, 1)),
            ((1, 0, 0, 1, 0), (0, 0, 1, 0, 0), (0, 1, 0, 0, 1)),
            ((0, 1, 0, 0, 0), (1, 0, 1, 0, 1), (0, 0, 0, 1, 0)),
            ((1, 1, 0, 0, 0), (0, 1, 1, 1, 0), (0, 0, 0, 1, 1)),
        ],
        6: [
            ((1, 0, 0, 0, 1, 0), (0, 1, 0, 0, 0, 1), (0, 0, 1, 1, 0, 0)),
            ((1, 1, 0, 0, 0, 0), (0, 0, 1, 1, 0, 0), (0, 0, 0, 0, 1, 1)),
            ((1, 0, 0, 1, 0, 0), (0, 1, 1, 1, 1, 0), (0, 0, 1, 0, 0, 1)),
            ((1, 0, 1, 0, 1, 0), (0, 1, 0, 1, 0, 1), (1, 1, 1, 1, 1, 1)),
            ((0, 1, 0, 0, 0, 0), (1, 0, 1, 1, 0, 1), (0, 0, 0, 0, 1, 0)),
        ],
    }
    return {n: tuple(_bgr(f"N{n}-p{k}", *v) for k, v in enumerate(pats)) for n, pats in raw.items()}


#: Candidate patterns for N = 4, 5, 6, ids 0-4.
APPENDIX_PATTERNS = _appendix()

_IDENTITY3 = _bgr("N3-identity", (1, 0, 0), (0, 1, 0), (0, 0, 1))

#: Patterns used for the up-sample-factor comparison.
CHOSEN_PATTERNS = {
    3: _IDENTITY3,
    4: APPENDIX_PATTERNS[4][1],
    5: APPENDIX_PATTERNS[5][3],
    6: APPENDIX_PATTERNS[6][4],
}

#: Patterns used for the single-signal simulation figures.
SIMULATION_PATTERNS = {
    3: _IDENTITY3,
    4: _bgr("N4-sim", (0, 1, 0, 0), (1, 0, 0, 1), (0, 0, 1, 0)),
    5: APPENDIX_PATTERNS[5][3],
    6: _bgr("N6-sim", (1, 0, 0, 0, 0, 1), (0, 1, 1, 0, 0, 0), (0, 0, 0, 1, 1, 0)),
}


# ---------------------------------------------------------------- metrics

def _as_series(f, dt=None):
    if hasattr(f, "samples"):
        return np.asarray(f.samples, float), float(f.grid_rate)
    if hasattr(f, "values") and hasattr(f, "sample_rate"):
        return np.asarray(f.values, float), float(f.sample_rate)
    x = np.asarray(f, float)
    return x, 1.0 / (1.0 if dt is None else dt)


def _common_grid(f1, f2, dt=None):
    x1, r1 = _as_series(f1, dt)
    x2, r2 = _as_series(f2, dt)
    if r1 != r2:
        lo, hi = (x1, r1), (x2, r2)
        swap = r1 > r2
        if swap:
            lo, hi = hi, lo
        k = hi[1] / lo[1]
        if abs(k - round(k)) > 1e-9 * k:
            raise ValueError(f"sample rates {r1} and {r2} are not integer multiples")
        up = np.repeat(lo[0], int(round(k)))
        x1, x2 = (hi[0], up) if swap else (up, hi[0])
        rate = hi[1]
    else:
        rate = r1
    if x1.shape != x2.shape:
        raise ValueError(f"length mismatch: {x1.size} vs {x2.size} samples")
    return x1, x2, rate


def l2_error(f1, f2, dt=None) -> float:
    """``sqrt(sum((f1 - f2)**2) * dt)``.

    Arguments may be FineSignal, ReconstructedTrace or plain arrays (spaced by
    ``dt``, default 1). A coarser series is zero-order held onto the finer grid.
    """
    x1, x2, rate = _common_grid(f1, f2, dt)
    return float(np.sqrt(np.sum((x1 - x2) ** 2) / rate))


def cosine_error(f1, f2, dt=None) -> float:
    """Angle in radians between two series viewed as vectors."""
    x1, x2, _ = _common_grid(f1, f2, dt)
    n1, n2 = np.linalg.norm(x1), np.linalg.norm(x2)
    if n1 == 0 or n2 == 0:
        raise ValueError("cosine error of a zero-norm series")
    return float(np.arccos(np.clip(np.dot(x1, x2) / (n1 * n2), -1.0, 1.0)))


def _fourier_upsample(values, sps, axis=-1):
    """Band-limited interpolation of sub-step samples onto the fine grid.

    Sample k of ``values`` is placed at the centre of its ``sps`` fine samples.
    """
    values = np.asarray(values, float)
    length = values.shape[axis]
    n = length * sps
    x = np.fft.rfft(values, axis=axis)
    shape = list(x.shape)
    shape[axis] = n // 2 + 1
    y = np.zeros(shape, complex)
    idx = [slice(None)] * values.ndim
    idx[axis] = slice(0, x.shape[axis])
    y[tuple(idx)] = x * sps
    if length % 2 == 0:
        idx[axis] = length // 2
        y[tuple(idx)] *= 0.5
    f = np.arange(n // 2 + 1) / n
    bshape = [1] * values.ndim
    bshape[axis] = f.size
    y *= np.exp(-2j * np.pi * f * (sps - 1) / 2).reshape(bshape)
    return np.fft.irfft(y, n, axis=axis)


def _sps(grid_rate, trace_rate):
    k = grid_rate / trace_rate
    if abs(k - round(k)) > 1e-9 * k or round(k) < 1:
        raise ValueError(f"grid rate {grid_rate} is not a multiple of trace rate {trace_rate}")
    return int(round(k))


def render_trace(trace: ReconstructedTrace, grid_rate: float, mode: str = "fourier") -> FineSignal:
    """Put a trace on a fine grid starting at ``trace.t0``.

    ``"hold"`` repeats each sub-step value; ``"fourier"`` interpolates with the
    trace's band limit.
    """
    sps = _sps(grid_rate, trace.sample_rate)
    if mode == "hold":
        y = np.repeat(trace.values, sps)
    elif mode == "fourier":
        y = _fourier_upsample(trace.values, sps)
    else:
        raise ValueError(f"unknown render mode {mode!r}")
    return FineSignal(y, grid_rate, trace.t0)


def baseline_trace(sig: FineSignal, fps: float) -> ReconstructedTrace:
    """What a plain camera records: one mean per exposure."""
    spf = _sps(sig.grid_rate, fps)
    frames = len(sig) // spf
    if frames == 0:
        raise ValueError("signal shorter than one exposure")
    means = sig.samples[: frames * spf].reshape(frames, spf).mean(axis=1)
    return ReconstructedTrace(means, 1, fps, sig.t0)


# ---------------------------------------------------------------- patterns

def pattern_matrices(n: int, m: int, full_rank=True, no_zero_row=True) -> np.ndarray:
    """All binary n x m matrices meeting the constraints, as an (P, n, m) array.

    Matrices are ordered by their row-major bit string read as a binary number.
    """
    if n < m:
        raise ValueError(f"need n >= m, got n={n}, m={m}")
    if n * m > EXHAUSTIVE_MAX_BITS:
        raise ValueError(
            f"n*m = {n * m} exceeds the exhaustive limit {EXHAUSTIVE_MAX_BITS}; use sample_patterns"
        )
    bits = n * m
    codes = np.arange(2 ** bits, dtype=np.int64)
    shifts = np.arange(bits - 1, -1, -1)
    mats = ((codes[:, None] >> shifts) & 1).astype(np.int8).reshape(-1, n, m)
    keep = np.ones(len(mats), bool)
    if no_zero_row:
        keep &= mats.any(axis=2).all(axis=1)
    if full_rank:
        gram = np.einsum("pnk,pnl->pkl", mats, mats).astype(float)
        keep &= np.abs(np.linalg.det(gram)) > 0.5  # integer determinant
    return mats[keep]


def enumerate_patterns(n: int, m: int = 3, full_rank=True, no_zero_row=True) -> list:
    """Every binary n x m pattern satisfying the constraints."""
    names = ("b", "g", "r") if m == 3 else tuple(f"C{k + 1}" for k in range(m))
    return [FlickerPattern(s, names, f"N{n}-e{k}")
            for k, s in enumerate(pattern_matrices(n, m, full_rank, no_zero_row))]


def _is_valid(s, full_rank, no_zero_row):
    if no_zero_row and not s.any(axis=1).all():
        return False
    return not full_rank or np.linalg.matrix_rank(s) == s.shape[1]


def sample_patterns(n: int, m: int, count: int, seed: int = 0, full_rank=True,
                    no_zero_row=True, max_draws: int = 1_000_000) -> list:
    """Up to ``count`` distinct random patterns (for sizes beyond exhaustive range)."""
    if n < m:
        raise ValueError(f"need n >= m, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    seen, out = set(), []
    names = ("b", "g", "r") if m == 3 else tuple(f"C{k + 1}" for k in range(m))
    for _ in range(max_draws):
        s = rng.integers(0, 2, size=(n, m))
        key = s.tobytes()
        if key in seen or not _is_valid(s, full_rank, no_zero_row):
            continue
        seen.add(key)
        out.append(FlickerPattern(s, names, f"N{n}-s{len(out)}"))
        if len(out) == count:
            break
    return out


# ---------------------------------------------------------------- ensembles

@dataclass(frozen=True)
class EnsembleSpec:
    """Random single tones ``amplitude * sin(2 pi f t + phase)``.

    ``f`` is uniform in ``freq_range_hz`` and the phase uniform in [0, 2 pi).
    """

    n_trials: int = 1000
    freq_range_hz: tuple = (5.0, 30.0)
    duration_s: float = 5.0
    amplitude: float = 1.0
    seed: int = 0
    bin_hz: float = 1.0

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        lo, hi = self.freq_range_hz
        if not 0 <= lo < hi:
            raise ValueError(f"invalid freq_range_hz {self.freq_range_hz}")
        object.__setattr__(self, "freq_range_hz", (float(lo), float(hi)))
        if not self.duration_s > 0 or not self.bin_hz > 0:
            raise ValueError("duration_s and bin_hz must be > 0")

    def draw(self):
        """(freqs, phases) of every trial."""
        rng = np.random.default_rng(self.seed)
        lo, hi = self.freq_range_hz
        return rng.uniform(lo, hi, self.n_trials), rng.uniform(0, 2 * np.pi, self.n_trials)

    def bins(self):
        lo, hi = self.freq_range_hz
        edges = np.arange(lo, hi + 1e-9 * self.bin_hz, self.bin_hz)
        if edges[-1] < hi - 1e-9:
            edges = np.append(edges, hi)
        return list(zip(edges[:-1], edges[1:]))


@dataclass(frozen=True)
class ErrorProfile:
    freq_bins: tuple
    mean_l2: np.ndarray
    mean_cosine: np.ndarray
    pattern_id: str
    n_factor: int
    counts: np.ndarray = field(default=None)
    trial_freqs: np.ndarray = field(default=None, repr=False)
    trial_l2: np.ndarray = field(default=None, repr=False)
    trial_cosine: np.ndarray = field(default=None, repr=False)

    def reach_hz(self, fps):
        return self.n_factor * fps / 2


def _grid_rate_for(spec, fps, n):
    return fine_grid_rate(spec.freq_range_hz[1], fps, (n, *range(1, 7)))


def _trial_signals(freqs, phases, spec, rate, n_samples):
    t = np.arange(n_samples) / rate
    return spec.amplitude * np.sin(2 * np.pi * freqs[:, None] * t[None, :] + phases[:, None])


def _errors(truth, rendered, rate):
    d = truth - rendered
    l2 = np.sqrt(np.sum(d * d, axis=1) / rate)
    num = np.sum(truth * rendered, axis=1)
    den = np.linalg.norm(truth, axis=1) * np.linalg.norm(rendered, axis=1)
    cos = np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0)
    ang = np.arccos(np.clip(cos, -1.0, 1.0))
    # identical zero series count as a perfect match
    ang = np.where((den == 0) & (np.abs(d).max(axis=1) > 0), np.pi / 2, ang)
    return l2, ang


def _render_batch(rec, sps, mode):
    if mode == "hold":
        return np.repeat(rec, sps, axis=1)
    if mode == "fourier":
        return _fourier_upsample(rec, sps, axis=1)
    raise ValueError(f"unknown render mode {mode!r}")


def _profile(spec, freqs, l2, cos, pid, n):
    bins = spec.bins()
    mean_l2, mean_cos, counts = [], [], []
    for k, (lo, hi) in enumerate(bins):
        last = k == len(bins) - 1
        sel = (freqs >= lo) & ((freqs <= hi) if last else (freqs < hi))
        counts.append(int(sel.sum()))
        mean_l2.append(l2[sel].mean() if sel.any() else np.nan)
        mean_cos.append(cos[sel].mean() if sel.any() else np.nan)
    return ErrorProfile(tuple(bins), np.array(mean_l2), np.array(mean_cos), pid, n,
                        np.array(counts), freqs, l2, cos)


def _run_ensemble(spec, fps, n, grid_rate, reconstruct_batch, pid, render, chunk):
    rate = grid_rate or _grid_rate_for(spec, fps, n)
    sps = _sps(rate, fps * n)
    frames = int(math.floor(spec.duration_s * fps + 1e-9))
    if frames < 1:
        raise ValueError("ensemble duration shorter than one exposure")
    n_samples = frames * n * sps
    freqs, phases = spec.draw()
    l2 = np.empty(spec.n_trials)
    cos = np.empty(spec.n_trials)
    for lo in range(0, spec.n_trials, chunk):
        hi = min(lo + chunk, spec.n_trials)
        x = _trial_signals(freqs[lo:hi], phases[lo:hi], spec, rate, n_samples)
        sub = x.reshape(hi - lo, frames, n, sps).mean(axis=3)
        rec = reconstruct_batch(sub, lo).reshape(hi - lo, frames * n)
        l2[lo:hi], cos[lo:hi] = _errors(x, _render_batch(rec, sps, render), rate)
    return _profile(spec, freqs, l2, cos, pid, n)


def evaluate_pattern(pattern: FlickerPattern, spec: EnsembleSpec, cam: CameraConfig,
                     mode: str = "fixed", *, render: str = "fourier", grid_rate=None,
                     chunk: int = 64) -> ErrorProfile:
    """Mean L2 and cosine error per frequency bin over a noise-free tone ensemble.

    Parameters
    ----------
    mode : {"fixed", "random_per_frame"}
        ``"random_per_frame"`` draws a fresh pattern for every exposure,
        uniformly from all full-rank N x M patterns with no dark sub-step.
        Only the shape of ``pattern`` is used in that mode.
    render : {"fourier", "hold"}
        How the reconstructed sub-step values are put back on the fine grid
        before comparison with the fine signal.
    """
    if pattern.n != cam.n_factor:
        raise ValueError(f"pattern has {pattern.n} sub-steps, camera N={cam.n_factor}")
    pattern.validate()
    if mode == "fixed":
        s = pattern.s_matrix
        op = reconstruction_operator(pattern)
        proj = s @ op.T  # C = i @ S, I = C @ K^T

        def batch(sub, _lo):
            return sub @ proj

        pid = pattern.pattern_id
    elif mode == "random_per_frame":
        mats = pattern_matrices(pattern.n, pattern.m).astype(float)
        ops = np.stack([reconstruction_operator(s) for s in mats])
        projs = np.einsum("pnm,pkm->pnk", mats, ops)
        rng = np.random.default_rng([spec.seed, 1])
        frames = int(math.floor(spec.duration_s * cam.fps + 1e-9))
        picks = rng.integers(0, len(mats), size=(spec.n_trials, frames))

        def batch(sub, lo):
            p = projs[picks[lo: lo + sub.shape[0]]]
            return np.einsum("tfn,tfnk->tfk", sub, p)

        pid = f"N{pattern.n}-random"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _run_ensemble(spec, cam.fps, cam.n_factor, grid_rate, batch, pid, render, chunk)


def evaluate_baseline(spec: EnsembleSpec, fps: float, *, render: str = "fourier",
                      grid_rate=None, chunk: int = 64) -> ErrorProfile:
    """Error profile of the plain camera (one sample per exposure)."""
    return _run_ensemble(spec, fps, 1, grid_rate, lambda sub, lo: sub, "baseline", render, chunk)


def band_error(profile: ErrorProfile, f_lo, f_hi, metric="l2") -> float:
    """Mean trial error over tones in ``[f_lo, f_hi]``."""
    f = profile.trial_freqs
    vals = profile.trial_l2 if metric == "l2" else profile.trial_cosine
    sel = (f >= f_lo) & (f <= f_hi)
    if not sel.any():
        return float("nan")
    return float(vals[sel].mean())


def default_bands(n_values: Sequence[int], fps: float):
    """``[fps/2, N_min fps/2]`` followed by ``[(N-1) fps/2, N fps/2]`` for each larger N."""
    ns = sorted(set(n_values))
    bands = [(fps / 2, ns[0] * fps / 2)]
    bands += [((n - 1) * fps / 2, n * fps / 2) for n in ns[1:]]
    return bands


@dataclass(frozen=True)
class BandWin:
    f_lo: float
    f_hi: float
    n_factor: int
    pattern_id: str
    error: float


def band_winner_table(profiles: Sequence[ErrorProfile], fps: float, bands=None,
                      metric: str = "l2") -> list:
    """Lowest-error (N, pattern) for each band.

    Ties go to the lower N, then the lower pattern id.
    """
    if not profiles:
        raise ValueError("no profiles")
    bands = default_bands([p.n_factor for p in profiles], fps) if bands is None else bands
    rows = []
    for lo, hi in bands:
        scored = [(band_error(p, lo, hi, metric), p.n_factor, p.pattern_id) for p in profiles]
        scored = [s for s in scored if not math.isnan(s[0])]
        if not scored:
            raise ValueError(f"no profile has trials in band [{lo}, {hi}]")
        err, n, pid = min(scored)
        rows.append(BandWin(lo, hi, n, pid, err))
    return rows


# ---------------------------------------------------------------- SNR

@dataclass(frozen=True)
class AlphaPoint:
    alpha: float
    mean_cosine: float
    snr_ratio: float
    snr_ratio_se: float
    bound: float


def _snr(samples):
    mu, sd = samples.mean(), samples.std(ddof=1)
    snr = mu / sd
    # delta-method standard error of mean/std for Gaussian samples
    se = math.sqrt((1 + snr ** 2 / 2) / samples.size)
    return snr, se


def measure_snr_ratio(pattern: FlickerPattern, illum: IlluminationModel, noise: NoiseModel,
                      exposure_s: float, trials: int = 10_000, seed: int = 0):
    """Monte-Carlo SNR with flicker over SNR without it, for a static white scene.

    With flicker the signal is the channel sum ``sum_m C^m``; without flicker
    the camera records the scene under ambient light alone. Returns
    ``(ratio, standard error)``.
    """
    s = pattern.s_matrix
    n, m = s.shape
    g = np.asarray(illum.gammas, float)
    dt = exposure_s / n
    clean = g * s.sum(axis=0) * dt * (illum.flicker_intensity + illum.env_intensity)
    rng = np.random.default_rng([seed, 2])
    noisy = clean + rng.standard_normal((trials, m)) * np.sqrt(noise.variance(clean, exposure_s))
    tsr, tsr_se = _snr(noisy.sum(axis=1))
    plain_clean = illum.env_intensity * exposure_s
    plain = plain_clean + rng.standard_normal(trials) * np.sqrt(noise.variance(plain_clean, exposure_s))
    base, base_se = _snr(plain)
    ratio = tsr / base
    return float(ratio), float(ratio * math.hypot(tsr_se / tsr, base_se / base))


def _alpha_cosine(pattern, spec, cam, illum, noise, gammas, offset, chunk=64):
    """Mean cosine error of a noisy reconstruction with ambient contamination."""
    n = pattern.n
    rate = _grid_rate_for(spec, cam.fps, n)
    sps = _sps(rate, cam.fps * n)
    frames = int(math.floor(spec.duration_s * cam.fps + 1e-9))
    n_samples = frames * n * sps
    freqs, phases = spec.draw()
    s = pattern.s_matrix
    op = reconstruction_operator(pattern)
    g = np.asarray(gammas, float)
    dt = cam.exposure / n
    out = np.empty(spec.n_trials)
    for lo in range(0, spec.n_trials, chunk):
        hi = min(lo + chunk, spec.n_trials)
        x = offset + _trial_signals(freqs[lo:hi], phases[lo:hi], spec, rate, n_samples)
        sub = x.reshape(hi - lo, frames, n, sps).mean(axis=3)
        clean = (sub @ s) * (illum.flicker_intensity + illum.env_intensity) * g * dt
        if noise.enabled:
            rng = np.random.default_rng([spec.seed, 3, lo])
            clean = clean + rng.standard_normal(clean.shape) * np.sqrt(noise.variance(clean, cam.exposure))
        rec = ((clean / g) @ op.T).reshape(hi - lo, frames * n)
        y = _fourier_upsample(rec, sps, axis=1)
        xt = x - x.mean(axis=1, keepdims=True)
        y = y - y.mean(axis=1, keepdims=True)
        out[lo:hi] = _errors(xt, y, rate)[1]
    return float(out.mean())


def alpha_sweep(alphas: Sequence[float], pattern: FlickerPattern, spec: EnsembleSpec,
                cam: CameraConfig | None = None, noise: NoiseModel = NoiseModel(shot_noise_on=True),
                gammas=(1.0, 1.0, 1.0), env_counts: float = 100.0, offset: float = 1.0,
                snr_trials: int = 10_000, exponent: float = 1.5) -> list:
    """Cosine error and SNR gain as the flicker/ambient ratio grows.

    Ambient light is held fixed at ``env_counts`` per exposure (for unit scene
    intensity) and the flicker intensity is ``alpha`` times that, so larger
    alpha means more signal over the same ambient level. ``alpha = inf`` is
    evaluated without noise. The scene is ``offset + tone`` so intensities
    stay positive; means are removed before the cosine comparison.
    """
    if any(not a > 0 for a in alphas):
        raise ValueError("alphas must be > 0")
    cam = CameraConfig(10.0, pattern.n) if cam is None else cam
    pattern.validate()
    env = env_counts / cam.exposure
    rows = []
    for a in alphas:
        if math.isinf(a):
            illum = IlluminationModel(1.0, 0.0, gammas)
            cos = _alpha_cosine(pattern, spec, cam, illum, NoiseModel(), gammas, offset)
            rows.append(AlphaPoint(a, cos, math.inf, 0.0, math.inf))
            continue
        illum = IlluminationModel(a * env, env, gammas)
        cos = _alpha_cosine(pattern, spec, cam, illum, noise, gammas, offset)
        ratio, se = measure_snr_ratio(pattern, illum, noise, cam.exposure, snr_trials, spec.seed)
        rows.append(AlphaPoint(a, cos, ratio, se, snr_ratio_bound(illum, exponent)))
    return rows
