"""
Scanning mode: consecutive temporal windows, each at its own up-sample factor
N, combined band by band in the frequency domain, followed by an
anti-aliasing pass that folds each band's content back about its lower edge
and removes it from the band below.

All window spectra share one frequency axis. Each window is zero-padded to
the full scan span (rounded up to an even number of frames) and its bins are
scaled by ``n_padded / n_window``, so that ``signals.amplitudes`` returns tone
amplitudes regardless of window length. Phases are referenced to t = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import signals
from .sensor import (
    CameraConfig,
    FlickerPattern,
    IlluminationModel,
    NoiseModel,
    channel_scale,
    simulate_channels,
)
from .signals import FineSignal, SpectrumView
from .solver import ReconstructedTrace, reconstruct_channels

__all__ = [
    "TemporalWindow",
    "StitchedBand",
    "StitchedSpectrum",
    "plan_windows",
    "window_spectrum",
    "run_scan",
    "stitch",
    "anti_alias",
    "band_energies",
]

AA_MODES = ("composition", "literal")
AA_DOMAINS = ("magnitude", "complex")


@dataclass(frozen=True)
class TemporalWindow:
    n_factor: int
    start_s: float
    end_s: float
    trace: ReconstructedTrace
    spectrum: SpectrumView

    def __post_init__(self):
        if not self.end_s > self.start_s:
            raise ValueError("window end must be after its start")
        reach = self.n_factor * self.trace.fps / 2
        if self.spectrum.f_max < reach - 1e-9 * reach:
            raise ValueError(f"window spectrum stops at {self.spectrum.f_max} Hz, below {reach} Hz")


@dataclass(frozen=True)
class StitchedBand:
    f_lo: float
    f_hi: float
    n_factor: int
    sources: tuple


@dataclass(frozen=True)
class StitchedSpectrum:
    bands: tuple
    combined: SpectrumView
    fps: float

    def band_of(self, freq_hz):
        for b in self.bands:
            if b.f_lo <= freq_hz < b.f_hi:
                return b
        return None


def plan_windows(n_sequence: Sequence[int], total_s: float, fps: float):
    """Split ``total_s`` into ``len(n_sequence)`` equal windows of whole frames.

    Frames that do not divide evenly are left off the end.

    Returns
    -------
    list of (n, start_s, end_s)
    """
    seq = [int(n) for n in n_sequence]
    if not seq:
        raise ValueError("empty N sequence")
    if any(n < 2 for n in seq):
        raise ValueError(f"every N must be >= 2, got {seq}")
    if not fps > 0 or not total_s > 0:
        raise ValueError("fps and total_s must be > 0")
    total_frames = math.floor(total_s * fps + 1e-9)
    per = total_frames // len(seq)
    if per < 1:
        raise ValueError(
            f"window shorter than one frame: {total_s} s at {fps} fps over {len(seq)} windows"
        )
    dur = per / fps
    return [(n, k * dur, (k + 1) * dur) for k, n in enumerate(seq)]


def window_spectrum(trace: ReconstructedTrace, span_frames: int) -> SpectrumView:
    """Spectrum of a window trace on the common scan axis (see module notes)."""
    if span_frames < trace.n_frames:
        raise ValueError("span shorter than the window")
    span_frames += span_frames % 2
    n_pad = span_frames * trace.n_factor
    sv = signals.spectrum(trace, n_fft=n_pad)
    # trace samples sit at sub-step centres
    sv = signals.time_shift(sv, trace.t0 + 0.5 / trace.sample_rate)
    return sv.with_bins(sv.bins * (n_pad / len(trace)))


def run_scan(sig: FineSignal, fps: float, n_sequence: Sequence[int],
             patterns: Mapping[int, FlickerPattern], illum: IlluminationModel = IlluminationModel(),
             noise: NoiseModel = NoiseModel(), seed: int = 0, gammas=None):
    """Simulate and reconstruct every window of a scan over ``sig``."""
    plan = plan_windows(n_sequence, sig.duration, fps)
    span_frames = round((plan[-1][2]) * fps)
    out = []
    for k, (n, start, end) in enumerate(plan):
        if n not in patterns:
            raise ValueError(f"no pattern given for N={n}")
        cam = CameraConfig(fps, n)
        lo = round(start * sig.grid_rate)
        hi = round(end * sig.grid_rate)
        part = FineSignal(sig.samples[lo:hi], sig.grid_rate, sig.t0 + start)
        c = simulate_channels(part, cam, patterns[n], illum, noise, seed=seed + k)
        g = illum.gammas if gammas is None else gammas
        rec = reconstruct_channels(c, patterns[n], g, channel_scale(cam, illum))
        trace = ReconstructedTrace(rec.ravel(), n, fps, t0=start)
        out.append(TemporalWindow(n, start, end, trace, window_spectrum(trace, span_frames)))
    return out


def _band_plan(n_values, fps):
    """Half-open bands and the N that feeds each one."""
    distinct = sorted(set(n_values))
    bands = [(0.0, distinct[0] * fps / 2, distinct[0])]
    for k in range(distinct[0] + 1, distinct[-1] + 1):
        feeder = min(n for n in distinct if n >= k)
        bands.append(((k - 1) * fps / 2, k * fps / 2, feeder))
    return bands


def stitch(windows: Sequence[TemporalWindow], fps: float, average: str = "complex") -> StitchedSpectrum:
    """Assemble one spectrum from window spectra.

    Each band is the mean over the windows with the smallest N whose reach
    covers it. ``average="magnitude"`` averages magnitudes and keeps the phase
    of the complex mean.
    """
    if not windows:
        raise ValueError("no windows")
    if average not in ("complex", "magnitude"):
        raise ValueError(f"unknown average mode {average!r}")
    if any(abs(w.trace.fps - fps) > 1e-12 * fps for w in windows):
        raise ValueError("windows do not share fps")
    dfs = {round(w.spectrum.df, 12) for w in windows}
    if len(dfs) != 1:
        raise ValueError("window spectra are not on a common axis")
    df = windows[0].spectrum.df
    n_max = max(w.n_factor for w in windows)
    n_time = int(round(fps * n_max / df))
    n_bins = n_time // 2 + 1
    freqs = np.arange(n_bins) * df
    combined = np.zeros(n_bins, complex)
    bands = []
    for lo, hi, feeder in _band_plan([w.n_factor for w in windows], fps):
        src = tuple(i for i, w in enumerate(windows) if w.n_factor == feeder)
        sel = (freqs >= lo - signals._EDGE_TOL * df) & (freqs < hi - signals._EDGE_TOL * df)
        stack = []
        for i in src:
            sv = windows[i].spectrum
            scale = n_time / sv.n_time
            stack.append(sv.bins[: n_bins][sel[: sv.bins.size]] * scale)
        stack = np.array(stack)
        mean = stack.mean(axis=0)
        if average == "magnitude":
            mean = np.abs(stack).mean(axis=0) * np.exp(1j * np.angle(mean))
        combined[np.where(sel)[0][: mean.size]] = mean
        bands.append(StitchedBand(lo, hi, feeder, src))
    return StitchedSpectrum(tuple(bands), SpectrumView(combined, df, n_time), fps)


def _subtract(bins, a, target, domain):
    out = bins.copy()
    if domain == "complex":
        out[target] -= a[target]
        return out
    mag = np.abs(bins[target])
    keep = np.maximum(mag - np.abs(a[target]), 0.0)
    ratio = np.divide(keep, mag, out=np.zeros_like(mag), where=mag > 0)
    out[target] = bins[target] * ratio
    return out


def anti_alias(stitched: StitchedSpectrum, n_sequence: Sequence[int], fps: float,
               mode: str = "composition", domain: str = "magnitude") -> StitchedSpectrum:
    """Remove alias ghosts band by band, from the top down.

    For each target N (distinct, descending, the largest excluded) the band
    ``[N fps/2, (N+1) fps/2)`` is mirrored about ``N fps/2`` onto the target
    band ``[(N-1) fps/2, N fps/2)`` and subtracted there.

    Parameters
    ----------
    mode : {"composition", "literal"}
        ``"literal"`` mirrors the whole current spectrum about the pivot
        without band-passing it first, and subtracts below the pivot.
    domain : {"magnitude", "complex"}
        ``"magnitude"`` subtracts mirrored magnitudes (clipped at zero) and
        keeps each bin's phase. ``"complex"`` subtracts the complex folded
        image as produced by a sampling lattice through sub-step centres.
    """
    if mode not in AA_MODES:
        raise ValueError(f"mode must be one of {AA_MODES}")
    if domain not in AA_DOMAINS:
        raise ValueError(f"domain must be one of {AA_DOMAINS}")
    distinct = sorted(set(int(n) for n in n_sequence))
    fed = {b.n_factor for b in stitched.bands}
    if not fed <= set(distinct):
        raise ValueError("stitched spectrum was built from a different N sequence")
    sv = stitched.combined
    freqs = sv.freqs
    tol = signals._EDGE_TOL * sv.df
    for n in reversed(distinct[:-1]):
        pivot = n * fps / 2
        lattice = 0.5 / (2 * pivot)
        if mode == "composition":
            src = signals.band_pass(sv, pivot, min((n + 1) * fps / 2, sv.f_max + tol))
            target = (freqs >= (n - 1) * fps / 2 - tol) & (freqs < pivot - tol)
        else:
            src = sv
            target = freqs < pivot - tol
        a = signals.rotate_spectrum(src, pivot, lattice_time=lattice)
        sv = sv.with_bins(_subtract(sv.bins, a.bins, target, domain))
    return StitchedSpectrum(stitched.bands, sv, stitched.fps)


def band_energies(windows: Sequence[TemporalWindow], fps: float):
    """Energy of each window's spectrum in each fps/2-wide band it reaches.

    Returns a list of (window index, n_factor, f_lo, f_hi, energy).
    """
    rows = []
    for i, w in enumerate(windows):
        for k in range(1, w.n_factor + 1):
            lo, hi = (k - 1) * fps / 2, k * fps / 2
            part = signals.band_pass(w.spectrum, lo, hi)
            rows.append((i, w.n_factor, lo, hi, signals.energy(part)))
    return rows
