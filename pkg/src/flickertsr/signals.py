"""
Test-signal generators and the spectral primitives shared by the scanning
and analysis code.

Spectra are one-sided (``numpy.fft.rfft``) views of real signals, so the
conjugate-symmetric half is implicit and every operation here returns the
spectrum of a real signal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FineSignal",
    "SpectrumView",
    "gen_sinusoid_mix",
    "gen_square_wave",
    "spectrum",
    "inverse",
    "band_pass",
    "rotate_spectrum",
    "threshold_noise_floor",
    "time_shift",
    "energy",
    "amplitudes",
    "peak_frequencies",
]

# tolerance (in bins) for deciding which side of a band edge a bin sits on
_EDGE_TOL = 1e-6


@dataclass(frozen=True)
class FineSignal:
    """Scene intensity sampled on a fine uniform grid.

    ``samples[k]`` is the intensity at ``t0 + k / grid_rate``.
    """

    samples: np.ndarray
    grid_rate: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a nonempty 1-D array")
        if not self.grid_rate > 0:
            raise ValueError(f"grid_rate must be > 0, got {self.grid_rate}")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.samples.size

    @property
    def sample_rate(self) -> float:
        return self.grid_rate

    @property
    def duration(self) -> float:
        return self.samples.size / self.grid_rate

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.grid_rate


@dataclass(frozen=True)
class SpectrumView:
    """One-sided DFT of a real series.

    ``bins[k]`` sits at ``k * df``; ``n_time`` is the length of the time series
    the bins came from (needed for inversion and Parseval).
    """

    bins: np.ndarray
    df: float
    n_time: int = field(default=0)

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=complex)
        if bins.ndim != 1 or bins.size < 1:
            raise ValueError("bins must be a nonempty 1-D array")
        object.__setattr__(self, "bins", bins)
        if self.n_time == 0:
            object.__setattr__(self, "n_time", 2 * (bins.size - 1))

    @property
    def f_max(self) -> float:
        return self.df * (self.bins.size - 1)

    @property
    def freqs(self) -> np.ndarray:
        return np.arange(self.bins.size) * self.df

    @property
    def sample_rate(self) -> float:
        return self.df * self.n_time

    def with_bins(self, bins) -> "SpectrumView":
        return SpectrumView(bins, self.df, self.n_time)


def gen_sinusoid_mix(components, duration_s, grid_rate, t0=0.0):
    """Sum of sines ``a * sin(2 pi f t + phase)`` on a uniform grid.

    Parameters
    ----------
    components : iterable of (amplitude, freq_hz, phase_rad)
    duration_s : float
    grid_rate : float
        Samples per second. Should be at least 10x the highest frequency.
    t0 : float
        Time of the first sample.

    Returns
    -------
    FineSignal
    """
    components = [tuple(float(v) for v in c) for c in components]
    if not components:
        raise ValueError("no components")
    if not duration_s > 0:
        raise ValueError(f"duration_s must be > 0, got {duration_s}")
    fmax = max(abs(f) for _, f, _ in components)
    if grid_rate < 10 * fmax:
        raise ValueError(
            f"grid_rate {grid_rate} is below 10x the highest frequency ({fmax} Hz)"
        )
    n = int(round(duration_s * grid_rate))
    t = t0 + np.arange(n) / grid_rate
    x = np.zeros(n)
    for a, f, phase in components:
        x += a * np.sin(2 * np.pi * f * t + phase)
    return FineSignal(x, grid_rate, t0)


def gen_square_wave(freq_hz, duration_s, grid_rate, t0=0.0):
    """``sgn(sin(2 pi f t))`` with ``sgn(0) = 0``."""
    if not freq_hz > 0:
        raise ValueError(f"freq_hz must be > 0, got {freq_hz}")
    if not duration_s > 0:
        raise ValueError(f"duration_s must be > 0, got {duration_s}")
    n = int(round(duration_s * grid_rate))
    # phase in cycles, evaluated exactly on the half-cycle lattice so that the
    # zeros of the sine come out as exact zeros
    k = np.arange(n)
    cycles = freq_hz * (t0 + k / grid_rate)
    half = 2.0 * cycles
    on_zero = np.isclose(half, np.round(half), rtol=0.0, atol=1e-9)
    x = np.sign(np.sin(2 * np.pi * cycles))
    x[on_zero] = 0.0
    return FineSignal(x, grid_rate, t0)


def _series(sig):
    """Return (values, sample_rate) for a FineSignal-like or trace-like object."""
    if hasattr(sig, "samples"):
        return np.asarray(sig.samples, dtype=float), float(sig.grid_rate)
    if hasattr(sig, "values") and hasattr(sig, "sample_rate"):
        return np.asarray(sig.values, dtype=float), float(sig.sample_rate)
    raise TypeError(f"cannot take the spectrum of {type(sig).__name__}")


def spectrum(sig, n_fft=None) -> SpectrumView:
    """One-sided DFT of a signal or reconstructed trace (DC retained).

    ``n_fft`` zero-pads the series before the transform (finer ``df``).
    """
    x, rate = _series(sig)
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    n = x.size if n_fft is None else int(n_fft)
    if n < x.size:
        raise ValueError("n_fft shorter than the series")
    return SpectrumView(np.fft.rfft(x, n), rate / n, n)


def inverse(sv: SpectrumView) -> np.ndarray:
    """Time series whose spectrum is ``sv``."""
    return np.fft.irfft(sv.bins, sv.n_time)


def _band_mask(sv, f_min, f_max):
    k = np.arange(sv.bins.size)
    lo = f_min / sv.df - _EDGE_TOL
    hi = f_max / sv.df - _EDGE_TOL
    return (k >= lo) & (k < hi)


def band_pass(sv: SpectrumView, f_min, f_max) -> SpectrumView:
    """Ideal brick-wall filter keeping bins with frequency in ``[f_min, f_max)``."""
    if f_min >= f_max:
        raise ValueError(f"inverted band [{f_min}, {f_max})")
    if f_min < 0:
        raise ValueError("f_min must be >= 0")
    if f_max > sv.f_max + _EDGE_TOL * sv.df:
        raise ValueError(f"f_max {f_max} beyond spectrum range {sv.f_max}")
    return sv.with_bins(np.where(_band_mask(sv, f_min, f_max), sv.bins, 0))


def rotate_spectrum(sv: SpectrumView, f_pivot, lattice_time=0.0) -> SpectrumView:
    """Mirror the spectrum about ``f_pivot``: content at f moves to 2 f_pivot - f.

    The mirrored bin is the complex conjugate of the source, which is what a
    real tone turns into when folded. ``lattice_time`` reproduces folding by a
    sampling lattice of rate ``2 f_pivot`` that contains the instant
    ``lattice_time`` (relative to the spectrum's phase reference); it
    multiplies the folded bins by ``exp(-2j pi 2 f_pivot lattice_time)``.

    Bins whose mirror falls outside ``[0, f_max]`` are dropped, not wrapped.
    """
    if not 0 <= f_pivot <= sv.f_max + _EDGE_TOL * sv.df:
        raise ValueError(f"f_pivot {f_pivot} outside [0, {sv.f_max}]")
    two_p = int(round(2 * f_pivot / sv.df))
    k_out = np.arange(sv.bins.size)
    k_src = two_p - k_out
    ok = (k_src >= 0) & (k_src < sv.bins.size)
    out = np.zeros_like(sv.bins)
    phase = np.exp(-2j * np.pi * (2 * f_pivot) * lattice_time)
    out[ok] = phase * np.conj(sv.bins[k_src[ok]])
    # DC and (even-length) Nyquist bins of a real signal are real
    out[0] = out[0].real
    if sv.n_time % 2 == 0 and sv.n_time // 2 == sv.bins.size - 1:
        out[-1] = out[-1].real
    return sv.with_bins(out)


def threshold_noise_floor(sv: SpectrumView, fraction=0.05) -> SpectrumView:
    """Zero every bin whose magnitude is below ``fraction`` of the peak magnitude."""
    if not 0 <= fraction < 1:
        raise ValueError(f"fraction must be in [0, 1), got {fraction}")
    mag = np.abs(sv.bins)
    if fraction == 0 or mag.max() == 0:
        return sv.with_bins(sv.bins.copy())
    return sv.with_bins(np.where(mag < fraction * mag.max(), 0, sv.bins))


def time_shift(sv: SpectrumView, seconds) -> SpectrumView:
    """Re-reference bin phases to a time origin ``seconds`` earlier.

    If ``sv`` was computed from samples whose first instant is ``t_first``,
    ``time_shift(sv, t_first)`` gives phases relative to t = 0.
    """
    return sv.with_bins(sv.bins * np.exp(-2j * np.pi * sv.freqs * seconds))


def _weights(sv):
    w = np.full(sv.bins.size, 2.0)
    w[0] = 1.0
    if sv.n_time % 2 == 0 and sv.n_time // 2 == sv.bins.size - 1:
        w[-1] = 1.0
    return w


def energy(sv: SpectrumView) -> float:
    """Time-domain energy ``sum(x**2)`` recovered from the bins (Parseval)."""
    return float(np.sum(_weights(sv) * np.abs(sv.bins) ** 2) / sv.n_time)


def amplitudes(sv: SpectrumView, n_samples=None) -> np.ndarray:
    """Per-bin sinusoid amplitude.

    ``n_samples`` is the number of nonzero samples behind the transform; pass
    it when the series was zero-padded.
    """
    n = sv.n_time if n_samples is None else n_samples
    return _weights(sv) * np.abs(sv.bins) / n


def peak_frequencies(sv: SpectrumView, count, min_separation_hz=0.0):
    """Frequencies of the ``count`` largest local maxima of ``|bins|`` (DC excluded)."""
    mag = np.abs(sv.bins)
    idx = np.arange(1, mag.size)
    left = np.r_[mag[0], mag[:-1]][1:]
    right = np.r_[mag[1:], 0.0][1:]
    cand = idx[(mag[1:] >= left) & (mag[1:] >= right) & (mag[1:] > 0)]
    cand = cand[np.argsort(mag[cand])[::-1]]
    picked = []
    for k in cand:
        f = float(k * sv.df)
        if all(abs(f - g) > min_separation_hz for g in picked):
            picked.append(f)
        if len(picked) == count:
            break
    return picked
