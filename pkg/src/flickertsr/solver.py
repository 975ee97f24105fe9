"""
Closed-form minimum-smoothness reconstruction.

Given channel values C (normalised by the per-channel gammas) and the code
matrix S, the sub-step intensities are

    I = M^-1 S (S^T M^-1 S)^-1 C

i.e. the minimiser of ``I^T M I`` subject to ``S^T I = C``. The temporal M is
the tridiagonal 4 / -2 matrix and is positive definite, so the solve goes
through a banded Cholesky factorisation. The 5-pixel spatial M need not be
definite and is solved with a dense LU factorisation instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from .sensor import CameraConfig, ChannelFrame, FlickerPattern

__all__ = [
    "SmoothnessMatrix",
    "ReconstructedTrace",
    "SpatialPatch",
    "build_m_temporal",
    "build_m_spatial",
    "reconstruction_operator",
    "reconstruct",
    "reconstruct_channels",
    "reconstruct_spatial",
    "reconstruct_sequence",
]

N_PIXELS = 5
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class SmoothnessMatrix:
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("entries must be square")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class ReconstructedTrace:
    """Recovered sub-step intensities, N per frame, concatenated in time.

    Sample k represents the sub-step centred at ``t0 + (k + 0.5) / sample_rate``,
    where ``t0`` is the start of the first exposure.
    """

    values: np.ndarray
    n_factor: int
    fps: float
    t0: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a nonempty 1-D array")
        if v.size % self.n_factor:
            raise ValueError(f"length {v.size} not divisible by n_factor {self.n_factor}")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @property
    def sample_rate(self) -> float:
        return self.fps * self.n_factor

    @property
    def n_frames(self) -> int:
        return self.values.size // self.n_factor

    @property
    def duration(self) -> float:
        return self.values.size / self.sample_rate

    def times(self) -> np.ndarray:
        return self.t0 + (np.arange(self.values.size) + 0.5) / self.sample_rate


@dataclass(frozen=True)
class SpatialPatch:
    """A pixel and its 4 nearest neighbours, centre first."""

    frames: tuple
    w_t: float = 3.0
    w_s: float = 1.0

    def __post_init__(self):
        frames = tuple(self.frames)
        if len(frames) != N_PIXELS:
            raise ValueError(f"a patch holds exactly {N_PIXELS} pixels, got {len(frames)}")
        if not self.w_t > 0:
            raise ValueError(f"w_t must be > 0, got {self.w_t}")
        if self.w_s < 0:
            raise ValueError(f"w_s must be >= 0, got {self.w_s}")
        object.__setattr__(self, "frames", frames)


def build_m_temporal(n: int) -> SmoothnessMatrix:
    """Tridiagonal matrix with 4 on the diagonal and -2 beside it."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return SmoothnessMatrix(4 * np.eye(n) - 2 * np.eye(n, k=1) - 2 * np.eye(n, k=-1))


def build_m_spatial(n: int, w_t: float, w_s: float, nearest_block_only: bool = False) -> SmoothnessMatrix:
    """Smoothness matrix for the 5-pixel patch, size 5n x 5n.

    Unknowns are ordered pixel-major (index ``p * n + k`` is sub-step k of
    pixel p). Entries:

    * ``2 w_s + 2 w_t`` on the diagonal,
    * ``-2 w_t`` for ``|i - j| = 1`` inside one pixel's block,
    * ``-2 w_s`` for ``|i - j| mod 5 = 0``, ``i != j``.

    ``nearest_block_only`` keeps the spatial coupling only for ``|i - j| = 5``.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not w_t > 0:
        raise ValueError(f"w_t must be > 0, got {w_t}")
    if w_s < 0:
        raise ValueError(f"w_s must be >= 0, got {w_s}")
    dim = N_PIXELS * n
    i, j = np.indices((dim, dim))
    d = np.abs(i - j)
    m = np.zeros((dim, dim))
    spatial = (d == N_PIXELS) if nearest_block_only else (d % N_PIXELS == 0)
    m[spatial] = -2 * w_s
    m[(d == 1) & (i // n == j // n)] = -2 * w_t
    m[d == 0] = 2 * w_s + 2 * w_t
    return SmoothnessMatrix(m)


def _check_rank(s):
    if np.linalg.matrix_rank(s) < s.shape[1]:
        raise ValueError("pattern not full rank")


def _temporal_banded(n):
    # upper form for solveh_banded: row 0 = superdiagonal, row 1 = diagonal
    ab = np.empty((2, n))
    ab[0] = -2.0
    ab[1] = 4.0
    return ab


def reconstruction_operator(pattern: FlickerPattern | np.ndarray) -> np.ndarray:
    """``K = M^-1 S (S^T M^-1 S)^-1`` so that ``I = K @ C``; shape (N, M)."""
    s = pattern.s_matrix if isinstance(pattern, FlickerPattern) else np.asarray(pattern, float)
    n = s.shape[0]
    if n < 2:
        raise ValueError("need at least 2 sub-steps")
    _check_rank(s)
    m_inv_s = linalg.solveh_banded(_temporal_banded(n), s)
    gram = s.T @ m_inv_s
    try:
        cf = linalg.cho_factor(gram)
    except linalg.LinAlgError as exc:  # pragma: no cover - PD M and full-rank S
        raise AssertionError("S^T M^-1 S is singular") from exc
    return linalg.cho_solve(cf, m_inv_s.T).T


def _normalise(c, gammas, m):
    g = np.ones(m) if gammas is None else np.asarray(gammas, dtype=float)
    if g.shape != (m,):
        raise ValueError(f"expected {m} gammas, got {g.size}")
    if (g <= 0).any():
        raise ValueError("gammas must be > 0")
    return np.asarray(c, dtype=float) / g


def reconstruct(frame: ChannelFrame | np.ndarray, pattern: FlickerPattern, gammas=None) -> np.ndarray:
    """Sub-step intensities for one exposure (length N)."""
    c = frame.c_values if isinstance(frame, ChannelFrame) else frame
    c = _normalise(c, gammas, pattern.m)
    return reconstruction_operator(pattern) @ c


def reconstruct_channels(c: np.ndarray, pattern: FlickerPattern, gammas=None,
                         scale: float = 1.0) -> np.ndarray:
    """Reconstruct many exposures at once: (F, M) channel values -> (F, N).

    ``scale`` divides the result, e.g. ``sensor.channel_scale`` to get back to
    scene intensity units.
    """
    c = _normalise(np.atleast_2d(c), gammas, pattern.m)
    return c @ reconstruction_operator(pattern).T / scale


def reconstruct_spatial(patch: SpatialPatch, pattern: FlickerPattern, gammas=None,
                        nearest_block_only: bool = False) -> np.ndarray:
    """Jointly reconstruct the 5 pixels of ``patch``; returns shape (5, N)."""
    s = pattern.s_matrix
    n, m = s.shape
    _check_rank(s)
    c = np.concatenate([_normalise(f.c_values, gammas, m) for f in patch.frames])
    big_m = build_m_spatial(n, patch.w_t, patch.w_s, nearest_block_only).entries
    big_s = linalg.block_diag(*([s] * N_PIXELS))
    try:
        if np.linalg.cond(big_m) > _COND_LIMIT:
            raise linalg.LinAlgError("smoothness matrix is singular for these weights")
        m_inv_s = linalg.lu_solve(linalg.lu_factor(big_m), big_s)
        gram = big_s.T @ m_inv_s
        if np.linalg.cond(gram) > _COND_LIMIT:
            raise linalg.LinAlgError("constraint system is singular for these weights")
        lam = linalg.solve(gram, c, assume_a="sym")
    except (linalg.LinAlgError, ValueError) as exc:
        raise ValueError(f"spatial system is singular: {exc}") from exc
    return (m_inv_s @ lam).reshape(N_PIXELS, n)


def reconstruct_sequence(frames: Sequence[ChannelFrame], pattern: FlickerPattern, gammas,
                         cam: CameraConfig, t0: float = 0.0, scale: float = 1.0) -> ReconstructedTrace:
    """Reconstruct every frame and concatenate into one trace at ``fps * N``.

    ``scale`` divides the result (see :func:`flickertsr.sensor.channel_scale`).
    """
    if len(frames) == 0:
        raise ValueError("no frames")
    if pattern.n != cam.n_factor:
        raise ValueError(f"pattern has {pattern.n} sub-steps, camera N={cam.n_factor}")
    k = reconstruction_operator(pattern)
    out = np.empty((len(frames), pattern.n))
    for row, frame in enumerate(frames):
        try:
            out[row] = k @ _normalise(frame.c_values, gammas, pattern.m)
        except ValueError as exc:
            raise ValueError(f"frame {frame.frame_index}: {exc}") from exc
    return ReconstructedTrace(out.ravel() / scale, cam.n_factor, cam.fps, t0)
