"""SVG renderings of CLI results. The CSV files are the source of truth."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed element ids and no timestamp, so reruns produce identical files
plt.rcParams["svg.hashsalt"] = "flickertsr"


def _svg(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def overlay(t_truth, truth, t_base, base, t_tsr, tsr, title="") -> bytes:
    """Original signal, plain-camera reconstruction and TSR reconstruction."""
    fig, ax = plt.subplots(figsize=(9, 3.5))
    ax.plot(t_truth, truth, lw=1, label="original")
    ax.step(t_base, base, where="mid", lw=1, label="camera (no TSR)")
    ax.plot(t_tsr, tsr, lw=1, marker=".", ms=3, label="TSR")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("intensity")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return _svg(fig)


def spectra(curves, title="", xlabel="frequency [Hz]") -> bytes:
    """``curves`` is a list of (label, freqs, magnitudes)."""
    fig, axes = plt.subplots(len(curves), 1, figsize=(9, 2.2 * len(curves)), sharex=True, squeeze=False)
    for ax, (label, f, mag) in zip(axes[:, 0], curves):
        ax.plot(f, mag, lw=1)
        ax.set_ylabel(label, fontsize=8)
    axes[-1, 0].set_xlabel(xlabel)
    axes[0, 0].set_title(title)
    fig.tight_layout()
    return _svg(fig)


def profiles(curves, title="", ylabel="mean L2 error") -> bytes:
    """``curves`` is a list of (label, bin_centres, values)."""
    fig, ax = plt.subplots(figsize=(8, 4))
    for label, x, y in curves:
        ax.plot(x, y, lw=1.2, label=label)
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    return _svg(fig)


def alpha_curves(alphas, ratio, bound, cosine) -> bytes:
    a = np.asarray(alphas, float)
    ok = np.isfinite(a)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.semilogx(a[ok], np.asarray(ratio)[ok], "o-", label="measured")
    ax1.semilogx(a[ok], np.asarray(bound)[ok], "--", label="bound")
    ax1.set_xlabel("alpha")
    ax1.set_ylabel("SNR ratio (flicker / no flicker)")
    ax1.legend(fontsize=8)
    ax2.semilogx(a[ok], np.asarray(cosine)[ok], "o-")
    ax2.set_xlabel("alpha")
    ax2.set_ylabel("cosine error [rad]")
    fig.tight_layout()
    return _svg(fig)
