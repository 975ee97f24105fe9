"""One test per acceptance criterion; the summary hook prints PASS/FAIL lines."""

import math
import time

import numpy as np
import pytest

from flickertsr import analysis, cli, scanning, signals, solver
from flickertsr.analysis import CHOSEN_PATTERNS, EnsembleSpec
from flickertsr.sensor import (
    CameraConfig,
    FlickerPattern,
    IlluminationModel,
    capture_frame,
    fine_grid_rate,
)

FPS = 10.0


def _random_full_rank(rng, n, m):
    while True:
        s = rng.integers(0, 2, size=(n, m))
        if np.linalg.matrix_rank(s) == m:
            return s.astype(float)


def _kkt(m, s, c):
    n, k = s.shape
    a = np.block([[2 * m, s], [s.T, np.zeros((k, k))]])
    return np.linalg.solve(a, np.r_[np.zeros(n), c])[:n]


def _run(tmp_path, *argv):
    code = cli.main(list(argv) + ["--out", str(tmp_path)])
    assert code == 0
    return tmp_path


def _csv(path):
    return np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding=None)


# ---------------------------------------------------------------- 1

def test_c01_closed_form_matches_kkt_oracle(report):
    rng = np.random.default_rng(20240101)
    t0 = time.perf_counter()
    worst_con = worst_kkt = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, n + 1))
        s = _random_full_rank(rng, n, m)
        c = rng.normal(size=m)
        i = solver.reconstruct(c, FlickerPattern(s))
        worst_con = max(worst_con, np.linalg.norm(s.T @ i - c) / np.linalg.norm(c))
        ref = _kkt(np.asarray(solver.build_m_temporal(n)), s, c)
        worst_kkt = max(worst_kkt, np.linalg.norm(i - ref) / np.linalg.norm(ref))
    dt = time.perf_counter() - t0
    report(f"max constraint residual {worst_con:.2e}, max oracle diff {worst_kkt:.2e}, {dt:.2f} s")
    assert worst_con <= 1e-9
    assert worst_kkt <= 1e-9
    assert dt < 10


# ---------------------------------------------------------------- 2

def test_c02_returned_solution_is_minimal(report):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    violations = 0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, n + 1))
        s = _random_full_rank(rng, n, m)
        mm = np.asarray(solver.build_m_temporal(n))
        i = solver.reconstruct(rng.normal(size=m), FlickerPattern(s))
        base = i @ mm @ i
        _, _, vt = np.linalg.svd(s.T)
        null = vt[m:]
        for _ in range(50):
            v = rng.normal(size=null.shape[0]) @ null if null.size else np.zeros(n)
            assert np.allclose(s.T @ v, 0, atol=1e-10)
            if (i + v) @ mm @ (i + v) < base - 1e-9 * max(1.0, base):
                violations += 1
    dt = time.perf_counter() - t0
    report(f"{violations} violations in 10000 perturbations, {dt:.2f} s")
    assert violations == 0
    assert dt < 30


# ---------------------------------------------------------------- 3

def test_c03_nyquist_extension_n4(tmp_path, report):
    out = _run(tmp_path, "reconstruct", "--preset", "fig7-n4")
    spec = _csv(out / "spectrum.csv")
    df = spec["freq_hz"][1]
    sv = signals.SpectrumView(spec["amplitude"] * np.exp(1j * spec["phase_rad"]), df)
    peaks = sorted(float(f) for f in signals.peak_frequencies(sv, 3))
    base = _csv(out / "baseline_spectrum.csv")
    bamp = base["amplitude"]
    bpeaks = sorted(float(f) for f in base["freq_hz"][np.argsort(bamp)[::-1][:3]])
    errs = {r["series"]: r["l2"] for r in _csv(out / "errors.csv")}
    ratio = errs["tsr"] / errs["baseline"]
    report(f"TSR peaks {peaks}, baseline peaks {bpeaks}, L2 ratio {ratio:.3f} (target < 0.25)")
    for want, got in zip([1.0, 6.0, 11.0], peaks):
        assert abs(got - want) <= df + 1e-9
    # 6 Hz folds to 4 Hz and 11 Hz to 1 Hz on the plain camera
    assert base["freq_hz"].max() <= 5.0 + 1e-9
    assert bamp[int(round(4.0 / base["freq_hz"][1]))] > 0.3
    assert ratio < 0.25


# ---------------------------------------------------------------- 4

def test_c04_band_winners_by_n(report):
    t0 = time.perf_counter()
    spec = EnsembleSpec(n_trials=1000, freq_range_hz=(5.0, 30.0), seed=0)
    profiles = [analysis.evaluate_pattern(p, spec, CameraConfig(FPS, n)) for n, p in sorted(CHOSEN_PATTERNS.items())]
    bands = [(5, 15), (15, 20), (20, 25), (25, 30)]
    rows = analysis.band_winner_table(profiles, FPS, bands)
    dt = time.perf_counter() - t0
    winners = [r.n_factor for r in rows]
    errs = np.array([r.error for r in rows])
    ratios = errs / errs[0]
    target = np.array([1, 3.22, 4.5, 5.8])
    report(f"winners {winners}, errors {np.round(errs, 3).tolist()}, ratios {np.round(ratios, 2).tolist()}, "
           f"{dt:.1f} s")
    assert winners == [3, 4, 5, 6]
    assert np.all(np.diff(errs) > 0)
    assert np.all(ratios / target <= 2) and np.all(ratios / target >= 0.5)
    assert dt < 300


# ---------------------------------------------------------------- 5

def test_c05_random_per_frame_degrades(report):
    base = analysis.evaluate_baseline(EnsembleSpec(1000, (5.0, 20.0)), FPS)
    rnd = analysis.evaluate_pattern(CHOSEN_PATTERNS[4], EnsembleSpec(1000, (5.0, 20.0)), CameraConfig(FPS, 4),
                                    "random_per_frame")
    r_rand = analysis.band_error(rnd, 5, 20) / analysis.band_error(base, 5, 20)
    spec15 = EnsembleSpec(1000, (5.0, 15.0))
    ident = analysis.evaluate_pattern(CHOSEN_PATTERNS[3], spec15, CameraConfig(FPS, 3))
    base15 = analysis.evaluate_baseline(spec15, FPS)
    r_id = analysis.band_error(ident, 5, 15) / analysis.band_error(base15, 5, 15)
    report(f"random-per-frame/baseline {r_rand:.3f} (target >= 0.8), identity/baseline {r_id:.3f} (target < 0.3)")
    assert r_id < 0.3
    assert r_rand >= 0.8


# ---------------------------------------------------------------- 6

FUNDAMENTALS = (12.0, 19.0, 23.0, 27.0)


def _present(sv, f):
    amp = signals.amplitudes(sv)
    k = int(round(f / sv.df))
    lo, hi = max(k - 1, 1), min(k + 2, amp.size)
    j = lo + int(np.argmax(amp[lo:hi]))
    local = amp[j] >= amp[j - 1] and (j + 1 >= amp.size or amp[j] >= amp[j + 1])
    return local and amp[j] > 0.1 * amp.max(), amp[j]


def test_c06_scanning_anti_aliasing(report):
    rate = fine_grid_rate(27, FPS, (3, 4, 5, 6))
    sig = signals.FineSignal(
        np.sum([signals.gen_square_wave(f, 10.0, rate).samples for f in FUNDAMENTALS], axis=0), rate)
    windows = scanning.run_scan(sig, FPS, [3, 4, 5, 6], CHOSEN_PATTERNS)
    st = scanning.stitch(windows, FPS)
    aa = scanning.anti_alias(st, [3, 4, 5, 6], FPS)
    pre, post = st.combined, aa.combined
    df = pre.df
    for f in FUNDAMENTALS:
        ok, _ = _present(pre, f)
        assert ok, f"{f} Hz missing before anti-aliasing"
        band = st.band_of(f)
        assert band.f_lo <= f < band.f_hi and band.n_factor == [3, 4, 5, 6][FUNDAMENTALS.index(f)]
    for f in FUNDAMENTALS:
        ok, _ = _present(post, f)
        assert ok, f"{f} Hz missing after anti-aliasing"

    fund_bins = np.zeros(pre.bins.size, bool)
    for f in FUNDAMENTALS:
        k = int(round(f / df))
        fund_bins[k - 1:k + 2] = True
    e_pre = float(np.sum(np.abs(pre.bins[~fund_bins]) ** 2))
    e_post = float(np.sum(np.abs(post.bins[~fund_bins]) ** 2))

    # ghosts: each fundamental mirrored about the lower edge of its band, unless
    # the mirror lands on another fundamental
    ghosts = {}
    for f in FUNDAMENTALS:
        edge = st.band_of(f).f_lo
        g = 2 * edge - f
        if edge > 0 and all(abs(g - h) > 2 * df for h in FUNDAMENTALS):
            ghosts[f] = g
    amp_pre, amp_post = signals.amplitudes(pre), signals.amplitudes(post)
    drops = {}
    for f, g in ghosts.items():
        k = int(round(g / df))
        a0, a1 = amp_pre[k], amp_post[k]
        drops[g] = math.inf if a1 == 0 else 20 * math.log10(a0 / a1)
    report(f"non-fundamental energy {e_pre:.1f} -> {e_post:.1f}; ghost drops [dB] "
           + ", ".join(f"{g:g} Hz: {d:.1f}" for g, d in drops.items()))
    assert ghosts
    assert e_post < e_pre
    assert all(d >= 3.0 for d in drops.values())


# ---------------------------------------------------------------- 7

def test_c07_environment_error_law(report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for n, pat in sorted(CHOSEN_PATTERNS.items()):
        for _ in range(20):
            i = rng.uniform(0.1, 2.0, size=n)
            dark = solver.reconstruct(capture_frame(i, pat, IlluminationModel.from_alpha(math.inf)), pat)
            for alpha in (1.0, 2.0, 10.0):
                lit = solver.reconstruct(capture_frame(i, pat, IlluminationModel.from_alpha(alpha)), pat)
                rel = np.abs((lit - dark) - dark / alpha) / np.abs(dark / alpha)
                worst = max(worst, float(rel.max()))
    report(f"max relative deviation {worst:.2e}")
    assert worst <= 1e-9


# ---------------------------------------------------------------- 8

def test_c08_snr_bound(report):
    spec = EnsembleSpec(200, (5.0, 15.0), 5.0, 0.5)
    rows = analysis.alpha_sweep([0.5, 1.0, 2.0, 10.0], CHOSEN_PATTERNS[3], spec, CameraConfig(FPS, 3),
                                snr_trials=10_000)
    cos = [r.mean_cosine for r in rows]
    report("alpha: ratio/bound " + ", ".join(f"{r.alpha:g}: {r.snr_ratio:.3f}/{r.bound:.3f}" for r in rows)
           + "; cosine " + ", ".join(f"{c:.3f}" for c in cos))
    assert all(b < a for a, b in zip(cos, cos[1:])), "cosine error not decreasing in alpha"
    for r in rows:
        assert r.snr_ratio >= r.bound - 3 * r.snr_ratio_se, f"alpha={r.alpha}"


# ---------------------------------------------------------------- 9

def test_c09_metric_identities(report):
    t = np.arange(1000) / 1000.0
    f = np.sin(2 * np.pi * 3 * t) + 0.2
    for k in (0.5, 1.0, 7.0):
        assert analysis.cosine_error(f, k * f) == pytest.approx(0.0, abs=1e-7)
    ortho = analysis.cosine_error(np.sin(2 * np.pi * 2 * t), np.cos(2 * np.pi * 2 * t))
    assert abs(ortho - math.pi / 2) <= 1e-9
    assert analysis.l2_error(f, f) == 0.0
    sig = signals.FineSignal(f, 1000.0)
    assert analysis.l2_error(sig, sig) == 0.0
    report(f"orthogonal angle error {abs(ortho - math.pi / 2):.1e}")


# ---------------------------------------------------------------- 10

RERUNS = [
    ("simulate", "fig7-n4"),
    ("reconstruct", "fig7-n3"),
    ("scan", "fig9"),
]


def test_c10_reruns_are_byte_identical(tmp_path, report):
    cfg = tmp_path / "small.yaml"
    cfg.write_text("analysis: {trials: 50}\nsnr: {trials: 500, ensemble_trials: 20}\n")
    runs = RERUNS + [("patterns", "fig6"), ("snr", "fig13")]
    compared = 0
    for cmd, preset in runs:
        extra = ["--config", str(cfg)] if cmd in ("patterns", "snr") else []
        a = _run(tmp_path / f"{preset}-a", cmd, "--preset", preset, "--seed", "11", *extra)
        b = _run(tmp_path / f"{preset}-b", cmd, "--preset", preset, "--seed", "11", *extra)
        names = sorted(p.name for p in a.iterdir() if p.suffix == ".csv")
        assert names == sorted(p.name for p in b.iterdir() if p.suffix == ".csv")
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes(), f"{preset}/{name}"
            compared += 1
    report(f"{compared} CSV files compared across {len(runs)} presets")
