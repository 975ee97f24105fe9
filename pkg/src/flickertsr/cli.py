"""
Command-line front end.

    python -m flickertsr simulate    --preset fig7-n4 --out run1
    python -m flickertsr reconstruct --preset fig7-n4 --out run1 --format csv+svg
    python -m flickertsr scan        --preset fig9 --aa-mode both
    python -m flickertsr patterns    --preset fig5
    python -m flickertsr snr         --preset fig13

Each command computes everything in memory and only then writes its output
directory, so a failing run leaves nothing behind. Errors are reported as a
single ``error: ...`` line on stderr with a nonzero exit code (2 for
configuration problems, 1 otherwise).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, config, scanning, signals
from .config import ConfigError, resolve_pattern
from .sensor import (
    CameraConfig,
    ChannelFrame,
    IlluminationModel,
    NoiseModel,
    channel_scale,
    fine_grid_rate,
    simulate_sequence,
)
from .solver import SpatialPatch, reconstruct_sequence, reconstruct_spatial

# ---------------------------------------------------------------- CSV


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue().encode()


def _spectrum_rows(sv, extra=None):
    amp = signals.amplitudes(sv)
    ph = np.angle(sv.bins)
    for k, f in enumerate(sv.freqs):
        row = [f, amp[k], ph[k]]
        if extra is not None:
            row.append(extra(f))
        yield row


# ---------------------------------------------------------------- config pieces


def _camera(cfg, n=None):
    c = cfg["camera"]
    return CameraConfig(c["fps"], c["n"] if n is None else n, c["exposure_fill"])


def _illum(cfg, m):
    il = cfg["illumination"]
    gammas = il["gammas"]
    if len(gammas) != m:
        raise ConfigError(f"illumination.gammas has {len(gammas)} entries for {m} channels")
    return IlluminationModel.from_alpha(il["alpha"], il["flicker_intensity"], gammas, il["env_model"])


def _noise(cfg):
    nz = cfg["noise"]
    return NoiseModel(nz["dark"], nz["read"], nz["shot"])


def _pattern(ref, n=None, where="pattern"):
    if ref is None:
        raise ConfigError(f"{where} is required for this command")
    p = resolve_pattern(ref)
    if n is not None and p.n != n:
        raise ConfigError(f"{where} has {p.n} sub-steps but camera.n is {n}")
    return p


def _signal(cfg, n_values):
    s = cfg["signal"]
    fps = cfg["camera"]["fps"]
    if s["type"] == "sines":
        comps = s.get("components")
        if not comps:
            raise ConfigError("signal.components is required for type sines")
        fmax = max(f for _, f, _ in comps)
    else:
        freqs = s.get("freqs")
        if not freqs:
            raise ConfigError("signal.freqs is required for type squares")
        fmax = max(freqs)
    rate = s.get("grid_rate") or fine_grid_rate(fmax, fps, n_values)
    if s["type"] == "sines":
        return signals.gen_sinusoid_mix(comps, s["duration"], rate)
    parts = [signals.gen_square_wave(f, s["duration"], rate).samples for f in freqs]
    return signals.FineSignal(np.sum(parts, axis=0), rate)


# ---------------------------------------------------------------- commands


def cmd_simulate(cfg, args):
    cam = _camera(cfg)
    pattern = _pattern(cfg.get("pattern"), cam.n_factor)
    sig = _signal(cfg, (cam.n_factor,))
    frames = simulate_sequence(sig, cam, pattern, _illum(cfg, pattern.m), _noise(cfg), cfg["seed"])
    out = {
        "frames.csv": to_csv(["frame_index"] + [f"C_{k + 1}" for k in range(pattern.m)],
                             ([f.frame_index, *f.c_values] for f in frames)),
        "truth.csv": to_csv(["time_s", "intensity"], zip(sig.times(), sig.samples)),
    }
    return out


def _read_frames(path, m):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ValueError(f"cannot read frames file {path}: {exc.strerror}") from None
    if not rows or rows[0][:1] != ["frame_index"]:
        raise ValueError(f"{path}: expected header frame_index,C_1..C_M")
    if len(rows[0]) - 1 != m:
        raise ValueError(f"{path}: {len(rows[0]) - 1} channels but the pattern has {m}")
    try:
        return [ChannelFrame([float(v) for v in r[1:]], int(r[0])) for r in rows[1:] if r]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _read_patch(path, m):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ValueError(f"cannot read patch file {path}: {exc.strerror}") from None
    if not rows or rows[0][:2] != ["frame_index", "pixel"] or len(rows[0]) - 2 != m:
        raise ValueError(f"{path}: expected header frame_index,pixel,C_1..C_{m}")
    by_frame = {}
    for r in rows[1:]:
        if r:
            by_frame.setdefault(int(r[0]), {})[int(r[1])] = ChannelFrame([float(v) for v in r[2:]], int(r[0]))
    for f, pix in by_frame.items():
        if sorted(pix) != list(range(5)):
            raise ValueError(f"{path}: frame {f} must list pixels 0-4")
    return by_frame


def _peaks_csv(sv, count=6):
    amp = signals.amplitudes(sv)
    peaks = signals.peak_frequencies(sv, count)
    return to_csv(["rank", "freq_hz", "amplitude"],
                  ((i + 1, f, amp[int(round(f / sv.df))]) for i, f in enumerate(peaks)))


def cmd_reconstruct(cfg, args):
    cam = _camera(cfg)
    pattern = _pattern(cfg.get("pattern"), cam.n_factor)
    pattern.validate()
    illum = _illum(cfg, pattern.m)
    gammas = illum.gammas
    scale = channel_scale(cam, illum)
    out = {}
    if args.spatial:
        sp = cfg["spatial"]
        patches = _read_patch(args.spatial, pattern.m)
        rows = []
        for f in sorted(patches):
            patch = SpatialPatch(tuple(patches[f][p] for p in range(5)), sp["w_t"], sp["w_s"])
            rec = reconstruct_spatial(patch, pattern, gammas, sp["nearest_block_only"]) / scale
            for k in range(cam.n_factor):
                rows.append([(f * cam.n_factor + k + 0.5) / cam.trace_rate, *rec[:, k]])
        out["spatial_trace.csv"] = to_csv(["time_s"] + [f"pixel_{p}" for p in range(5)], rows)
        return out

    sig = None
    if args.frames:
        frames = _read_frames(args.frames, pattern.m)
    else:
        sig = _signal(cfg, (cam.n_factor,))
        frames = simulate_sequence(sig, cam, pattern, illum, _noise(cfg), cfg["seed"])
    trace = reconstruct_sequence(frames, pattern, gammas, cam, scale=scale)
    sv = signals.spectrum(trace)
    out["trace.csv"] = to_csv(["time_s", "intensity"], zip(trace.times(), trace.values))
    out["spectrum.csv"] = to_csv(["freq_hz", "amplitude", "phase_rad"], _spectrum_rows(sv))
    out["peaks.csv"] = _peaks_csv(sv)
    if sig is not None:
        base = analysis.baseline_trace(sig, cam.fps)
        # compare on whole exposures only
        used = signals.FineSignal(sig.samples[: trace.n_frames * round(sig.grid_rate / cam.fps)],
                                  sig.grid_rate)
        y_tsr = analysis.render_trace(trace, sig.grid_rate)
        y_base = analysis.render_trace(base, sig.grid_rate)
        out["baseline.csv"] = to_csv(["time_s", "intensity"], zip(base.times(), base.values))
        bsv = signals.spectrum(base)
        out["baseline_spectrum.csv"] = to_csv(["freq_hz", "amplitude", "phase_rad"], _spectrum_rows(bsv))
        out["errors.csv"] = to_csv(
            ["series", "l2", "cosine_rad"],
            [["tsr", analysis.l2_error(used, y_tsr), analysis.cosine_error(used, y_tsr)],
             ["baseline", analysis.l2_error(used, y_base), analysis.cosine_error(used, y_base)]],
        )
        if args.format == "csv+svg":
            from . import plots

            out["overlay.svg"] = plots.overlay(used.times(), used.samples, base.times(), base.values,
                                               trace.times(), trace.values, f"N = {cam.n_factor}")
            out["spectrum.svg"] = plots.spectra([
                ("original", *_amp(signals.spectrum(used))),
                ("camera", *_amp(bsv)),
                ("TSR", *_amp(sv)),
            ])
    return out


def _amp(sv, f_max=None):
    return sv.freqs, signals.amplitudes(sv)


def cmd_scan(cfg, args):
    sc = cfg["scanning"]
    seq = sc.get("n_sequence")
    if not seq:
        raise ConfigError("scanning.n_sequence is required for scan")
    fps = cfg["camera"]["fps"]
    refs = sc.get("patterns", {})
    pats = {}
    for n in sorted(set(seq)):
        pats[n] = _pattern(refs.get(n, f"chosen/{n}" if n in analysis.CHOSEN_PATTERNS else None), n,
                           f"scanning.patterns[{n}]")
        pats[n].validate()
    m = next(iter(pats.values())).m
    illum = _illum(cfg, m)
    sig = _signal(cfg, tuple(seq))
    windows = scanning.run_scan(sig, fps, seq, pats, illum, _noise(cfg), cfg["seed"])
    st = scanning.stitch(windows, fps, sc["average"])
    mode = args.aa_mode or sc["aa_mode"]
    modes = ["composition", "literal"] if mode == "both" else [mode]
    thr = sc["threshold"]

    def floor(sv):
        return signals.threshold_noise_floor(sv, thr) if thr > 0 else sv

    def band_id(f):
        for i, b in enumerate(st.bands):
            if b.f_lo - 1e-9 <= f < b.f_hi - 1e-9:
                return i
        return -1

    out = {
        "windows.csv": to_csv(["window", "n_factor", "start_s", "end_s"],
                              ([i, w.n_factor, w.start_s, w.end_s] for i, w in enumerate(windows))),
        "window_spectra.csv": to_csv(
            ["window", "freq_hz", "amplitude", "phase_rad"],
            ([i, *r] for i, w in enumerate(windows) for r in _spectrum_rows(w.spectrum))),
        "bands.csv": to_csv(["band_id", "f_lo", "f_hi", "n_factor", "sources"],
                            ([i, b.f_lo, b.f_hi, b.n_factor, ";".join(map(str, b.sources))]
                             for i, b in enumerate(st.bands))),
        "band_energies.csv": to_csv(["window", "n_factor", "f_lo", "f_hi", "energy"],
                                    scanning.band_energies(windows, fps)),
        "stitched.csv": to_csv(["freq_hz", "amplitude", "phase_rad", "band_id"],
                               _spectrum_rows(floor(st.combined), band_id)),
    }
    curves = [("stitched", *_amp(floor(st.combined)))]
    for md in modes:
        aa = scanning.anti_alias(st, seq, fps, mode=md, domain=sc["aa_domain"])
        name = "antialiased.csv" if len(modes) == 1 else f"antialiased_{md}.csv"
        out[name] = to_csv(["freq_hz", "amplitude", "phase_rad", "band_id"],
                           _spectrum_rows(floor(aa.combined), band_id))
        curves.append((f"after AA ({md})", *_amp(floor(aa.combined))))
    if args.format == "csv+svg":
        from . import plots

        win_curves = [(f"window {i} N={w.n_factor}", *_amp(w.spectrum)) for i, w in enumerate(windows)]
        out["window_spectra.svg"] = plots.spectra(win_curves)
        out["scan.svg"] = plots.spectra(curves)
    return out


def _ensemble(cfg):
    a = cfg["analysis"]
    return analysis.EnsembleSpec(a["trials"], tuple(a["freq_range"]), a["duration"], a["amplitude"],
                                 cfg["seed"], a["bin_hz"])


def _candidates(cfg):
    a = cfg["analysis"]
    if "enumerate" in a:
        e = a["enumerate"]
        n, m = e.get("n"), e.get("m", 3)
        if n is None:
            raise ConfigError("analysis.enumerate.n is required")
        if e.get("sample", 0):
            return analysis.sample_patterns(n, m, e["sample"], cfg["seed"])
        return analysis.enumerate_patterns(n, m)
    refs = a.get("patterns")
    if not refs:
        raise ConfigError("analysis.patterns or analysis.enumerate is required for patterns")
    return [resolve_pattern(r) for r in refs]


def _vec(p, k):
    return "".join(str(int(v)) for v in p.s_matrix[:, k])


def cmd_patterns(cfg, args):
    a = cfg["analysis"]
    spec = _ensemble(cfg)
    fps = cfg["camera"]["fps"]
    cands = _candidates(cfg)
    cand_rows, profiles = [], []
    for p in cands:
        status = "ok"
        try:
            p.validate()
        except ValueError as exc:
            status = f"rejected: {exc}"
        cand_rows.append([p.pattern_id, p.n, p.m, " ".join(f"{nm}={_vec(p, k)}" for k, nm in enumerate(p.channel_names)),
                          status])
        if status == "ok":
            profiles.append(analysis.evaluate_pattern(p, spec, CameraConfig(fps, p.n), a["mode"],
                                                      render=a["render"]))
    if not profiles:
        raise ValueError("no valid candidate patterns")
    all_profiles = list(profiles)
    if a["baseline"]:
        all_profiles.append(analysis.evaluate_baseline(spec, fps, render=a["render"]))

    def prof_rows():
        for pr in all_profiles:
            for (lo, hi), c, l2, cs in zip(pr.freq_bins, pr.counts, pr.mean_l2, pr.mean_cosine):
                yield [pr.pattern_id, pr.n_factor, lo, hi, c, l2, cs]

    winners = analysis.band_winner_table(profiles, fps)
    per_n = []
    for n in sorted({p.n_factor for p in profiles}):
        group = [p for p in profiles if p.n_factor == n]
        per_n.extend(analysis.band_winner_table(group, fps, [((n - 1) * fps / 2, n * fps / 2)]))
    win_cols = ["f_lo", "f_hi", "n_factor", "pattern_id", "mean_l2"]
    out = {
        "candidates.csv": to_csv(["pattern_id", "n", "m", "channels", "status"], cand_rows),
        "profiles.csv": to_csv(["pattern_id", "n_factor", "f_lo", "f_hi", "count", "mean_l2",
                                "mean_cosine_rad"], prof_rows()),
        "winners.csv": to_csv(win_cols, ([w.f_lo, w.f_hi, w.n_factor, w.pattern_id, w.error] for w in winners)),
        "winners_per_n.csv": to_csv(win_cols, ([w.f_lo, w.f_hi, w.n_factor, w.pattern_id, w.error]
                                               for w in per_n)),
    }
    lines = ["band [Hz]      winner            mean L2"]
    lines += [f"{w.f_lo:5.1f}-{w.f_hi:<6.1f}  N={w.n_factor} {w.pattern_id:<14} {w.error:.4g}" for w in winners]
    lines += ["", "best pattern per N in the band it adds"]
    lines += [f"{w.f_lo:5.1f}-{w.f_hi:<6.1f}  N={w.n_factor} {w.pattern_id:<14} {w.error:.4g}" for w in per_n]
    out["winners.txt"] = ("\n".join(lines) + "\n").encode()
    if "bands" in a:
        rows = []
        for pr in all_profiles:
            errs = [analysis.band_error(pr, lo, hi) for lo, hi in a["bands"]]
            for (lo, hi), e in zip(a["bands"], errs):
                rows.append([pr.pattern_id, pr.n_factor, lo, hi, e])
        out["band_errors.csv"] = to_csv(["pattern_id", "n_factor", "f_lo", "f_hi", "mean_l2"], rows)
    if args.format == "csv+svg":
        from . import plots

        curves = [(pr.pattern_id, [0.5 * (lo + hi) for lo, hi in pr.freq_bins], pr.mean_l2)
                  for pr in all_profiles]
        out["profiles.svg"] = plots.profiles(curves)
    return out


def cmd_snr(cfg, args):
    s = cfg["snr"]
    cam = _camera(cfg)
    pattern = _pattern(s.get("pattern", f"chosen/{cam.n_factor}"), None, "snr.pattern")
    pattern.validate()
    cam = CameraConfig(cam.fps, pattern.n, cam.exposure_fill)
    gammas = cfg["illumination"]["gammas"]
    if len(gammas) != pattern.m:
        raise ConfigError(f"illumination.gammas has {len(gammas)} entries for {pattern.m} channels")
    spec = analysis.EnsembleSpec(s["ensemble_trials"], tuple(s["freq_range"]), s["duration"],
                                 s["amplitude"], cfg["seed"])
    noise = _noise(cfg)
    if not noise.enabled:
        noise = NoiseModel(noise.dark_coeff, noise.read_noise, True)
    rows = analysis.alpha_sweep(s["alphas"], pattern, spec, cam, noise, gammas, s["env_counts"],
                                snr_trials=s["trials"], exponent=s["exponent"])
    out = {"snr.csv": to_csv(["alpha", "snr_ratio", "snr_ratio_se", "bound", "cosine_error_rad"],
                             ([r.alpha, r.snr_ratio, r.snr_ratio_se, r.bound, r.mean_cosine] for r in rows))}
    if args.format == "csv+svg":
        from . import plots

        out["snr.svg"] = plots.alpha_curves([r.alpha for r in rows], [r.snr_ratio for r in rows],
                                            [r.bound for r in rows], [r.mean_cosine for r in rows])
    return out


COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "scan": cmd_scan,
    "patterns": cmd_patterns,
    "snr": cmd_snr,
}

# ---------------------------------------------------------------- driver


def _json_ready(v):
    if isinstance(v, dict):
        return {str(k): _json_ready(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_ready(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def manifest(command, cfg, preset, files) -> bytes:
    doc = {
        "tool": "flickertsr",
        "version": __version__,
        "command": command,
        "preset": preset,
        "seed": cfg["seed"],
        "config": _json_ready(cfg),
        "outputs": sorted(files),
    }
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML campaign config")
    common.add_argument("--preset", metavar="NAME", help="named figure preset (see --list-presets)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--format", choices=("csv", "csv+svg"), help="output formats")

    p = argparse.ArgumentParser(prog="flickertsr", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--version", action="version", version=f"flickertsr {__version__}")
    p.add_argument("--list-presets", action="store_true", help="print preset names and exit")
    sub = p.add_subparsers(dest="command")
    sub.add_parser("simulate", parents=[common], help="simulate camera frames")
    r = sub.add_parser("reconstruct", parents=[common], help="reconstruct sub-exposure traces")
    r.add_argument("--frames", metavar="CSV", help="frames.csv to reconstruct instead of simulating")
    r.add_argument("--spatial", metavar="CSV", help="5-pixel patch file (frame_index,pixel,C_1..C_M)")
    s = sub.add_parser("scan", parents=[common], help="scanning mode with anti-aliasing")
    s.add_argument("--aa-mode", choices=("composition", "literal", "both"))
    sub.add_parser("patterns", parents=[common], help="flicker pattern ensemble comparison")
    sub.add_parser("snr", parents=[common], help="SNR and cosine error versus alpha")
    return p


def _one_line(msg):
    return " ".join(str(msg).split())


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.list_presets:
        print("\n".join(config.preset_names()))
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        print("error: a command is required", file=sys.stderr)
        return 2
    try:
        cfg = config.resolve(args.preset, args.config, args.seed, args.out, args.format)
        args.format = cfg["output"]["format"]
        files = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: config: {_one_line(exc)}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {args.command}: {_one_line(exc)}", file=sys.stderr)
        return 1
    files["manifest.json"] = manifest(args.command, cfg, args.preset, files)
    out_dir = Path(cfg["output"]["dir"])
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name in sorted(files):
            (out_dir / name).write_bytes(files[name])
    except OSError as exc:
        print(f"error: output: {_one_line(exc)}", file=sys.stderr)
        return 1
    print(f"wrote {len(files)} files to {out_dir}")
    return 0
