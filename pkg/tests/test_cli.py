import json
import subprocess
import sys

import numpy as np
import pytest

from flickertsr import cli, config


def _csv(path):
    return np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding=None)


def _main(*argv):
    return cli.main([str(a) for a in argv])


def _cfg(tmp_path, text, name="run.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


SIM3 = """\
camera: {fps: 10, n: 3}
signal:
  type: sines
  duration: 5
  components: [[1, 1], [1, 6], [1, 11]]
pattern: simulation/3
"""


def test_simulate_fifty_frames(tmp_path):
    cfg = _cfg(tmp_path, SIM3)
    assert _main("simulate", "--config", cfg, "--out", tmp_path / "o") == 0
    frames = _csv(tmp_path / "o" / "frames.csv")
    assert frames.dtype.names == ("frame_index", "C_1", "C_2", "C_3")
    assert len(frames) == 50
    truth = _csv(tmp_path / "o" / "truth.csv")
    assert truth.dtype.names == ("time_s", "intensity")


def test_manifest_has_config_seed_version(tmp_path):
    cfg = _cfg(tmp_path, SIM3)
    _main("simulate", "--config", cfg, "--seed", 9, "--out", tmp_path / "o")
    doc = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert doc["seed"] == 9 and doc["config"]["seed"] == 9
    assert doc["version"] and doc["command"] == "simulate"
    assert doc["config"]["camera"]["n"] == 3
    assert "frames.csv" in doc["outputs"]


def test_reconstruct_from_frames_file(tmp_path):
    cfg = _cfg(tmp_path, SIM3)
    _main("simulate", "--config", cfg, "--out", tmp_path / "s")
    assert _main("reconstruct", "--config", cfg, "--frames", tmp_path / "s" / "frames.csv",
                 "--out", tmp_path / "r") == 0
    trace = _csv(tmp_path / "r" / "trace.csv")
    assert trace.dtype.names == ("time_s", "intensity") and len(trace) == 150
    peaks = sorted(_csv(tmp_path / "r" / "peaks.csv")["freq_hz"][:3])
    assert peaks == pytest.approx([1.0, 6.0, 11.0])


def test_fig7_n4_preset_peaks(tmp_path):
    assert _main("reconstruct", "--preset", "fig7-n4", "--out", tmp_path, "--format", "csv+svg") == 0
    peaks = sorted(_csv(tmp_path / "peaks.csv")["freq_hz"][:3])
    assert peaks == pytest.approx([1.0, 6.0, 11.0], abs=0.1)
    assert (tmp_path / "overlay.svg").read_text().lstrip().startswith("<?xml")


def test_spatial_patch_file(tmp_path):
    rng = np.random.default_rng(0)
    rows = ["frame_index,pixel,C_1,C_2,C_3"]
    for f in range(4):
        for p in range(5):
            rows.append(",".join([str(f), str(p)] + [f"{v:.6f}" for v in rng.uniform(0.5, 1.5, 3)]))
    patch = tmp_path / "patch.csv"
    patch.write_text("\n".join(rows) + "\n")
    cfg = _cfg(tmp_path, "camera: {fps: 10, n: 3}\npattern: chosen/3\n")
    assert _main("reconstruct", "--config", cfg, "--spatial", patch, "--out", tmp_path / "o") == 0
    tr = _csv(tmp_path / "o" / "spatial_trace.csv")
    assert tr.dtype.names == ("time_s", "pixel_0", "pixel_1", "pixel_2", "pixel_3", "pixel_4")
    assert len(tr) == 12


def test_scan_single_window(tmp_path):
    cfg = _cfg(tmp_path, """\
camera: {fps: 10}
signal: {type: sines, duration: 4, components: [[1, 4], [0.5, 12]]}
scanning: {n_sequence: [3]}
""")
    assert _main("scan", "--config", cfg, "--out", tmp_path / "o") == 0
    assert len(_csv(tmp_path / "o" / "windows.csv").reshape(-1)) == 1
    bands = _csv(tmp_path / "o" / "bands.csv").reshape(-1)
    assert bands["f_hi"].tolist() == [15.0]
    st = (tmp_path / "o" / "stitched.csv").read_bytes()
    assert st == (tmp_path / "o" / "antialiased.csv").read_bytes()


def test_scan_both_modes(tmp_path):
    cfg = _cfg(tmp_path, "signal: {duration: 4}\nanalysis: {trials: 1}\n")
    assert _main("scan", "--preset", "fig9", "--config", cfg, "--aa-mode", "both", "--out", tmp_path / "o") == 0
    names = {p.name for p in (tmp_path / "o").iterdir()}
    assert {"antialiased_composition.csv", "antialiased_literal.csv", "band_energies.csv"} <= names


def test_patterns_small_ensemble(tmp_path):
    cfg = _cfg(tmp_path, """\
analysis:
  trials: 30
  freq_range: [5, 20]
  patterns: [chosen/3, chosen/4, appendix/6/3]
  bands: [[5, 15], [15, 20]]
""")
    assert _main("patterns", "--config", cfg, "--out", tmp_path / "o") == 0
    cands = _csv(tmp_path / "o" / "candidates.csv")
    status = dict(zip(cands["pattern_id"], cands["status"]))
    assert status["N6-p3"].startswith("rejected") and "not full rank" in status["N6-p3"]
    assert status["N4-p1"] == "ok"
    win = _csv(tmp_path / "o" / "winners.csv")
    assert set(win["n_factor"]) <= {3, 4}
    assert (tmp_path / "o" / "band_errors.csv").exists()
    prof = _csv(tmp_path / "o" / "profiles.csv")
    assert "baseline" in set(prof["pattern_id"])


def test_patterns_enumeration(tmp_path):
    cfg = _cfg(tmp_path, "analysis: {trials: 5, freq_range: [5, 15], enumerate: {n: 3}, baseline: false}\n")
    assert _main("patterns", "--config", cfg, "--out", tmp_path / "o") == 0
    assert len(_csv(tmp_path / "o" / "candidates.csv")) == 174


def test_snr_columns(tmp_path):
    cfg = _cfg(tmp_path, "snr: {alphas: [1, inf], trials: 200, ensemble_trials: 5}\n")
    assert _main("snr", "--config", cfg, "--out", tmp_path / "o") == 0
    rows = _csv(tmp_path / "o" / "snr.csv")
    assert rows.dtype.names == ("alpha", "snr_ratio", "snr_ratio_se", "bound", "cosine_error_rad")
    assert rows["bound"][0] == pytest.approx(2 ** 1.5)


def test_config_error_names_file_and_line(tmp_path, capsys):
    cfg = _cfg(tmp_path, "camera:\n  fps: -3\n")
    out = tmp_path / "o"
    assert _main("simulate", "--config", cfg, "--out", out) == 2
    err = capsys.readouterr().err.strip()
    assert err.startswith("error: ") and "\n" not in err
    assert f"{cfg}:2: camera.fps" in err
    assert not out.exists()


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = _cfg(tmp_path, "camera: {fps: 10}\nsignal:\n  duraton: 3\n")
    assert _main("simulate", "--config", cfg, "--out", tmp_path / "o") == 2
    assert "3: unknown key signal.duraton" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_rank_deficient_pattern_is_named(tmp_path, capsys):
    cfg = _cfg(tmp_path, SIM3.replace("simulation/3", "{b: [1, 0, 0], g: [0, 1, 0], r: [1, 1, 0]}"))
    assert _main("reconstruct", "--config", cfg, "--out", tmp_path / "o") == 1
    err = capsys.readouterr().err
    assert "pattern custom not full rank" in err
    assert not (tmp_path / "o").exists()


def test_runtime_error_leaves_no_output(tmp_path):
    cfg = _cfg(tmp_path, "camera: {fps: 10, n: 4}\npattern: chosen/3\n")
    assert _main("simulate", "--config", cfg, "--out", tmp_path / "o") == 2
    assert not (tmp_path / "o").exists()


def test_precedence_cli_over_config_over_preset(tmp_path):
    cfg = _cfg(tmp_path, "seed: 4\ncamera: {fps: 20}\n")
    merged = config.resolve("fig7-n4", str(cfg), seed=8)
    assert merged["seed"] == 8
    assert merged["camera"]["fps"] == 20.0 and merged["camera"]["n"] == 4
    assert merged["pattern"] == "simulation/4"


def test_every_preset_loads():
    names = config.preset_names()
    assert {"fig3", "fig4", "fig5", "fig6", "fig7-n3", "fig7-n4", "fig8-n5", "fig8-n6", "fig9", "table1",
            "fig13", "fig14"} <= set(names)
    for n in names:
        config.load_preset(n)


def test_list_presets(capsys):
    assert _main("--list-presets") == 0
    assert "fig9" in capsys.readouterr().out.split()


def test_module_entry_point(tmp_path):
    cfg = _cfg(tmp_path, SIM3)
    proc = subprocess.run([sys.executable, "-m", "flickertsr", "simulate", "--config", str(cfg),
                           "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "frames.csv").exists()


def test_csv_float_format():
    assert cli.to_csv(["x"], [[0.1], [1.0], [3]]) == b"x\n0.10000000000000001\n1\n3\n"
