"""
Campaign configuration: YAML files with a fixed schema.

Every value is checked when the file is loaded and errors carry the file and
line of the offending key, e.g. ``run.yaml:7: camera.fps must be > 0``.
Unknown keys are rejected.
"""

from __future__ import annotations

import copy
import math
from importlib import resources
from pathlib import Path

import yaml

from .analysis import APPENDIX_PATTERNS, CHOSEN_PATTERNS, SIMULATION_PATTERNS
from .sensor import FlickerPattern

__all__ = ["ConfigError", "load", "load_preset", "preset_names", "resolve_pattern", "merge"]


class ConfigError(ValueError):
    pass


def _num(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("must be a number")
    return float(v)


def _alpha(v):
    if isinstance(v, str) and v.lower() in ("inf", ".inf", "infinity"):
        return math.inf
    v = _num(v)
    if not v > 0:
        raise ValueError("must be > 0")
    return v


def pos(v):
    v = _num(v)
    if not v > 0 or math.isinf(v):
        raise ValueError("must be a finite number > 0")
    return v


def nonneg(v):
    v = _num(v)
    if v < 0 or math.isinf(v):
        raise ValueError("must be a finite number >= 0")
    return v


def fraction(v):
    v = _num(v)
    if not 0 < v <= 1:
        raise ValueError("must be in (0, 1]")
    return v


def floor_fraction(v):
    v = _num(v)
    if not 0 <= v < 1:
        raise ValueError("must be in [0, 1)")
    return v


def integer(lo):
    def check(v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise TypeError("must be an integer")
        if v < lo:
            raise ValueError(f"must be >= {lo}")
        return v
    return check


def boolean(v):
    if not isinstance(v, bool):
        raise TypeError("must be true or false")
    return v


def choice(*opts):
    def check(v):
        if v not in opts:
            raise ValueError(f"must be one of {', '.join(opts)}")
        return v
    return check


def list_of(item, min_len=1):
    def check(v):
        if not isinstance(v, list) or len(v) < min_len:
            raise TypeError(f"must be a list with at least {min_len} entries")
        return [item(x) for x in v]
    return check


def freq_range(v):
    if not isinstance(v, list) or len(v) != 2:
        raise TypeError("must be [lo, hi]")
    lo, hi = nonneg(v[0]), nonneg(v[1])
    if not lo < hi:
        raise ValueError("lo must be < hi")
    return [lo, hi]


def component(v):
    if not isinstance(v, list) or len(v) not in (2, 3):
        raise TypeError("each component must be [amplitude, freq_hz] or [amplitude, freq_hz, phase]")
    a, f = _num(v[0]), pos(v[1])
    return [a, f, _num(v[2]) if len(v) == 3 else 0.0]


def text(v):
    if not isinstance(v, str) or not v:
        raise TypeError("must be a nonempty string")
    return v


def pattern_ref(v):
    if isinstance(v, str):
        resolve_pattern(v)
        return v
    if isinstance(v, dict):
        if not v:
            raise ValueError("pattern needs at least one channel")
        lengths = set()
        for name, vec in v.items():
            vec = list_of(integer(0))(vec)
            if any(b > 1 for b in vec):
                raise ValueError(f"channel {name} entries must be 0 or 1")
            lengths.add(len(vec))
        if len(lengths) != 1:
            raise ValueError("all channel vectors must have the same length")
        return {str(k): list(vec) for k, vec in v.items()}
    raise TypeError("must be a preset name or a mapping channel -> 0/1 vector")


def pattern_map(v):
    if not isinstance(v, dict):
        raise TypeError("must map N -> pattern")
    out = {}
    for k, p in v.items():
        if isinstance(k, bool) or not isinstance(k, int) or k < 2:
            raise ValueError(f"key {k!r} must be an integer N >= 2")
        out[k] = pattern_ref(p)
    return out


SCHEMA = {
    "seed": integer(0),
    "camera": {"fps": pos, "n": integer(2), "exposure_fill": fraction},
    "signal": {
        "type": choice("sines", "squares"),
        "components": list_of(component),
        "freqs": list_of(pos),
        "duration": pos,
        "grid_rate": pos,
    },
    "pattern": pattern_ref,
    "illumination": {
        "alpha": _alpha,
        "flicker_intensity": pos,
        "gammas": list_of(fraction),
        "env_model": choice("gated", "continuous"),
    },
    "noise": {"dark": nonneg, "read": nonneg, "shot": boolean},
    "spatial": {"w_t": pos, "w_s": nonneg, "nearest_block_only": boolean},
    "scanning": {
        "n_sequence": list_of(integer(2)),
        "patterns": pattern_map,
        "aa_mode": choice("composition", "literal", "both"),
        "aa_domain": choice("magnitude", "complex"),
        "average": choice("complex", "magnitude"),
        "threshold": floor_fraction,
    },
    "analysis": {
        "trials": integer(1),
        "freq_range": freq_range,
        "duration": pos,
        "amplitude": pos,
        "bin_hz": pos,
        "mode": choice("fixed", "random_per_frame"),
        "render": choice("fourier", "hold"),
        "baseline": boolean,
        "patterns": list_of(pattern_ref),
        "enumerate": {"n": integer(2), "m": integer(1), "sample": integer(0)},
        "bands": list_of(freq_range),
    },
    "snr": {
        "alphas": list_of(_alpha),
        "pattern": pattern_ref,
        "trials": integer(2),
        "ensemble_trials": integer(1),
        "freq_range": freq_range,
        "duration": pos,
        "amplitude": pos,
        "env_counts": pos,
        "exponent": pos,
    },
    "output": {"dir": text, "format": choice("csv", "csv+svg")},
}

DEFAULTS = {
    "seed": 0,
    "camera": {"fps": 10.0, "n": 3, "exposure_fill": 1.0},
    "signal": {"type": "sines", "duration": 5.0},
    "illumination": {"alpha": math.inf, "flicker_intensity": 1.0, "gammas": [1.0, 1.0, 1.0],
                     "env_model": "gated"},
    "noise": {"dark": 0.0, "read": 0.0, "shot": False},
    "spatial": {"w_t": 3.0, "w_s": 1.0, "nearest_block_only": False},
    "scanning": {"aa_mode": "composition", "aa_domain": "magnitude", "average": "complex",
                 "threshold": 0.0},
    "analysis": {"trials": 1000, "freq_range": [5.0, 30.0], "duration": 5.0, "amplitude": 1.0,
                 "bin_hz": 1.0, "mode": "fixed", "render": "fourier", "baseline": True},
    "snr": {"alphas": [0.5, 1.0, 2.0, 5.0, 10.0, 50.0], "trials": 10000, "ensemble_trials": 200,
            "freq_range": [5.0, 15.0], "duration": 5.0, "amplitude": 0.5, "env_counts": 100.0,
            "exponent": 1.5},
    "output": {"dir": "out", "format": "csv"},
}


def resolve_pattern(ref) -> FlickerPattern:
    """Turn a config pattern entry into a FlickerPattern.

    Strings name presets: ``appendix/N/K``, ``chosen/N``, ``simulation/N``.
    """
    if isinstance(ref, FlickerPattern):
        return ref
    if isinstance(ref, dict):
        names = tuple(ref)
        return FlickerPattern.from_channels([ref[k] for k in names], names, "custom")
    parts = str(ref).split("/")
    try:
        if parts[0] == "appendix" and len(parts) == 3:
            return APPENDIX_PATTERNS[int(parts[1])][int(parts[2])]
        table = {"chosen": CHOSEN_PATTERNS, "simulation": SIMULATION_PATTERNS}[parts[0]]
        if len(parts) == 2:
            return table[int(parts[1])]
    except (KeyError, IndexError, ValueError):
        pass
    raise ValueError(f"unknown pattern preset {ref!r}")


def _index_lines(node, path=(), out=None):
    """Map key paths to 1-based line numbers."""
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = k.value
            try:
                key = int(key)
            except ValueError:
                pass
            out[path + (key,)] = k.start_mark.line + 1
            _index_lines(v, path + (key,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            out[path + (i,)] = v.start_mark.line + 1
            _index_lines(v, path + (i,), out)
    return out


def _validate(data, schema, lines, where, path=()):
    if not isinstance(data, dict):
        line = lines.get(path, 1)
        raise ConfigError(f"{where}:{line}: {'.'.join(map(str, path)) or 'config'} must be a mapping")
    out = {}
    for key, val in data.items():
        kpath = path + (key,)
        line = lines.get(kpath, 1)
        dotted = ".".join(map(str, kpath))
        if key not in schema:
            raise ConfigError(f"{where}:{line}: unknown key {dotted}")
        rule = schema[key]
        if isinstance(rule, dict):
            out[key] = _validate(val, rule, lines, where, kpath)
            continue
        try:
            out[key] = rule(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}:{line}: {dotted} {exc}") from None
    return out


def _parse(text, where):
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark else 1
        msg = getattr(exc, "problem", None) or str(exc).splitlines()[0]
        raise ConfigError(f"{where}:{line}: invalid YAML: {msg}") from None
    if data is None:
        return {}
    return _validate(data, SCHEMA, _index_lines(node), where)


def merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "pattern":
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}:0: cannot read config: {exc.strerror}") from None
    return _parse(text, str(path))


def preset_names():
    root = resources.files("flickertsr") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def load_preset(name) -> dict:
    root = resources.files("flickertsr") / "presets"
    res = root / f"{name}.yaml"
    if not res.is_file():
        raise ConfigError(f"{name}:0: unknown preset (available: {', '.join(preset_names())})")
    return _parse(res.read_text(), f"presets/{name}.yaml")


def resolve(preset=None, path=None, seed=None, out_dir=None, fmt=None) -> dict:
    """Defaults, then preset, then config file, then command-line overrides."""
    cfg = copy.deepcopy(DEFAULTS)
    if preset:
        cfg = merge(cfg, load_preset(preset))
    if path:
        cfg = merge(cfg, load(path))
    if seed is not None:
        if seed < 0:
            raise ConfigError("--seed:0: seed must be >= 0")
        cfg["seed"] = seed
    if out_dir is not None:
        cfg["output"]["dir"] = out_dir
    if fmt is not None:
        cfg["output"]["format"] = fmt
    return cfg
