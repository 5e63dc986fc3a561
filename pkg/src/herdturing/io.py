"""Configuration parsing and serialization of analysis outputs.

A configuration is a JSON object with three sections:

    {"params":     {"preset": "H2", "theta": 0.662, "d2": 0.15}
                   | {"m": .., "n": .., "c": .., "theta": .., "d1": .., "d2": ..}
                   | {"raw": {"r": .., "K": .., "A": .., "B": .., "D": .., "M": .., "N": .., "D1": .., "D2": ..}},
     "analysis":   {...AnalysisOptions fields...},
     "simulation": {"n_cells": 128, "t_end": 100, "dt": "auto", "output_every": 1,
                    "initial": {"kind": "cosine", "u0": .., "au": .., "v0": .., "av": ..},
                    "thresholds": {"spatial_var": 1e-8, "oscillation": 1e-6, "blowup": 1e3},
                    "reaction": true}}

Unknown keys anywhere are rejected with a JSON-pointer path. JSON output uses
the shortest round-trip float representation; CSV uses 17 significant digits.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import AdmissibilityError, ConfigError
from .model import PRESETS, RawParams, ScaledParams, rescale
from .simulate import Grid1D, Initial, RunConfig, Thresholds

CSV_FMT = "%.16e"


@dataclass(frozen=True)
class AnalysisOptions:
    equilibrium: str = "E31"        # classify: which equilibrium (or "all")
    s: int = 0                      # normal-form mode index
    normal_form: str = "hopf"       # hopf | pitchfork
    h_sign: float = -1.0            # pitchfork branch sign convention
    k_max: int | None = None        # turing-test: highest mode checked
    d2_min: float = 0.0             # curves / scan
    d2_max: float = 0.5
    n_d2: int = 51
    theta_min: float = 0.5          # scan
    theta_max: float = 1.5
    n_theta: int = 51


@dataclass(frozen=True)
class Request:
    params: ScaledParams
    analysis: AnalysisOptions = AnalysisOptions()
    simulation: RunConfig | None = None


# --- validation helpers -----------------------------------------------------

def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _num(obj: dict, key: str, path: str, default=None, required=False) -> float:
    if key not in obj:
        if required:
            raise ConfigError(f"{path}/{key}", "required field missing")
        return default
    val = obj[key]
    if not _is_num(val) or not math.isfinite(val):
        raise ConfigError(f"{path}/{key}", f"expected a finite number, got {val!r}")
    return float(val)


def _int(obj: dict, key: str, path: str, default=None, allow_none=False):
    if key not in obj:
        return default
    val = obj[key]
    if val is None and allow_none:
        return None
    if isinstance(val, float) and val.is_integer():
        val = int(val)
    if not isinstance(val, int) or isinstance(val, bool):
        raise ConfigError(f"{path}/{key}", f"expected an integer, got {val!r}")
    return val


def _obj(val, path: str) -> dict:
    if not isinstance(val, dict):
        raise ConfigError(path, f"expected an object, got {type(val).__name__}")
    return val


def _no_unknown(obj: dict, allowed, path: str):
    for k in obj:
        if k not in allowed:
            raise ConfigError(f"{path}/{k}", f"unknown key (allowed: {', '.join(sorted(allowed))})")


PARAM_KEYS = ("m", "n", "c", "theta", "d1", "d2")
RAW_KEYS = tuple(f.name for f in fields(RawParams))


def _parse_params(d, path="/params") -> ScaledParams:
    d = _obj(d, path)
    if "raw" in d:
        _no_unknown(d, {"raw"}, path)
        raw = _obj(d["raw"], path + "/raw")
        _no_unknown(raw, RAW_KEYS, path + "/raw")
        vals = {k: _num(raw, k, path + "/raw", required=True) for k in RAW_KEYS}
        return _admissible(lambda: rescale(RawParams(**vals)), path + "/raw")
    _no_unknown(d, set(PARAM_KEYS) | {"preset"}, path)
    if "preset" in d:
        name = d["preset"]
        if name not in PRESETS:
            raise ConfigError(path + "/preset", f"unknown preset {name!r} (known: {', '.join(PRESETS)})")
        base = PRESETS[name]().as_dict()
        vals = {k: _num(d, k, path, default=base[k]) for k in PARAM_KEYS}
    else:
        vals = {k: _num(d, k, path, required=True) for k in PARAM_KEYS}
    return _admissible(lambda: ScaledParams(**vals), path)


def _admissible(build, path):
    try:
        return build()
    except AdmissibilityError as e:
        raise ConfigError(path, str(e)) from e


def _parse_analysis(d, path="/analysis") -> AnalysisOptions:
    d = _obj(d, path)
    names = [f.name for f in fields(AnalysisOptions)]
    _no_unknown(d, names, path)
    dflt = AnalysisOptions()
    kw = {}
    for name in names:
        if name not in d:
            continue
        if name in ("equilibrium", "normal_form"):
            if not isinstance(d[name], str):
                raise ConfigError(f"{path}/{name}", f"expected a string, got {d[name]!r}")
            kw[name] = d[name]
        elif name in ("s", "n_d2", "n_theta", "k_max"):
            kw[name] = _int(d, name, path, allow_none=(name == "k_max"))
        else:
            kw[name] = _num(d, name, path)
    opts = AnalysisOptions(**{**dflt.__dict__, **kw})
    if opts.normal_form not in ("hopf", "pitchfork"):
        raise ConfigError(path + "/normal_form", "must be 'hopf' or 'pitchfork'")
    if opts.s < 0:
        raise ConfigError(path + "/s", "must be >= 0")
    if opts.h_sign not in (-1.0, 1.0):
        raise ConfigError(path + "/h_sign", "must be -1 or 1")
    for n in ("n_d2", "n_theta"):
        if getattr(opts, n) < 1:
            raise ConfigError(f"{path}/{n}", "must be >= 1")
    return opts


INITIAL_KEYS = {"constant": ("u0", "v0"), "cosine": ("u0", "au", "v0", "av")}


def _parse_initial(d, path) -> Initial:
    d = _obj(d, path)
    kind = d.get("kind")
    if kind in INITIAL_KEYS:
        _no_unknown(d, {"kind", *INITIAL_KEYS[kind]}, path)
        vals = [_num(d, k, path, required=True) for k in INITIAL_KEYS[kind]]
        return Initial(kind, tuple(vals))
    if kind == "custom":
        _no_unknown(d, {"kind", "u", "v"}, path)
        for k in ("u", "v"):
            arr = d.get(k)
            if not isinstance(arr, list) or not all(_is_num(x) for x in arr):
                raise ConfigError(f"{path}/{k}", "expected a list of numbers")
        return Initial.custom(d["u"], d["v"])
    raise ConfigError(path + "/kind", f"expected 'constant', 'cosine' or 'custom', got {kind!r}")


def _parse_simulation(d, params: ScaledParams, path="/simulation") -> RunConfig:
    d = _obj(d, path)
    _no_unknown(d, {"n_cells", "t_end", "dt", "output_every", "initial", "thresholds", "reaction"}, path)
    n_cells = _int(d, "n_cells", path, default=128)
    dt = d.get("dt", "auto")
    if dt != "auto" and not (_is_num(dt) and dt > 0):
        raise ConfigError(path + "/dt", f"expected 'auto' or a positive number, got {dt!r}")
    thr = Thresholds()
    if "thresholds" in d:
        td = _obj(d["thresholds"], path + "/thresholds")
        _no_unknown(td, {"spatial_var", "oscillation", "blowup"}, path + "/thresholds")
        thr = Thresholds(**{k: _num(td, k, path + "/thresholds", default=getattr(thr, k))
                            for k in ("spatial_var", "oscillation", "blowup")})
    reaction = d.get("reaction", True)
    if not isinstance(reaction, bool):
        raise ConfigError(path + "/reaction", "expected true or false")
    if "initial" not in d:
        raise ConfigError(path + "/initial", "required field missing")
    return RunConfig(
        params=params,
        grid=Grid1D(n_cells) if n_cells is not None else Grid1D(),
        t_end=_num(d, "t_end", path, default=100.0),
        dt=dt if dt == "auto" else float(dt),
        initial=_parse_initial(d["initial"], path + "/initial"),
        output_every=_num(d, "output_every", path, default=1.0),
        thresholds=thr,
        reaction=reaction,
    )


def parse_config_dict(doc) -> Request:
    if not isinstance(doc, dict):
        raise ConfigError("/", "configuration root must be a JSON object")
    _no_unknown(doc, {"params", "analysis", "simulation"}, "")
    if "params" not in doc:
        raise ConfigError("/params", "required field missing")
    params = _parse_params(doc["params"])
    analysis = _parse_analysis(doc.get("analysis", {}))
    sim = _parse_simulation(doc["simulation"], params) if "simulation" in doc else None
    return Request(params, analysis, sim)


def load_config_doc(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError("/", f"cannot read {path}: {e.strerror}") from e
    if not text.strip():
        raise ConfigError("/", "empty configuration file")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("/", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e


def parse_config(path, overrides=()) -> Request:
    """Read, apply ``key=value`` overrides (dotted keys) and validate."""
    doc = load_config_doc(path)
    return parse_config_dict(apply_overrides(doc, overrides))


def apply_overrides(doc, overrides) -> dict:
    """Set dotted keys, e.g. ``params.theta=0.7``; values are parsed as JSON when possible.

    Unknown keys are caught by the schema validation that follows.
    """
    if not overrides:
        return doc
    if not isinstance(doc, dict):
        raise ConfigError("/", "configuration root must be a JSON object")
    doc = json.loads(json.dumps(doc))
    for item in overrides:
        if "=" not in item:
            raise ConfigError("/", f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        parts = [k for k in key.strip().split(".") if k]
        if not parts:
            raise ConfigError("/", f"override {item!r} has an empty key")
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        node, ptr = doc, ""
        for k in parts[:-1]:
            ptr += "/" + k
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise ConfigError(ptr, "cannot set a key inside a non-object")
        node[parts[-1]] = val
    return doc


def emit_config(req: Request) -> dict:
    """Canonical JSON document; parse_config_dict(emit_config(r)) == r."""
    doc = {"params": req.params.as_dict(), "analysis": dict(req.analysis.__dict__)}
    sim = req.simulation
    if sim is not None:
        doc["simulation"] = {
            "n_cells": sim.grid.n_cells, "t_end": sim.t_end, "dt": sim.dt,
            "output_every": sim.output_every, "initial": sim.initial.as_dict(),
            "thresholds": dict(sim.thresholds.__dict__), "reaction": sim.reaction,
        }
    return doc


# --- writers ------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return "nan"
    return CSV_FMT % float(x)


def dumps_csv(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _out_dir(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {out}: {e.strerror}") from e
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out} is not writable")
    return out


def write_json(out_dir, name: str, obj) -> Path:
    path = _out_dir(out_dir) / name
    path.write_text(dumps_json(obj))
    return path


def write_csv(out_dir, name: str, header, rows) -> Path:
    path = _out_dir(out_dir) / name
    path.write_text(dumps_csv(header, rows))
    return path


def write_field(out_dir, prefix: str, result) -> dict:
    """Space-time matrices (rows = time, columns = cells) plus a JSON manifest."""
    x = result.config.grid.x
    header = ["t"] + [CSV_FMT % xi for xi in x]
    files = {}
    for name, mat in (("u", result.u_matrix()), ("v", result.v_matrix())):
        rows = ([t, *row] for t, row in zip(result.times, mat))
        files[name] = write_csv(out_dir, f"{prefix}_{name}.csv", header, rows).name
    manifest = {
        "config": emit_config(Request(result.config.params, AnalysisOptions(), result.config)),
        "dt": result.dt, "status": result.status, "failure_time": result.failure_time,
        "attractor": result.attractor, "metrics": result.metrics, "files": files,
        "n_snapshots": len(result.snapshots),
    }
    files["manifest"] = write_json(out_dir, f"{prefix}_manifest.json", manifest).name
    return files
