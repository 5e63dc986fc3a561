import json
import os
import subprocess
import sys

import numpy as np
import pytest

from herdturing.cli import main, scan_workers
from herdturing.errors import ConfigError
from herdturing.io import (apply_overrides, dumps_csv, dumps_json, emit_config, load_config_doc,
                           parse_config, parse_config_dict)

SIM_DOC = {
    "params": {"preset": "H2", "theta": 0.9, "d2": 0.4},
    "analysis": {"s": 1, "normal_form": "pitchfork"},
    "simulation": {"n_cells": 16, "t_end": 4.0, "dt": "auto", "output_every": 1.0,
                   "initial": {"kind": "cosine", "u0": 0.09, "au": 1e-3, "v0": 0.123, "av": 0.0}},
}


def write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


def test_round_trip():
    req = parse_config_dict(SIM_DOC)
    doc = emit_config(req)
    again = parse_config_dict(json.loads(json.dumps(doc)))
    assert again == req
    assert emit_config(again) == doc


def test_round_trip_raw_params():
    doc = {"params": {"raw": {"r": 1, "K": 1, "A": 1, "B": 1, "D": 1, "M": 0, "N": 1, "D1": 1, "D2": 1}}}
    req = parse_config_dict(doc)
    assert (req.params.m, req.params.n, req.params.c) == (0.0, 1.0, 1.0)
    assert parse_config_dict(emit_config(req)) == req


def test_overrides():
    doc = apply_overrides(SIM_DOC, ["params.theta=0.7", "simulation.initial.au=0.002"])
    req = parse_config_dict(doc)
    assert req.params.theta == 0.7 and req.simulation.initial.values[1] == 0.002
    assert SIM_DOC["params"]["theta"] == 0.9  # input left untouched


def test_unknown_override_key_rejected():
    with pytest.raises(ConfigError) as ei:
        parse_config_dict(apply_overrides(SIM_DOC, ["params.thetaa=0.7"]))
    assert ei.value.path == "/params/thetaa"
    assert ei.value.exit_code == 2


def test_empty_file(tmp_path):
    with pytest.raises(ConfigError) as ei:
        load_config_doc(write(tmp_path, ""))
    assert ei.value.path == "/"


def test_bad_json(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, "{nope"))


def test_inadmissible_n_names_bound():
    with pytest.raises(ConfigError) as ei:
        parse_config_dict({"params": {"preset": "H2", "n": -0.1}})
    assert ei.value.path == "/params" and "n > max(0, -m)" in str(ei.value)


def test_wrong_types():
    with pytest.raises(ConfigError) as ei:
        parse_config_dict({"params": {"preset": "H2", "theta": "big"}})
    assert ei.value.path == "/params/theta"
    with pytest.raises(ConfigError):
        parse_config_dict({"params": {"preset": "H3"}})
    with pytest.raises(ConfigError):
        parse_config_dict({"params": {"preset": "H2"}, "simulation": {"t_end": 1.0}})


def test_json_writer_is_canonical():
    a = dumps_json({"b": 1.0, "a": [np.float64(0.1), float("nan")]})
    assert a == dumps_json({"a": [0.1, float("nan")], "b": 1.0})
    assert json.loads(a)["a"][1] is None


def test_empty_csv_has_header_only():
    assert dumps_csv(["k", "d2"], []).strip().splitlines() == ["k,d2"]


def test_csv_full_precision():
    text = dumps_csv(["x"], [[1 / 3]])
    assert float(text.splitlines()[1]) == 1 / 3


@pytest.mark.parametrize("sub, files", [
    ("equilibria", ["equilibria.json"]),
    ("classify", ["classify.json"]),
    ("curves", ["curves.csv", "curves.json"]),
    ("turing-test", ["turing_test.json"]),
    ("normal-form", ["normal_form.json"]),
])
def test_cli_subcommands(tmp_path, sub, files):
    args = [sub, "--out", str(tmp_path)]
    if sub == "normal-form":
        args += ["--set", "params.theta=1.24", "--set", "params.d2=0.4",
                 "--set", "analysis.normal_form=\"pitchfork\"", "--set", "analysis.s=1"]
    assert main(args) == 0
    for f in files:
        assert (tmp_path / f).exists()


def test_cli_simulate_and_emit_config(tmp_path):
    cfg = write(tmp_path, SIM_DOC)
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--emit-config", "--out", str(out)]) == 0
    for f in ("simulate_u.csv", "simulate_v.csv", "simulate_manifest.json", "config.json"):
        assert (out / f).exists()
    man = json.loads((out / "simulate_manifest.json").read_text())
    assert man["status"] == "ok"
    assert parse_config(out / "config.json") == parse_config(cfg)


def test_cli_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = write(tmp_path, SIM_DOC)
    for d in (a, b):
        assert main(["simulate", "--config", str(cfg), "--out", str(d)]) == 0
        assert main(["classify", "--out", str(d)]) == 0
    for name in ("simulate_u.csv", "simulate_manifest.json", "classify.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["equilibria", "--set", "params.bogus=1", "--out", str(tmp_path)]) == 2
    assert "/params/bogus" in capsys.readouterr().err
    assert main(["equilibria", "--config", str(write(tmp_path, "")), "--out", str(tmp_path)]) == 2
    # E31 does not exist for these parameters: precondition error
    assert main(["curves", "--set", "params.n=2.0", "--out", str(tmp_path)]) == 3
    # pitchfork at the Turing-Hopf point: degeneracy error
    args = ["normal-form", "--set", "analysis.normal_form=\"pitchfork\"", "--set", "analysis.s=1",
            "--set", "params.d2=0.21364496071443315", "--set", "params.theta=0.6627149686471722"]
    assert main(args + ["--out", str(tmp_path)]) == 3
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["equilibria", "--out", str(blocker / "sub")]) == 1


def test_cli_simulate_blowup_exit_code(tmp_path):
    doc = json.loads(json.dumps(SIM_DOC))
    doc["simulation"]["thresholds"] = {"blowup": 0.05}
    assert main(["simulate", "--config", str(write(tmp_path, doc)), "--out", str(tmp_path)]) == 3


def test_scan_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HERDTURING_THREADS", "2")
    assert scan_workers() == 2
    args = ["scan", "--set", "analysis.n_theta=4", "--set", "analysis.n_d2=3", "--out"]
    assert main(args + [str(tmp_path / "two")]) == 0
    monkeypatch.setenv("HERDTURING_THREADS", "1")
    assert main(args + [str(tmp_path / "one")]) == 0
    one = (tmp_path / "one" / "scan.csv").read_bytes()
    assert one == (tmp_path / "two" / "scan.csv").read_bytes()
    assert len(one.decode().strip().splitlines()) == 1 + 12
    monkeypatch.setenv("HERDTURING_THREADS", "zero")
    with pytest.raises(ConfigError):
        scan_workers()


def test_console_script_help():
    r = subprocess.run([sys.executable, "-m", "herdturing.cli", "--help"], capture_output=True,
                       text=True, env={**os.environ})
    assert r.returncode == 0 and "reproduce" in r.stdout


def test_reproduce_fast_figure(tmp_path):
    assert main(["reproduce", "fig2b", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "fig2b_report.json").read_text())
    assert rep
