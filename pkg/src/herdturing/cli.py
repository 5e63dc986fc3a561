"""Command-line entry point.

    herdturing <subcommand> [--config FILE] [--set key=value]... --out DIR

Exit codes: 0 ok, 2 configuration error, 3 numerical error (degeneracy,
precondition, instability), 4 tolerance failure in ``reproduce``, 1 I/O error.
Data goes to files in DIR; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import equilibria as eqm
from . import local, spatial
from .errors import ConfigError, HerdTuringError, ToleranceFailure
from .io import (apply_overrides, emit_config, load_config_doc, parse_config_dict, write_csv,
                 write_field, write_json)
from .normal_forms import hopf_normal_form, pitchfork_normal_form
from .reproduce import FIGURES, curve_rows, reproduce
from .simulate import run

THREADS_ENV = "HERDTURING_THREADS"
SUBCOMMANDS = ("equilibria", "classify", "curves", "turing-test", "normal-form", "simulate",
               "scan", "reproduce")


def _request(args):
    doc = load_config_doc(args.config) if args.config else {"params": {"preset": "H2"}}
    return parse_config_dict(apply_overrides(doc, args.set))


def cmd_equilibria(req, out):
    p = req.params
    write_json(out, "equilibria.json", {
        "params": p.as_dict(), "case": eqm.classify_case(p).as_dict(),
        "equilibria": [e.as_dict() for e in eqm.find_equilibria(p)]})


def cmd_classify(req, out):
    p = req.params
    which = req.analysis.equilibrium
    eqs = eqm.find_equilibria(p) if which == "all" else [eqm.get(p, which)]
    report = {"params": p.as_dict(), "case": eqm.classify_case(p).as_dict(), "equilibria": []}
    for e in eqs:
        item = {**e.as_dict(), "verdict": local.classify(e, p).as_dict()}
        if e.kind in (eqm.Kind.E30, eqm.Kind.E31):
            try:
                item["hopf"] = local.hopf_local(e, p).as_dict()
            except HerdTuringError as err:
                item["hopf"] = {"error": str(err)}
        report["equilibria"].append(item)
    if eqm.classify_case(p).case == "d":
        report["degenerate_chain"] = local.degenerate_chain(p).as_dict()
    write_json(out, "classify.json", report)


def cmd_curves(req, out):
    lin = spatial.linearize(req.params)
    a = req.analysis
    d2s = np.linspace(a.d2_min, a.d2_max, a.n_d2)
    write_csv(out, "curves.csv", ["k", "d2", "theta_H", "theta_T"], curve_rows(lin, d2s))
    write_json(out, "curves.json", spatial.bifurcation_diagram(lin).as_dict())


def cmd_turing_test(req, out):
    lin = spatial.linearize(req.params)
    res = spatial.turing_instability_test(lin, req.analysis.k_max)
    kmax = spatial.k_star(lin) if req.analysis.k_max is None else req.analysis.k_max
    modes = [spatial.mode(k, lin) for k in range(kmax + 1)]
    write_json(out, "turing_test.json", {
        **res.as_dict(), "theta_h0": lin.theta_h0, "k_star": spatial.k_star(lin),
        "modes": [{"k": md.k, "T": md.Tk, "D": md.Dk, "growth_rate": md.growth_rate}
                  for md in modes]})


def cmd_normal_form(req, out):
    a, p = req.analysis, req.params
    if a.normal_form == "hopf":
        nf = hopf_normal_form(a.s, p.d2, p.theta, p)
    else:
        nf = pitchfork_normal_form(a.s, p.d2, p.theta, p, h_sign=a.h_sign)
    write_json(out, "normal_form.json", nf.as_dict())


def cmd_simulate(req, out):
    if req.simulation is None:
        raise ConfigError("/simulation", "required for the simulate subcommand")
    res = run(req.simulation)
    write_field(out, "simulate", res)
    if res.status == "diverged":
        print(f"error: solution blew up at t={res.failure_time:.6g}", file=sys.stderr)
        return 3
    return 0


def _scan_row(args):
    lin, theta, d2s = args
    return [(theta, d2, spatial.region_label(lin.with_(theta=theta, d2=float(d2)))) for d2 in d2s]


def scan_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"${THREADS_ENV}", f"expected a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"${THREADS_ENV}", f"expected a positive integer, got {raw!r}")
    return n


def cmd_scan(req, out):
    lin = spatial.linearize(req.params)
    a = req.analysis
    thetas = np.linspace(a.theta_min, a.theta_max, a.n_theta)
    d2s = np.linspace(a.d2_min, a.d2_max, a.n_d2)
    tasks = [(lin, float(th), d2s) for th in thetas]
    workers = min(scan_workers(), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_scan_row, tasks))
    else:
        parts = [_scan_row(t) for t in tasks]
    write_csv(out, "scan.csv", ["theta", "d2", "label"], [r for part in parts for r in part])


def cmd_reproduce(figure, out):
    ids = list(FIGURES) if figure == "all" else [figure]
    failed = []
    for fid in ids:
        failed += [c for c in reproduce(fid, out) if not c.passed]
    if failed:
        lines = [f"{'check':40s} {'value':>24s} {'reference':>30s} tol"]
        for c in failed:
            lines.append(f"{c.name:40s} {str(c.value):>24s} {str(c.reference):>30s} {c.tol}")
        raise ToleranceFailure("reproduction outside tolerance:\n" + "\n".join(lines))


HANDLERS = {"equilibria": cmd_equilibria, "classify": cmd_classify, "curves": cmd_curves,
            "turing-test": cmd_turing_test, "normal-form": cmd_normal_form,
            "simulate": cmd_simulate, "scan": cmd_scan}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="herdturing", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        if name == "reproduce":
            sp.add_argument("figure", choices=[*FIGURES, "all"])
        else:
            sp.add_argument("--config", help="JSON configuration file")
            sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                            help="override a dotted config key, e.g. params.theta=0.7")
            sp.add_argument("--emit-config", action="store_true",
                            help="also write the validated configuration to config.json")
        sp.add_argument("--out", required=True, help="output directory")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.subcommand == "reproduce":
            cmd_reproduce(args.figure, args.out)
            return 0
        req = _request(args)
        if args.emit_config:
            write_json(args.out, "config.json", emit_config(req))
        return HANDLERS[args.subcommand](req, args.out) or 0
    except HerdTuringError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
