"""Command line front-end: ``jetcas diagram`` and ``jetcas verify``.

Exit codes: 0 when everything passes, 1 when a check fails or a table does
not match ``--expect``, 2 for bad input (unreadable or malformed JSON, bad
expressions, unknown names) and for rank instability.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import config as cfgmod
from .lie_equations import (KINDS, Metric, RankInstabilityError, build_system, fiber_dim, sample_points,
                            sequence_dims)
from .suites import REFERENCE_DIAGRAM, SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def load_metric(spec: str, n: int) -> Metric:
    """A builtin name (euclidean, minkowski) or a JSON file with a "metric" section."""
    if spec in ("euclidean", "minkowski"):
        return Metric.named(spec, n)
    data = cfgmod.load(spec)
    sec = cfgmod.section(data, "metric")
    coords = cfgmod.names(sec.get("coords"), "metric.coords")
    entries = cfgmod.matrix(sec.get("entries"), coords, "metric.entries")
    try:
        return Metric(entries, coords, sec.get("signature"))
    except ValueError as exc:
        raise cfgmod.ConfigError(f"{spec}: metric: {exc}") from None


def diagram_report(kind: str, metric: Metric, seed: int = 0) -> dict:
    S = build_system(metric, kind)
    dims = sequence_dims(S, seed=seed)
    rs = sorted(r for r in dims if isinstance(r, int))
    pt = sample_points(S, 1, seed)[0]
    return {
        "system": kind,
        "n": metric.n,
        "metric": metric.signature or "custom",
        "parameters": fiber_dim(S, pt),
        "C": [dims[r]["C"] for r in rs],
        "CE": [dims[r]["CE"] for r in rs],
        "F": [dims[r]["F"] for r in rs],
        "F_quotient": [dims[r]["F_quotient"] for r in rs],
        "additive": [dims[r]["additive"] for r in rs],
        "injective": [dims[r]["injective"] for r in rs],
        "euler": list(dims["meta"]["euler"]),
    }


def _expected(name: str, kind: str, n: int) -> dict:
    if name != "paper":
        raise InputError(f"unknown --expect value {name!r} (only 'paper')")
    if kind != "conformal" or n != 4:
        raise InputError("--expect paper is only defined for the conformal system at n=4")
    return {k: list(v) for k, v in REFERENCE_DIAGRAM.items()}


def _row(label: str, vals, width: int) -> str:
    return label.ljust(8) + "".join(str(v).rjust(width) for v in vals)


def render_diagram(rep: dict, verdict: Optional[str]) -> str:
    w = max(len(str(v)) for k in ("C", "CE", "F", "F_quotient") for v in rep[k]) + 2
    rs = range(len(rep["C"]))
    lines = [
        f"{rep['system']} system, n={rep['n']}, metric {rep['metric']}: {rep['parameters']} parameters",
        _row("r", rs, w),
        _row("C_r", rep["C"], w),
        _row("C_r(E)", rep["CE"], w),
        _row("F_r", rep["F"], w),
        _row("C+F=CE", ["yes" if a else "no" for a in rep["additive"]], w),
    ]
    if rep["F_quotient"] != rep["F"]:
        lines.append(_row("F_r/im", rep["F_quotient"], w)
                     + "   (direct quotient; differs where the symbol map is not injective)")
    if verdict is not None:
        lines.append(f"expect: {verdict}")
    return "\n".join(lines)


def cmd_diagram(args) -> int:
    metric = load_metric(args.metric, args.n)
    if metric.n != args.n:
        raise InputError(f"metric has dimension {metric.n}, --n is {args.n}")
    expect = _expected(args.expect, args.system, args.n) if args.expect else None
    rep = diagram_report(args.system, metric, args.seed)
    ok = all(rep["additive"])
    verdict = None
    if expect is not None:
        match = all(rep[k] == v for k, v in expect.items())
        verdict = "PASS" if match else "FAIL"
        ok = ok and match
        rep["expect"] = {"against": args.expect, "status": verdict}
    if args.format == "json":
        print(json.dumps(rep, sort_keys=True))
    else:
        print(render_diagram(rep, verdict))
    return EXIT_OK if ok else EXIT_FAIL


def render_checks(checks) -> str:
    w = max((len(c.name) for c in checks), default=0)
    lines = []
    for c in checks:
        line = f"{'PASS' if c.passed else 'FAIL'}  {c.name.ljust(w)}"
        if c.residual_degree is not None:
            line += f"  residual degree {c.residual_degree}"
        if c.detail:
            line += f"  {c.detail}"
        lines.append(line.rstrip())
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks)} checks, {failed} failed")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    cfg = cfgmod.load(args.config) if args.config else None
    checks = run_suite(args.suite, args.seed, cfg)
    ok = all(c.passed for c in checks)
    if args.format == "json":
        print(json.dumps({"suite": args.suite, "seed": args.seed, "passed": ok,
                          "checks": [c.as_dict() for c in checks]}, sort_keys=True))
    else:
        print(render_checks(checks))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jetcas", description="Exact jet and Lie-equation calculations.")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("diagram", help="dimension table of a Lie equation system")
    d.add_argument("system", choices=KINDS)
    d.add_argument("--n", type=int, default=4, help="number of base coordinates (default 4)")
    d.add_argument("--metric", default="minkowski",
                   help="euclidean, minkowski or a JSON metric file (default minkowski)")
    d.add_argument("--expect", default=None, help="compare against stored values ('paper')")
    d.add_argument("--seed", type=int, default=0, help="seed for the sample points")
    d.add_argument("--format", choices=("text", "json"), default="text")
    d.set_defaults(func=cmd_diagram)

    v = sub.add_parser("verify", help="run residual suites")
    v.add_argument("suite", choices=tuple(SUITES) + ("all",))
    v.add_argument("--config", default=None, help="JSON input file (schema 1)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "n", 1) < 1:
        print("error: --n must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (cfgmod.ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RankInstabilityError as exc:
        print(f"error: rank instability: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
