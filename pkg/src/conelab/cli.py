"""Command-line interface.

Subcommands:
  verify   run a verification scenario (theorem1|theorem2|sip|hammer|kakutani|reflect)
  explore  run an exploration scenario (deviation-metric sweeps), always exit 0
  gen-body write a JSON body descriptor
  report   pretty-print an existing report file

Exit codes: 0 verdict true / exploratory, 1 verdict false, 2 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bodies import (
    Polytope,
    body_to_dict,
    perturbed_superellipsoid,
    random_ellipsoid,
    random_star_surface,
)
from .geometry import GeometryError
from .harness import (
    ConfigError,
    VERIFY_SCENARIOS,
    emit_csv,
    emit_report,
    load_config,
    read_report_body,
    run,
    validate_config,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conelab", description="support-cone geometry harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a verification scenario from a config file")
    p_verify.add_argument("scenario", choices=VERIFY_SCENARIOS)
    _common_run_flags(p_verify)

    p_explore = sub.add_parser("explore", help="run an exploration scenario (always exits 0)")
    _common_run_flags(p_explore)

    p_gen = sub.add_parser("gen-body", help="generate a body descriptor file")
    p_gen.add_argument("--kind", required=True, choices=["ellipsoid", "superellipsoid", "star-surface", "cube", "cross-polytope"])
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--dimension", type=int, default=3)
    p_gen.add_argument("--cond-cap", type=float, default=4.0)
    p_gen.add_argument("--exponent", type=float, default=4.0)
    p_gen.add_argument("--axes", type=str, default=None, help="comma-separated semi-axes")
    p_gen.add_argument("--base-radius", type=float, default=3.0)
    p_gen.add_argument("--amplitude", type=float, default=0.3)
    p_gen.add_argument("--out", required=True)

    p_rep = sub.add_parser("report", help="summarize an existing report file")
    p_rep.add_argument("--in", dest="infile", required=True)
    return parser


def _common_run_flags(p):
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="report path (overrides config output.report)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--tol", type=float, default=None, help="override the config tolerance")
    p.add_argument("--samples", type=int, default=None, help="override the per-case sample count")


_SAMPLES_KEY = {"theorem2": "apexes", "hammer": "directions", "kakutani": "planes", "reflect": "cases"}


def _run_command(args, expect_scenario=None) -> int:
    cfg = load_config(args.config)
    data = dict(cfg.data)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.tol is not None:
        data["tol"] = args.tol
    if args.samples is not None:
        data[_SAMPLES_KEY.get(cfg.scenario, "samples")] = args.samples
    cfg = validate_config(data, source=cfg.source)
    if expect_scenario is not None and cfg.scenario != expect_scenario:
        raise ConfigError(
            f"config is for scenario '{cfg.scenario}' but the command line requests '{expect_scenario}'"
        )
    if expect_scenario is None and cfg.scenario != "explore":
        raise ConfigError(f"'conelab explore' requires an explore config, got '{cfg.scenario}'")
    report = run(cfg)
    out = cfg.get("output", {})
    report_path = args.out or out.get("report")
    if report_path:
        emit_report(report, report_path)
    if out.get("csv"):
        emit_csv(report, out["csv"])
    for case in report.cases:
        line = ", ".join(f"{k}={_short(v)}" for k, v in case.items() if k != "case")
        print(f"[{case.get('case', '?')}] {line}")
    print(f"verdict: {'PASS' if report.verdict else 'FAIL'}"
          + (" (exploratory)" if report.exploratory else ""))
    if report.exploratory:
        return 0
    return 0 if report.verdict else 1


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(f"{x:.4g}" if isinstance(x, float) else str(x) for x in v) + "]"
    return str(v)


def _gen_body(args) -> int:
    axes = [float(a) for a in args.axes.split(",")] if args.axes else [1.0] * args.dimension
    if args.kind == "ellipsoid":
        body = random_ellipsoid(args.seed, args.dimension, args.cond_cap)
    elif args.kind == "superellipsoid":
        body = perturbed_superellipsoid(args.seed, args.exponent, axes)
    elif args.kind == "star-surface":
        body = random_star_surface(args.seed, args.base_radius, args.amplitude, args.dimension)
    elif args.kind == "cube":
        body = Polytope.cube(args.dimension)
    else:
        body = Polytope.cross_polytope(args.dimension)
    Path(args.out).write_text(json.dumps(body_to_dict(body), sort_keys=True, indent=2) + "\n")
    print(f"wrote {args.kind} descriptor to {args.out}")
    return 0


def _summarize_report(args) -> int:
    body = read_report_body(args.infile)
    print(f"schema:   {body.get('schema')}")
    print(f"scenario: {body.get('scenario', {}).get('scenario')}")
    print(f"cases:    {len(body.get('cases', []))}")
    for case in body.get("cases", []):
        keys = [k for k in case if k != "case"][:4]
        detail = ", ".join(f"{k}={_short(case[k])}" for k in keys)
        print(f"  [{case.get('case', '?')}] {detail}")
    agg = body.get("aggregate", {})
    if agg:
        print("aggregate: " + ", ".join(f"{k}={_short(v)}" for k, v in agg.items()))
    print(f"verdict:  {'PASS' if body.get('verdict') else 'FAIL'}")
    return 0 if body.get("verdict") else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _run_command(args, expect_scenario=args.scenario)
        if args.command == "explore":
            return _run_command(args, expect_scenario=None)
        if args.command == "gen-body":
            return _gen_body(args)
        return _summarize_report(args)
    except (ConfigError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except np.linalg.LinAlgError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
