"""Command-line front end: `rnls <scenario> [--config F] [--out D]
[--override key=value ...]` with scenarios groundstate, evolve, threshold,
verify, and fit."""

from __future__ import annotations

import argparse
import sys

from .config import ExperimentConfig, SCENARIOS, apply_overrides, load_config
from .errors import BracketError, ConfigurationError
from .experiments import run_evolve, run_fit, run_groundstate, run_threshold, run_verify


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rnls",
                                     description="Rotating focusing NLS simulator")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="config file (key = value lines)")
        sp.add_argument("--out", help="output directory (overrides output_dir)")
        sp.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="config override, repeatable")
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    apply_overrides(cfg, args.override)
    cfg.scenario = args.scenario
    if args.out:
        cfg.output_dir = args.out
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.scenario == "groundstate":
            summary = run_groundstate(cfg)
            print(f"omega = {summary['omega']!r}")
            print(f"residual = {summary['residual']:.3e} after {summary['iterations']} iterations")
        elif args.scenario == "evolve":
            outcome = run_evolve(cfg)
            print(f"classification = {outcome.classification} ({outcome.reason})")
            print(f"t_final = {outcome.t_final!r}  sup_growth = {outcome.sup_growth:.4g}")
            if outcome.estimated_T is not None:
                print(f"estimated_T = {outcome.estimated_T!r}")
        elif args.scenario == "threshold":
            result = run_threshold(cfg)
            print(f"C_star in ({result.C_lo_final!r}, {result.C_hi_final!r})")
            for amp, cls in result.runs:
                print(f"  C = {amp!r}: {cls}")
            if not result.monotone:
                print("warning: non-monotone classifications in the bisection trail")
        elif args.scenario == "verify":
            report = run_verify(cfg)
            failed = 0
            for name in sorted(report):
                entry = report[name]
                status = "PASS" if entry["pass"] else "FAIL"
                failed += 0 if entry["pass"] else 1
                print(f"{status} {name}: measured {entry['measured']:.3e} "
                      f"vs threshold {entry['threshold']:.3e}")
            return 0 if failed == 0 else 2
        elif args.scenario == "fit":
            summary = run_fit(cfg)
            print(f"T_hat = {summary['T_hat']!r}")
            print(f"kappa_hat = {summary['kappa_hat']!r}")
            print(f"gbound_slope = {summary['gbound_slope']!r} "
                  f"(R^2 = {summary['r_squared']:.4f})")
            print(f"universal bound: {'PASS' if summary['bound_pass'] else 'FAIL'} "
                  f"(threshold {summary['bound_threshold']!r})")
    except (ConfigurationError, BracketError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
