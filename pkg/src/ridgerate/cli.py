"""Command-line interface.

Verbs::

    ridgerate run CONFIG [--output PATH]
    ridgerate predict S M K D METHOD
    ridgerate targets list [--dim D]
    ridgerate oracle free-knot --target NAME --k K --n N [--dp-grid G]

Exit status is 0 on success, 2 for configuration or parameter errors and 3
for numerical failures.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import NumericalError, ParameterError
from .harness import METHODS, emit_csv, format_csv, load_config, predict_exponents, run_experiment
from .oracles import free_knot_fit
from .targets import get_target, target_names

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.output:
        cfg.output = args.output
    report = run_experiment(cfg)
    if cfg.output and cfg.output != "-":
        emit_csv(report, cfg.output)
    else:
        sys.stdout.write(format_csv(report, cfg.timing))
    return EXIT_OK


def _cmd_predict(args) -> int:
    t, q = predict_exponents(args.s, args.m, args.k, args.d, args.method)
    print(f"t={format(t, '.12g')} q={format(q, '.12g')}")
    return EXIT_OK


def _cmd_targets(args) -> int:
    for name in target_names():
        f = get_target(name, args.dim)
        mem = f.membership
        smax = "inf" if np.isinf(mem.s_max) else format(mem.s_max, "g")
        kind = "discrete" if f.discrete else "continuous"
        print(f"{name}\tdim={args.dim}\t{kind}\ts<{smax}")
    return EXIT_OK


def _cmd_free_knot(args) -> int:
    f = get_target(args.target, 1)
    fit = free_knot_fit(f, args.n, args.k, args.dp_grid)
    print("breakpoints=" + ",".join(format(b, ".12g") for b in fit.breakpoints))
    print(f"l2_error={format(fit.l2_error, '.12g')}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ridgerate", description="Approximation-rate experiments for ridge networks.")
    sub = p.add_subparsers(dest="verb", required=True)

    r = sub.add_parser("run", help="run an n-sweep described by a key=value config file")
    r.add_argument("config")
    r.add_argument("--output", help="CSV path (overrides the config; '-' for stdout)")
    r.set_defaults(func=_cmd_run)

    pr = sub.add_parser("predict", help="theoretical exponents t and q")
    pr.add_argument("s", type=float)
    pr.add_argument("m", type=int)
    pr.add_argument("k", type=int)
    pr.add_argument("d", type=int)
    pr.add_argument("method", choices=METHODS)
    pr.set_defaults(func=_cmd_predict)

    t = sub.add_parser("targets", help="list built-in targets")
    t.add_argument("action", choices=["list"])
    t.add_argument("--dim", type=int, default=1)
    t.set_defaults(func=_cmd_targets)

    o = sub.add_parser("oracle", help="reference approximations")
    osub = o.add_subparsers(dest="oracle", required=True)
    fk = osub.add_parser("free-knot", help="optimal free-knot piecewise polynomial on [0, 1]")
    fk.add_argument("--target", default="cossum")
    fk.add_argument("--k", type=int, default=1)
    fk.add_argument("--n", type=int, required=True, help="interior breakpoints")
    fk.add_argument("--dp-grid", type=int, default=512)
    fk.set_defaults(func=_cmd_free_knot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
