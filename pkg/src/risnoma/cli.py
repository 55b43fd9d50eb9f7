"""Command-line front end.

Subcommands:

* ``sweep --config <path> | --preset <name> --out <csv>``
* ``validate [--config <path> | --preset <name>] [--profile default|strict]``
* ``specfun eval <fn> <args...>`` (debugging helper, one value per line)

The thread count for sweep fan-out comes from the RISNOMA_THREADS
environment variable (default 1).
"""

from __future__ import annotations

import argparse
import sys

from . import specfun
from .config import ConfigError, load_config, preset, PRESET_NAMES
from .harness import run_sweep
from .validation import report_to_csv, run_validation


def _bundle_from_args(args) -> "ConfigBundle":
    if getattr(args, "config", None):
        return load_config(args.config)
    name = getattr(args, "preset", None) or "defaults"
    return preset(name)


def _cmd_sweep(args) -> int:
    bundle = _bundle_from_args(args)
    csv_text = run_sweep(bundle, timing=args.timing)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def _cmd_validate(args) -> int:
    bundle = _bundle_from_args(args)
    names = tuple(args.only.split(",")) if args.only else None
    results, code = run_validation(bundle, profile=args.profile,
                                   n_scale=args.n_scale, names=names)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(report_to_csv(results))
    return code


_SPECFUN_EVAL = {
    "gauss_2f1": (specfun.gauss_2f1, 4),
    "erfc": (specfun.erfc, 1),
    "erfcx": (specfun.erfcx, 1),
    "alzer_eta": (specfun.alzer_eta, 1),
    "gamma_cdf_alzer_approx": (specfun.gamma_cdf_alzer_approx, 2),
}


def _cmd_specfun(args) -> int:
    if args.action != "eval":
        print(f"unknown specfun action {args.action!r}", file=sys.stderr)
        return 2
    name = args.fn
    if name == "chebyshev_gauss":
        rule = specfun.chebyshev_gauss(int(float(args.args[0])))
        for node, weight in zip(rule.nodes, rule.weights):
            print(f"{node!r} {weight!r}")
        return 0
    if name not in _SPECFUN_EVAL:
        print(f"unknown function {name!r}; available: "
              f"{', '.join([*_SPECFUN_EVAL, 'chebyshev_gauss'])}", file=sys.stderr)
        return 2
    fn, arity = _SPECFUN_EVAL[name]
    if len(args.args) != arity:
        print(f"{name} expects {arity} argument(s)", file=sys.stderr)
        return 2
    raw = [float(a) for a in args.args]
    if name in ("alzer_eta",):
        value = fn(int(raw[0]))
    elif name == "gamma_cdf_alzer_approx":
        value = fn(raw[0], int(raw[1]))
    else:
        value = fn(*raw)
    print(repr(float(value)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risnoma",
        description="Stochastic-geometry performance engine for RIS-aided "
                    "multi-cell NOMA downlink networks.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep, emit CSV")
    p_sweep.add_argument("--config", help="flat key=value config file")
    p_sweep.add_argument("--preset", choices=PRESET_NAMES,
                         help="bundled sweep preset")
    p_sweep.add_argument("--out", default="-", help="output CSV path (- = stdout)")
    p_sweep.add_argument("--timing", action="store_true",
                         help="append wall-clock comment rows (non-deterministic)")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_val = sub.add_parser("validate", help="run the cross-check suite")
    p_val.add_argument("--config", help="flat key=value config file")
    p_val.add_argument("--preset", choices=PRESET_NAMES)
    p_val.add_argument("--profile", choices=("default", "strict"),
                       default="default")
    p_val.add_argument("--n-scale", type=float, default=1.0,
                       help="scale factor on all trial budgets")
    p_val.add_argument("--only", help="comma-separated check keys to run")
    p_val.add_argument("--out", help="write the report CSV here")
    p_val.set_defaults(fn=_cmd_validate)

    # debugging helper; intentionally absent from the help epilog
    p_fun = sub.add_parser("specfun")
    p_fun.add_argument("action")
    p_fun.add_argument("fn")
    p_fun.add_argument("args", nargs="*")
    p_fun.set_defaults(fn=_cmd_specfun)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
