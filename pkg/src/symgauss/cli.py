"""Command-line scenario runner and benchmark harness.

Exit codes: 0 success, 2 usage error or unknown scenario, 3 output path not
writable, 4 numerical failure.
"""
import argparse
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND, available_backends
from .io import FORMATS, stamp_meta, write_output
from .scenarios import SCENARIOS, TWO_PI, run_scenario

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

EPILOG = """\
exit codes:
  0  success
  2  unknown scenario or invalid arguments
  3  output path cannot be written
  4  numerical failure (diagnostic on stderr)

CSV output starts with '# key: value' metadata lines (parameters, seed,
package version, optional UTC timestamp) followed by a header row. JSON
output is {"meta": {...}, "data": [{column: value}, ...]}. Quadratures use
hbar = 2 (vacuum variance 1); entropies are in nats.
"""


def _int(text):
    """Integer flag that also accepts scientific notation such as ``1e4``."""
    value = float(text)
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return int(value)


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text):
    return [_int(v) for v in text.split(",") if v.strip()]


def _common(p):
    p.add_argument("--seed", type=_int, default=0, help="64-bit RNG seed (default 0)")
    p.add_argument("--out", help="output file (default: <scenario>.<format> in the current directory)")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--no-timestamp", action="store_true", help="omit the generation timestamp from the metadata")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="symgauss",
        description="Gaussian quantum state scenarios and benchmarks.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--list", action="store_true", help="list the available scenarios and exit")
    sub = parser.add_subparsers(dest="scenario", metavar="scenario")

    p = sub.add_parser("quadrature", help=SCENARIOS["quadrature"][1])
    p.add_argument("--omega", type=float, default=TWO_PI)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--r", type=float, default=1.2)
    p.add_argument("--t-max", type=float, default=None, help="default 2/omega")
    p.add_argument("--n-times", type=_int, default=200)
    _common(p)

    p = sub.add_parser("damped", help=SCENARIOS["damped"][1])
    p.add_argument("--omega", type=float, default=TWO_PI)
    p.add_argument("--gamma", type=float, default=TWO_PI * 0.3)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--t-max", type=float, default=None, help="default 3.5 periods")
    p.add_argument("--n-times", type=_int, default=200)
    _common(p)

    p = sub.add_parser("squeezed-damped", help=SCENARIOS["squeezed-damped"][1])
    p.add_argument("--omega", type=float, default=TWO_PI)
    p.add_argument("--gamma", type=float, default=TWO_PI * 0.1)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--r", type=float, default=1.2)
    p.add_argument("--t-max", type=float, default=6.0)
    p.add_argument("--n-times", type=_int, default=200)
    _common(p)

    p = sub.add_parser("displacement", help=SCENARIOS["displacement"][1])
    p.add_argument("--r", type=float, default=0.4)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--taus", type=_float_list, default=[1.0, 0.8, 0.6, 0.5], help="comma-separated transmissions")
    p.add_argument("--theta-max", type=float, default=6 * np.pi)
    p.add_argument("--n-times", type=_int, default=200, help="number of phase samples")
    _common(p)

    p = sub.add_parser("opo", help=SCENARIOS["opo"][1])
    p.add_argument("--gamma", type=float, default=TWO_PI * 10)
    p.add_argument("--chi", type=float, default=None, help="default gamma/3")
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--t-max", type=float, default=0.36)
    p.add_argument("--n-times", type=_int, default=2000)
    p.add_argument("--n-trajectories", type=_int, default=100)
    p.add_argument("--s", type=float, default=1e-5, help="general-dyne parameter")
    p.add_argument("--phi", type=float, default=np.pi / 2, help="general-dyne angle")
    _common(p)

    p = sub.add_parser("random-circuits", help=SCENARIOS["random-circuits"][1])
    p.add_argument("--n-modes", type=_int, default=20)
    p.add_argument("--turns", type=_int_list, default=[2, 4, 6, 8, 10], help="comma-separated circuit depths")
    p.add_argument("--n-realizations", type=_int, default=50)
    p.add_argument("--mean-alpha", type=float, default=0.1)
    p.add_argument("--std-alpha", type=float, default=0.01)
    p.add_argument("--r-max", type=float, default=0.5)
    p.add_argument("--workers", type=_int, default=1)
    _common(p)

    p = sub.add_parser("bench", help="time unconditional dynamics of all-to-all coupled modes")
    p.add_argument("--modes", type=_int_list, default=[5, 10, 20, 40], help="comma-separated mode counts")
    p.add_argument("--reps", type=_int, default=5)
    p.add_argument("--steps", type=_int, default=10_000)
    p.add_argument("--backend", choices=["compiled", "python"], default=None)
    _common(p)
    return parser


def _print_list():
    width = max(len(k) for k in SCENARIOS) + 2
    for name, (_, text) in SCENARIOS.items():
        print(f"{name:<{width}}{text}")
    print(f"{'bench':<{width}}timing of unconditional dynamics vs number of modes")


def _scenario_params(args):
    skip = {"scenario", "list", "out", "format", "no_timestamp"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _bench(args):
    from .bench import run_bench

    if args.backend and args.backend not in available_backends():
        raise ImportError(f"backend {args.backend!r} is not available")
    report = run_bench(args.modes, args.reps, args.steps, args.seed, args.backend)
    lo, hi = report.exponent_ci
    meta = {
        "params": {"modes": list(map(int, report.modes)), "reps": report.reps, "steps": report.steps},
        "backend": report.backend,
        "exponent": report.exponent,
        "exponent_ci95": [lo, hi],
    }
    timing = ", ".join(f"N={n}: {s:.3f}s" for n, s in zip(report.modes, report.seconds))
    summary = f"{timing}; exponent {report.exponent:.3f} (95% CI {lo:.3f}..{hi:.3f}, backend {report.backend})"
    return report.columns(), meta, summary


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list:
        _print_list()
        return 0
    if args.scenario is None:
        parser.print_usage(sys.stderr)
        print("symgauss: error: a scenario is required (see --list)", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.scenario == "bench":
            columns, meta, summary = _bench(args)
        else:
            result = run_scenario(args.scenario, **_scenario_params(args))
            columns, meta, summary = result.columns, result.meta, result.summary
    except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"symgauss: numerical failure in {args.scenario}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    header = {"tool": f"symgauss {__version__}", "scenario": args.scenario, "seed": args.seed,
              "backend": meta.pop("backend", BACKEND)}
    header.update(meta)
    header = stamp_meta(header, timestamp=not args.no_timestamp)
    out = args.out or f"{args.scenario}.{args.format}"
    try:
        write_output(out, columns, header, args.format)
    except OSError as exc:
        print(f"symgauss: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    n_rows = len(next(iter(columns.values())))
    print(f"{args.scenario}: wrote {out} ({n_rows} rows); {summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
