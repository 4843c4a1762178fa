"""Command-line entry point ``ks-verify``.

Exit codes: 0 all checks passed, 1 some check failed, 2 invalid fixture or
configuration.
"""

import argparse
import sys

import jsonschema

from .fixtures import BUILTIN, FixtureError
from .harness import (
    SUITES,
    ConfigError,
    SuiteConfig,
    emit_report,
    load_report,
    report_text,
    run_suite,
)


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x)


def build_parser():
    parser = argparse.ArgumentParser(prog="ks-verify", description="Verify period-lattice and Kodaira-Spencer identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--r", type=_ints, help="comma-separated matrix sizes r")
    v.add_argument("--g", type=int, help="number of places g (siegel)")
    v.add_argument("--samples", type=int, help="random samples per check")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--digits", type=int, help="working precision (default from KS_VERIFY_DIGITS or 40)")
    v.add_argument("--fixture", action="append", help=f"fixture path or builtin name ({', '.join(BUILTIN)}); repeatable")
    v.add_argument("--p", type=_ints, help="comma-separated odd primes")
    v.add_argument("--k", type=_ints, help="comma-separated truncation levels")
    case = v.add_mutually_exclusive_group()
    case.add_argument("--good", action="store_true", help="local: good-prime lemma only")
    case.add_argument("--bad", action="store_true", help="local: bad-prime lemma only")
    v.add_argument("--grid", type=int, default=3, help="cech: boxes per side")
    v.add_argument("--out", help="write the report to this path")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--timing", action="store_true", help="include per-check runtimes (breaks byte determinism)")

    r = sub.add_parser("report", help="render a saved JSON report")
    r.add_argument("--in", dest="path", required=True)
    r.add_argument("--format", choices=("json", "text"), default="text")
    return parser


def config_from_args(args):
    suites = SUITES if args.suite == "all" else (args.suite,)
    kw = {"suites": suites, "seed": args.seed, "samples": args.samples, "grid": args.grid, "timing": args.timing}
    if args.digits is not None:
        kw["digits"] = args.digits
    if args.r is not None or args.g is not None:
        rs = args.r or (1,)
        g = args.g or 1
        kw["siegel_shapes"] = tuple((r, g) for r in rs)
        kw["lemma_r"] = rs
        kw["ks_r"] = rs
    if args.fixture:
        kw["fixtures"] = tuple(args.fixture)
    if args.p:
        kw["primes"] = args.p
    if args.k:
        kw["levels"] = args.k
    if args.good:
        kw["local_cases"] = ("good",)
    elif args.bad:
        kw["local_cases"] = ("bad",)
    return SuiteConfig(**kw)


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "report":
        try:
            data = load_report(args.path)
        except (OSError, ValueError, jsonschema.ValidationError) as exc:
            print(f"error: cannot read report: {exc}", file=sys.stderr)
            return 2
        sys.stdout.write(emit_report(data, args.format))
        return 0 if data["passed"] else 1
    try:
        config = config_from_args(args)
        report = run_suite(config)
    except (FixtureError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    elif args.format == "json":
        sys.stdout.write(report_text(report))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
