"""Command-line front end: run, sweep, verify, report.

Exit codes: 0 success, 1 run failure (policy block, aborted replication,
verification mismatch), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources

from . import artifacts, report, scenario, sim, sweep
from .errors import BlockedByPolicy, ParseError, RanloopError, ValidationError

EXIT_OK = 0
EXIT_RUN_FAILURE = 1
EXIT_USAGE = 2

BUNDLED = ("wobble", "speed_sweep", "cho_chain", "kpm_replay")


def resolve_scenario(name_or_path: str) -> str:
    """A bundled scenario name or a path to a scenario file."""
    if name_or_path in BUNDLED:
        return str(resources.files("ranloop.scenarios") / f"{name_or_path}.scn")
    return name_or_path


def cmd_run(args) -> int:
    path = resolve_scenario(args.scenario)
    try:
        with open(path) as f:
            text = f.read()
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_USAGE
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.mode is not None:
        overrides["mode"] = args.mode
    try:
        config = scenario.load_scenario(text, overrides)
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = sim.run(config)
    except BlockedByPolicy as exc:
        print(f"run aborted: BlockedByPolicy: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    except RanloopError as exc:
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    artifacts.write_run(result, args.out)
    summary = result.summary
    print(f"run complete: {summary['scenario']} seed={summary['seed']}")
    print(f"  attempts by mode: {summary['by_mode']}")
    print(f"  ping-pongs detected: {summary['ping_pong_count']}")
    print(f"  artifacts: {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    path = resolve_scenario(args.scenario)
    if not os.path.exists(path):
        print(f"error: no such scenario: {path}", file=sys.stderr)
        return EXIT_USAGE
    try:
        values = tuple(float(v) for v in args.values.split(","))
        modes = tuple(m.strip() for m in args.modes.split(","))
        spec = sweep.SweepSpec(
            scenario_path=path,
            axis_name=args.axis,
            axis_values=values,
            modes=modes,
            replications=args.replications,
            base_seed=args.seed or 0,
        )
    except (ValueError, ValidationError) as exc:
        print(f"sweep spec error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = sweep.run_sweep(spec, args.out, workers=args.workers)
    for row in result.rows:
        print(
            f"  {args.axis}={row.axis_value:g} mode={row.mode}: "
            f"{row.successes}/{row.attempts} ({row.rate_percent:.1f}%)"
            + (f" [{row.aborted} aborted]" if row.aborted else "")
        )
    if result.any_aborted:
        for err in result.errors:
            print(f"aborted: {err}", file=sys.stderr)
        return EXIT_RUN_FAILURE
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        identical, diffs = artifacts.verify_dirs(args.golden, args.candidate)
    except FileNotFoundError as exc:
        print(f"missing artifact: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if identical:
        print("verify: identical")
        return EXIT_OK
    for diff in diffs:
        print(f"verify: {diff}", file=sys.stderr)
    return EXIT_RUN_FAILURE


def cmd_report(args) -> int:
    src = args.dir
    out = args.out or os.path.join(src, "figures")
    if not os.path.isdir(src):
        print(f"error: no such directory: {src}", file=sys.stderr)
        return EXIT_USAGE
    written = []
    if os.path.exists(os.path.join(src, sweep.SWEEP_TABLE)):
        written += report.render_sweep(src, out)
    if os.path.exists(os.path.join(src, artifacts.RSRP_TRACE)):
        written += report.render_run(src, out)
    if not written:
        print("error: directory holds neither run nor sweep artifacts", file=sys.stderr)
        return EXIT_USAGE
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ranloop",
        description="Deterministic 5G NR mobility-control simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario")
    p_run.add_argument("--scenario", required=True,
                       help=f"path or bundled name {BUNDLED}")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--mode", choices=("traditional", "cho"), default=None)
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="replication sweep over one axis")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--axis", default="speed_kmh")
    p_sweep.add_argument("--values", required=True, help="comma-separated")
    p_sweep.add_argument("--modes", default="traditional,cho")
    p_sweep.add_argument("--replications", type=int, default=5)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="byte-compare artifact bundles")
    p_verify.add_argument("golden")
    p_verify.add_argument("candidate")
    p_verify.set_defaults(func=cmd_verify)

    p_report = sub.add_parser("report", help="render figures from artifacts")
    p_report.add_argument("dir")
    p_report.add_argument("--out", default=None)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
