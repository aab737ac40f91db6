"""Command-line interface: check, verify, coverage, diff, simulate, table.

Exit codes: 0 ok/verified, 1 violations, 2 coverage below threshold,
3 parse or validation error, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .diff import diff_odds, render_diff
from .dsl import ParseError, parse_events, parse_odd, parse_scenarios
from .model import AgOddError, Quantity, has_errors, sort_diagnostics, validate_model
from .process import WorldState, check_processes, simulate
from .render import render_report, render_table, render_trace
from .scenario import validate_scenario
from .verify import DEFAULT_GRID, Verdict, coverage, find_gaps, gap_fraction, verify_iteration

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_COVERAGE = 2
EXIT_INVALID = 3
EXIT_USAGE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_odd(path: str):
    odd = parse_odd(_read(path), source=path)
    diags = sort_diagnostics(validate_model(odd) + check_processes(odd))
    return odd, diags


def _report_diags(diags) -> None:
    for d in diags:
        print(d, file=sys.stderr)


def _default_grid() -> int:
    env = os.environ.get("AGODD_GRID")
    if env is None:
        return DEFAULT_GRID
    try:
        grid = int(env)
    except ValueError:
        raise UsageError(f"AGODD_GRID must be a positive integer, got {env!r}") from None
    if grid < 1:
        raise UsageError(f"AGODD_GRID must be a positive integer, got {env!r}")
    return grid


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid positive integer {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"invalid positive integer {text!r}")
    return v


def _threshold(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid threshold {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"threshold must lie in [0, 1], got {text!r}")
    return v


def _load_inputs(args):
    odd, diags = _load_odd(args.odd)
    scenarios = parse_scenarios(_read(args.scenarios), source=args.scenarios)
    for s in scenarios:
        diags += validate_scenario(s, odd)
    return odd, scenarios, sort_diagnostics(diags)


def cmd_check(args) -> int:
    odd, diags = _load_odd(args.odd)
    _report_diags(diags)
    if has_errors(diags):
        return EXIT_INVALID
    print(f"{odd.name}: ok ({len(diags)} diagnostics)")
    return EXIT_OK


def cmd_verify(args) -> int:
    odd, scenarios, diags = _load_inputs(args)
    _report_diags(diags)
    if has_errors(diags):
        return EXIT_INVALID
    grid = args.grid or _default_grid()
    report = verify_iteration(odd, scenarios, args.threshold, grid, args.iteration)
    if args.json:
        print(json.dumps(report.to_json(), indent=2, ensure_ascii=False, sort_keys=False))
    else:
        sys.stdout.write(render_report(report, odd))
    if args.plot:
        from .plotting import plot_report

        plot_report(report, odd, scenarios, args.plot)
    if report.verdict is Verdict.NEEDS_ODD_REVISION:
        return EXIT_VIOLATIONS
    if report.verdict is Verdict.NEEDS_SCENARIOS:
        return EXIT_COVERAGE
    return EXIT_OK


def cmd_coverage(args) -> int:
    odd, scenarios, diags = _load_inputs(args)
    _report_diags(diags)
    if has_errors(diags):
        return EXIT_INVALID
    grid = args.grid or _default_grid()
    cov = coverage(odd, scenarios, grid)
    gaps = find_gaps(odd, scenarios, grid)
    print(f"coverage {cov.overall:.4f} at grid {grid} ({cov.covered_cells}/{cov.total_cells} cells)")
    for name, frac in cov.per_dimension.items():
        print(f"  {name}: {frac:.4f}")
    print(f"gaps: {len(gaps)} (volume fraction {gap_fraction(gaps, cov):.4f})")
    for g in gaps:
        print(f"  {g.describe(odd)} ({g.cells} cells)")
    if args.plot:
        from .plotting import plot_report

        plot_report(verify_iteration(odd, scenarios, 1.0, grid), odd, scenarios, args.plot)
    return EXIT_OK if cov.overall >= 1.0 else EXIT_COVERAGE


def cmd_diff(args) -> int:
    old, d_old = _load_odd(args.old)
    new, d_new = _load_odd(args.new)
    diags = sort_diagnostics(d_old + d_new)
    _report_diags(diags)
    if has_errors(diags):
        return EXIT_INVALID
    sys.stdout.write(render_diff(diff_odds(old, new)))
    return EXIT_OK


def _parse_state(items, odd) -> WorldState:
    values = {}
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--state expects NAME=VALUE, got {item!r}")
        dim = odd.dimension(key)
        if dim is None:
            raise UsageError(f"--state: unknown dimension {key!r}")
        raw = raw.strip()
        if dim.is_categorical:
            values[key] = raw
            continue
        num = raw
        unit = dim.unit
        if unit and raw.endswith(unit):
            num = raw[: -len(unit)].strip()
        try:
            values[key] = Quantity(float(num), unit)
        except ValueError:
            raise UsageError(f"--state: cannot read {raw!r} as {unit or 'unitless'} number") from None
    return WorldState.of(values)


def cmd_simulate(args) -> int:
    odd, diags = _load_odd(args.odd)
    events = parse_events(_read(args.events), source=args.events)
    _report_diags(diags)
    if has_errors(diags):
        return EXIT_INVALID
    trace = simulate(_parse_state(args.state, odd), odd, events)
    if args.json:
        print(json.dumps(trace.to_json(), indent=2, ensure_ascii=False))
    else:
        sys.stdout.write(render_trace(trace))
    return EXIT_OK


def cmd_table(args) -> int:
    odd, diags = _load_odd(args.odd)
    _report_diags(diags)
    if has_errors(diags):
        return EXIT_INVALID
    sys.stdout.write(render_table(odd))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="agodd", description="Agricultural ODD authoring, verification and simulation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="parse and validate an ODD")
    c.add_argument("odd")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("verify", help="run one verification iteration")
    v.add_argument("odd")
    v.add_argument("scenarios")
    v.add_argument("--grid", type=_positive_int, default=None, help=f"cells per dimension (default {DEFAULT_GRID} or $AGODD_GRID)")
    v.add_argument("--threshold", type=_threshold, default=1.0, help="coverage needed for 'verified' (default 1.0)")
    v.add_argument("--iteration", type=_positive_int, default=1)
    v.add_argument("--json", action="store_true", help="emit the agodd-report/1 JSON report")
    v.add_argument("--plot", metavar="PATH", help="also write a coverage figure")
    v.set_defaults(func=cmd_verify)

    cv = sub.add_parser("coverage", help="coverage and gaps")
    cv.add_argument("odd")
    cv.add_argument("scenarios")
    cv.add_argument("--grid", type=_positive_int, default=None)
    cv.add_argument("--plot", metavar="PATH")
    cv.set_defaults(func=cmd_coverage)

    d = sub.add_parser("diff", help="structural diff of two ODDs")
    d.add_argument("old")
    d.add_argument("new")
    d.set_defaults(func=cmd_diff)

    s = sub.add_parser("simulate", help="run an event script through the processes")
    s.add_argument("odd")
    s.add_argument("events")
    s.add_argument("--state", action="append", default=[], metavar="NAME=VALUE", help="initial value, e.g. crop_height=50cm")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("table", help="render the ODD as an LoD table")
    t.add_argument("odd")
    t.set_defaults(func=cmd_table)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"agodd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"error[{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_INVALID
    except AgOddError as exc:
        print(f"error[{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run_cli())
