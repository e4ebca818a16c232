"""``qmet`` command line: run builtins or scenario files, list and describe builtins."""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from ..errors import CapExceededError
from .builtins import BUILTINS, RunContext, run_builtin
from .report import Report, to_structured, to_text
from .scenario import ParseError, parse_scenario, run_scenario

ENV_PREFIX = "QMET_"


def _env(name: str, default):
    v = os.environ.get(ENV_PREFIX + name)
    if v is None:
        return default
    if isinstance(default, bool):
        return v.strip().lower() in ("1", "true", "yes", "on")
    return type(default)(v)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmet", description="Checks for quantale-valued metric spaces and their powerspaces.")
    sub = p.add_subparsers(dest="verb", required=True)
    run = sub.add_parser("run", help="run builtins (or 'all') and scenario files")
    run.add_argument("targets", nargs="+", help="builtin names, 'all', or scenario file paths")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--cap-carrier", type=int, default=None)
    run.add_argument("--cap-points", type=int, default=None)
    run.add_argument("--format", choices=("text", "structured"), default=None)
    run.add_argument("--fail-fast", action="store_true", default=None)
    run.add_argument("--output", "-o", type=Path, default=None, help="write the report here instead of stdout")
    sub.add_parser("list", help="list builtin names")
    d = sub.add_parser("describe", help="describe a builtin")
    d.add_argument("name")
    return p


def _options(args) -> dict:
    return {
        "seed": args.seed if args.seed is not None else _env("SEED", 0),
        "cap_carrier": args.cap_carrier if args.cap_carrier is not None else _env("CAP_CARRIER", RunContext.cap_carrier),
        "cap_points": args.cap_points if args.cap_points is not None else _env("CAP_POINTS", RunContext.cap_points),
        "format": args.format or _env("FORMAT", "text"),
        "fail_fast": args.fail_fast if args.fail_fast is not None else _env("FAIL_FAST", False),
    }


def _run(args) -> int:
    try:
        opt = _options(args)
    except ValueError as exc:
        print(f"qmet: bad environment override: {exc}", file=sys.stderr)
        return 2
    if opt["format"] not in ("text", "structured"):
        print(f"qmet: unknown format {opt['format']!r}", file=sys.stderr)
        return 2
    ctx = RunContext(opt["seed"], opt["cap_carrier"], opt["cap_points"])
    targets = []
    for t in args.targets:
        if t == "all":
            targets += [n for n in BUILTINS if n != "determinism"]
        elif t in BUILTINS:
            targets.append(t)
        elif Path(t).is_file():
            try:
                targets.append(parse_scenario(Path(t).read_text()))
            except ParseError as exc:
                print(f"{t}: {exc}", file=sys.stderr)
                return 2
            except CapExceededError as exc:
                print(f"{t}: {exc}", file=sys.stderr)
                return 2
        else:
            print(f"qmet: {t!r} is neither a builtin nor a file (try 'qmet list')", file=sys.stderr)
            return 2
    reports = []
    for t in targets:
        if isinstance(t, str):
            t0 = time.perf_counter()
            results = run_builtin(t, ctx)
            rep = Report(t, ctx.seed, results, time.perf_counter() - t0)
        else:
            rep = run_scenario(t, ctx.seed, ctx.cap_points, opt["fail_fast"])
        reports.append(rep)
        if opt["fail_fast"] and not rep.passed:
            break
    out = to_structured(reports) if opt["format"] == "structured" else to_text(reports)
    if args.output:
        args.output.write_text(out)
    else:
        sys.stdout.write(out)
    return 0 if all(r.passed for r in reports) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "list":
        for n in BUILTINS:
            print(n)
        return 0
    if args.verb == "describe":
        b = BUILTINS.get(args.name)
        if b is None:
            print(f"qmet: unknown builtin {args.name!r}", file=sys.stderr)
            return 2
        print(f"{b.name}: {b.summary}")
        return 0
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
