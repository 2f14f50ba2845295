"""Command line: ``run``, ``verify`` and ``trace``.

Exit codes: 0 pass, 1 property failure, 2 configuration error, 3 construction error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

from .errors import ConfigError, ConstructionError
from .harness import DEFAULT_SEED, PROPERTIES, load_scenario, run_scenario, verify
from .trace import ConstructionTrace

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CONSTRUCTION = 0, 1, 2, 3


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    written, trace = run_scenario(sc, args.out)
    for name, path in written.items():
        print(f"wrote {path}")
    if not written:
        sys.stdout.write(trace.text())
    print(f"{sc.construction}: {len(trace)} events")
    return EXIT_OK


def _cmd_verify(args) -> int:
    sc = load_scenario(args.scenario)
    report = verify(sc, args.suite, args.seed, args.out)
    sys.stdout.write(report.text())
    return EXIT_OK if report.ok else EXIT_FAIL


def pretty(trace: ConstructionTrace) -> List[str]:
    """Events grouped under ``stage N`` headings, fields aligned by kind."""
    out = []
    width = max((len(ev.kind) for ev in trace), default=0)
    current = None
    for ev in trace:
        if ev.stage != current:
            current = ev.stage
            out.append(f"stage {current}")
        fields = "  ".join(f"{k}={v}" for k, v in ev.fields)
        out.append(f"  {ev.kind:<{width}}  {fields}".rstrip())
    return out


def _cmd_trace(args) -> int:
    path = Path(args.artifact)
    if not path.is_file():
        raise ConfigError(f"artifact {path} does not exist")
    lines = path.read_text().splitlines()
    if lines and lines[0].startswith("stage="):
        for line in pretty(ConstructionTrace.from_lines(lines)):
            print(line)
    else:
        print(f"# {path.name} ({len(lines)} lines)")
        for line in lines:
            print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stagewise", description="Run and check finite-horizon stagewise constructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write its artifacts")
    p.add_argument("scenario")
    p.add_argument("--out", help="output directory (overrides [output] dir)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("verify", help="check properties against brute-force oracles")
    p.add_argument("scenario")
    p.add_argument("--suite", help=f"property name or module prefix, e.g. mad or {min(PROPERTIES)}")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", help="where to write report.txt")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("trace", help="pretty-print a trace or artifact file")
    p.add_argument("artifact")
    p.set_defaults(func=_cmd_trace)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConstructionError as exc:
        print(f"construction error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except BrokenPipeError:
        # output piped into head or similar; nothing left to report
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
