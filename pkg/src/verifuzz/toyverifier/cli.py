"""Command-line entry for the toy verifier.

Exit codes: 0 verified, 1 clean diagnostic, 2 usage or I/O error, 70 crash.
Coverage counter ids are written to the path named by ``AVALANCHE_COV``
(one decimal id per line), on every exit path including crashes.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bugs import parse_toggles
from .counters import dump_table

VERSION = "toy-verifier 0.1.0 (mini-PVL front-end, backend stubbed)"


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="toy-verifier",
        description="Checks a mini-PVL file through lex/parse/resolve/typecheck "
        "and a stubbed encode phase.",
    )
    ap.add_argument("file", nargs="?", help="input program")
    ap.add_argument("--bugs", help="comma-separated seeded bugs to enable (B1..B8)")
    ap.add_argument(
        "--skip-backend",
        action="store_true",
        help="accepted for compatibility; the back-end is always skipped",
    )
    ap.add_argument("--version", action="store_true", help="print version and exit")
    ap.add_argument(
        "--dump-counters", action="store_true", help="print the coverage counter table"
    )
    args = ap.parse_args(argv)

    if args.version:
        print(VERSION)
        return 0
    if args.dump_counters:
        sys.stdout.write(dump_table())
        return 0
    if args.file is None:
        ap.print_usage(sys.stderr)
        return 2

    toggle_text = args.bugs if args.bugs is not None else os.environ.get("TOY_BUGS", "")
    try:
        toggles = parse_toggles(toggle_text)
    except ValueError as e:
        print(f"toy-verifier: {e}", file=sys.stderr)
        return 2

    try:
        with open(args.file, "r", encoding="utf-8", errors="replace") as fh:
            text = fh.read()
    except OSError as e:
        print(f"toy-verifier: cannot read {args.file}: {e}", file=sys.stderr)
        return 2

    from .phases import check

    result = check(text, toggles)

    cov_path = os.environ.get("AVALANCHE_COV")
    if cov_path:
        try:
            with open(cov_path, "w", encoding="utf-8") as fh:
                for cid in sorted(result.coverage):
                    fh.write(f"{cid}\n")
        except OSError as e:
            print(f"toy-verifier: cannot write coverage file: {e}", file=sys.stderr)

    if result.status == "verified":
        print("verified (backend skipped)")
        return 0
    if result.status == "error":
        print(result.diagnostic, file=sys.stderr)
        return 1
    sys.stderr.write(result.trace or "")
    return 70


if __name__ == "__main__":
    sys.exit(main())
