"""The ``fuzz`` command: run campaigns, report series, replay and minimize
crashes, and serve the monitoring API + dashboard."""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from pathlib import Path

# Coverage timestamps count from process start (startup delay included).
_PROCESS_START = time.monotonic()


def _cmd_run(args) -> int:
    from .campaign import CampaignConfig, run_campaign
    from .runner import TargetSpec
    from .typedgen import TypedGenConfig

    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if args.out:
            doc["output_dir"] = args.out
        config = CampaignConfig.from_dict(doc)
    else:
        if not args.strategy or not args.target_cmd or not args.out:
            print("fuzz run: --strategy, --target-cmd and --out are required "
                  "(or pass --config)", file=sys.stderr)
            return 2
        grammar_path = args.grammar
        if grammar_path == "minipvl":
            from .toyverifier import GRAMMAR_PATH

            grammar_path = str(GRAMMAR_PATH)
        typed = None
        if args.strategy == "typed":
            typed = TypedGenConfig()
        try:
            config = CampaignConfig(
                strategy=args.strategy,
                target=TargetSpec(
                    command=tuple(shlex.split(args.target_cmd)), timeout=args.timeout
                ),
                output_dir=Path(args.out),
                time_budget=args.time,
                master_seed=args.seed,
                workers=args.workers,
                grammar_path=grammar_path,
                typedgen=typed,
                max_depth=args.max_depth,
                max_executions=args.max_executions,
                seed_corpus=args.seed_corpus,
            )
        except ValueError as e:
            print(f"fuzz run: {e}", file=sys.stderr)
            return 2
    stats = run_campaign(config, t_origin=_PROCESS_START)
    print(
        f"{config.strategy}: status={stats.status} executions={stats.executions} "
        f"buckets={stats.buckets_found} covered={stats.covered}"
    )
    return 0 if stats.error is None else 1


def _cmd_report(args) -> int:
    from .campaign import emit_report

    out_dir = Path(args.out) if args.out else Path(args.dirs[0]).parent / "report"
    written = emit_report([Path(d) for d in args.dirs], out_dir)
    print((out_dir / "summary.txt").read_text(encoding="utf-8"), end="")
    print(f"report files written to {out_dir} ({len(written)} files)")
    return 0


def _cmd_replay(args) -> int:
    from .runner import TargetSpec
    from .triage import CrashStore, replay_bucket

    cdir = Path(args.campaign_dir)
    config = json.loads((cdir / "config.json").read_text(encoding="utf-8"))
    spec = TargetSpec.from_dict(config["target"])
    store = CrashStore(cdir / "crashes")
    if args.bucket not in store.buckets:
        print(f"fuzz replay: unknown bucket {args.bucket}", file=sys.stderr)
        return 2
    result = replay_bucket(store, spec, args.bucket)
    print(f"bucket {args.bucket}: {result['matches']}/{result['attempts']} "
          f"replays matched -> {result['status']}")
    return 0 if result["status"] == "stable" else 1


def _cmd_minimize(args) -> int:
    from .service.manager import NotFound, minimize_stored_bucket

    try:
        info = minimize_stored_bucket(
            Path(args.campaign_dir), args.bucket, args.granularity, args.budget
        )
    except NotFound:
        print(f"fuzz minimize: unknown bucket {args.bucket}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"fuzz minimize: {e}", file=sys.stderr)
        return 2
    print(
        f"minimized {info['size_before']} -> {info['size_after']} bytes "
        f"in {info['evaluations']} evaluations "
        f"(minimal={info['minimal']}, stable={info['stable']})"
    )
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(args.root, args.bind)
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="fuzz", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one fuzzing campaign")
    run_p.add_argument("--config", help="campaign config JSON file")
    run_p.add_argument("--strategy", choices=["blind", "blind_coverage", "grammar",
                                              "grammar_coverage", "typed"])
    run_p.add_argument("--grammar", help="grammar file ('minipvl' for the bundled one)")
    run_p.add_argument("--target-cmd", help="target command with {input} placeholder")
    run_p.add_argument("--time", type=float, default=300.0, help="budget in seconds")
    run_p.add_argument("--seed", type=int, default=0, help="master seed")
    run_p.add_argument("--workers", type=int, default=1)
    run_p.add_argument("--timeout", type=float, default=10.0, help="per-run timeout")
    run_p.add_argument("--max-depth", type=int, default=12)
    run_p.add_argument("--max-executions", type=int, default=None)
    run_p.add_argument("--seed-corpus", type=int, default=0,
                       help="pre-generate N grammar sentences into the corpus")
    run_p.add_argument("--out", help="campaign output directory")
    run_p.set_defaults(func=_cmd_run)

    report_p = sub.add_parser("report", help="emit coverage series + summary table")
    report_p.add_argument("dirs", nargs="+", help="campaign directories")
    report_p.add_argument("--out", help="report output directory")
    report_p.set_defaults(func=_cmd_report)

    replay_p = sub.add_parser("replay", help="re-run a crash bucket's input")
    replay_p.add_argument("campaign_dir")
    replay_p.add_argument("bucket")
    replay_p.set_defaults(func=_cmd_replay)

    min_p = sub.add_parser("minimize", help="ddmin-reduce a crash bucket's input")
    min_p.add_argument("campaign_dir")
    min_p.add_argument("bucket")
    min_p.add_argument("--granularity", choices=["line", "token", "char"], default="token")
    min_p.add_argument("--budget", type=int, default=2000)
    min_p.set_defaults(func=_cmd_minimize)

    serve_p = sub.add_parser("serve", help="serve the monitoring API and dashboard")
    serve_p.add_argument("--root", required=True, help="directory holding campaign dirs")
    serve_p.add_argument("--bind", default="127.0.0.1:8080")
    serve_p.set_defaults(func=_cmd_serve)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
