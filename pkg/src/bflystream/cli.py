"""Command-line experiment runner (`bfly run ...`).

Exit codes: 0 success, 1 configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys

from . import bench, ingest
from .errors import BflyError, ConfigError, MalformedLineError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bfly",
        description="Butterfly counting and estimation over bipartite edge streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="replay a stream through an algorithm, emit CSV metrics")
    run.add_argument("--algo", required=True, choices=bench.ALGORITHMS,
                     help="algorithm to drive")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", help="edge-list file (optionally gzipped) or binary cache")
    source.add_argument("--synth", help="synthetic stream spec: complete_biclique:a,b | "
                                        "random:nl,nr,m | planted_blocks:count,a,b[,noise]")
    run.add_argument("--reservoir", type=int, help="reservoir capacity M")
    run.add_argument("--gamma", type=float, default=0.5, help="sub-sampling probability")
    run.add_argument("--window", type=int, help="window size W (SeqWin/TimeWin)")
    run.add_argument("--nmax", type=int, help="max edges per window (TimeWin)")
    run.add_argument("--p", type=float, help="fixed sampling probability (Bernoulli)")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--checkpoint-every", type=int,
                     help="edges between metric rows (default: stream/100)")
    run.add_argument("--truth", default="inline",
                     help="ground truth: inline | none | file:PATH (CSV from a prior run)")
    run.add_argument("--out", required=True, help="output CSV path")
    run.add_argument("--permute", action="store_true",
                     help="shuffle the stream (seeded by --seed) before replay")
    run.add_argument("--no-timing", action="store_true",
                     help="skip wall-clock timing so repeated runs are byte-identical")
    return parser


def _load_input(path: str) -> ingest.EdgeStream:
    with open(path, "rb") as fh:
        magic = fh.read(8)
    if magic == ingest.CACHE_MAGIC:
        return ingest.read_cache(path)
    return ingest.load_konect(path)


def _run(args) -> int:
    if args.synth:
        try:
            stream = ingest.synth_stream(args.synth, seed=args.seed)
        except ValueError as exc:
            print(f"bfly: bad synth spec: {exc}", file=sys.stderr)
            return 1
    else:
        try:
            stream = _load_input(args.input)
        except (OSError, MalformedLineError, ValueError) as exc:
            print(f"bfly: data error: {exc}", file=sys.stderr)
            return 2
    if args.permute:
        stream = ingest.permute(stream, args.seed)

    truth_mode, truth_table = args.truth, None
    if truth_mode.startswith("file:"):
        try:
            truth_table = bench.truth_from_csv(truth_mode[len("file:"):])
        except (OSError, ValueError) as exc:
            print(f"bfly: data error: {exc}", file=sys.stderr)
            return 2
        truth_mode = "file"
    elif truth_mode not in ("inline", "none"):
        print(f"bfly: --truth must be inline, none, or file:PATH", file=sys.stderr)
        return 1

    cfg = bench.ExperimentConfig(
        algorithm=args.algo,
        stream=stream,
        capacity=args.reservoir,
        gamma=args.gamma,
        window=args.window,
        n_max=args.nmax,
        sample_p=args.p,
        seed=args.seed,
        trials=args.trials,
        checkpoint_every=args.checkpoint_every,
        ground_truth=truth_mode,
        truth_table=truth_table,
        measure_time=not args.no_timing,
    )
    try:
        result = bench.run_experiment(cfg)
    except ConfigError as exc:
        print(f"bfly: config error: {exc}", file=sys.stderr)
        return 1
    except BflyError as exc:
        print(f"bfly: data error: {exc}", file=sys.stderr)
        return 2
    try:
        bench.emit_csv(result.rows, result.summary, args.out)
    except OSError as exc:
        print(f"bfly: data error: {exc}", file=sys.stderr)
        return 2

    parts = [f"{args.algo} on {len(stream)} edges, {args.trials} trial(s)"]
    for key in ("mape_pct", "final_error_pct", "throughput_eps"):
        value = result.summary.get(key)
        if value is not None:
            parts.append(f"{key}={value:.4g}")
    print("; ".join(parts) + f" -> {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"bfly: config error: {exc}", file=sys.stderr)
        return 1
    except BflyError as exc:
        print(f"bfly: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
