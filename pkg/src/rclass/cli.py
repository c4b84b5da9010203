"""Command-line entry point.

`rclass run` evaluates a CSV stream prequentially, emits the run report as
JSON on stdout, writes rule-count and feature-weight traces as CSV files,
and can optionally serve the operator protocol while running.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import threading

from .config import HyperParams, load_config_file
from .dataset import CLASS_NAMES, load_dataset
from .harness import FileOracle, run_folds, run_prequential
from .learner import OnlineLearner
from .service import EngineServer, make_http_server, parse_bind


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rclass")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="prequential evaluation of a CSV stream")
    run.add_argument("--data", required=True, help="CSV dataset path")
    run.add_argument("--train", type=int, required=True, help="training samples")
    run.add_argument("--test", type=int, required=True, help="test samples")
    run.add_argument("--budget", type=float, default=None,
                     help="label budget in [0, 1]")
    run.add_argument("--config", default=None,
                     help="key = value hyperparameter file")
    run.add_argument("--serve", default=None, metavar="ADDR",
                     help="serve the operator protocol on host:port")
    run.add_argument("--oracle", choices=("file", "interactive"), default="file")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--folds", type=int, default=0,
                     help="run K seeded shuffles and aggregate")
    run.add_argument("--snapshot", default=None, help="save the model here")
    run.add_argument("--outdir", default=".", help="directory for trace CSVs")
    run.add_argument("--timeout", type=float, default=60.0,
                     help="interactive oracle deadline in seconds")
    run.add_argument("--pace", type=float, default=0.0,
                     help="seconds to sleep per sample (demo pacing)")
    return parser


def write_traces(report, outdir: str, n_features: int) -> None:
    from pathlib import Path
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "rules_trace.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_index", "rule_count"])
        writer.writerows(report.rule_trace)
    with open(out / "feature_weights.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_index"]
                        + [f"lambda_{j + 1}" for j in range(n_features)])
        for idx, weights in report.feature_weight_trace:
            writer.writerow([idx] + list(weights))


def cmd_run(args) -> int:
    config = load_config_file(args.config) if args.config else HyperParams()
    if args.budget is not None:
        config = config.with_overrides(budget=args.budget)

    samples, schema = load_dataset(args.data)
    split = (args.train, args.test)
    if split[0] + split[1] > len(samples):
        print(f"error: split {split} exceeds dataset size {len(samples)}",
              file=sys.stderr)
        return 2

    if args.folds and args.folds > 1:
        summary = run_folds(samples, split, schema.n_features, schema.n_classes,
                            config, folds=args.folds, seed=args.seed)
        json.dump(summary.to_dict(), sys.stdout, indent=2)
        print()
        write_traces(summary.reports[-1], args.outdir, schema.n_features)
        return 0

    learner = OnlineLearner(schema.n_features, schema.n_classes, config)
    if args.serve or args.oracle == "interactive":
        engine = EngineServer(
            learner, samples, split,
            oracle_kind=args.oracle, timeout_s=args.timeout, seed=args.seed,
            class_names=CLASS_NAMES if schema.n_classes == 4 else None,
            feature_names=schema.feature_columns,
            pace_s=args.pace,
        )
        httpd = None
        if args.serve:
            host, port = parse_bind(args.serve)
            httpd = make_http_server(engine, host, port)
            threading.Thread(target=httpd.serve_forever, daemon=True).start()
            print(f"serving on http://{httpd.server_address[0]}:{httpd.server_address[1]}",
                  file=sys.stderr)
        report = engine.run_engine()
    else:
        httpd = None
        report = run_prequential(learner, samples, FileOracle(), split,
                                 seed=args.seed)

    json.dump(report.to_dict(), sys.stdout, indent=2)
    print()
    sys.stdout.flush()
    write_traces(report, args.outdir, schema.n_features)
    if args.snapshot:
        from .snapshot import snapshot_save
        snapshot_save(learner.model, args.snapshot)
    if httpd is not None:
        # consoles keep reading state and traces after the run
        print("run complete; serving until interrupted", file=sys.stderr)
        try:
            threading.Event().wait()
        except KeyboardInterrupt:
            pass
        finally:
            httpd.shutdown()
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
