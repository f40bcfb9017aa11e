"""Command-line interface.

Subcommands mirror the pipeline stages; each reads the JSON experiment
config and the artifacts of earlier stages from the output directory.
The output directory can be overridden with CALIBREC_OUTPUT_DIR.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, ParseError, PipelineError
from .orchestrator import (
    ExperimentConfig,
    run_analyze,
    run_calibrate,
    run_experiment,
    run_ingest,
    run_recommend,
    run_report,
    run_tune,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="calibrec",
        description="Calibrated recommendation pipeline and distribution-structure analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, tune_flags=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config JSON")
        if tune_flags:
            p.add_argument("--n-trials", type=int, default=None,
                           help="override the hyperparameter search trial count")
            p.add_argument("--seed", type=int, default=None,
                           help="override the tuning seed")
        return p

    add("ingest", "load, clean and fold-split the dataset")
    add("tune", "pick MF hyperparameters by random search", tune_flags=True)
    add("recommend", "train per-fold MF models and emit candidate lists")
    add("calibrate", "greedy lambda-sweep re-ranking of the candidates")
    add("analyze", "build stage matrices and run the structure grid search")
    add("report", "emit the silhouette/jaccard/ranking metric CSVs")
    add("run-all", "run every stage end to end", tune_flags=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.from_json(args.config)
        if args.command == "run-all":
            run_experiment(cfg, n_trials=args.n_trials, seed=args.seed)
        else:
            for mode in cfg.modes():
                if args.command == "ingest":
                    run_ingest(cfg, mode)
                elif args.command == "tune":
                    run_tune(cfg, mode, n_trials=args.n_trials, seed=args.seed)
                elif args.command == "recommend":
                    run_recommend(cfg, mode)
                elif args.command == "calibrate":
                    run_calibrate(cfg, mode)
                elif args.command == "analyze":
                    run_analyze(cfg, mode)
                elif args.command == "report":
                    run_report(cfg, mode)
    except (ConfigError, ParseError) as exc:
        print(f"[config] {exc}", file=sys.stderr)
        return 2
    except PipelineError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
