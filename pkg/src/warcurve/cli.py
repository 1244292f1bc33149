"""Command-line entry point: ``warcurve <command> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys

from .config import COHORT_CHOICES, ConfigError, load_config, parse_years
from .features import parse_policy
from .ingest import IngestError
from .pipeline import COMMANDS, run_pipeline

HELP = {
    "ingest": "parse and merge the input CSVs, write the rejects report",
    "cohort": "apply the inclusion rules and write the cohort tables",
    "features": "write feature matrices, targets and the train/test split",
    "select": "recursive feature elimination traces and curves",
    "tune": "grid-search tables for every model",
    "train": "fit final models and save them as JSON",
    "evaluate": "test-set R^2, prediction tables and heatmaps",
    "baseline": "delta-method aging curve and its test-set R^2",
    "synth": "write a synthetic league into the data directory",
    "all": "every stage from ingest through evaluate",
}


def build_parser():
    parser = argparse.ArgumentParser(prog="warcurve",
                                     description="Predict post-arbitration WAR from early-career stats.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value run configuration")
    common.add_argument("--seed", type=int, help="global run seed")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--data", metavar="DIR", help="input data directory")
    common.add_argument("--cohort", choices=sorted(COHORT_CHOICES), help="cohorts to process")
    common.add_argument("--years", help='target seasons, e.g. "7..11" or "7,9"')
    common.add_argument("--policy", help="missing-WAR value: zero, -0.5 or -1")
    common.add_argument("-v", "--verbose", action="store_true", help="progress logging")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


def resolve_config(args):
    cfg = load_config(args.config)
    problems = []
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.data is not None:
        cfg.data_dir = args.data
    if args.cohort is not None:
        cfg.cohorts = args.cohort
    if args.years is not None:
        try:
            cfg.years = parse_years(args.years)
        except ValueError:
            problems.append("years: expected a range like 7..11 or a comma list")
    if args.policy is not None:
        try:
            cfg.policy = parse_policy(args.policy)
        except ValueError:
            problems.append("policy: expected zero, -0.5 or -1")
    if problems:
        raise ConfigError(problems)
    return cfg.validate()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"warcurve: {exc}", file=sys.stderr)
        return 1
    try:
        run_pipeline(cfg, args.command)
    except (IngestError, OSError, ValueError, ArithmeticError) as exc:
        print(f"warcurve: {args.command} failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
