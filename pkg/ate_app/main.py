"""
ATE Prediction CLI - command-line front end of the pipeline.

Subcommands:
1. synth              generate a synthetic corpus and its config file
2. generate-examples  label every keyframe prefix with its ATE
3. characterize       characterization matrices and full-sequence descriptors
4. train              decorrelate, tune, fit and evaluate one model per testcase
5. predict            stream a descriptor CSV through a saved model
6. sweep              training-fraction sweep plus the ATE-at-20% baseline table
7. compare-poolings   one model per pooling kind
8. compare-models     dummy, linear, tree and forest on one partition
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from ate_core.pooling.types import PoolKind

from .config import PipelineConfig, apply_overrides, load_config
from .pipeline import (
    cmd_characterize,
    cmd_compare_models,
    cmd_compare_poolings,
    cmd_generate_examples,
    cmd_predict,
    cmd_sweep,
    cmd_synth,
    cmd_train,
)

logger = logging.getLogger("ate_app")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

CONFIG_COMMANDS: dict[str, Callable[[PipelineConfig], int]] = {
    "generate-examples": cmd_generate_examples,
    "characterize": cmd_characterize,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "compare-poolings": cmd_compare_poolings,
    "compare-models": cmd_compare_models,
}


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ate-forest",
        description="Predict SLAM absolute trajectory error from sensor sequences.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", help="generate a synthetic corpus")
    _add_common(synth)
    synth.add_argument("--out", type=Path, required=True, help="corpus directory")
    synth.add_argument("--sequences", type=int, default=20)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--noise", type=float, default=0.05)
    synth.add_argument("--min-keyframes", type=int, default=40)
    synth.add_argument("--max-keyframes", type=int, default=60)

    for name in CONFIG_COMMANDS:
        sub = commands.add_parser(name)
        _add_common(sub)
        sub.add_argument("--config", type=Path, required=True, help="pipeline JSON config")
        sub.add_argument("--pool", choices=[k.value for k in PoolKind], default=None)
        sub.add_argument("--train-fraction", type=float, default=None)
        sub.add_argument("--seed", type=int, default=None, help="master seed")
        sub.add_argument("--jobs", type=int, default=None, help="joblib workers")
        sub.add_argument("--out", type=Path, default=None, help="output root")

    predict = commands.add_parser("predict", help="predict ATE for descriptor rows")
    _add_common(predict)
    predict.add_argument("--model", type=Path, required=True)
    predict.add_argument("--input", type=Path, required=True, help="descriptor or dataset CSV")
    predict.add_argument("--out", type=Path, required=True, help="predictions CSV")
    predict.add_argument("--chunksize", type=int, default=1024)
    return parser


def load_with_overrides(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config)
    return apply_overrides(
        config,
        pooling_kind=args.pool,
        train_fraction=args.train_fraction,
        master_seed=args.seed,
        n_jobs=args.jobs,
        output_dir=None if args.out is None else args.out.resolve(),
    )


def run(args: argparse.Namespace) -> int:
    if args.command == "synth":
        path = cmd_synth(args.out, args.sequences, args.seed, noise=args.noise,
                         min_keyframes=args.min_keyframes, max_keyframes=args.max_keyframes)
        print(path)
        return 0
    if args.command == "predict":
        return cmd_predict(args.model, args.input, args.out, args.chunksize)
    return CONFIG_COMMANDS[args.command](load_with_overrides(args))


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return run(args)
    except (ValueError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
