import argparse
import os

import pandas as pd

from copresence.commands.common import add_config_argument, resolve_config
from copresence.logger import init_logger, log_event
from copresence.model import load_checkpoint
from copresence.objectives import ALL_ROW, METRIC_COLUMNS
from copresence.trainer import check_compatible, evaluate_model, write_evaluation
from copresence.types import EvaluationTrack
from copresence.weather_sim import WeatherDataset

logger = init_logger(__name__)


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("eval", help="Score a checkpoint on a dataset split.")
    add_config_argument(parser)
    parser.add_argument("--checkpoint", type=str, required=True, help="Checkpoint file.")
    parser.add_argument("--dataset", type=str, required=True, help="Dataset directory.")
    parser.add_argument("--split", type=str, default="test", help="Split to score.")
    parser.add_argument(
        "--track",
        choices=EvaluationTrack.choices(),
        default=str(EvaluationTrack.ESTIMATION),
        help="estimation reports SSD/KL/R2/CE, classification AP/AR/AF1/OP/OR/OF1.",
    )
    parser.add_argument(
        "--out-dir",
        type=str,
        default=None,
        help="Report directory; defaults to eval/ next to the checkpoint.",
    )
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    track = EvaluationTrack.from_str(args.track)
    out_dir = args.out_dir or os.path.join(os.path.dirname(args.checkpoint) or ".", "eval")

    model, meta = load_checkpoint(args.checkpoint)
    dataset = WeatherDataset(args.dataset)
    check_compatible(model, meta.categories, dataset)
    result = evaluate_model(
        model,
        dataset.split(args.split),
        meta.categories,
        config.metrics.prediction_threshold,
        config.train.eval_batch_size,
    )
    write_evaluation(result, out_dir, track, config=meta.extra.get("config", {}))

    with pd.option_context("display.width", 120, "display.max_columns", 20):
        if track == EvaluationTrack.CLASSIFICATION:
            print(pd.DataFrame([result.classification.summary]).to_string(index=False))
            print(result.classification.per_category[["precision", "recall", "f1", "accuracy"]])
        else:
            print(result.estimation.per_category[METRIC_COLUMNS + ["count"]])
            print(result.strata)

    summary = (
        result.classification.summary
        if track == EvaluationTrack.CLASSIFICATION
        else result.estimation.per_category.loc[ALL_ROW, METRIC_COLUMNS].to_dict()
    )
    log_event(logger, "eval", track=str(track), split=args.split, out_dir=out_dir, **summary)
    return 0
