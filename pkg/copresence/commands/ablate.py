import argparse

import pandas as pd

from copresence.commands.common import add_config_argument, resolve_config, with_train_overrides
from copresence.logger import init_logger
from copresence.trainer import ablation_sweep
from copresence.types import AblationAxis

logger = init_logger(__name__)


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("ablate", help="Train and score one run per ablation value.")
    add_config_argument(parser)
    parser.add_argument("--dataset", type=str, required=True, help="Dataset directory.")
    parser.add_argument("--out-dir", type=str, required=True, help="Sweep directory.")
    parser.add_argument(
        "--axis",
        choices=AblationAxis.choices(),
        default=None,
        help="Swept setting; defaults to ablation.axis of the config.",
    )
    parser.add_argument("--values", nargs="+", default=None, help="Values along the axis.")
    parser.add_argument("--seeds", nargs="+", type=int, default=None, help="Training seeds.")
    parser.add_argument("--num-workers", type=int, default=None, help="Parallel runs.")
    parser.add_argument("--epochs", type=int, default=None, help="Override train.epochs.")
    parser.add_argument(
        "--samples", type=int, default=None, help="Use only the first N train samples."
    )
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    config = with_train_overrides(resolve_config(args), args.epochs, args.samples)
    ablation = config.ablation
    axis = AblationAxis.from_str(args.axis) if args.axis else ablation.axis
    values = args.values if args.values is not None else ablation.values
    if args.axis and args.values is None and axis != ablation.axis:
        values = None

    table = ablation_sweep(
        axis,
        values,
        config,
        args.dataset,
        args.out_dir,
        seeds=args.seeds if args.seeds is not None else ablation.seeds,
        num_workers=args.num_workers or ablation.num_workers,
    )
    with pd.option_context("display.width", 120, "display.max_columns", 20):
        print(table.to_string(index=False))
    return 0
