import argparse

from copresence.commands.common import add_config_argument, resolve_config, with_train_overrides
from copresence.logger import init_logger
from copresence.trainer import apply_component, train
from copresence.weather_sim import WeatherDataset

logger = init_logger(__name__)

ABLATION_FLAGS = {
    "none": "+mfe+pul",
    "no-unc": "backbone",
    "no-mfe": "+pul",
    "no-pul": "+mfe",
}


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("train", help="Train a model on a generated dataset.")
    add_config_argument(parser)
    parser.add_argument("--dataset", type=str, required=True, help="Dataset directory.")
    parser.add_argument("--out-dir", type=str, required=True, help="Run directory.")
    parser.add_argument("--epochs", type=int, default=None, help="Override train.epochs.")
    parser.add_argument(
        "--samples", type=int, default=None, help="Use only the first N train samples."
    )
    parser.add_argument(
        "--ablation",
        choices=list(ABLATION_FLAGS),
        default="none",
        help="Train without the uncertainty components.",
    )
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    config = with_train_overrides(resolve_config(args), args.epochs, args.samples)
    if args.ablation != "none":
        config = apply_component(config, ABLATION_FLAGS[args.ablation])

    dataset = WeatherDataset(args.dataset)
    result = train(config, dataset, args.out_dir)

    record = result.record
    print(f"run: {result.run_dir}")
    print(f"checkpoint: {result.checkpoint_path}")
    print(f"best epoch: {record.best_epoch}")
    for name, value in record.final_estimation.items():
        print(f"  test {name}: {value:.6f}" if value is not None else f"  test {name}: n/a")
    return 0
