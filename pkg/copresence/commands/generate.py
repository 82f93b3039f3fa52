import argparse
from dataclasses import replace

from copresence.commands.common import add_config_argument, resolve_config
from copresence.logger import init_logger, log_event
from copresence.weather_sim import generate_dataset

logger = init_logger(__name__)


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser("generate", help="Render a synthetic weather dataset.")
    add_config_argument(parser)
    parser.add_argument("--out-dir", type=str, required=True, help="Dataset directory.")
    parser.add_argument("--samples", type=int, default=None, help="Override num_samples.")
    parser.add_argument("--num-workers", type=int, default=None, help="Parallel renderers.")
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    generation = config.generation
    if args.samples is not None:
        generation = replace(generation, num_samples=args.samples)
    if args.num_workers is not None:
        generation = replace(generation, num_workers=args.num_workers)

    summary = generate_dataset(generation, args.out_dir)

    print(f"dataset: {summary.output_dir}")
    print(f"samples: {summary.num_samples}")
    for name, count in summary.split_counts.items():
        print(f"  split {name}: {count}")
    for label, count in summary.stratum_counts.items():
        print(f"  stratum {label}: {count}")
    print("dataset unchanged" if summary.unchanged else f"digest: {summary.digest}")
    log_event(
        logger,
        "generate",
        out_dir=summary.output_dir,
        samples=summary.num_samples,
        splits=summary.split_counts,
        strata=summary.stratum_counts,
        unchanged=summary.unchanged,
    )
    return 0
