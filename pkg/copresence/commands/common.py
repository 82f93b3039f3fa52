import argparse
from dataclasses import replace
from typing import Optional

from copresence.config import CopresenceConfig, load_config
from copresence.logger import set_log_level


def add_config_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=str,
        default=None,
        help="YAML config document; defaults apply when omitted.",
    )


def resolve_config(args: argparse.Namespace) -> CopresenceConfig:
    config = load_config(args.config)
    set_log_level(config.metrics.log_level)
    return config


def with_train_overrides(
    config: CopresenceConfig,
    epochs: Optional[int] = None,
    samples: Optional[int] = None,
) -> CopresenceConfig:
    train = config.train
    if epochs is not None:
        train = replace(train, epochs=epochs)
    if samples is not None:
        train = replace(train, max_samples=samples)
    return replace(config, train=train)
