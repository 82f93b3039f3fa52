import os
from dataclasses import replace
from typing import Any, Dict, Optional

import yaml

from copresence.config.config import CopresenceConfig
from copresence.config.utils import dataclass_from_dict
from copresence.errors import ConfigError, StorageError
from copresence.logger import init_logger
from copresence.utils.random import seed_from_env

logger = init_logger(__name__)


def read_config_document(path: str) -> Dict[str, Any]:
    if not os.path.isfile(path):
        raise StorageError(f"Config file not found: {path}")
    try:
        with open(path, "r") as f:
            document = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Could not parse {path}: {e}") from None
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ConfigError(f"{path} must hold a mapping at the top level")
    return document


def apply_seed_override(config: CopresenceConfig) -> CopresenceConfig:
    try:
        seed = seed_from_env(config.train.seed)
    except ValueError:
        raise ConfigError(
            f"COPRESENCE_SEED must be an integer, got {os.environ.get('COPRESENCE_SEED')!r}"
        ) from None
    if "COPRESENCE_SEED" not in os.environ or os.environ["COPRESENCE_SEED"] == "":
        return config

    logger.info(f"COPRESENCE_SEED overrides every seed with {seed}")
    return replace(
        config,
        generation=replace(config.generation, seed=seed),
        model=replace(config.model, seed=seed),
        train=replace(config.train, seed=seed),
        ablation=replace(config.ablation, seeds=[seed]),
    )


def load_config(path: Optional[str] = None) -> CopresenceConfig:
    """Resolves the YAML document at `path` (defaults when None) into a config."""
    document = read_config_document(path) if path is not None else {}
    config = dataclass_from_dict(CopresenceConfig, document)
    return apply_seed_override(config)
