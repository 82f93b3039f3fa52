import os
import random

import numpy as np


def set_seeds(seed=42):
    random.seed(seed)
    os.environ["PYTHONHASHSEED"] = str(seed)
    np.random.seed(seed)


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for (seed, *keys), stable across processes."""
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def seed_from_env(seed: int) -> int:
    env_seed = os.environ.get("COPRESENCE_SEED")
    if env_seed is None or env_seed == "":
        return seed
    return int(env_seed)
