import numpy as np
import pytest

from copresence.config import (
    CopresenceConfig,
    GenerationConfig,
    MetricsConfig,
    ModelConfig,
    TrainConfig,
)
from copresence.model import MeFormer
from copresence.weather_sim import WeatherDataset, generate_dataset

TINY_CATEGORIES = 3
TINY_IMAGE = 16


def tiny_model_config(**overrides) -> ModelConfig:
    """n=3, M=4, c=8, two layers over 16x16 inputs cut into 4x4 patches."""
    params = dict(
        num_categories=TINY_CATEGORIES,
        channels=8,
        image_size=TINY_IMAGE,
        patch_size=4,
        latent_size=4,
        depth=2,
        latent_hidden_sizes=[6],
        seed=0,
    )
    params.update(overrides)
    return ModelConfig(**params)


def tiny_generation_config(**overrides) -> GenerationConfig:
    params = dict(
        num_samples=60,
        image_size=TINY_IMAGE,
        num_categories=TINY_CATEGORIES,
        max_copresent=3,
        stratum_proportions=[0.5, 0.3, 0.2, 0.0, 0.0],
        seed=7,
    )
    params.update(overrides)
    return GenerationConfig(**params)


def tiny_config(**train_overrides) -> CopresenceConfig:
    train = dict(
        epochs=3,
        batch_size=8,
        learning_rate=5e-3,
        dropout=0.0,
        val_fraction=0.2,
        seed=0,
    )
    train.update(train_overrides)
    return CopresenceConfig(
        generation=tiny_generation_config(),
        model=tiny_model_config(),
        train=TrainConfig(**train),
        metrics=MetricsConfig(write_figures=False),
    )


@pytest.fixture
def model_config() -> ModelConfig:
    return tiny_model_config()


@pytest.fixture
def model(model_config) -> MeFormer:
    return MeFormer(model_config)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def images(rng) -> np.ndarray:
    return rng.random((2, TINY_IMAGE, TINY_IMAGE, 3))


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory) -> str:
    root = tmp_path_factory.mktemp("dataset")
    generate_dataset(tiny_generation_config(), str(root))
    return str(root)


@pytest.fixture(scope="session")
def dataset(dataset_dir) -> WeatherDataset:
    return WeatherDataset(dataset_dir)
