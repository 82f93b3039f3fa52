"""End-to-end checks on the shipped small configuration.

Trains the backbone and the full model over three seeds on a freshly generated
dataset, so every test here is slow.
"""
import os
from dataclasses import replace

import numpy as np
import pytest

from copresence.config import MetricsConfig, load_config
from copresence.model import MeFormer, load_checkpoint
from copresence.trainer import CHECKPOINT_FILE, MEDIAN_ROW, ablation_sweep, evaluate_model
from copresence.types import AblationAxis
from copresence.weather_sim import WeatherDataset, generate_dataset

pytestmark = pytest.mark.slow

SMALL_CONFIG = os.path.join(os.path.dirname(__file__), os.pardir, "configs", "small.yml")
SEEDS = [0, 1, 2]
BACKBONE = "backbone"
FULL = "+mfe+pul"


@pytest.fixture(scope="module")
def sweep(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    with pytest.MonkeyPatch.context() as mp:
        mp.delenv("COPRESENCE_SEED", raising=False)
        config = load_config(SMALL_CONFIG)
    config = replace(config, metrics=MetricsConfig(write_figures=False))

    dataset_dir = str(root / "data")
    generate_dataset(config.generation, dataset_dir)
    out_dir = str(root / "sweep")
    table = ablation_sweep(
        AblationAxis.COMPONENT, [BACKBONE, FULL], config, dataset_dir, out_dir, seeds=SEEDS
    )
    return {
        "table": table,
        "dataset": WeatherDataset(dataset_dir),
        "full_run": os.path.join(out_dir, f"component={FULL}", "seed=0"),
    }


def _median(table, component, metric):
    rows = table[(table["component"] == component) & (table["seed"] == MEDIAN_ROW)]
    return float(rows[metric].iloc[0])


def test_full_model_beats_backbone(sweep):
    table = sweep["table"]
    assert np.isfinite(table[["ssd", "r2"]].to_numpy()).all()
    assert _median(table, FULL, "ssd") < _median(table, BACKBONE, "ssd")
    assert _median(table, FULL, "r2") > _median(table, BACKBONE, "r2")


@pytest.fixture(scope="module")
def full_evaluations(sweep):
    dataset = sweep["dataset"]
    test_split = dataset.split("test")
    trained, meta = load_checkpoint(os.path.join(sweep["full_run"], CHECKPOINT_FILE))
    untrained = MeFormer(meta.model_config)
    return {
        "split": test_split,
        "trained": evaluate_model(trained, test_split, dataset.categories),
        "untrained": evaluate_model(untrained, test_split, dataset.categories),
    }


def test_strata_rows_and_learning(full_evaluations):
    trained = full_evaluations["trained"].strata
    untrained = full_evaluations["untrained"].strata
    assert list(trained.index) == ["1", "2", "3", "4", ">4", "All"]
    assert trained.loc["1", "count"] > 0
    assert trained.loc["All", "count"] == len(full_evaluations["split"])
    assert 10.0 * trained.loc["1", "ssd"] < untrained.loc["1", "ssd"]


def test_blended_scenes_are_less_certain(full_evaluations):
    uncertainty = full_evaluations["trained"].uncertainty
    strata = np.asarray(full_evaluations["split"].strata)
    single = uncertainty[strata == "1"]
    blended = uncertainty[strata == "3"]
    assert single.size and blended.size
    assert np.median(blended) > np.median(single)
