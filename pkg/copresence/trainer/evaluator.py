from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from copresence.errors import CompatibilityError, ConfigError
from copresence.logger import init_logger, log_event
from copresence.model import MeFormer, check_categories, load_checkpoint
from copresence.objectives import (
    ClassificationReport,
    EstimationReport,
    aggregate_estimation,
    classification_suite,
    metric_suite,
    write_classification_report,
    write_estimation_report,
)
from copresence.types import EvaluationTrack
from copresence.weather_sim import DatasetSplit, WeatherDataset, binarize

logger = init_logger(__name__)


@dataclass
class EvaluationResult:
    split: str
    estimation: EstimationReport
    # None when the split holds no positive binary label
    classification: Optional[ClassificationReport]
    strata: pd.DataFrame
    prediction: np.ndarray
    uncertainty: np.ndarray

    @property
    def num_samples(self) -> int:
        return int(self.prediction.shape[0])


def evaluate_model(
    model: MeFormer,
    split: DatasetSplit,
    categories: Sequence[str],
    threshold: float = 0.5,
    batch_size: int = 64,
) -> EvaluationResult:
    """Mean-mode predictions on a split, scored per category and per stratum."""
    if len(split) == 0:
        raise ConfigError(f"Cannot evaluate on the empty {split.name} split")

    output = model.predict(split.images, batch_size=batch_size)
    estimation = metric_suite(output.prediction, split.label_prob, categories)
    strata = aggregate_estimation(estimation, split.strata)

    classification = None
    if split.label_binary.any():
        classification = classification_suite(
            binarize(output.prediction, threshold), split.label_binary, categories
        )
    else:
        logger.warning(f"{split.name} split has no positive labels; skipping classification")

    return EvaluationResult(
        split=split.name,
        estimation=estimation,
        classification=classification,
        strata=strata,
        prediction=output.prediction,
        uncertainty=output.uncertainty,
    )


def check_compatible(model: MeFormer, categories: List[str], dataset: WeatherDataset) -> None:
    check_categories(dataset.categories, categories, "checkpoint")
    if model.config.image_size != dataset.image_size:
        raise CompatibilityError(
            f"checkpoint expects {model.config.image_size}px images, "
            f"dataset holds {dataset.image_size}px images"
        )


def evaluate(
    checkpoint_path: str,
    dataset: WeatherDataset,
    split: str = "test",
    threshold: float = 0.5,
    batch_size: int = 64,
) -> EvaluationResult:
    model, meta = load_checkpoint(checkpoint_path)
    check_compatible(model, meta.categories, dataset)
    result = evaluate_model(model, dataset.split(split), meta.categories, threshold, batch_size)
    log_event(
        logger,
        "evaluate",
        split=split,
        samples=result.num_samples,
        **result.estimation.overall,
    )
    return result


def write_evaluation(
    result: EvaluationResult,
    out_dir: str,
    track: EvaluationTrack = EvaluationTrack.ESTIMATION,
    config: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    if track == EvaluationTrack.CLASSIFICATION:
        if result.classification is None:
            raise ConfigError(
                f"{result.split} split has no positive labels to score classification on"
            )
        return write_classification_report(result.classification, out_dir, config)
    return write_estimation_report(result.estimation, out_dir, result.strata, config)
