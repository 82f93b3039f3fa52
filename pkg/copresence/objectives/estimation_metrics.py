"""Probability-estimation metrics: SSD, KL, R^2 and CE per sample."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from copresence.config import STRATUM_LABELS
from copresence.errors import ShapeMismatchError

LOG_CLIP = 1e-7
METRIC_COLUMNS = ["ssd", "kl", "r2", "ce"]
ALL_ROW = "all"


@dataclass
class EstimationReport:
    """Per-sample metric vectors plus subset aggregates.

    r2 is NaN for samples whose ground truth is constant; those samples are
    excluded from every r2 aggregate and counted in `r2_undefined`.
    """

    ssd: np.ndarray
    kl: np.ndarray
    r2: np.ndarray
    ce: np.ndarray
    per_category: pd.DataFrame = field(repr=False)
    r2_undefined: int = 0

    @property
    def num_samples(self) -> int:
        return int(self.ssd.size)

    @property
    def overall(self) -> Dict[str, float]:
        return {name: float(self.per_category.loc[ALL_ROW, name]) for name in METRIC_COLUMNS}

    def sample_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: getattr(self, name) for name in METRIC_COLUMNS})


def _as_matrix(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x[None] if x.ndim == 1 else x


def sample_metrics(pred: np.ndarray, gt: np.ndarray) -> Dict[str, np.ndarray]:
    pred, gt = _as_matrix(pred), _as_matrix(gt)
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"prediction {pred.shape} and ground truth {gt.shape} differ")

    clipped = np.clip(pred, LOG_CLIP, 1.0)
    squared = (gt - pred) ** 2
    ssd = np.sum(squared, axis=-1)

    present = gt > 0
    safe_gt = np.where(present, gt, 1.0)
    # 0 * ln(0 / q) contributes nothing
    kl = np.sum(np.where(present, gt * np.log(safe_gt / clipped), 0.0), axis=-1)
    ce = -np.sum(gt * np.log(clipped), axis=-1)

    spread = np.sum((gt - gt.mean(axis=-1, keepdims=True)) ** 2, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(spread > 0, 1.0 - ssd / np.where(spread > 0, spread, 1.0), np.nan)
    return {"ssd": ssd, "kl": kl, "r2": r2, "ce": ce}


def _subset_row(metrics: Dict[str, np.ndarray], mask: np.ndarray) -> Dict[str, float]:
    row = {"count": int(mask.sum())}
    for name in METRIC_COLUMNS:
        values = metrics[name][mask]
        if name == "r2":
            values = values[~np.isnan(values)]
        row[name] = float(np.mean(values)) if values.size else float("nan")
    return row


def metric_suite(
    pred: np.ndarray,
    gt: np.ndarray,
    categories: Optional[Sequence[str]] = None,
) -> EstimationReport:
    """Metrics for one (n,) pair or a (N, n) batch.

    Per-category rows average over the samples in which that category's
    ground truth probability exceeds 0; the `all` row averages over every
    sample.
    """
    metrics = sample_metrics(pred, gt)
    gt = _as_matrix(gt)
    n = gt.shape[-1]
    categories = list(categories) if categories is not None else [str(i) for i in range(n)]
    if len(categories) != n:
        raise ShapeMismatchError(f"{len(categories)} category names for {n} categories")

    rows = {name: _subset_row(metrics, gt[:, i] > 0) for i, name in enumerate(categories)}
    rows[ALL_ROW] = _subset_row(metrics, np.ones(gt.shape[0], dtype=bool))
    per_category = pd.DataFrame.from_dict(rows, orient="index")[METRIC_COLUMNS + ["count"]]

    return EstimationReport(
        per_category=per_category,
        r2_undefined=int(np.isnan(metrics["r2"]).sum()),
        **metrics,
    )


def aggregate_estimation(report: EstimationReport, strata: Sequence[str]) -> pd.DataFrame:
    """Stratum table: rows 1, 2, 3, 4, >4 and All, each a subset mean."""
    strata = np.asarray(list(strata))
    if strata.size != report.num_samples:
        raise ShapeMismatchError(f"{strata.size} strata for {report.num_samples} samples")
    metrics = {name: getattr(report, name) for name in METRIC_COLUMNS}

    rows = {label: _subset_row(metrics, strata == label) for label in STRATUM_LABELS}
    rows["All"] = _subset_row(metrics, np.ones(strata.size, dtype=bool))
    frame = pd.DataFrame.from_dict(rows, orient="index")[METRIC_COLUMNS + ["count"]]
    frame.index.name = "stratum"
    return frame


def stratum_labels_from_labels(gt: np.ndarray) -> List[str]:
    """Stratum of each sample from its count of non-zero ground truth entries."""
    counts = np.count_nonzero(_as_matrix(gt) > 0, axis=-1)
    return [STRATUM_LABELS[min(max(int(c), 1), len(STRATUM_LABELS)) - 1] for c in counts]
