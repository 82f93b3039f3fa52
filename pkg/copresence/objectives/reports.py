"""JSON and CSV emission of evaluation reports."""
import json
import math
import os
from typing import Any, Dict, Optional

import pandas as pd

from copresence import __version__
from copresence.errors import StorageError
from copresence.metrics import write_table
from copresence.objectives.classification_metrics import ClassificationReport
from copresence.objectives.estimation_metrics import ALL_ROW, EstimationReport

PER_CATEGORY_RULE = (
    "per-category rows average over samples whose ground truth for that "
    "category is > 0; the 'all' row averages over every sample"
)
ESTIMATION_PREFIX = "estimation"
CLASSIFICATION_PREFIX = "classification"
STRATA_FILE = "strata"


def _clean(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_clean(v) for v in value]
    if hasattr(value, "item"):
        return _clean(value.item())
    return value


def _frame_records(df: pd.DataFrame) -> Dict[str, Dict[str, Any]]:
    return {str(index): {k: _clean(v) for k, v in row.items()} for index, row in df.iterrows()}


def estimation_report_to_dict(report: EstimationReport) -> Dict[str, Any]:
    return {
        "overall": _clean(report.overall),
        "num_samples": report.num_samples,
        "r2_undefined": report.r2_undefined,
        "per_category_rule": PER_CATEGORY_RULE,
        "per_category": _frame_records(report.per_category),
    }


def classification_report_to_dict(report: ClassificationReport) -> Dict[str, Any]:
    return {
        "summary": _clean(report.summary),
        "per_category": _frame_records(report.per_category),
    }


def write_json(payload: Dict[str, Any], path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    try:
        with open(path, "w") as f:
            json.dump(_clean(payload), f, indent=2, sort_keys=True, allow_nan=False)
            f.write("\n")
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from None


def read_json(path: str) -> Dict[str, Any]:
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise StorageError(f"File not found: {path}") from None
    except (OSError, json.JSONDecodeError) as e:
        raise StorageError(f"Cannot read {path}: {e}") from None


def write_estimation_report(
    report: EstimationReport,
    out_dir: str,
    strata: Optional[pd.DataFrame] = None,
    config: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Writes estimation.json plus the per-category and per-stratum CSV tables."""
    payload = estimation_report_to_dict(report)
    if strata is not None:
        payload["strata"] = _frame_records(strata)
        write_table(strata, out_dir, STRATA_FILE)
    payload["config"] = config or {}
    payload["version"] = __version__

    per_category = report.per_category.copy()
    per_category.index.name = "category"
    write_table(per_category, out_dir, f"{ESTIMATION_PREFIX}_per_category")
    write_json(payload, f"{out_dir}/{ESTIMATION_PREFIX}.json")
    return payload


def write_classification_report(
    report: ClassificationReport,
    out_dir: str,
    config: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    payload = classification_report_to_dict(report)
    payload["config"] = config or {}
    payload["version"] = __version__

    summary = pd.DataFrame([report.summary])
    write_table(summary, out_dir, f"{CLASSIFICATION_PREFIX}_summary", index=False)
    per_category = report.per_category.copy()
    per_category.index.name = "category"
    write_table(per_category, out_dir, f"{CLASSIFICATION_PREFIX}_per_category")
    write_json(payload, f"{out_dir}/{CLASSIFICATION_PREFIX}.json")
    return payload


def per_category_frame(payload: Dict[str, Any]) -> pd.DataFrame:
    """Per-category table (including the 'all' row) back from an estimation payload."""
    frame = pd.DataFrame.from_dict(payload["per_category"], orient="index").astype(float)
    order = [name for name in frame.index if name != ALL_ROW] + [ALL_ROW]
    return frame.loc[[name for name in order if name in frame.index]]


def strata_frame(payload: Dict[str, Any]) -> pd.DataFrame:
    frame = pd.DataFrame.from_dict(payload.get("strata", {}), orient="index").astype(float)
    frame.index.name = "stratum"
    return frame
