from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd
from sklearn.metrics import multilabel_confusion_matrix

from copresence.errors import ShapeMismatchError


@dataclass
class ClassificationReport:
    ap: float
    ar: float
    af1: float
    op: float
    overall_recall: float
    of1: float
    # per-category precision, recall, f1, accuracy and the zero-denominator flags
    per_category: pd.DataFrame = field(repr=False)

    @property
    def summary(self) -> Dict[str, float]:
        return {
            "AP": self.ap,
            "AR": self.ar,
            "AF1": self.af1,
            "OP": self.op,
            "OR": self.overall_recall,
            "OF1": self.of1,
        }


def _ratio(numerator: np.ndarray, denominator: np.ndarray):
    """numerator / denominator with 0 (and a True flag) where the denominator is 0."""
    numerator = np.asarray(numerator, dtype=np.float64)
    denominator = np.asarray(denominator, dtype=np.float64)
    undefined = denominator == 0
    value = np.divide(numerator, denominator, out=np.zeros_like(numerator), where=~undefined)
    return value, undefined


def harmonic_mean(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def classification_suite(
    preds: np.ndarray,
    gts: np.ndarray,
    categories: Optional[Sequence[str]] = None,
) -> ClassificationReport:
    """Macro (AP/AR/AF1) and micro (OP/OR/OF1) scores of binary label matrices."""
    preds = np.asarray(preds).astype(np.int64)
    gts = np.asarray(gts).astype(np.int64)
    # a single vector is one sample
    if preds.ndim == 1:
        preds = preds[None]
    if gts.ndim == 1:
        gts = gts[None]
    if preds.shape != gts.shape:
        raise ShapeMismatchError(f"predictions {preds.shape} and labels {gts.shape} differ")
    if not gts.any():
        raise ValueError("classification metrics need at least one positive label")

    n = gts.shape[1]
    categories = list(categories) if categories is not None else [str(i) for i in range(n)]
    if len(categories) != n:
        raise ShapeMismatchError(f"{len(categories)} category names for {n} categories")

    if n == 1:
        # sklearn reads a single column as a binary target with classes 0 and 1
        confusion = multilabel_confusion_matrix(gts[:, 0], preds[:, 0], labels=[1])
    else:
        confusion = multilabel_confusion_matrix(gts, preds, labels=list(range(n)))
    tn, fp, fn, tp = (confusion[:, i, j] for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))

    precision, precision_undefined = _ratio(tp, tp + fp)
    recall, recall_undefined = _ratio(tp, tp + fn)
    accuracy = (tp + tn) / gts.shape[0]
    f1 = np.array([harmonic_mean(p, r) for p, r in zip(precision, recall)])

    ap, ar = float(np.mean(precision)), float(np.mean(recall))
    op = float(_ratio(tp.sum(), tp.sum() + fp.sum())[0])
    overall_recall = float(_ratio(tp.sum(), tp.sum() + fn.sum())[0])

    per_category = pd.DataFrame(
        {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "accuracy": accuracy,
            "tp": tp,
            "fp": fp,
            "fn": fn,
            "tn": tn,
            "precision_undefined": precision_undefined,
            "recall_undefined": recall_undefined,
        },
        index=categories,
    )
    return ClassificationReport(
        ap=ap,
        ar=ar,
        af1=harmonic_mean(ap, ar),
        op=op,
        overall_recall=overall_recall,
        of1=harmonic_mean(op, overall_recall),
        per_category=per_category,
    )
