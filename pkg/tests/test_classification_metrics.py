from fractions import Fraction

import numpy as np
import pytest

from copresence.errors import ShapeMismatchError
from copresence.objectives import classification_suite, harmonic_mean


def test_perfect_predictions_score_one(rng):
    gts = (rng.random((10, 4)) > 0.5).astype(int)
    gts[0] = 1
    report = classification_suite(gts, gts)
    assert report.summary == {"AP": 1.0, "AR": 1.0, "AF1": 1.0, "OP": 1.0, "OR": 1.0, "OF1": 1.0}


def test_complement_scores_zero():
    gts = np.array([[1], [0], [1]])
    report = classification_suite(1 - gts, gts)
    assert report.ap == 0.0
    assert report.ar == 0.0
    assert report.af1 == 0.0


def test_hand_computed_fixture():
    gts = np.array([[1, 0], [1, 1], [0, 1], [0, 0]])
    preds = np.array([[1, 1], [0, 1], [0, 1], [1, 0]])
    report = classification_suite(preds, gts, ["rain", "fog"])

    table = report.per_category
    # rain: tp 1, fp 1, fn 1; fog: tp 2, fp 1, fn 0
    assert table.loc["rain", "precision"] == pytest.approx(0.5)
    assert table.loc["rain", "recall"] == pytest.approx(0.5)
    assert table.loc["fog", "precision"] == pytest.approx(2 / 3)
    assert table.loc["fog", "recall"] == pytest.approx(1.0)
    assert table.loc["fog", "accuracy"] == pytest.approx(0.75)

    assert report.ap == pytest.approx((0.5 + 2 / 3) / 2)
    assert report.ar == pytest.approx(0.75)
    assert report.af1 == pytest.approx(harmonic_mean(report.ap, report.ar))
    assert report.op == pytest.approx(3 / 5)
    assert report.overall_recall == pytest.approx(3 / 4)
    assert report.of1 == pytest.approx(2 * 0.6 * 0.75 / 1.35)


def test_zero_denominator_is_flagged():
    gts = np.array([[1, 0], [1, 0]])
    preds = np.array([[1, 0], [0, 0]])
    table = classification_suite(preds, gts, ["a", "b"]).per_category
    assert table.loc["b", "precision"] == 0.0
    assert bool(table.loc["b", "precision_undefined"])
    assert bool(table.loc["b", "recall_undefined"])
    assert not bool(table.loc["a", "precision_undefined"])


def test_no_positive_labels_rejected():
    with pytest.raises(ValueError):
        classification_suite(np.zeros((2, 2)), np.zeros((2, 2)))


def test_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        classification_suite(np.ones((2, 2)), np.ones((2, 3)))


def test_harmonic_mean_of_zeros():
    assert harmonic_mean(0.0, 0.0) == 0.0


def _fraction_oracle(preds, gts):
    """Exact rational AP/AR/AF1/OP/OR/OF1 from per-entry counting."""

    def ratio(num, den):
        return Fraction(num, den) if den else Fraction(0)

    def f1(p, r):
        return 2 * p * r / (p + r) if p + r else Fraction(0)

    n = len(gts[0])
    precisions, recalls = [], []
    total_tp = total_fp = total_fn = 0
    for j in range(n):
        tp = sum(1 for p, g in zip(preds, gts) if p[j] and g[j])
        fp = sum(1 for p, g in zip(preds, gts) if p[j] and not g[j])
        fn = sum(1 for p, g in zip(preds, gts) if not p[j] and g[j])
        precisions.append(ratio(tp, tp + fp))
        recalls.append(ratio(tp, tp + fn))
        total_tp, total_fp, total_fn = total_tp + tp, total_fp + fp, total_fn + fn
    ap = sum(precisions) / n
    ar = sum(recalls) / n
    op = ratio(total_tp, total_tp + total_fp)
    overall_recall = ratio(total_tp, total_tp + total_fn)
    return {
        "AP": ap,
        "AR": ar,
        "AF1": f1(ap, ar),
        "OP": op,
        "OR": overall_recall,
        "OF1": f1(op, overall_recall),
    }


def test_matches_exact_oracle_on_random_fixtures(rng):
    for _ in range(1000):
        samples, n = int(rng.integers(1, 20)), int(rng.integers(1, 15))
        density = rng.random()
        gts = (rng.random((samples, n)) < density).astype(int)
        gts[0, 0] = 1
        preds = (rng.random((samples, n)) < rng.random()).astype(int)
        summary = classification_suite(preds, gts).summary
        expected = _fraction_oracle(preds.tolist(), gts.tolist())
        for name, value in expected.items():
            assert summary[name] == pytest.approx(float(value), rel=1e-12, abs=1e-12)


def test_single_category_counts_the_positive_class():
    gts = np.array([[1], [0], [1], [1]])
    preds = np.array([[1], [1], [0], [1]])
    table = classification_suite(preds, gts, ["fog"]).per_category
    assert (table.loc["fog", "tp"], table.loc["fog", "fp"], table.loc["fog", "fn"]) == (2, 1, 1)
    assert table.loc["fog", "precision"] == pytest.approx(2 / 3)
    assert table.loc["fog", "recall"] == pytest.approx(2 / 3)
