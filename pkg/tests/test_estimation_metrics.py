import numpy as np
import pytest

from copresence.errors import ShapeMismatchError
from copresence.objectives import (
    ALL_ROW,
    aggregate_estimation,
    metric_suite,
    sample_metrics,
    stratum_labels_from_labels,
)


def _longdouble_oracle(pred, gt):
    pred = np.asarray(pred, dtype=np.longdouble)
    gt = np.asarray(gt, dtype=np.longdouble)
    ssd = kl = ce = np.longdouble(0)
    mean = sum(gt) / len(gt)
    spread = np.longdouble(0)
    for p, g in zip(pred, gt):
        q = max(p, np.longdouble(1e-7))
        ssd += (g - p) ** 2
        if g > 0:
            kl += g * np.log(g / q)
        ce -= g * np.log(q)
        spread += (g - mean) ** 2
    return float(ssd), float(kl), float(1 - ssd / spread), float(ce)


class TestSampleMetrics:
    def test_perfect_prediction(self):
        gt = np.array([0.3, 0.7])
        metrics = sample_metrics(gt, gt)
        assert metrics["ssd"][0] == 0.0
        assert metrics["kl"][0] == 0.0
        assert metrics["r2"][0] == 1.0
        assert metrics["ce"][0] == pytest.approx(-(0.3 * np.log(0.3) + 0.7 * np.log(0.7)))

    def test_one_hot_against_uniform(self):
        metrics = sample_metrics(np.array([0.5, 0.5]), np.array([1.0, 0.0]))
        assert metrics["ssd"][0] == pytest.approx(0.5)
        assert metrics["kl"][0] == pytest.approx(np.log(2.0))
        assert metrics["ce"][0] == pytest.approx(np.log(2.0))
        assert metrics["r2"][0] == pytest.approx(0.0)

    def test_matches_extended_precision_oracle(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 15))
            gt = rng.dirichlet(np.ones(n))
            # absent categories exercise the 0 * log(0) convention
            gt[rng.random(n) < 0.3] = 0.0
            if gt.sum() == 0:
                gt[0] = 1.0
            gt /= gt.sum()
            if np.all(gt == gt[0]):
                continue
            pred = rng.random(n)
            metrics = sample_metrics(pred, gt)
            expected = _longdouble_oracle(pred, gt)
            for name, value in zip(("ssd", "kl", "r2", "ce"), expected):
                assert metrics[name][0] == pytest.approx(value, rel=1e-12, abs=1e-12)

    def test_ssd_is_n_times_mse(self, rng):
        pred, gt = rng.random(8), rng.random(8)
        assert sample_metrics(pred, gt)["ssd"][0] == pytest.approx(
            8 * np.mean((pred - gt) ** 2), abs=1e-15
        )

    def test_zero_prediction_is_clipped(self):
        metrics = sample_metrics(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
        assert np.isfinite(metrics["kl"][0])
        assert np.isfinite(metrics["ce"][0])

    def test_constant_ground_truth_leaves_r2_undefined(self):
        metrics = sample_metrics(np.array([0.1, 0.2]), np.array([0.5, 0.5]))
        assert np.isnan(metrics["r2"][0])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            sample_metrics(np.zeros(3), np.zeros(2))


class TestMetricSuite:
    def test_per_category_rows_cover_positive_ground_truth(self):
        gt = np.array([[1.0, 0.0, 0.0], [0.5, 0.5, 0.0]])
        pred = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0]])
        report = metric_suite(pred, gt, ["rain", "snow", "fog"])

        table = report.per_category
        assert list(table.index) == ["rain", "snow", "fog", ALL_ROW]
        assert table.loc["rain", "count"] == 2
        assert table.loc["rain", "ssd"] == pytest.approx(0.25)
        assert table.loc["snow", "count"] == 1
        assert table.loc["snow", "ssd"] == pytest.approx(0.0)
        assert table.loc["fog", "count"] == 0
        assert np.isnan(table.loc["fog", "ssd"])
        assert report.overall["ssd"] == pytest.approx(0.25)

    def test_undefined_r2_excluded_from_aggregates(self):
        gt = np.array([[1.0, 0.0], [0.5, 0.5]])
        pred = np.array([[1.0, 0.0], [0.2, 0.8]])
        report = metric_suite(pred, gt)
        assert report.r2_undefined == 1
        assert report.overall["r2"] == 1.0

    def test_single_sample_vector(self):
        report = metric_suite(np.array([0.3, 0.7]), np.array([0.3, 0.7]))
        assert report.num_samples == 1
        assert report.overall["ssd"] == 0.0

    def test_category_name_count_checked(self):
        with pytest.raises(ShapeMismatchError):
            metric_suite(np.zeros((1, 2)), np.zeros((1, 2)), ["only-one"])


class TestStrata:
    def test_labels_from_nonzero_counts(self):
        gt = np.array(
            [
                [1.0, 0, 0, 0, 0, 0],
                [0.5, 0.5, 0, 0, 0, 0],
                [0.2, 0.2, 0.2, 0.2, 0.2, 0],
                [0.0, 0, 0, 0, 0, 0],
            ]
        )
        assert stratum_labels_from_labels(gt) == ["1", "2", ">4", "1"]

    def test_stratum_counts_sum_to_samples(self, rng):
        gt = np.stack([rng.dirichlet(np.ones(3)) for _ in range(12)])
        gt[:4, 1:] = 0.0
        gt[:4, 0] = 1.0
        report = metric_suite(rng.random((12, 3)), gt)
        table = aggregate_estimation(report, stratum_labels_from_labels(gt))

        assert list(table.index) == ["1", "2", "3", "4", ">4", "All"]
        assert table.loc["1", "count"] == 4
        assert table.loc["3", "count"] == 8
        assert table.drop("All")["count"].sum() == table.loc["All", "count"] == 12
        assert np.isnan(table.loc["4", "ssd"])
        assert table.loc["All", "ssd"] == pytest.approx(report.overall["ssd"])

    def test_strata_length_checked(self):
        report = metric_suite(np.zeros((2, 2)), np.eye(2))
        with pytest.raises(ShapeMismatchError):
            aggregate_estimation(report, ["1"])
