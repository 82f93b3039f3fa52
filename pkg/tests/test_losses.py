import numpy as np
import pytest

from copresence.errors import NonFiniteError, ShapeMismatchError
from copresence.model.latent import LatentGaussian
from copresence.objectives import (
    bce_multilabel,
    kl_gaussians,
    mse_loss,
    regression_loss,
    total_loss,
)
from copresence.tensor import DiffTensor, Tape, grad_check
from copresence.types import LossType


def _gaussian(mu, sigma) -> LatentGaussian:
    return LatentGaussian(mu=DiffTensor(mu), sigma=DiffTensor(sigma))


class TestMse:
    def test_perfect_prediction(self):
        assert mse_loss(DiffTensor([0.2, 0.8]), np.array([0.2, 0.8])).item() == 0.0

    def test_opposite_one_hot(self):
        assert mse_loss(DiffTensor([1.0, 0.0]), np.array([0.0, 1.0])).item() == 1.0

    def test_matches_scalar_loop(self, rng):
        pred, gt = rng.random(9), rng.random(9)
        expected = 0.0
        for p, g in zip(pred, gt):
            expected += (p - g) ** 2
        expected /= len(pred)
        assert mse_loss(DiffTensor(pred), gt).item() == pytest.approx(expected, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            mse_loss(DiffTensor([0.1, 0.2]), np.array([0.1, 0.2, 0.3]))


class TestRegressionLoss:
    def test_l1(self):
        loss = regression_loss(DiffTensor([0.0, 1.0]), np.array([0.5, 0.0]), LossType.L1)
        assert loss.item() == pytest.approx(0.75)

    def test_smooth_l1_is_quadratic_below_delta(self):
        loss = regression_loss(
            DiffTensor([0.3]), np.array([0.0]), LossType.SMOOTH_L1, delta=1.0
        )
        assert loss.item() == pytest.approx(0.045)

    def test_smooth_l1_is_linear_above_delta(self):
        loss = regression_loss(
            DiffTensor([0.9]), np.array([0.0]), LossType.SMOOTH_L1, delta=0.5
        )
        assert loss.item() == pytest.approx(0.65)

    def test_l2_matches_mse(self, rng):
        pred, gt = rng.random((4, 3)), rng.random((4, 3))
        assert regression_loss(DiffTensor(pred), gt, LossType.L2).item() == pytest.approx(
            mse_loss(DiffTensor(pred), gt).item()
        )


class TestKlGaussians:
    def test_identical_distributions(self, rng):
        mu, sigma = rng.normal(size=5), rng.random(5) + 0.1
        assert kl_gaussians(_gaussian(mu, sigma), _gaussian(mu, sigma)).item() == 0.0

    def test_unit_shift(self):
        kl = kl_gaussians(_gaussian([1.0], [1.0]), _gaussian([0.0], [1.0]))
        assert kl.item() == pytest.approx(0.5)

    def test_sums_over_latent_axis(self):
        kl = kl_gaussians(_gaussian([1.0, 1.0, 1.0], [1.0] * 3), _gaussian([0.0] * 3, [1.0] * 3))
        assert kl.item() == pytest.approx(1.5)

    def test_batched_shape(self, rng):
        q = _gaussian(rng.normal(size=(6, 4)), rng.random((6, 4)) + 0.1)
        p = _gaussian(rng.normal(size=(6, 4)), rng.random((6, 4)) + 0.1)
        assert kl_gaussians(q, p).shape == (6,)

    def test_non_negative(self, rng):
        q = _gaussian(rng.normal(size=(10000, 3)), rng.random((10000, 3)) * 2 + 0.05)
        p = _gaussian(rng.normal(size=(10000, 3)), rng.random((10000, 3)) * 2 + 0.05)
        assert (kl_gaussians(q, p).values >= -1e-12).all()

    def test_matches_monte_carlo_estimate(self):
        rng = np.random.default_rng(2024)
        draws = 1_000_000
        for _ in range(50):
            mu_q, mu_p = rng.normal(size=2), rng.normal(size=2)
            sigma_q, sigma_p = rng.uniform(0.5, 1.5, 2), rng.uniform(0.5, 1.5, 2)
            z = mu_q + sigma_q * rng.standard_normal((draws, 2))
            log_q = -np.log(sigma_q) - 0.5 * ((z - mu_q) / sigma_q) ** 2
            log_p = -np.log(sigma_p) - 0.5 * ((z - mu_p) / sigma_p) ** 2
            samples = np.sum(log_q - log_p, axis=-1)
            standard_error = samples.std() / np.sqrt(draws)
            closed = kl_gaussians(_gaussian(mu_q, sigma_q), _gaussian(mu_p, sigma_p)).item()
            deviation = abs(closed - samples.mean()) / standard_error
            assert deviation < 3

    def test_gradient_matches_finite_differences(self, rng):
        sigma_q, mu_p, sigma_p = rng.random(4) + 0.5, rng.normal(size=4), rng.random(4) + 0.5

        def kl_of_mu(mu):
            q = LatentGaussian(mu=mu, sigma=DiffTensor(sigma_q))
            return kl_gaussians(q, _gaussian(mu_p, sigma_p))

        assert grad_check(kl_of_mu, DiffTensor(rng.normal(size=4))) < 1e-4

    def test_non_positive_sigma_rejected(self):
        with pytest.raises(ValueError):
            kl_gaussians(_gaussian([0.0], [0.0]), _gaussian([0.0], [1.0]))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            kl_gaussians(_gaussian([0.0, 0.0], [1.0, 1.0]), _gaussian([0.0], [1.0]))


class TestTotalLoss:
    def test_zero_weight_is_data_term(self):
        assert total_loss(0.25, 3.0, 0.0).total == 0.25

    def test_default_weight(self):
        assert total_loss(1.0, 2.0, 1e-5).total == pytest.approx(1.00002, abs=1e-15)

    def test_zero_kl(self):
        assert total_loss(0.4, 0.0, 1e-5).total == 0.4

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            total_loss(1.0, 1.0, -1.0)

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteError):
            total_loss(float("inf"), 0.0, 1.0)

    def test_tensor_inputs_keep_differentiable_objective(self):
        pred = DiffTensor([0.2, 0.6], requires_grad=True)
        with Tape() as tape:
            report = total_loss(mse_loss(pred, np.array([0.0, 1.0])), 0.5, 2.0)
            tape.backward(report.objective)
        assert report.total == pytest.approx(0.1 + 1.0)
        np.testing.assert_allclose(pred.grad, [0.2, -0.4])


class TestBce:
    def test_half_everywhere(self, rng):
        gt = (rng.random((5, 3)) > 0.5).astype(float)
        loss = bce_multilabel(DiffTensor(np.full((5, 3), 0.5)), gt)
        assert loss.item() == pytest.approx(np.log(2.0))

    def test_approaches_zero_at_labels(self):
        gt = np.array([[1.0, 0.0, 1.0]])
        loss = bce_multilabel(DiffTensor(np.clip(gt, 1e-9, 1 - 1e-9)), gt)
        assert 0.0 <= loss.item() < 1e-6

    def test_clipping_keeps_loss_finite(self):
        loss = bce_multilabel(DiffTensor([[0.0, 1.0]]), np.array([[1.0, 0.0]]))
        assert np.isfinite(loss.item())
        assert loss.item() == pytest.approx(-np.log(1e-7), rel=1e-6)

    def test_matches_scalar_oracle(self, rng):
        pred, gt = rng.uniform(0.05, 0.95, (4, 3)), (rng.random((4, 3)) > 0.5).astype(float)
        expected = 0.0
        for p, g in zip(pred.ravel(), gt.ravel()):
            expected -= g * np.log(p) + (1 - g) * np.log(1 - p)
        expected /= pred.size
        assert bce_multilabel(DiffTensor(pred), gt).item() == pytest.approx(expected, abs=1e-12)
