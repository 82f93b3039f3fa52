from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from copresence.errors import NonFiniteError, ShapeMismatchError
from copresence.model.latent import LatentGaussian
from copresence.tensor import DiffTensor
from copresence.tensor import functional as F
from copresence.types import LossType

BCE_CLIP = 1e-7

Scalar = Union[DiffTensor, float]


def _check_lengths(pred: DiffTensor, gt: np.ndarray) -> None:
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"prediction {pred.shape} and ground truth {gt.shape} differ")


def mse_loss(pred: DiffTensor, gt: np.ndarray) -> DiffTensor:
    """Mean of squared differences over every entry (categories and batch)."""
    pred, gt = F.as_tensor(pred), np.asarray(gt, dtype=np.float64)
    _check_lengths(pred, gt)
    return F.mean(F.square(pred - gt))


def regression_loss(
    pred: DiffTensor,
    gt: np.ndarray,
    loss_type: LossType = LossType.L2,
    delta: float = 1.0,
) -> DiffTensor:
    if loss_type == LossType.L2:
        return mse_loss(pred, gt)

    pred, gt = F.as_tensor(pred), np.asarray(gt, dtype=np.float64)
    _check_lengths(pred, gt)
    diff = pred - gt
    if loss_type == LossType.L1:
        return F.mean(F.abs(diff))
    if loss_type == LossType.SMOOTH_L1:
        return F.mean(F.smooth_l1(diff, delta))
    raise ValueError(f"Unknown loss type: {loss_type}")


def kl_gaussians(q: LatentGaussian, p: LatentGaussian) -> DiffTensor:
    """KL(q || p) between diagonal Gaussians, summed over the latent axis.

    Returns a scalar for (M,) inputs and a (B,) vector for batched ones.
    """
    if q.mu.shape != p.mu.shape:
        raise ShapeMismatchError(f"latents {q.mu.shape} and {p.mu.shape} differ in shape")
    if (q.sigma.values <= 0).any() or (p.sigma.values <= 0).any():
        raise ValueError("KL divergence needs strictly positive sigmas")

    log_ratio = F.log(p.sigma) - F.log(q.sigma)
    spread = (F.square(q.sigma) + F.square(q.mu - p.mu)) / (F.square(p.sigma) * 2.0)
    return F.sum(log_ratio + spread - 0.5, axis=-1)


def bce_multilabel(pred: DiffTensor, gt: np.ndarray) -> DiffTensor:
    """Mean binary cross-entropy over every entry, predictions clipped first."""
    pred, gt = F.as_tensor(pred), np.asarray(gt, dtype=np.float64)
    _check_lengths(pred, gt)
    clipped = F.clip(pred, BCE_CLIP, 1.0 - BCE_CLIP)
    positive = F.log(clipped) * gt
    negative = F.log(1.0 - clipped) * (1.0 - gt)
    return -F.mean(positive + negative)


@dataclass
class LossReport:
    mse: float
    kl: float
    total: float
    kl_weight: float
    objective: Optional[DiffTensor] = field(default=None, repr=False, compare=False)


def _value(x: Scalar) -> float:
    return float(np.sum(x.values)) if isinstance(x, DiffTensor) else float(x)


def total_loss(mse: Scalar, kl: Scalar, kl_weight: float) -> LossReport:
    """total = mse + kl_weight * kl; keeps the differentiable sum when given tensors."""
    if kl_weight < 0:
        raise ValueError(f"KL weight must be non-negative, got {kl_weight}")

    objective = None
    if isinstance(mse, DiffTensor) or isinstance(kl, DiffTensor):
        objective = F.as_tensor(mse) + F.as_tensor(kl) * kl_weight

    mse_value, kl_value = _value(mse), _value(kl)
    report = LossReport(
        mse=mse_value,
        kl=kl_value,
        total=mse_value + kl_weight * kl_value,
        kl_weight=kl_weight,
        objective=objective,
    )
    if not np.isfinite(report.total):
        raise NonFiniteError(f"loss is not finite: {report}")
    return report
