"""Prior and posterior latent nets over the weather representation."""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from copresence.errors import NonFiniteError, ShapeMismatchError
from copresence.tensor import DiffTensor
from copresence.tensor import functional as F
from copresence.types import LatentMode

SIGMA_FLOOR = 1e-6

Layers = Sequence[Tuple[DiffTensor, DiffTensor]]


@dataclass
class LatentGaussian:
    """Axis-aligned Gaussian; mu and sigma are (M,) or (B, M)."""

    mu: DiffTensor
    sigma: DiffTensor

    def __post_init__(self):
        if self.mu.shape != self.sigma.shape:
            raise ShapeMismatchError(
                f"mu {self.mu.shape} and sigma {self.sigma.shape} differ in shape"
            )

    @property
    def latent_size(self) -> int:
        return self.mu.shape[-1]

    def validate(self) -> None:
        if not (np.isfinite(self.mu.values).all() and np.isfinite(self.sigma.values).all()):
            raise NonFiniteError("latent Gaussian holds non-finite values")
        if (self.sigma.values <= 0).any():
            raise ValueError("latent Gaussian sigma must be strictly positive")

    def detach(self) -> "LatentGaussian":
        return LatentGaussian(mu=self.mu.detach(), sigma=self.sigma.detach())

    def row(self, index: int) -> "LatentGaussian":
        return LatentGaussian(mu=self.mu[index], sigma=self.sigma[index])


def latent_mlp(
    features: DiffTensor, layers: Layers, sigma_floor: float = SIGMA_FLOOR
) -> LatentGaussian:
    """Affine layers with ReLU between them; the last output splits into (mu, sigma)."""
    hidden = features
    for i, (weight, bias) in enumerate(layers):
        if hidden.shape[-1] != weight.shape[0]:
            raise ShapeMismatchError(
                f"latent layer {i}: input width {hidden.shape[-1]} does not fit {weight.shape}"
            )
        hidden = F.matmul(hidden, weight) + bias
        if i < len(layers) - 1:
            hidden = F.relu(hidden)

    width = hidden.shape[-1]
    if width % 2:
        raise ShapeMismatchError(f"latent output width {width} is odd")
    latent_size = width // 2
    mu = hidden[..., :latent_size]
    sigma = F.softplus(hidden[..., latent_size:]) + sigma_floor
    return LatentGaussian(mu=mu, sigma=sigma)


def _flatten(X: DiffTensor) -> Tuple[DiffTensor, bool]:
    """(rows, h*w) or (B, rows, h*w) to (B, rows*h*w)."""
    single = X.ndim == 2
    if single:
        X = F.reshape(X, (1, *X.shape))
    if X.ndim != 3:
        raise ShapeMismatchError(f"expected (B, rows, h*w) features, got {X.shape}")
    return F.reshape(X, (X.shape[0], X.shape[1] * X.shape[2])), single


def _squeeze(g: LatentGaussian, single: bool) -> LatentGaussian:
    return g.row(0) if single else g


def prior_net(X: DiffTensor, layers: Layers) -> LatentGaussian:
    """Latent Gaussian from the weather representation alone."""
    flat, single = _flatten(X)
    return _squeeze(latent_mlp(flat, layers), single)


def inject_ground_truth(X: DiffTensor, P: Union[DiffTensor, np.ndarray]) -> DiffTensor:
    """Adds p_i to every spatial entry of weather feature row i."""
    P = F.as_tensor(P)
    rows = X.shape[-2]
    if P.shape[-1] != rows:
        raise ShapeMismatchError(f"ground truth of length {P.shape[-1]} for {rows} weather rows")
    return X + F.reshape(P, (*P.shape, 1))


def posterior_net(
    X: DiffTensor,
    P: Union[DiffTensor, np.ndarray],
    layers: Layers,
    append: bool = False,
) -> LatentGaussian:
    """Prior architecture fed with features that carry the ground truth.

    With `append` the ground truth is concatenated to the flattened features
    instead of added per row, for representations without weather rows.
    """
    P = F.as_tensor(P)
    if not append:
        flat, single = _flatten(inject_ground_truth(X, P))
        return _squeeze(latent_mlp(flat, layers), single)

    flat, single = _flatten(X)
    P = F.reshape(P, (1, P.shape[-1])) if P.ndim == 1 else P
    if P.shape[0] != flat.shape[0]:
        raise ShapeMismatchError(f"ground truth batch {P.shape} for features {flat.shape}")
    return _squeeze(latent_mlp(F.concat([flat, P], axis=-1), layers), single)


def sample_latent(
    g: LatentGaussian,
    mode: LatentMode = LatentMode.STOCHASTIC,
    rng: Optional[np.random.Generator] = None,
) -> DiffTensor:
    """Reparameterized draw mu + sigma * eps, or mu itself in mean mode."""
    if mode == LatentMode.MEAN:
        return g.mu
    if rng is None:
        raise ValueError("stochastic latent sampling needs a random generator")
    eps = rng.standard_normal(g.mu.shape)
    return g.mu + g.sigma * eps


def uncertainty_score(g: LatentGaussian) -> Union[float, np.ndarray]:
    """Mean of sigma over the latent axis."""
    scores = np.mean(g.sigma.values, axis=-1)
    return float(scores) if np.ndim(scores) == 0 else scores


def per_category_inputs(X: DiffTensor, category: int) -> DiffTensor:
    """X with every weather row except `category` zeroed."""
    mask = np.zeros((X.shape[-2], 1))
    mask[category] = 1.0
    return X * mask


def category_latents(X: DiffTensor, layers: Layers) -> List[LatentGaussian]:
    return [prior_net(per_category_inputs(X, i), layers) for i in range(X.shape[-2])]
