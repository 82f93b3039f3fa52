from dataclasses import dataclass
from typing import List, Optional, Union

import numpy as np

from copresence.config import ModelConfig
from copresence.errors import ShapeMismatchError
from copresence.logger import init_logger
from copresence.model.head import predict_head
from copresence.model.latent import (
    LatentGaussian,
    category_latents,
    posterior_net,
    prior_net,
    sample_latent,
    uncertainty_score,
)
from copresence.model.layers import TokenBlock, embed_patches, encode_with_tokens
from copresence.model.params import ModelParams
from copresence.tensor import DiffTensor
from copresence.types import LatentMode

logger = init_logger(__name__)


@dataclass
class TrainForward:
    prediction: DiffTensor
    prior: Optional[LatentGaussian]
    posterior: Optional[LatentGaussian]


@dataclass
class InferenceOutput:
    prediction: np.ndarray
    prior: Optional[LatentGaussian]
    # (B,) overall and (B, n) per-category scores; NaN without the latent branch
    uncertainty: np.ndarray
    category_uncertainty: np.ndarray


class MeFormer:
    """Patch encoder, weather tokens, latent nets and probability head."""

    def __init__(self, config: ModelConfig, params: Optional[ModelParams] = None):
        self.config = config
        self.params = params if params is not None else ModelParams.initialize(config)
        logger.debug(
            f"MeFormer with {self.params.num_parameters()} parameters "
            f"(mfe={config.use_mfe}, pul={config.use_pul})"
        )

    def active_parameter_names(self) -> List[str]:
        return self.params.names()

    def _images(self, images: np.ndarray) -> np.ndarray:
        images = np.asarray(images, dtype=np.float64)
        if images.ndim == 3:
            images = images[None]
        size = self.config.image_size
        if images.ndim != 4 or images.shape[1:] != (size, size, 3):
            raise ShapeMismatchError(
                f"expected images of shape (B, {size}, {size}, 3), got {images.shape}"
            )
        return images

    def encode(
        self,
        images: np.ndarray,
        dropout: float = 0.0,
        rng: Optional[np.random.Generator] = None,
        training: bool = False,
    ) -> TokenBlock:
        x = embed_patches(
            self._images(images),
            self.params["patch_embed.weight"],
            self.params["patch_embed.bias"],
            self.config.patch_size,
        )
        tokens = self.params["weather_tokens"] if self.config.use_mfe else None
        layers = [self.params.encoder_layer(i) for i in range(self.config.depth)]
        return encode_with_tokens(
            x, tokens, layers, self.config.num_heads, dropout, rng, training
        )

    def prior(self, X: DiffTensor) -> LatentGaussian:
        return prior_net(X, self.params.latent_layers("prior"))

    def posterior(self, X: DiffTensor, label_prob: Union[np.ndarray, DiffTensor]) -> LatentGaussian:
        return posterior_net(
            X,
            label_prob,
            self.params.latent_layers("posterior"),
            append=not self.config.use_mfe,
        )

    def head(self, X: DiffTensor, z: Optional[DiffTensor]) -> DiffTensor:
        params = self.params
        return predict_head(
            X,
            z,
            params["head.w3"],
            params["head.b3"],
            params["head.w4"] if self.config.use_pul else None,
            params["head.b4"] if self.config.use_pul else None,
        )

    def forward_train(
        self,
        images: np.ndarray,
        label_prob: np.ndarray,
        rng: Optional[np.random.Generator] = None,
        dropout: float = 0.0,
        latent_mode: LatentMode = LatentMode.STOCHASTIC,
    ) -> TrainForward:
        """Training pass; the head's latent is drawn from the prior."""
        label_prob = np.asarray(label_prob, dtype=np.float64)
        if label_prob.ndim == 1:
            label_prob = label_prob[None]
        if label_prob.shape[-1] != self.config.num_categories:
            raise ShapeMismatchError(
                f"ground truth has {label_prob.shape[-1]} entries for "
                f"{self.config.num_categories} categories"
            )

        block = self.encode(images, dropout, rng, training=True)
        if not self.config.use_pul:
            return TrainForward(prediction=self.head(block.X, None), prior=None, posterior=None)

        prior = self.prior(block.X)
        posterior = self.posterior(block.X, label_prob)
        z = sample_latent(prior, latent_mode, rng)
        return TrainForward(prediction=self.head(block.X, z), prior=prior, posterior=posterior)

    def forward_infer(
        self,
        images: np.ndarray,
        latent_mode: LatentMode = LatentMode.MEAN,
        rng: Optional[np.random.Generator] = None,
        category_scores: bool = True,
    ) -> InferenceOutput:
        """Inference pass without the posterior; mean mode is deterministic."""
        block = self.encode(images)
        batch = block.X.shape[0]
        n = self.config.num_categories

        if not self.config.use_pul:
            prediction = self.head(block.X, None)
            return InferenceOutput(
                prediction=prediction.values,
                prior=None,
                uncertainty=np.full(batch, np.nan),
                category_uncertainty=np.full((batch, n), np.nan),
            )

        prior = self.prior(block.X)
        z = sample_latent(prior, latent_mode, rng)
        prediction = self.head(block.X, z)

        per_category = np.full((batch, n), np.nan)
        if category_scores and self.config.use_mfe:
            per_category = np.stack(
                [np.atleast_1d(uncertainty_score(g)) for g in self.per_category_latents(block.X)],
                axis=-1,
            )
        return InferenceOutput(
            prediction=prediction.values,
            prior=prior.detach(),
            uncertainty=np.atleast_1d(uncertainty_score(prior)),
            category_uncertainty=per_category,
        )

    def per_category_latents(self, X: DiffTensor) -> List[LatentGaussian]:
        """Prior read-out of each weather row alone, in category order."""
        if not (self.config.use_mfe and self.config.use_pul):
            raise ShapeMismatchError("per-category latents need both weather tokens and the prior")
        return [g.detach() for g in category_latents(X, self.params.latent_layers("prior"))]

    def predict(self, images: np.ndarray, batch_size: int = 64) -> InferenceOutput:
        """Mean-mode inference over many images in fixed-size chunks."""
        images = self._images(images)
        outputs = [
            self.forward_infer(images[start : start + batch_size])
            for start in range(0, len(images), batch_size)
        ]
        return InferenceOutput(
            prediction=np.concatenate([o.prediction for o in outputs]),
            prior=None,
            uncertainty=np.concatenate([o.uncertainty for o in outputs]),
            category_uncertainty=np.concatenate([o.category_uncertainty for o in outputs]),
        )
