from copresence.config import ModelConfig
from copresence.model.checkpoint import (
    CheckpointMeta,
    check_categories,
    load_checkpoint,
    save_checkpoint,
)
from copresence.model.head import predict_head
from copresence.model.latent import (
    LatentGaussian,
    posterior_net,
    prior_net,
    sample_latent,
    uncertainty_score,
)
from copresence.model.layers import (
    TokenBlock,
    embed_patches,
    encode_with_tokens,
    encoder_layer,
)
from copresence.model.meformer import InferenceOutput, MeFormer, TrainForward
from copresence.model.params import ModelParams, parameter_shapes

__all__ = [
    "CheckpointMeta",
    "InferenceOutput",
    "LatentGaussian",
    "MeFormer",
    "ModelConfig",
    "ModelParams",
    "TokenBlock",
    "TrainForward",
    "check_categories",
    "embed_patches",
    "encode_with_tokens",
    "encoder_layer",
    "load_checkpoint",
    "parameter_shapes",
    "posterior_net",
    "predict_head",
    "prior_net",
    "sample_latent",
    "save_checkpoint",
    "uncertainty_score",
]
