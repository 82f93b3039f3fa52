from copresence.config.base_poly_config import BasePolyConfig
from copresence.config.config import (
    STRATUM_LABELS,
    TEMPERATURE_LIMITS,
    AblationConfig,
    BaseEffectConfig,
    CopresenceConfig,
    GenerationConfig,
    MetricsConfig,
    ModelConfig,
    MoistureDynamicsConfig,
    ParticleEffectConfig,
    TintEffectConfig,
    TrainConfig,
    VisibilityEffectConfig,
)
from copresence.config.loader import load_config
from copresence.config.utils import dataclass_from_dict, dataclass_to_dict

__all__ = [
    "STRATUM_LABELS",
    "TEMPERATURE_LIMITS",
    "AblationConfig",
    "BaseEffectConfig",
    "BasePolyConfig",
    "CopresenceConfig",
    "GenerationConfig",
    "MetricsConfig",
    "ModelConfig",
    "MoistureDynamicsConfig",
    "ParticleEffectConfig",
    "TintEffectConfig",
    "TrainConfig",
    "VisibilityEffectConfig",
    "dataclass_from_dict",
    "dataclass_to_dict",
    "load_config",
]
