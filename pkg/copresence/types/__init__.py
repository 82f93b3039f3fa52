from copresence.types.ablation_axis import AblationAxis
from copresence.types.base_int_enum import BaseIntEnum
from copresence.types.evaluation_track import EvaluationTrack
from copresence.types.latent_mode import LatentMode
from copresence.types.loss_type import LossType
from copresence.types.task_type import TaskType
from copresence.types.weather_effect_type import WeatherEffectType
from copresence.types.weather_type import WeatherType

__all__ = [
    AblationAxis,
    BaseIntEnum,
    EvaluationTrack,
    LatentMode,
    LossType,
    TaskType,
    WeatherEffectType,
    WeatherType,
]
