import json
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from copresence.config import (
    BaseEffectConfig,
    ParticleEffectConfig,
    TintEffectConfig,
    VisibilityEffectConfig,
    dataclass_to_dict,
)
from copresence.errors import ConfigError, StorageError
from copresence.types import WeatherType
from copresence.weather_sim.effects.base_effect_layer import BaseEffectLayer
from copresence.weather_sim.effects.effect_layer_registry import EffectLayerRegistry

_WHITE = [0.95, 0.95, 0.97]

DEFAULT_EFFECT_TABLE: Dict[WeatherType, List[BaseEffectConfig]] = {
    WeatherType.BLIZZARD: [
        TintEffectConfig(color=[0.85, 0.88, 0.92], strength=0.5),
        VisibilityEffectConfig(color=[0.9, 0.9, 0.95], density=3.0),
        ParticleEffectConfig(color=_WHITE, density=0.08, length=2, pattern_seed=13),
    ],
    WeatherType.CLEAR: [TintEffectConfig(color=[1.0, 0.97, 0.9], strength=0.1, contrast=1.1)],
    WeatherType.CLEARING: [
        TintEffectConfig(color=[0.8, 0.85, 0.9], strength=0.2),
        ParticleEffectConfig(color=[0.75, 0.8, 0.9], density=0.005, length=3, pattern_seed=2),
    ],
    WeatherType.CLOUDY: [
        TintEffectConfig(color=[0.7, 0.72, 0.75], strength=0.35, contrast=0.85)
    ],
    WeatherType.EXTRASUNNY: [
        TintEffectConfig(color=[1.0, 0.92, 0.7], strength=0.3, contrast=1.25)
    ],
    WeatherType.FOGGY: [VisibilityEffectConfig(color=[0.8, 0.8, 0.8], density=4.0)],
    WeatherType.NEUTRAL: [TintEffectConfig(color=[0.6, 0.62, 0.65], strength=0.15)],
    WeatherType.OVERCAST: [
        TintEffectConfig(color=[0.45, 0.47, 0.5], strength=0.55, contrast=0.7)
    ],
    WeatherType.RAIN: [
        TintEffectConfig(color=[0.4, 0.45, 0.5], strength=0.4),
        ParticleEffectConfig(color=[0.7, 0.75, 0.85], density=0.03, length=5, pattern_seed=8),
    ],
    WeatherType.SMOG: [
        TintEffectConfig(color=[0.6, 0.55, 0.4], strength=0.4),
        VisibilityEffectConfig(color=[0.55, 0.5, 0.4], density=2.0),
    ],
    WeatherType.SNOW: [
        TintEffectConfig(color=[0.9, 0.92, 0.95], strength=0.45),
        ParticleEffectConfig(color=_WHITE, density=0.05, length=1, pattern_seed=10),
    ],
    WeatherType.SNOWLIGHT: [
        TintEffectConfig(color=[0.85, 0.88, 0.92], strength=0.25),
        ParticleEffectConfig(color=_WHITE, density=0.02, length=1, pattern_seed=11),
    ],
    WeatherType.THUNDER: [
        TintEffectConfig(color=[0.2, 0.22, 0.3], strength=0.6, contrast=1.3),
        ParticleEffectConfig(color=[0.7, 0.75, 0.85], density=0.04, length=6, pattern_seed=12),
    ],
    WeatherType.FROZEN: [
        TintEffectConfig(color=[0.75, 0.85, 0.95], strength=0.4, contrast=0.9)
    ],
}


@dataclass
class WeatherEffect:
    """Maps a base scene to the scene fully under one weather category."""

    category: WeatherType
    layers: List[BaseEffectLayer]

    @classmethod
    def from_configs(
        cls, category: WeatherType, configs: Sequence[BaseEffectConfig]
    ) -> "WeatherEffect":
        layers = [EffectLayerRegistry.get(config.get_type(), config) for config in configs]
        return cls(category=category, layers=layers)

    def __call__(self, base: np.ndarray) -> np.ndarray:
        out = base
        for layer in self.layers:
            out = layer.apply(out)
        return np.clip(out, 0.0, 1.0)


def build_weather_effects(
    categories: Sequence[WeatherType],
    table: Optional[Dict[WeatherType, List[BaseEffectConfig]]] = None,
) -> List[WeatherEffect]:
    table = table or DEFAULT_EFFECT_TABLE
    return [WeatherEffect.from_configs(category, table[category]) for category in categories]


def effect_table_to_dict(
    table: Dict[WeatherType, List[BaseEffectConfig]],
    categories: Optional[Sequence[WeatherType]] = None,
) -> Dict[str, List[Dict[str, Any]]]:
    categories = list(table) if categories is None else list(categories)
    return {
        str(category): [dataclass_to_dict(config) for config in table[category]]
        for category in categories
    }


def load_effect_table(path: Optional[str]) -> Dict[WeatherType, List[BaseEffectConfig]]:
    """Built-in table with the categories listed in the JSON file at `path` replaced."""
    if path is None:
        return DEFAULT_EFFECT_TABLE
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise StorageError(f"Could not read effect config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"Effect config {path} is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"Effect config {path} must map category names to layer lists")

    table = dict(DEFAULT_EFFECT_TABLE)
    for name, layers in data.items():
        try:
            category = WeatherType.from_str(name)
            table[category] = [BaseEffectConfig.create_from_dict(layer) for layer in layers]
        except ValueError as e:
            raise ConfigError(f"Effect config {path}, category {name!r}: {e}") from None
    return table
