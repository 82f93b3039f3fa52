from copresence.weather_sim.effects.effect_layer_registry import EffectLayerRegistry
from copresence.weather_sim.effects.weather_effect import (
    DEFAULT_EFFECT_TABLE,
    WeatherEffect,
    build_weather_effects,
    effect_table_to_dict,
    load_effect_table,
)

__all__ = [
    "DEFAULT_EFFECT_TABLE",
    "EffectLayerRegistry",
    "WeatherEffect",
    "build_weather_effects",
    "effect_table_to_dict",
    "load_effect_table",
]
