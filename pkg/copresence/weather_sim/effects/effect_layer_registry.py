from copresence.types import WeatherEffectType
from copresence.utils.base_registry import BaseRegistry
from copresence.weather_sim.effects.particle_effect_layer import ParticleEffectLayer
from copresence.weather_sim.effects.tint_effect_layer import TintEffectLayer
from copresence.weather_sim.effects.visibility_effect_layer import (
    VisibilityEffectLayer,
)


class EffectLayerRegistry(BaseRegistry):
    _key_class = WeatherEffectType


EffectLayerRegistry.register(WeatherEffectType.TINT, TintEffectLayer)
EffectLayerRegistry.register(WeatherEffectType.VISIBILITY, VisibilityEffectLayer)
EffectLayerRegistry.register(WeatherEffectType.PARTICLE, ParticleEffectLayer)
