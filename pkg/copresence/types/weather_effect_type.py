from copresence.types.base_int_enum import BaseIntEnum


class WeatherEffectType(BaseIntEnum):
    TINT = 0
    VISIBILITY = 1
    PARTICLE = 2
