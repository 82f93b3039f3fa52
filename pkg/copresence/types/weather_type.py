from copresence.types.base_int_enum import BaseIntEnum


class WeatherType(BaseIntEnum):
    """The 14 weather categories, in report column order."""

    BLIZZARD = 0
    CLEAR = 1
    CLEARING = 2
    CLOUDY = 3
    EXTRASUNNY = 4
    FOGGY = 5
    NEUTRAL = 6
    OVERCAST = 7
    RAIN = 8
    SMOG = 9
    SNOW = 10
    SNOWLIGHT = 11
    THUNDER = 12
    FROZEN = 13
