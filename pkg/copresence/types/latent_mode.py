from copresence.types.base_int_enum import BaseIntEnum


class LatentMode(BaseIntEnum):
    STOCHASTIC = 0
    MEAN = 1
