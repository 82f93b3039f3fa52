from copresence.types.base_int_enum import BaseIntEnum


class LossType(BaseIntEnum):
    L1 = 0
    SMOOTH_L1 = 1
    L2 = 2
