from copresence.types.base_int_enum import BaseIntEnum


class EvaluationTrack(BaseIntEnum):
    ESTIMATION = 0
    CLASSIFICATION = 1
