from copresence.types.base_int_enum import BaseIntEnum


class TaskType(BaseIntEnum):
    ESTIMATION = 0
    CLASSIFICATION = 1
