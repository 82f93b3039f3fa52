from copresence.types.base_int_enum import BaseIntEnum


class AblationAxis(BaseIntEnum):
    LATENT_SIZE = 0
    LOSS_KIND = 1
    LAMBDA = 2
    COMPONENT = 3
