""" File to store names for the metrics captured during training """

import enum


class EpochMetrics(enum.Enum):
    TRAIN_LOSS = "train_loss"
    TRAIN_DATA_LOSS = "train_data_loss"
    TRAIN_KL = "train_kl"
    VAL_LOSS = "val_loss"
    VAL_SSD = "val_ssd"
    VAL_R2 = "val_r2"


EPOCH_KEY = "epoch"
