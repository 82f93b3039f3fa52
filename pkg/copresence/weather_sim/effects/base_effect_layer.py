from abc import ABC, abstractmethod

import numpy as np

from copresence.config import BaseEffectConfig


class BaseEffectLayer(ABC):

    def __init__(self, config: BaseEffectConfig):
        self.config = config
        self._color = np.asarray(config.color, dtype=np.float64)

    @abstractmethod
    def apply_layer(self, image: np.ndarray) -> np.ndarray:
        pass

    def apply(self, image: np.ndarray) -> np.ndarray:
        assert image.ndim == 3 and image.shape[2] == 3
        out = self.apply_layer(image)
        assert out.shape == image.shape
        return np.clip(out, 0.0, 1.0)
