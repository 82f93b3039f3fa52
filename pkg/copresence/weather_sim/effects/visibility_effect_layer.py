import numpy as np

from copresence.config import VisibilityEffectConfig
from copresence.weather_sim.effects.base_effect_layer import BaseEffectLayer


class VisibilityEffectLayer(BaseEffectLayer):
    """Haze whose opacity grows with scene depth.

    Depth is 1 from the top row down to the horizon and falls linearly to 0
    at the bottom row.
    """

    def __init__(self, config: VisibilityEffectConfig):
        super().__init__(config)

    def _depth(self, height: int) -> np.ndarray:
        rows = (np.arange(height) + 0.5) / height
        horizon = self.config.horizon
        below = (1.0 - rows) / (1.0 - horizon)
        return np.where(rows <= horizon, 1.0, below)

    def apply_layer(self, image: np.ndarray) -> np.ndarray:
        depth = self._depth(image.shape[0])
        haze = 1.0 - np.exp(-self.config.density * depth)
        haze = haze[:, None, None]
        return image * (1.0 - haze) + self._color * haze
