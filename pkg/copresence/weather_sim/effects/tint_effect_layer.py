import numpy as np

from copresence.config import TintEffectConfig
from copresence.weather_sim.effects.base_effect_layer import BaseEffectLayer


class TintEffectLayer(BaseEffectLayer):
    """Contrast change around mid-gray followed by a pull towards a color."""

    def __init__(self, config: TintEffectConfig):
        super().__init__(config)

    def apply_layer(self, image: np.ndarray) -> np.ndarray:
        contrasted = (image - 0.5) * self.config.contrast + 0.5
        strength = self.config.strength
        return (1.0 - strength) * contrasted + strength * self._color
