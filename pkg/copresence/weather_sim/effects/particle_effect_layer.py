from typing import Dict, Tuple

import numpy as np

from copresence.config import ParticleEffectConfig
from copresence.weather_sim.effects.base_effect_layer import BaseEffectLayer


class ParticleEffectLayer(BaseEffectLayer):
    """Fixed pattern of falling streaks (rain) or flakes (length 1)."""

    def __init__(self, config: ParticleEffectConfig):
        super().__init__(config)
        self._masks: Dict[Tuple[int, int], np.ndarray] = {}

    def _mask(self, height: int, width: int) -> np.ndarray:
        key = (height, width)
        if key not in self._masks:
            rng = np.random.default_rng(self.config.pattern_seed)
            seeds = rng.random((height, width)) < self.config.density
            mask = np.zeros((height, width), dtype=bool)
            for offset in range(max(self.config.length, 1)):
                mask |= np.roll(seeds, offset, axis=0)
            self._masks[key] = mask
        return self._masks[key]

    def apply_layer(self, image: np.ndarray) -> np.ndarray:
        mask = self._mask(image.shape[0], image.shape[1])
        opacity = (self.config.opacity * mask)[:, :, None]
        return image * (1.0 - opacity) + self._color * opacity
