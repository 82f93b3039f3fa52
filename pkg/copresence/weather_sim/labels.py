from typing import Sequence

import numpy as np

from copresence.weather_sim.renderer import validate_blend_weights


def ground_truth_from_weights(weights: Sequence[float]) -> np.ndarray:
    """The probability label of a blended scene is its blend weight vector."""
    return validate_blend_weights(weights).copy()


def label_error_variance(sigma_a: float) -> float:
    """sigma_L^2 = (sigma_a^2)^2: the squared loss sees the weight variance squared."""
    if not 0.0 <= sigma_a <= 1.0:
        raise ValueError(f"sigma_a must lie in [0, 1], got {sigma_a}")
    return (sigma_a**2) ** 2


def label_error_propagation(sigma_a: float) -> float:
    """Label error std-dev sigma_L caused by a blend weight std-dev `sigma_a`."""
    label_error_variance(sigma_a)
    return sigma_a**2


def binarize(probabilities: Sequence[float], threshold: float = 0.5) -> np.ndarray:
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    return (np.asarray(probabilities, dtype=np.float64) >= threshold).astype(np.int64)
