from typing import Callable, Sequence

import numpy as np

Effect = Callable[[np.ndarray], np.ndarray]

WEIGHT_SUM_TOLERANCE = 1e-9


def validate_blend_weights(weights: Sequence[float]) -> np.ndarray:
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 1 or weights.size == 0:
        raise ValueError(f"blend weights must be a non-empty vector, got shape {weights.shape}")
    if not np.isfinite(weights).all() or (weights < 0).any():
        raise ValueError(f"blend weights must be finite and non-negative, got {weights}")
    total = float(np.sum(weights))
    if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ValueError(f"blend weights must sum to 1, got {total!r}")
    return weights


def render_blend(
    base: np.ndarray,
    effects: Sequence[Effect],
    weights: Sequence[float],
    clip: bool = True,
) -> np.ndarray:
    """Convex per-pixel combination of single-weather renderings of `base`."""
    if len(effects) != len(weights):
        raise ValueError(f"{len(effects)} effects but {len(weights)} weights")
    weights = validate_blend_weights(weights)

    out = np.zeros_like(base, dtype=np.float64)
    for effect, weight in zip(effects, weights):
        if weight == 0.0:
            continue
        layer = effect(base)
        if layer.shape != base.shape:
            raise ValueError(f"effect changed the image shape {base.shape} to {layer.shape}")
        out += weight * layer
    return np.clip(out, 0.0, 1.0) if clip else out
