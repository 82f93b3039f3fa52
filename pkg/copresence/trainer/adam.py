from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Union

import numpy as np

from copresence.errors import ShapeMismatchError, TrainingError
from copresence.tensor import DiffTensor

Parameter = Union[DiffTensor, np.ndarray]


@dataclass
class AdamState:
    """First and second moments per parameter name plus the step counter."""

    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def zeros_like(cls, params: Mapping[str, Parameter]) -> "AdamState":
        shapes = {name: np.shape(_values(p)) for name, p in params.items()}
        return cls(
            step=0,
            m={name: np.zeros(shape) for name, shape in shapes.items()},
            v={name: np.zeros(shape) for name, shape in shapes.items()},
        )


def _values(param: Parameter) -> np.ndarray:
    return param.values if isinstance(param, DiffTensor) else param


def adam_step(
    params: Mapping[str, Parameter],
    grads: Mapping[str, Optional[np.ndarray]],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> AdamState:
    """One bias-corrected Adam update, applied to the parameter arrays in place.

    Weight decay is decoupled: p <- p - lr * wd * p runs before the Adam delta.
    A missing gradient counts as zero.
    """
    for name, grad in grads.items():
        if grad is not None and not np.isfinite(grad).all():
            raise TrainingError(f"gradient of parameter {name} is not finite")

    state.step += 1
    bias1 = 1.0 - beta1**state.step
    bias2 = 1.0 - beta2**state.step

    for name, param in params.items():
        values = _values(param)
        grad = grads.get(name)
        if grad is None:
            grad = np.zeros_like(values)
        if np.shape(grad) != values.shape:
            raise ShapeMismatchError(
                f"gradient of {name} has shape {np.shape(grad)}, parameter has {values.shape}"
            )
        if name not in state.m:
            state.m[name] = np.zeros_like(values)
            state.v[name] = np.zeros_like(values)

        m = state.m[name] = beta1 * state.m[name] + (1.0 - beta1) * grad
        v = state.v[name] = beta2 * state.v[name] + (1.0 - beta2) * grad * grad

        values -= lr * weight_decay * values
        values -= lr * (m / bias1) / (np.sqrt(v / bias2) + eps)

    return state
