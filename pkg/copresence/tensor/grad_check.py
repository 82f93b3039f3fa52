from typing import Callable, Dict, Optional

import numpy as np

from copresence.errors import NonFiniteError
from copresence.logger import init_logger
from copresence.tensor.diff_tensor import DiffTensor
from copresence.tensor.tape import Tape

logger = init_logger(__name__)

_DENOMINATOR_FLOOR = 1e-8


def _scalar(output: DiffTensor) -> float:
    value = float(np.sum(output.values))
    if not np.isfinite(value):
        raise NonFiniteError(f"grad check evaluated to {value}")
    return value


def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    if analytic.size == 0:
        return 0.0
    return float(np.max(np.abs(analytic - numeric) / (np.abs(numeric) + _DENOMINATOR_FLOOR)))


def grad_check(
    f: Callable[[DiffTensor], DiffTensor],
    x: DiffTensor,
    h: float = 1e-5,
) -> float:
    """Max relative error between tape gradients and central differences."""
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")

    point = DiffTensor(x.values, requires_grad=True, name=x.name)
    with Tape() as tape:
        output = f(point)
        tape.backward(output)
    analytic = point.grad if point.grad is not None else np.zeros_like(point.values)

    base = np.array(x.values, dtype=np.float64)
    numeric = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        shifted = base.copy()
        shifted[idx] += h
        upper = _scalar(f(DiffTensor(shifted)))
        shifted[idx] -= 2 * h
        lower = _scalar(f(DiffTensor(shifted)))
        numeric[idx] = (upper - lower) / (2 * h)

    return _relative_error(analytic, numeric)


def grad_check_params(
    f: Callable[[], DiffTensor],
    params: Dict[str, DiffTensor],
    h: float = 1e-5,
    per_parameter: Optional[Dict[str, float]] = None,
) -> float:
    """Same check over named parameters that `f` closes over.

    Parameter values are perturbed in place and restored. When
    `per_parameter` is given it is filled with each parameter's error.
    """
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")

    for param in params.values():
        param.zero_grad()
    with Tape() as tape:
        tape.backward(f())

    worst = 0.0
    for name, param in params.items():
        analytic = param.grad if param.grad is not None else np.zeros_like(param.values)
        numeric = np.zeros_like(param.values)
        for idx in np.ndindex(param.values.shape):
            original = param.values[idx]
            param.values[idx] = original + h
            upper = _scalar(f())
            param.values[idx] = original - h
            lower = _scalar(f())
            param.values[idx] = original
            numeric[idx] = (upper - lower) / (2 * h)

        error = _relative_error(analytic, numeric)
        if per_parameter is not None:
            per_parameter[name] = error
        logger.debug(f"grad check {name}: {error:.3e}")
        worst = max(worst, error)

    return worst
