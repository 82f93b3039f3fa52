"""Differentiable operations over `DiffTensor`.

Every op computes its forward values eagerly with numpy and, when a tape is
active and some input requires a gradient, records a closure mapping the
output gradient to one gradient per input.
"""
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from copresence.errors import NonFiniteError, ShapeMismatchError, TapeError
from copresence.tensor.diff_tensor import DiffTensor
from copresence.tensor.tape import BackwardFn, active_tape

Operand = Union[DiffTensor, np.ndarray, float, int]
Axis = Optional[Union[int, Tuple[int, ...]]]


def as_tensor(value: Operand) -> DiffTensor:
    if isinstance(value, DiffTensor):
        return value
    return DiffTensor._wrap(np.asarray(value, dtype=np.float64), False, "")


def _make(
    values: np.ndarray,
    inputs: Sequence[DiffTensor],
    backward_fn: BackwardFn,
    op_name: str,
) -> DiffTensor:
    requires_grad = any(tensor.requires_grad for tensor in inputs)
    output = DiffTensor._wrap(values, requires_grad, op_name)
    tape = active_tape()
    if tape is not None and requires_grad:
        tape.record(output, inputs, backward_fn, op_name)
    return output


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_finite(values: np.ndarray, op_name: str) -> None:
    if np.isnan(values).any():
        raise NonFiniteError(f"NaN reached {op_name}")


def _broadcast_shapes(a: DiffTensor, b: DiffTensor, op_name: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeMismatchError(
            f"{op_name}: shapes {a.shape} and {b.shape} do not broadcast"
        ) from None


def backward(output: DiffTensor) -> None:
    if output._tape is None:
        raise TapeError(
            "backward called on a tensor that no active tape recorded"
        )
    output._tape.backward(output)


# arithmetic


def add(a: Operand, b: Operand) -> DiffTensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shapes(a, b, "add")

    def backward_fn(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)

    return _make(a.values + b.values, (a, b), backward_fn, "add")


def sub(a: Operand, b: Operand) -> DiffTensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shapes(a, b, "sub")

    def backward_fn(grad):
        return _unbroadcast(grad, a.shape), _unbroadcast(-grad, b.shape)

    return _make(a.values - b.values, (a, b), backward_fn, "sub")


def mul(a: Operand, b: Operand) -> DiffTensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shapes(a, b, "mul")

    def backward_fn(grad):
        return (
            _unbroadcast(grad * b.values, a.shape),
            _unbroadcast(grad * a.values, b.shape),
        )

    return _make(a.values * b.values, (a, b), backward_fn, "mul")


def div(a: Operand, b: Operand) -> DiffTensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shapes(a, b, "div")

    def backward_fn(grad):
        return (
            _unbroadcast(grad / b.values, a.shape),
            _unbroadcast(-grad * a.values / (b.values**2), b.shape),
        )

    return _make(a.values / b.values, (a, b), backward_fn, "div")


def neg(x: Operand) -> DiffTensor:
    x = as_tensor(x)
    return _make(-x.values, (x,), lambda grad: (-grad,), "neg")


def matmul(a: Operand, b: Operand) -> DiffTensor:
    """Batched matrix product over the last two axes; leading axes broadcast."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatchError(f"matmul: shapes {a.shape} and {b.shape} do not align")
    try:
        np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    except ValueError:
        raise ShapeMismatchError(
            f"matmul: batch axes of {a.shape} and {b.shape} do not broadcast"
        ) from None

    def backward_fn(grad):
        grad_a = grad @ np.swapaxes(b.values, -1, -2)
        grad_b = np.swapaxes(a.values, -1, -2) @ grad
        return _unbroadcast(grad_a, a.shape), _unbroadcast(grad_b, b.shape)

    return _make(a.values @ b.values, (a, b), backward_fn, "matmul")


# shape


def transpose(x: Operand) -> DiffTensor:
    x = as_tensor(x)
    if x.ndim < 2:
        raise ShapeMismatchError(f"transpose needs at least 2 axes, got {x.shape}")
    return _make(
        np.swapaxes(x.values, -1, -2),
        (x,),
        lambda grad: (np.swapaxes(grad, -1, -2),),
        "transpose",
    )


def reshape(x: Operand, shape: Sequence[int]) -> DiffTensor:
    x = as_tensor(x)
    try:
        values = x.values.reshape(tuple(shape))
    except ValueError:
        raise ShapeMismatchError(f"reshape: cannot view {x.shape} as {tuple(shape)}") from None
    return _make(values, (x,), lambda grad: (grad.reshape(x.shape),), "reshape")


def broadcast_to(x: Operand, shape: Sequence[int]) -> DiffTensor:
    x = as_tensor(x)
    try:
        values = np.broadcast_to(x.values, tuple(shape)).copy()
    except ValueError:
        raise ShapeMismatchError(f"broadcast_to: cannot expand {x.shape} to {tuple(shape)}") from None
    return _make(values, (x,), lambda grad: (_unbroadcast(grad, x.shape),), "broadcast_to")


def concat(tensors: Sequence[Operand], axis: int = 0) -> DiffTensor:
    tensors = [as_tensor(tensor) for tensor in tensors]
    if not tensors:
        raise ShapeMismatchError("concat needs at least one tensor")
    try:
        values = np.concatenate([tensor.values for tensor in tensors], axis=axis)
    except ValueError:
        shapes = [tensor.shape for tensor in tensors]
        raise ShapeMismatchError(f"concat along axis {axis}: incompatible shapes {shapes}") from None

    splits = np.cumsum([tensor.shape[axis] for tensor in tensors])[:-1]

    def backward_fn(grad):
        return tuple(np.split(grad, splits, axis=axis))

    return _make(values, tensors, backward_fn, "concat")


def index(x: Operand, key) -> DiffTensor:
    """Basic (slice / integer) indexing."""
    x = as_tensor(x)

    def backward_fn(grad):
        full = np.zeros_like(x.values)
        full[key] += grad
        return (full,)

    return _make(x.values[key], (x,), backward_fn, "index")


# reductions


def sum(x: Operand, axis: Axis = None, keepdims: bool = False) -> DiffTensor:
    x = as_tensor(x)

    def backward_fn(grad):
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, x.shape).copy(),)

    return _make(np.sum(x.values, axis=axis, keepdims=keepdims), (x,), backward_fn, "sum")


def mean(x: Operand, axis: Axis = None, keepdims: bool = False) -> DiffTensor:
    x = as_tensor(x)
    count = x.size if axis is None else int(np.prod([x.shape[i] for i in np.atleast_1d(axis)]))

    def backward_fn(grad):
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad / count, x.shape).copy(),)

    return _make(np.mean(x.values, axis=axis, keepdims=keepdims), (x,), backward_fn, "mean")


def gap(x: Operand) -> DiffTensor:
    """Global average pool over the last axis."""
    x = as_tensor(x)
    _check_finite(x.values, "gap")
    return mean(x, axis=-1)


# elementwise


def exp(x: Operand) -> DiffTensor:
    x = as_tensor(x)
    values = np.exp(x.values)
    return _make(values, (x,), lambda grad: (grad * values,), "exp")


def log(x: Operand) -> DiffTensor:
    x = as_tensor(x)
    if (x.values <= 0).any():
        raise NonFiniteError("log of a non-positive value")
    return _make(np.log(x.values), (x,), lambda grad: (grad / x.values,), "log")


def square(x: Operand) -> DiffTensor:
    x = as_tensor(x)
    return _make(x.values**2, (x,), lambda grad: (2.0 * grad * x.values,), "square")


def abs(x: Operand) -> DiffTensor:
    x = as_tensor(x)
    return _make(np.abs(x.values), (x,), lambda grad: (grad * np.sign(x.values),), "abs")


def smooth_l1(x: Operand, delta: float = 1.0) -> DiffTensor:
    """Quadratic below `delta`, linear above; continuous derivative at the seam."""
    x = as_tensor(x)
    magnitude = np.abs(x.values)
    inside = magnitude < delta
    values = np.where(inside, 0.5 * x.values**2 / delta, magnitude - 0.5 * delta)

    def backward_fn(grad):
        return (grad * np.where(inside, x.values / delta, np.sign(x.values)),)

    return _make(values, (x,), backward_fn, "smooth_l1")


def relu(x: Operand) -> DiffTensor:
    x = as_tensor(x)
    _check_finite(x.values, "relu")
    active = x.values > 0
    return _make(np.where(active, x.values, 0.0), (x,), lambda grad: (grad * active,), "relu")


def _stable_sigmoid(values: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    positive = values >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-values[positive]))
    exp_values = np.exp(values[~positive])
    out[~positive] = exp_values / (1.0 + exp_values)
    return out


_SIGMOID_FLOOR = np.finfo(np.float64).tiny
_SIGMOID_CEIL = 1.0 - 2.0**-53


def sigmoid(x: Operand) -> DiffTensor:
    """Logistic function; outputs stay strictly inside (0, 1) even for saturated inputs."""
    x = as_tensor(x)
    _check_finite(x.values, "sigmoid")
    values = np.clip(_stable_sigmoid(x.values), _SIGMOID_FLOOR, _SIGMOID_CEIL)
    return _make(values, (x,), lambda grad: (grad * values * (1.0 - values),), "sigmoid")


def softplus(x: Operand) -> DiffTensor:
    x = as_tensor(x)
    _check_finite(x.values, "softplus")
    slope = _stable_sigmoid(x.values)
    return _make(np.logaddexp(0.0, x.values), (x,), lambda grad: (grad * slope,), "softplus")


def softmax(x: Operand, axis: int = -1) -> DiffTensor:
    x = as_tensor(x)
    _check_finite(x.values, "softmax")
    shifted = x.values - np.max(x.values, axis=axis, keepdims=True)
    exp_values = np.exp(shifted)
    values = exp_values / np.sum(exp_values, axis=axis, keepdims=True)

    def backward_fn(grad):
        inner = np.sum(grad * values, axis=axis, keepdims=True)
        return (values * (grad - inner),)

    return _make(values, (x,), backward_fn, "softmax")


def clip(x: Operand, low: float, high: float) -> DiffTensor:
    x = as_tensor(x)
    inside = (x.values >= low) & (x.values <= high)
    return _make(np.clip(x.values, low, high), (x,), lambda grad: (grad * inside,), "clip")


def dropout(
    x: Operand,
    rate: float,
    rng: Optional[np.random.Generator],
    training: bool,
) -> DiffTensor:
    """Inverted dropout; identity outside training or at rate 0."""
    x = as_tensor(x)
    if not training or rate <= 0.0:
        return x
    if rate >= 1.0:
        raise ValueError(f"dropout rate must be below 1, got {rate}")
    if rng is None:
        raise ValueError("dropout in training needs a random generator")
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return _make(x.values * mask, (x,), lambda grad: (grad * mask,), "dropout")
