import math

import numpy as np
import pytest

from copresence.errors import ShapeMismatchError, TrainingError
from copresence.tensor import DiffTensor
from copresence.trainer import AdamState, adam_step


def _scalar_adam(p, grads, lr, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=0.0):
    m = v = 0.0
    for t, g in enumerate(grads, start=1):
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        p -= lr * weight_decay * p
        p -= lr * (m / (1 - beta1**t)) / (math.sqrt(v / (1 - beta2**t)) + eps)
    return p


def test_zero_gradient_applies_weight_decay_only():
    params = {"w": np.array([1.0, -2.0])}
    adam_step(params, {"w": np.zeros(2)}, AdamState.zeros_like(params), lr=0.1, weight_decay=0.1)
    np.testing.assert_allclose(params["w"], [0.99, -1.98])


def test_zero_learning_rate_keeps_parameters(rng):
    values = rng.normal(size=(3, 2))
    params = {"w": values.copy()}
    adam_step(params, {"w": rng.normal(size=(3, 2))}, AdamState.zeros_like(params), lr=0.0)
    np.testing.assert_array_equal(params["w"], values)


def test_first_step_moves_by_learning_rate():
    params = {"w": np.array([0.0, 0.0])}
    adam_step(params, {"w": np.array([2.0, -3.0])}, AdamState.zeros_like(params), lr=0.01)
    np.testing.assert_allclose(params["w"], [-0.01, 0.01], rtol=1e-6)


def test_three_steps_match_scalar_oracle():
    grads = [0.5, -0.25, 1.5]
    params = {"w": np.array([0.3])}
    state = AdamState.zeros_like(params)
    for g in grads:
        adam_step(params, {"w": np.array([g])}, state, lr=0.05, weight_decay=0.01)
    assert state.step == 3
    expected = _scalar_adam(0.3, grads, 0.05, weight_decay=0.01)
    assert params["w"][0] == pytest.approx(expected, abs=1e-15)


def test_updates_tensors_in_place():
    tensor = DiffTensor([1.0], requires_grad=True)
    adam_step({"w": tensor}, {"w": np.array([1.0])}, AdamState(), lr=0.1)
    assert tensor.values[0] == pytest.approx(0.9)


def test_missing_gradient_counts_as_zero():
    params = {"w": np.array([1.0])}
    adam_step(params, {"w": None}, AdamState.zeros_like(params), lr=0.1)
    assert params["w"][0] == 1.0


def test_non_finite_gradient_names_parameter():
    params = {"w": np.array([1.0]), "b": np.array([0.0])}
    state = AdamState.zeros_like(params)
    with pytest.raises(TrainingError, match="parameter b "):
        adam_step(params, {"w": np.array([1.0]), "b": np.array([np.nan])}, state, lr=0.1)
    assert state.step == 0
    assert params["w"][0] == 1.0


def test_gradient_shape_checked():
    params = {"w": np.zeros(3)}
    with pytest.raises(ShapeMismatchError):
        adam_step(params, {"w": np.zeros(2)}, AdamState.zeros_like(params), lr=0.1)
