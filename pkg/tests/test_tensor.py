import zlib

import numpy as np
import pytest

from copresence.errors import NonFiniteError, ShapeMismatchError, TapeError
from copresence.tensor import DiffTensor, Tape, backward, grad_check, grad_check_params
from copresence.tensor import functional as F


def _triple_loop_matmul(a, b):
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                out[i, j] += a[i, k] * b[k, j]
    return out


class TestMatmul:
    def test_identity(self):
        out = F.matmul(DiffTensor(np.eye(2)), DiffTensor([[1.0, 2.0], [3.0, 4.0]]))
        np.testing.assert_array_equal(out.values, [[1.0, 2.0], [3.0, 4.0]])

    def test_projector(self):
        out = DiffTensor([[1.0, 0.0], [0.0, 0.0]]) @ DiffTensor([[5.0, 6.0], [7.0, 8.0]])
        np.testing.assert_array_equal(out.values, [[5.0, 6.0], [0.0, 0.0]])

    def test_matches_triple_loop(self, rng):
        a, b = rng.normal(size=(3, 4)), rng.normal(size=(4, 2))
        out = F.matmul(DiffTensor(a), DiffTensor(b))
        np.testing.assert_allclose(out.values, _triple_loop_matmul(a, b), atol=1e-12)

    def test_shape_mismatch_names_both_shapes(self):
        with pytest.raises(ShapeMismatchError, match=r"\(2, 3\).*\(2, 3\)"):
            F.matmul(DiffTensor(np.ones((2, 3))), DiffTensor(np.ones((2, 3))))

    def test_backward_reaches_both_inputs(self, rng):
        a = DiffTensor(rng.normal(size=(3, 4)), requires_grad=True)
        b = DiffTensor(rng.normal(size=(4, 2)), requires_grad=True)
        with Tape() as tape:
            tape.backward(F.sum(a @ b))
        np.testing.assert_allclose(a.grad, np.ones((3, 2)) @ b.values.T)
        np.testing.assert_allclose(b.grad, a.values.T @ np.ones((3, 2)))


class TestSoftmax:
    def test_symmetric(self):
        np.testing.assert_array_equal(F.softmax(DiffTensor([0.0, 0.0])).values, [0.5, 0.5])

    def test_large_inputs_do_not_overflow(self):
        np.testing.assert_array_equal(F.softmax(DiffTensor([1000.0, 1000.0])).values, [0.5, 0.5])

    def test_matches_exp_normalize(self):
        x = np.array([1.0, 2.0, 3.0], dtype=np.longdouble)
        expected = np.exp(x) / np.sum(np.exp(x))
        np.testing.assert_allclose(
            F.softmax(DiffTensor([1.0, 2.0, 3.0])).values, expected.astype(float), atol=1e-12
        )

    def test_rows_sum_to_one_and_shift_invariant(self, rng):
        x = rng.normal(scale=5.0, size=(20, 7))
        out = F.softmax(DiffTensor(x), axis=-1).values
        shifted = F.softmax(DiffTensor(x + 123.0), axis=-1).values
        np.testing.assert_allclose(out.sum(axis=-1), 1.0, atol=1e-9)
        np.testing.assert_allclose(out, shifted, atol=1e-9)

    def test_nan_input_raises(self):
        with pytest.raises(NonFiniteError):
            F.softmax(DiffTensor([0.0, np.nan]))


class TestActivations:
    def test_relu_of_negative(self):
        assert F.relu(DiffTensor(-3.0)).item() == 0.0

    def test_sigmoid_of_zero(self):
        assert F.sigmoid(DiffTensor(0.0)).item() == 0.5

    def test_sigmoid_range(self, rng):
        values = F.sigmoid(DiffTensor(rng.normal(scale=10.0, size=1000))).values
        assert ((values > 0) & (values < 1)).all()

    def test_sigmoid_saturated_inputs_stay_open(self):
        x = DiffTensor(np.array([-1000.0, -40.0, 40.0, 1000.0]), requires_grad=True)
        with Tape():
            out = F.sigmoid(x)
            F.sum(out).backward()
        assert ((out.values > 0) & (out.values < 1)).all()
        assert np.all(np.isfinite(x.grad))
        assert np.all(x.grad >= 0)

    def test_gap_of_constant_map(self):
        out = F.gap(DiffTensor(np.full((4, 9), 7.0)))
        np.testing.assert_array_equal(out.values, np.full(4, 7.0))


class TestBackward:
    def test_square_at_three(self):
        x = DiffTensor(3.0, requires_grad=True)
        with Tape():
            F.square(x).backward()
        assert float(x.grad) == pytest.approx(6.0)

    def test_sigmoid_slope_at_zero(self):
        x = DiffTensor(0.0, requires_grad=True)
        with Tape() as tape:
            tape.backward(F.sigmoid(x))
        assert float(x.grad) == pytest.approx(0.25)

    def test_sum_of_inputs_has_unit_gradient(self, rng):
        a = DiffTensor(rng.normal(size=(3, 2)), requires_grad=True)
        b = DiffTensor(rng.normal(size=(3, 2)), requires_grad=True)
        with Tape() as tape:
            tape.backward(F.sum(a + b))
        np.testing.assert_array_equal(a.grad, np.ones((3, 2)))
        np.testing.assert_array_equal(b.grad, np.ones((3, 2)))

    def test_composite_mlp_loss(self, rng):
        w1 = DiffTensor(rng.normal(size=(4, 5)), requires_grad=True, name="w1")
        b1 = DiffTensor(rng.normal(size=5), requires_grad=True, name="b1")
        w2 = DiffTensor(rng.normal(size=(5, 2)), requires_grad=True, name="w2")
        inputs = rng.normal(size=(6, 4))
        target = rng.random((6, 2))

        def loss():
            hidden = F.sigmoid(F.matmul(inputs, w1) + b1)
            return F.mean(F.square(F.sigmoid(F.matmul(hidden, w2)) - target))

        assert grad_check_params(loss, {"w1": w1, "b1": b1, "w2": w2}) < 1e-4

    def test_non_scalar_output_raises(self):
        x = DiffTensor([1.0, 2.0], requires_grad=True)
        with Tape() as tape:
            y = x * 2.0
            with pytest.raises(ShapeMismatchError):
                tape.backward(y)

    def test_missing_tape_raises(self):
        x = DiffTensor(1.0, requires_grad=True)
        with pytest.raises(TapeError):
            backward(F.square(x))

    def test_repeated_backward_rejected(self):
        x = DiffTensor(2.0, requires_grad=True)
        with Tape() as tape:
            y = F.square(x)
            tape.backward(y)
            with pytest.raises(TapeError):
                tape.backward(y)

    def test_reset_allows_new_recording(self):
        x = DiffTensor(2.0, requires_grad=True)
        with Tape() as tape:
            tape.backward(F.square(x))
            tape.reset()
            x.zero_grad()
            tape.backward(F.exp(x))
        assert float(x.grad) == pytest.approx(np.exp(2.0))

    def test_node_recorded_once(self, rng):
        x = DiffTensor(rng.normal(size=3), requires_grad=True)
        with Tape() as tape:
            y = F.sum(F.square(x) + x)
            tape.backward(y)
        ids = [entry.output_id for entry in tape.entries]
        assert len(ids) == len(set(ids))

    def test_forward_is_bit_identical(self, rng):
        x = rng.normal(size=(5, 6))
        first = F.softmax(DiffTensor(x) @ DiffTensor(x.T)).values
        second = F.softmax(DiffTensor(x) @ DiffTensor(x.T)).values
        assert np.array_equal(first, second)


# each entry maps a tensor to a scalar through one op family
OP_CORPUS = {
    "exp": lambda x: F.sum(F.exp(x)),
    "log": lambda x: F.sum(F.log(F.square(x) + 1.0)),
    "relu": lambda x: F.sum(F.relu(x) * x),
    "sigmoid": lambda x: F.sum(F.sigmoid(x)),
    "softplus": lambda x: F.sum(F.softplus(x)),
    "softmax": lambda x: F.sum(F.softmax(x, axis=-1) * np.arange(4.0)) + F.sum(x),
    "abs": lambda x: F.sum(F.abs(x) * x),
    "smooth_l1": lambda x: F.sum(F.smooth_l1(x * 3.0, delta=1.0)),
    "transpose": lambda x: F.sum(F.transpose(x) * (np.arange(12.0).reshape(4, 3) + 1.0)),
    "reshape": lambda x: F.sum(F.square(F.reshape(x, (4, 3)))),
    "broadcast_to": lambda x: F.sum(F.broadcast_to(x[0], (5, 4)) * x[1]),
    "concat": lambda x: F.sum(F.square(F.concat([x, x * 2.0], axis=0))),
    "mean": lambda x: F.mean(F.square(x), axis=0).sum(),
    "gap": lambda x: F.sum(F.square(F.gap(x))),
    "div": lambda x: F.sum(x / (F.square(x) + 2.0) + x),
    "clip": lambda x: F.sum(F.clip(x, -0.5, 0.5) * x),
}


@pytest.mark.parametrize("op_name", sorted(OP_CORPUS))
def test_op_gradients_match_central_differences(op_name):
    rng = np.random.default_rng(zlib.crc32(op_name.encode()))
    # keep clear of kinks so central differences stay exact
    x = rng.normal(size=(3, 4))
    x = np.where(np.abs(x) < 0.05, 0.3, x)
    x = np.where(np.abs(np.abs(x) - 0.5) < 0.05, 0.7, x)
    x = np.where(np.abs(np.abs(3.0 * x) - 1.0) < 0.05, 0.9, x)
    assert grad_check(OP_CORPUS[op_name], DiffTensor(x)) < 1e-4


class TestGradCheck:
    def test_linear_function(self, rng):
        assert grad_check(F.sum, DiffTensor(rng.normal(size=5))) < 1e-6

    def test_quadratic(self):
        x = DiffTensor([1.0, 2.0])
        assert grad_check(lambda t: F.sum(t * t), x) < 1e-8

    def test_non_finite_evaluation_raises(self):
        with pytest.raises(NonFiniteError):
            grad_check(lambda t: F.sum(t * np.inf), DiffTensor([1.0]))

    def test_non_positive_step_rejected(self):
        with pytest.raises(ValueError):
            grad_check(F.sum, DiffTensor([1.0]), h=0.0)


def test_dropout_identity_outside_training(rng):
    x = DiffTensor(rng.normal(size=10))
    assert F.dropout(x, 0.5, rng, training=False) is x


def test_dropout_keeps_expectation(rng):
    x = DiffTensor(np.ones(200000))
    out = F.dropout(x, 0.25, rng, training=True).values
    assert set(np.unique(out)) <= {0.0, 1.0 / 0.75}
    assert out.mean() == pytest.approx(1.0, abs=0.01)
