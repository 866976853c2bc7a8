"""Finite-difference checks of every differentiable op, in float64."""

import numpy as np
import pytest

from slpnet.tensor import ops
from slpnet.tensor.gradcheck import grad_check, relative_error
from slpnet.tensor.shapes import ConvSpec
from slpnet.tensor.tensor import Tensor, active_tape

TRIALS = 20
TOLERANCE = 1e-4


def away_from_zero(rng, shape, margin=0.1):
    """Random values with |x| > margin so kinks are never crossed."""
    x = rng.uniform(margin, 1.5, size=shape)
    return x * rng.choice([-1.0, 1.0], size=shape)


def distinct(rng, shape):
    """Random values without ties, so max-pool has a unique argmax."""
    return rng.permutation(np.prod(shape)).reshape(shape) * 0.1 + rng.uniform(0, 0.01, size=shape)


def test_relative_error_definition():
    err = relative_error(np.array([1.0, 0.0, 2.0]), np.array([1.0, 0.0, 1.0]))
    assert err.tolist() == [0.0, 0.0, 0.5]


def test_conv_example_shape():
    rng = np.random.default_rng(0)
    x = Tensor(rng.standard_normal((2, 3, 5, 5)))
    spec = ConvSpec(4, 3, kernel=3, padding=1)
    w = Tensor(rng.standard_normal(spec.weight_shape))
    b = Tensor(rng.standard_normal(4))
    report = grad_check(lambda x, w, b: ops.conv2d(x, w, spec, b), [x, w, b])
    assert report.passed, report


@pytest.mark.parametrize("trial", range(TRIALS))
def test_conv2d(trial):
    rng = np.random.default_rng(trial)
    c = int(rng.integers(1, 4))
    groups = c if trial % 2 else 1
    stride = int(rng.integers(1, 3))
    dilation = int(rng.choice([1, 2, 5]))
    spec = ConvSpec(
        out_channels=2 * groups,
        in_channels_per_group=c // groups,
        kernel=(int(rng.choice([1, 3])), int(rng.choice([1, 3]))),
        stride=stride,
        padding=dilation,
        dilation=dilation,
        groups=groups,
    )
    x = Tensor(rng.standard_normal((int(rng.integers(1, 3)), c, 6, 7)))
    w = Tensor(rng.standard_normal(spec.weight_shape))
    b = Tensor(rng.standard_normal(spec.out_channels))
    report = grad_check(lambda x, w, b: ops.conv2d(x, w, spec, b), [x, w, b])
    assert report.max_rel_error < TOLERANCE


@pytest.mark.parametrize("trial", range(TRIALS))
def test_maxpool(trial):
    rng = np.random.default_rng(100 + trial)
    x = Tensor(distinct(rng, (2, 2, 4, 6)))
    assert grad_check(ops.maxpool2d_2x2, [x]).max_rel_error < TOLERANCE


def weighted(t: Tensor, weights: np.ndarray) -> Tensor:
    """Elementwise product with fixed weights, so a permuted gradient cannot pass unnoticed."""
    out = Tensor(t.data * weights)
    tape = active_tape()
    if tape is not None:
        tape.record("weighted", (t,), out, lambda g: (g * weights,))
    return out


@pytest.mark.parametrize("trial", range(TRIALS))
def test_upsample_and_resize(trial):
    rng = np.random.default_rng(200 + trial)
    scale = int(rng.choice([2, 4, 8]))
    x = Tensor(rng.standard_normal((1, 2, 3, 2)))
    up_weights = rng.standard_normal((1, 2, 3 * scale, 2 * scale))
    resize_weights = rng.standard_normal((1, 2, 5, 3))
    report = grad_check(lambda x: weighted(ops.upsample_bilinear(x, scale), up_weights), [x])
    assert report.max_rel_error < TOLERANCE
    report = grad_check(lambda x: weighted(ops.resize_bilinear(x, (5, 3)), resize_weights), [x])
    assert report.max_rel_error < TOLERANCE


@pytest.mark.parametrize("trial", range(TRIALS))
def test_activations(trial):
    rng = np.random.default_rng(300 + trial)
    x = Tensor(away_from_zero(rng, (2, 3, 3, 3)))
    assert grad_check(ops.relu, [x]).max_rel_error < 1e-6
    slope = Tensor(rng.uniform(0.0, 0.5, size=1))
    assert grad_check(ops.prelu, [x, slope]).max_rel_error < TOLERANCE
    assert grad_check(ops.sigmoid, [Tensor(rng.standard_normal((2, 1, 3, 3)))]).max_rel_error < TOLERANCE


@pytest.mark.parametrize("trial", range(TRIALS))
def test_structural(trial):
    rng = np.random.default_rng(400 + trial)
    a = Tensor(rng.standard_normal((2, 3, 2, 3)))
    b = Tensor(rng.standard_normal((2, 1, 2, 3)))
    c = Tensor(rng.standard_normal((2, 3, 2, 3)))
    bias = Tensor(rng.standard_normal(4))
    report = grad_check(lambda a, b, bias: ops.bias_add(ops.concat_channels([a, b]), bias), [a, b, bias])
    assert report.max_rel_error < TOLERANCE
    report = grad_check(lambda a, c: ops.sigmoid(ops.add_all([a, c, a])), [a, c])
    assert report.max_rel_error < TOLERANCE


@pytest.mark.parametrize("trial", range(TRIALS))
def test_losses(trial):
    rng = np.random.default_rng(500 + trial)
    z = Tensor(rng.standard_normal((2, 1, 3, 3)))
    target = Tensor((rng.random((2, 1, 3, 3)) > 0.5).astype(np.float64))
    assert grad_check(lambda z: ops.bce_loss(ops.sigmoid(z), target), [z]).max_rel_error < TOLERANCE
    assert grad_check(lambda z: ops.dice_loss(ops.sigmoid(z), target), [z]).max_rel_error < TOLERANCE


def test_grad_check_flags_a_wrong_gradient():
    """A deliberately wrong backward must fail the check."""
    def tripled(x: Tensor) -> Tensor:
        out = Tensor(x.data * 3.0)
        tape = active_tape()
        if tape is not None:
            tape.record("wrong", (x,), out, lambda g: (g * 2.0,))
        return out

    report = grad_check(tripled, [Tensor(np.ones((1, 1, 2, 2)))])
    assert not report.passed
    assert report.worst_index is not None


def test_sampled_check_counts(rng):
    x = Tensor(rng.standard_normal((1, 2, 4, 4)))
    report = grad_check(ops.sigmoid, [x], samples=5, rng=rng)
    assert report.checked == 5
    assert x.grad is None
