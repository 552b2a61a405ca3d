# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import numpy as np
import pytest
import torch
from hypothesis import given, settings

from vggfer.exceptions import OddExtentError, ShapeMismatchError
from vggfer.function.ops import conv2d, dense, flatten, maxpool2d, relu
from vggfer.oracle import oracle_conv2d, oracle_dense, oracle_maxpool2d, oracle_relu
from common import *


@settings(max_examples=100)
@given(seed=seed_st, c_in=channels_st, c_out=channels_st, height=even_extent_st, width=even_extent_st)
def test_conv2d_matches_oracle(seed, c_in, c_out, height, width):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((c_in, height, width)).astype(np.float32)
    w = rng.standard_normal((c_out, c_in, 3, 3)).astype(np.float32)
    b = rng.standard_normal(c_out).astype(np.float32)
    out = conv2d(torch.from_numpy(x), torch.from_numpy(w), torch.from_numpy(b))
    assert out.dtype == torch.float32
    assert tuple(out.shape) == (c_out, height, width)
    np.testing.assert_allclose(as_numpy(out), oracle_conv2d(x, w, b), rtol=KERNEL_RTOL, atol=KERNEL_ATOL)


@settings(max_examples=100)
@given(seed=seed_st, channels=channels_st, height=even_extent_st, width=even_extent_st)
def test_maxpool2d_matches_oracle_exactly(seed, channels, height, width):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((channels, height, width)).astype(np.float32)
    out = maxpool2d(torch.from_numpy(x))
    assert np.array_equal(as_numpy(out), oracle_maxpool2d(x))


@settings(max_examples=100)
@given(seed=seed_st, n=st.integers(1, 32), m=st.integers(1, 16))
def test_dense_matches_oracle(seed, n, m):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n).astype(np.float32)
    w = rng.standard_normal((m, n)).astype(np.float32)
    b = rng.standard_normal(m).astype(np.float32)
    out = dense(torch.from_numpy(x), torch.from_numpy(w), torch.from_numpy(b))
    np.testing.assert_allclose(as_numpy(out), oracle_dense(x, w, b), rtol=KERNEL_RTOL, atol=KERNEL_ATOL)


def test_conv2d_delta_kernel_is_identity():
    x = torch.arange(16, dtype=torch.float32).reshape(1, 4, 4)
    w = torch.zeros(1, 1, 3, 3)
    w[0, 0, 1, 1] = 1.0
    out = conv2d(x, w, torch.zeros(1))
    assert torch.equal(out, x)


def test_conv2d_ones_kernel_on_ones_input():
    out = conv2d(torch.ones(1, 3, 3), torch.ones(1, 1, 3, 3), torch.zeros(1))
    expected = torch.tensor([[[4., 6., 4.], [6., 9., 6.], [4., 6., 4.]]])
    assert torch.equal(out, expected)


def test_conv2d_batch_matches_single():
    x = torch.randn(3, 2, 6, 6)
    w = torch.randn(4, 2, 3, 3)
    b = torch.randn(4)
    batched = conv2d(x, w, b)
    for i in range(3):
        assert torch.allclose(batched[i], conv2d(x[i], w, b))


def test_conv2d_channel_mismatch():
    with pytest.raises(ShapeMismatchError, match='channels'):
        conv2d(torch.zeros(2, 4, 4), torch.zeros(1, 3, 3, 3), torch.zeros(1))


def test_conv2d_bias_mismatch():
    with pytest.raises(ShapeMismatchError):
        conv2d(torch.zeros(1, 4, 4), torch.zeros(2, 1, 3, 3), torch.zeros(3))


def test_maxpool2d_known_window():
    x = torch.tensor([[[1., 3.], [2., 0.]]])
    assert torch.equal(maxpool2d(x), torch.tensor([[[3.]]]))


def test_maxpool2d_odd_extent():
    with pytest.raises(OddExtentError):
        maxpool2d(torch.zeros(1, 3, 4))


def test_dense_known_values():
    out = dense(torch.tensor([1., 2.]), torch.tensor([[1., 1.], [0., -1.]]), torch.tensor([0.5, 0.]))
    assert torch.equal(out, torch.tensor([3.5, -2.]))


def test_dense_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        dense(torch.zeros(3), torch.zeros(2, 4), torch.zeros(2))


@given(seed=seed_st)
def test_relu_matches_oracle(seed):
    x = np.random.default_rng(seed).standard_normal((2, 4, 4)).astype(np.float32)
    out = relu(torch.from_numpy(x))
    assert np.array_equal(as_numpy(out), oracle_relu(x))


def test_flatten_is_channel_major():
    x = torch.arange(8, dtype=torch.float32).reshape(2, 2, 2)
    assert torch.equal(flatten(x), torch.arange(8, dtype=torch.float32))
    assert tuple(flatten(x.unsqueeze(0).expand(3, 2, 2, 2)).shape) == (3, 8)


@settings(max_examples=50)
@given(seed=seed_st, c_in=channels_st, c_out=channels_st, a=st.floats(-3.0, 3.0), b=st.floats(-3.0, 3.0))
def test_conv2d_without_bias_is_linear(seed, c_in, c_out, a, b):
    rng = np.random.default_rng(seed)
    x = torch.from_numpy(rng.standard_normal((c_in, 6, 6)).astype(np.float32))
    y = torch.from_numpy(rng.standard_normal((c_in, 6, 6)).astype(np.float32))
    w = torch.from_numpy(rng.standard_normal((c_out, c_in, 3, 3)).astype(np.float32))
    combined = conv2d(a * x + b * y, w, None)
    expected = a * conv2d(x, w, None) + b * conv2d(y, w, None)
    assert torch.allclose(combined, expected, rtol=1e-4, atol=1e-4)


def test_conv2d_zero_kernel():
    x = torch.randn(3, 8, 8)
    assert not conv2d(x, torch.zeros(2, 3, 3, 3), None).any()
    out = conv2d(x, torch.zeros(2, 3, 3, 3), torch.tensor([0.5, -2.0]))
    assert torch.equal(out[0], torch.full((8, 8), 0.5))
    assert torch.equal(out[1], torch.full((8, 8), -2.0))


@given(seed=seed_st)
def test_relu_is_idempotent_and_non_negative(seed):
    x = torch.from_numpy(np.random.default_rng(seed).standard_normal((3, 4, 4)).astype(np.float32))
    once = relu(x)
    assert bool((once >= 0).all())
    assert torch.equal(relu(once), once)
    assert torch.equal(once[x > 0], x[x > 0])
