# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Dense kernels the VGG19 graph is composed of.

Activations are channel-first: a single activation is (C, H, W), a batch is (N, C, H, W).
Inputs and outputs are float32; every dot product is accumulated in float64 and rounded once
on the way out. Kernels are pure functions of their arguments.
"""

from typing import Optional

import torch
from torch import Tensor
from torch.nn import functional as F

from vggfer.exceptions import ShapeMismatchError, OddExtentError


def _as_batch(x: Tensor, name: str):
    if x.dim() == 3:
        return x.unsqueeze(0), False
    if x.dim() == 4:
        return x, True
    raise ShapeMismatchError(
        "{}: expected a (C, H, W) or (N, C, H, W) activation, got shape {}".format(name, tuple(x.shape)))


def _unbatch(x: Tensor, batched: bool) -> Tensor:
    return x if batched else x.squeeze(0)


def conv2d(x: Tensor, weight: Tensor, bias: Optional[Tensor]) -> Tensor:
    """3x3 convolution, stride 1, one pixel of zero padding on each border.

    Parameters
    ----------
    x : Tensor
        Activation of shape (C_in, H, W) or (N, C_in, H, W)
    weight : Tensor
        Kernel of shape (C_out, C_in, 3, 3)
    bias : Tensor
        Vector of length C_out, or None

    Returns
    -------
    Tensor
        Activation of shape (C_out, H, W) (batched if `x` is)
    """
    inp, batched = _as_batch(x, 'conv2d')
    if weight.dim() != 4 or tuple(weight.shape[2:]) != (3, 3):
        raise ShapeMismatchError(
            "conv2d: expected a (C_out, C_in, 3, 3) kernel, got shape {}".format(tuple(weight.shape)))
    if inp.shape[1] != weight.shape[1]:
        raise ShapeMismatchError(
            "conv2d: input shape {} has {} channels but weight shape {} expects {}".format(
                tuple(x.shape), inp.shape[1], tuple(weight.shape), weight.shape[1]))
    if bias is not None and tuple(bias.shape) != (weight.shape[0],):
        raise ShapeMismatchError(
            "conv2d: bias shape {} does not match weight shape {}".format(tuple(bias.shape), tuple(weight.shape)))
    if inp.shape[2] < 1 or inp.shape[3] < 1:
        raise ShapeMismatchError("conv2d: empty spatial extent in input shape {}".format(tuple(x.shape)))
    out = F.conv2d(
        inp.to(torch.float64),
        weight.to(torch.float64),
        None if bias is None else bias.to(torch.float64),
        stride=1,
        padding=1)
    return _unbatch(out.to(torch.float32), batched)


def maxpool2d(x: Tensor) -> Tensor:
    """Max over disjoint 2x2 windows, stride 2."""
    inp, batched = _as_batch(x, 'maxpool2d')
    height, width = inp.shape[2], inp.shape[3]
    if height % 2 or width % 2:
        raise OddExtentError(
            "maxpool2d: spatial extents must be even, got shape {}".format(tuple(x.shape)))
    out = F.max_pool2d(inp, kernel_size=2, stride=2)
    return _unbatch(out, batched)


def dense(x: Tensor, weight: Tensor, bias: Optional[Tensor]) -> Tensor:
    """Affine map out[j] = bias[j] + sum_i weight[j, i] * x[i], for a vector or a batch of vectors."""
    if weight.dim() != 2:
        raise ShapeMismatchError("dense: expected an (out, in) weight, got shape {}".format(tuple(weight.shape)))
    if x.dim() not in (1, 2) or x.shape[-1] != weight.shape[1]:
        raise ShapeMismatchError(
            "dense: input shape {} does not match weight shape {}".format(tuple(x.shape), tuple(weight.shape)))
    if bias is not None and tuple(bias.shape) != (weight.shape[0],):
        raise ShapeMismatchError(
            "dense: bias shape {} does not match weight shape {}".format(tuple(bias.shape), tuple(weight.shape)))
    out = F.linear(
        x.to(torch.float64),
        weight.to(torch.float64),
        None if bias is None else bias.to(torch.float64))
    return out.to(torch.float32)


def relu(x: Tensor) -> Tensor:
    return torch.clamp_min(x, 0.0)


def flatten(x: Tensor) -> Tensor:
    """Vectorize activations in (C, H, W) order, keeping the batch dimension if present."""
    if x.dim() == 4:
        return x.reshape(x.shape[0], -1)
    if x.dim() in (1, 2):
        return x
    return x.reshape(-1)
