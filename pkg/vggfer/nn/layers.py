# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import torch.nn as nn
from torch import Tensor

from vggfer.function.ops import conv2d, dense, maxpool2d, relu

__all__ = ['TapConv2d', 'TapMaxPool2d', 'TapDense']


class TapConv2d(nn.Conv2d):
    """3x3 same-padded convolution followed by ReLU, frozen."""

    def __init__(self, in_channels: int, out_channels: int):
        super(TapConv2d, self).__init__(
            in_channels, out_channels, kernel_size=3, stride=1, padding=1, bias=True)
        self.requires_grad_(False)

    def forward(self, x: Tensor) -> Tensor:
        return relu(conv2d(x, self.weight, self.bias))


class TapMaxPool2d(nn.Module):

    def forward(self, x: Tensor) -> Tensor:
        return maxpool2d(x)


class TapDense(nn.Linear):

    def __init__(self, in_features: int, out_features: int, activation: bool = True):
        super(TapDense, self).__init__(in_features, out_features, bias=True)
        self.activation = activation
        self.requires_grad_(False)

    def forward(self, x: Tensor) -> Tensor:
        out = dense(x, self.weight, self.bias)
        if self.activation:
            out = relu(out)
        return out

    def extra_repr(self):
        return super(TapDense, self).extra_repr() + ', activation={}'.format(self.activation)
