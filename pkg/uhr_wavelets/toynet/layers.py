# This file is part of uhr_wavelets.
# Copyright (C) 2026 The uhr_wavelets Authors
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 2 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License along
# with this program; if not, write to the Free Software Foundation, Inc.,
# 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301 USA.
"""
Convolution layers with hand-written backward passes.

Activations are single images shaped (channels, height, width). Windows are
taken with :func:`numpy.lib.stride_tricks.sliding_window_view` and contracted
with :func:`numpy.tensordot`; the backward pass scatters window gradients
back with strided slice additions.
"""

import collections
import logging
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


_log = logging.getLogger(__name__)


#: What the backward pass needs from a forward call: the input shape, the
#: strided windows of the padded input, and the ReLU mask (None if linear).
LayerCache = collections.namedtuple("LayerCache", ["input_shape", "windows", "mask"])


class ConvLayer(object):
    """
    A 2D convolution, optionally followed by a ReLU.

    3×3 kernels are padded by one pixel, other sizes are not padded, so the
    output extent is ``(H + 2 * padding - kernel) // stride + 1``.

    Args:
        name (str): The layer name, the prefix of its parameter names.
        in_channels (int): Input channels.
        out_channels (int): Output channels.
        kernel (int): The square kernel size.
        stride (int): 1 or 2.
        relu (bool): Whether a ReLU follows the convolution.
    """

    def __init__(self, name, in_channels, out_channels, kernel=3, stride=1, relu=True):
        if stride not in (1, 2):
            raise ValueError("stride must be 1 or 2, not {}".format(stride))
        self.name = name
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        self.stride = stride
        self.padding = 1 if kernel == 3 else 0
        self.relu = relu

    @property
    def weight_name(self):
        return self.name + ".weight"

    @property
    def bias_name(self):
        return self.name + ".bias"

    @property
    def weight_shape(self):
        return (self.out_channels, self.in_channels, self.kernel, self.kernel)

    @property
    def fan_in(self):
        return self.in_channels * self.kernel * self.kernel

    def output_size(self, height, width):
        """The spatial extent of the output for an input of the given size."""
        return (
            (height + 2 * self.padding - self.kernel) // self.stride + 1,
            (width + 2 * self.padding - self.kernel) // self.stride + 1,
        )

    def init_parameters(self, rng, dtype=np.float32):
        """
        Draw weights and biases uniformly from ``±1/sqrt(fan_in)``.

        Returns:
            tuple: The weight and bias arrays.
        """
        bound = 1.0 / math.sqrt(self.fan_in)
        weight = rng.uniform(-bound, bound, size=self.weight_shape).astype(dtype)
        bias = rng.uniform(-bound, bound, size=(self.out_channels,)).astype(dtype)
        return weight, bias

    def _windows(self, x):
        if self.padding:
            x = np.pad(x, ((0, 0), (self.padding, self.padding), (self.padding, self.padding)))
        windows = sliding_window_view(x, (self.kernel, self.kernel), axis=(1, 2))
        return windows[:, :: self.stride, :: self.stride]

    def forward(self, x, weight, bias, keep_cache=True):
        """
        Apply the layer.

        Args:
            x (numpy.ndarray): The input, in_channels×H×W.
            weight (numpy.ndarray): out×in×k×k weights.
            bias (numpy.ndarray): out biases.
            keep_cache (bool): Whether to return a cache for :meth:`backward`.

        Returns:
            tuple: The output and a :class:`LayerCache` (None when not kept).
        """
        if x.shape[0] != self.in_channels:
            raise ValueError(
                "{} expects {} input channels, got {}".format(
                    self.name, self.in_channels, x.shape[0]
                )
            )
        windows = self._windows(x)
        # (in, Ho, Wo, k, k) against (out, in, k, k) -> (out, Ho, Wo)
        y = np.tensordot(weight, windows, axes=([1, 2, 3], [0, 3, 4]))
        y += bias[:, np.newaxis, np.newaxis]
        mask = None
        if self.relu:
            mask = y > 0
            y = y * mask
        if not keep_cache:
            return y, None
        return y, LayerCache(x.shape, windows, mask)

    def backward(self, grad_y, cache, weight, need_input_grad=True):
        """
        Carry the output gradient back through the layer.

        Returns:
            tuple: The gradients of the input (None if not needed), the weight
            and the bias.
        """
        if cache.mask is not None:
            grad_y = grad_y * cache.mask
        grad_bias = grad_y.sum(axis=(1, 2))
        grad_weight = np.tensordot(grad_y, cache.windows, axes=([1, 2], [1, 2]))
        if not need_input_grad:
            return None, grad_weight, grad_bias
        # (out, in, k, k) against (out, Ho, Wo) -> (in, k, k, Ho, Wo)
        grad_windows = np.tensordot(weight, grad_y, axes=([0], [0]))
        channels, height, width = cache.input_shape
        pad = self.padding
        out_h, out_w = grad_y.shape[1:]
        grad_x = np.zeros(
            (channels, height + 2 * pad, width + 2 * pad), dtype=grad_windows.dtype
        )
        rows = self.stride * (out_h - 1) + 1
        cols = self.stride * (out_w - 1) + 1
        for i in range(self.kernel):
            for j in range(self.kernel):
                grad_x[:, i : i + rows : self.stride, j : j + cols : self.stride] += grad_windows[
                    :, i, j
                ]
        return grad_x[:, pad : pad + height, pad : pad + width], grad_weight, grad_bias

    def __repr__(self):
        return "ConvLayer({!r}, {}→{}, kernel={}, stride={}, relu={})".format(
            self.name, self.in_channels, self.out_channels, self.kernel, self.stride, self.relu
        )
