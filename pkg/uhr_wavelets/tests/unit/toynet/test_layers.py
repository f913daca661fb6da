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
"""Unit tests for :mod:`uhr_wavelets.toynet.layers`."""

import unittest

import numpy as np

from uhr_wavelets import testing
from uhr_wavelets.core import SeededRng
from uhr_wavelets.toynet import ConvLayer


def _naive_conv(x, weight, bias, stride, pad):
    padded = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    out_channels, _, kernel, _ = weight.shape
    out_h = (padded.shape[1] - kernel) // stride + 1
    out_w = (padded.shape[2] - kernel) // stride + 1
    y = np.zeros((out_channels, out_h, out_w))
    for o in range(out_channels):
        for r in range(out_h):
            for c in range(out_w):
                y0, x0 = r * stride, c * stride
                window = padded[:, y0 : y0 + kernel, x0 : x0 + kernel]
                y[o, r, c] = np.sum(window * weight[o]) + bias[o]
    return y


class ConvLayerTests(unittest.TestCase):
    def setUp(self):
        self.rng = SeededRng(0)

    def _parameters(self, layer):
        return layer.init_parameters(self.rng, np.float64)

    def test_output_size(self):
        self.assertEqual((8, 5), ConvLayer("c", 1, 1, 3, 2).output_size(16, 10))
        self.assertEqual((16, 10), ConvLayer("c", 1, 1, 3, 1).output_size(16, 10))
        self.assertEqual((16, 10), ConvLayer("c", 1, 1, 1, 1).output_size(16, 10))

    def test_names(self):
        layer = ConvLayer("fuse", 48, 4, 1)
        self.assertEqual(("fuse.weight", "fuse.bias"), (layer.weight_name, layer.bias_name))
        self.assertEqual((4, 48, 1, 1), layer.weight_shape)
        self.assertEqual(48, layer.fan_in)

    def test_init_bounds(self):
        layer = ConvLayer("c", 4, 8, 3)
        weight, bias = layer.init_parameters(SeededRng(1))
        self.assertEqual(np.float32, weight.dtype)
        self.assertLessEqual(float(np.max(np.abs(weight))), 1.0 / 6 + 1e-7)
        self.assertEqual((8,), bias.shape)

    def test_matches_direct_convolution(self):
        for kernel, stride in ((3, 1), (3, 2), (1, 1)):
            layer = ConvLayer("c", 3, 4, kernel, stride, relu=False)
            weight, bias = self._parameters(layer)
            x = testing.random_planes(kernel + stride, (3, 8, 6), low=-1.0)
            y, _ = layer.forward(x, weight, bias)
            expected = _naive_conv(x, weight, bias, stride, layer.padding)
            self.assertTrue(np.allclose(expected, y), (kernel, stride))

    def test_relu(self):
        layer = ConvLayer("c", 2, 3, 3, 1)
        weight, bias = self._parameters(layer)
        y, cache = layer.forward(testing.random_planes(2, (2, 5, 5), low=-1.0), weight, bias)
        self.assertGreaterEqual(float(y.min()), 0.0)
        self.assertEqual(y.shape, cache.mask.shape)

    def test_no_cache(self):
        layer = ConvLayer("c", 2, 3, 3, 2)
        weight, bias = self._parameters(layer)
        self.assertIsNone(layer.forward(np.ones((2, 4, 4)), weight, bias, keep_cache=False)[1])

    def test_backward(self):
        for kernel, stride, relu in ((3, 2, True), (3, 1, False), (1, 1, True)):
            layer = ConvLayer("c", 2, 3, kernel, stride, relu)
            weight, bias = self._parameters(layer)
            x = testing.random_planes(10 + kernel, (2, 6, 8), low=-1.0)
            y, cache = layer.forward(x, weight, bias)
            upstream = testing.random_planes(20 + stride, y.shape, low=-1.0)
            grad_x, grad_w, grad_b = layer.backward(upstream, cache, weight)

            def objective(x_, w_, b_):
                return float(np.sum(layer.forward(x_, w_, b_, keep_cache=False)[0] * upstream))

            testing.assert_gradient_close(
                lambda v: objective(v, weight, bias), x, grad_x, samples=None
            )
            testing.assert_gradient_close(
                lambda v: objective(x, v, bias), weight, grad_w, samples=None
            )
            testing.assert_gradient_close(
                lambda v: objective(x, weight, v), bias, grad_b, samples=None
            )

    def test_backward_without_input_gradient(self):
        layer = ConvLayer("c", 2, 3, 3, 2)
        weight, bias = self._parameters(layer)
        y, cache = layer.forward(np.ones((2, 4, 4)), weight, bias)
        grad_x, grad_w, _ = layer.backward(np.ones_like(y), cache, weight, need_input_grad=False)
        self.assertIsNone(grad_x)
        self.assertEqual(weight.shape, grad_w.shape)

    def test_channel_mismatch(self):
        layer = ConvLayer("c", 2, 3)
        weight, bias = self._parameters(layer)
        self.assertRaises(ValueError, layer.forward, np.zeros((3, 4, 4)), weight, bias)

    def test_bad_stride(self):
        self.assertRaises(ValueError, ConvLayer, "c", 1, 1, 3, 3)
