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
"""Unit tests for :mod:`uhr_wavelets.pyramid`."""

import unittest

import numpy as np

from uhr_wavelets import exceptions, pyramid, testing
from uhr_wavelets.core import Plane


class BlurTests(unittest.TestCase):
    def test_constant_preserved(self):
        blurred = pyramid.gaussian_blur(Plane(np.full((6, 5), 0.25)))
        self.assertTrue(np.allclose(blurred.data, 0.25, atol=1e-7))

    def test_impulse_mass(self):
        x = np.zeros((16, 16))
        x[8, 8] = 1.0
        self.assertAlmostEqual(1.0, float(pyramid.gaussian_blur(x).sum()), places=12)
        self.assertAlmostEqual(0.25, float(pyramid.gaussian_reduce(x).sum()), places=12)

    def test_mirror_border(self):
        # reflected about the edge sample, a row [1, 0, 0] extends to [0, 0, 1, 0, 0, 0, 1]
        x = np.zeros((2, 3))
        x[:, 0] = 1.0
        blurred = pyramid.gaussian_blur(x)
        self.assertTrue(np.allclose([6.0 / 16, 4.0 / 16, 2.0 / 16], blurred[0]))
        self.assertTrue(np.allclose(blurred[0], blurred[1]))

    def test_too_small(self):
        self.assertRaises(exceptions.DimensionError, pyramid.gaussian_blur, Plane(np.zeros((1, 4))))
        self.assertRaises(exceptions.DimensionError, pyramid.gaussian_reduce, np.zeros((4, 1)))


class ReduceTests(unittest.TestCase):
    def test_ceil_size(self):
        self.assertEqual((3, 4), pyramid.gaussian_reduce(Plane(np.zeros((5, 8)))).shape)

    def test_linear(self):
        a = testing.random_planes(0, (8, 8))
        b = testing.random_planes(1, (8, 8))
        combined = pyramid.gaussian_reduce(a + 2.0 * b)
        separate = pyramid.gaussian_reduce(a) + 2.0 * pyramid.gaussian_reduce(b)
        self.assertTrue(np.allclose(combined, separate, atol=1e-12))


class UpsampleTests(unittest.TestCase):
    def test_corner_aligned(self):
        up = pyramid.upsample_bilinear(Plane([[0.0, 1.0]]), 1, 4)
        self.assertTrue(np.allclose([[0.0, 1.0 / 3, 2.0 / 3, 1.0]], up.data, atol=1e-7))

    def test_smaller_output(self):
        with self.assertRaises(exceptions.DimensionError) as cm:
            pyramid.upsample_bilinear(Plane(np.zeros((4, 4))), 2, 4)
        self.assertEqual("height", cm.exception.axis)

    def test_matrix_rows_sum_to_one(self):
        matrix = pyramid.bilinear_matrix(5, 17)
        self.assertTrue(np.allclose(matrix.sum(axis=1), 1.0))

    def test_adjoint(self):
        x = testing.random_planes(2, (3, 4, 5), low=-1.0)
        y = testing.random_planes(3, (3, 8, 10), low=-1.0)
        lhs = float(np.sum(pyramid.upsample_array(x, 8, 10) * y))
        rhs = float(np.sum(x * pyramid.upsample_adjoint(y, 4, 5)))
        self.assertAlmostEqual(lhs, rhs, places=10)


class DownsampleTests(unittest.TestCase):
    def test_block_middle_average(self):
        x = np.arange(64, dtype=np.float64).reshape(8, 8)
        small = pyramid.downsample_array(x, 4)
        self.assertEqual((2, 2), small.shape)
        # rows 1..2 and columns 1..2 of the first block
        self.assertAlmostEqual((9 + 10 + 17 + 18) / 4.0, small[0, 0])

    def test_channels_and_constants(self):
        x = np.full((3, 16, 12), 0.25, dtype=np.float32)
        small = pyramid.downsample_array(x, 4)
        self.assertEqual((3, 4, 3), small.shape)
        self.assertEqual(np.float32, small.dtype)
        self.assertTrue(np.allclose(small, 0.25))

    def test_factor_one(self):
        x = testing.random_planes(6, (5, 7))
        self.assertTrue(np.allclose(x, pyramid.downsample_array(x, 1)))

    def test_indivisible(self):
        with self.assertRaises(exceptions.DimensionError) as cm:
            pyramid.downsample_array(np.zeros((8, 10)), 4)
        self.assertEqual(
            ("width", 10, 4), (cm.exception.axis, cm.exception.size, cm.exception.divisor)
        )


class ResidualTests(unittest.TestCase):
    def test_constant_has_zero_residuals(self):
        stack = pyramid.laplacian_residuals(Plane(np.full((16, 16), 0.7)), 2)
        for residual in stack.residuals:
            self.assertLess(float(np.max(np.abs(residual.data))), 1e-6)
        self.assertEqual((4, 4), stack.base.shape)

    def test_telescoped_reconstruction(self):
        p = Plane(testing.random_planes(4, (32, 24)))
        rec = pyramid.reconstruct(pyramid.laplacian_residuals(p, 3))
        self.assertLess(float(np.max(np.abs(rec.data - p.data))), 1e-5)

    def test_telescoping_over_random_planes(self):
        for seed in range(100):
            p = Plane(testing.random_planes(seed, (16, 16), low=-1.0))
            for levels in (1, 2, 3):
                rec = pyramid.reconstruct(pyramid.laplacian_residuals(p, levels))
                error = float(np.max(np.abs(rec.data - p.data)))
                self.assertLess(error, 1e-5, (seed, levels))

    def test_residual_sizes(self):
        stack = pyramid.laplacian_residuals(np.zeros((2, 16, 8)), 2)
        self.assertEqual([(2, 16, 8), (2, 8, 4)], [r.shape for r in stack.residuals])
        self.assertEqual((2, 4, 2), stack.base.shape)

    def test_indivisible(self):
        self.assertRaises(
            exceptions.DimensionError, pyramid.laplacian_residuals, Plane(np.zeros((10, 16))), 2
        )

    def test_shallow_stack(self):
        image = testing.random_planes(5, (3, 16, 16))
        stacked = pyramid.shallow_stack(image)
        self.assertEqual((6, 16, 16), stacked.shape)
        first = pyramid.laplacian_residuals(image[0], 2).residuals[0]
        self.assertTrue(np.allclose(first, stacked[0]))
