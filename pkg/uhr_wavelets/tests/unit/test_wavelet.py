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
"""Unit tests for :mod:`uhr_wavelets.wavelet`."""

import unittest

import numpy as np
import pywt

from uhr_wavelets import exceptions, testing, wavelet
from uhr_wavelets.core import Plane


def _inner(a, b):
    return float(np.sum(np.asarray(a, dtype=np.float64) * np.asarray(b, dtype=np.float64)))


class HaarKernelTests(unittest.TestCase):
    """Tests for the array kernels."""

    def test_block_example(self):
        q = wavelet.haar_analysis(np.array([[1.0, 2.0], [3.0, 4.0]]))
        self.assertEqual([5.0, -2.0, -1.0, 0.0], q.ravel().tolist())

    def test_preserves_dtype(self):
        x = testing.random_planes(0, (2, 4, 4), dtype=np.float64)
        self.assertEqual(np.float64, wavelet.haar_analysis(x).dtype)
        self.assertEqual(np.float32, wavelet.haar_analysis(x.astype(np.float32)).dtype)

    def test_leading_axes(self):
        x = testing.random_planes(1, (3, 2, 8, 8))
        q = wavelet.haar_analysis(x)
        self.assertEqual((3, 2, 4, 4, 4), q.shape)
        self.assertTrue(np.allclose(x, wavelet.haar_synthesis(q), atol=1e-12))

    def test_synthesis_needs_four_subbands(self):
        self.assertRaises(exceptions.ShapeError, wavelet.haar_synthesis, np.zeros((3, 2, 2)))

    def test_packet_arrays_roundtrip(self):
        x = testing.random_planes(2, (3, 16, 8))
        nodes = wavelet.packet_analysis(x, 3)
        self.assertEqual((3, 64, 2, 1), nodes.shape)
        self.assertTrue(np.allclose(x, wavelet.packet_synthesis(nodes, 3), atol=1e-12))

    def test_packet_arrays_wrong_node_count(self):
        self.assertRaises(exceptions.ShapeError, wavelet.packet_synthesis, np.zeros((15, 2, 2)), 2)

    def test_zero_levels_is_identity(self):
        x = testing.random_planes(3, (4, 4))
        self.assertTrue(np.array_equal(x, wavelet.packet_analysis(x, 0)[0]))


class Dwt2Tests(unittest.TestCase):
    """Tests for :func:`uhr_wavelets.wavelet.dwt2` and :func:`uhr_wavelets.wavelet.iwt2`."""

    def test_constant(self):
        q = wavelet.dwt2(Plane(np.full((4, 4), 3.0)))
        self.assertTrue(np.all(q.ll.data == 6.0))
        for band in (q.lh, q.hl, q.hh):
            self.assertTrue(np.all(band.data == 0.0))

    def test_single_block(self):
        q = wavelet.dwt2(Plane([[1, 2], [3, 4]]))
        self.assertEqual((5.0, -2.0, -1.0, 0.0), tuple(float(b.data[0, 0]) for b in q))

    def test_odd_width(self):
        with self.assertRaises(exceptions.DimensionError) as cm:
            wavelet.dwt2(Plane(np.zeros((4, 5))))
        self.assertEqual("width", cm.exception.axis)
        self.assertEqual(5, cm.exception.size)

    def test_odd_height(self):
        with self.assertRaises(exceptions.DimensionError) as cm:
            wavelet.dwt2(Plane(np.zeros((3, 4))))
        self.assertEqual("height", cm.exception.axis)

    def test_energy_conserved(self):
        for seed in range(10):
            p = Plane(testing.random_planes(seed, (16, 12), low=-1.0))
            q = wavelet.dwt2(p)
            energy = sum(band.energy() for band in q)
            self.assertLess(abs(energy - p.energy()) / p.energy(), 1e-5)

    def test_perfect_reconstruction(self):
        for seed in range(10):
            p = Plane(testing.random_planes(seed, (8, 10)))
            self.assertLess(np.max(np.abs(wavelet.iwt2(wavelet.dwt2(p)).data - p.data)), 1e-6)

    def test_mismatched_subbands(self):
        q = wavelet.dwt2(Plane(np.zeros((4, 4))))
        broken = q._replace(hh=Plane(np.zeros((3, 2))))
        self.assertRaises(exceptions.ShapeError, wavelet.iwt2, broken)

    def test_linearity(self):
        a = testing.random_planes(4, (8, 8))
        b = testing.random_planes(5, (8, 8))
        combined = wavelet.dwt2(Plane(2.0 * a - 3.0 * b)).as_array(np.float64)
        separate = 2.0 * wavelet.dwt2(Plane(a)).as_array(np.float64) - 3.0 * wavelet.dwt2(
            Plane(b)
        ).as_array(np.float64)
        self.assertTrue(np.allclose(combined, separate, atol=1e-5))

    def test_matches_pywavelets(self):
        x = testing.random_planes(6, (8, 8)).astype(np.float32)
        q = wavelet.dwt2(Plane(x))
        ca, (ch, cv, cd) = pywt.dwt2(x.astype(np.float64), "haar")
        self.assertTrue(np.allclose(ca, q.ll.data, atol=1e-5))
        self.assertTrue(np.allclose(np.abs(ch), np.abs(q.lh.data), atol=1e-5))
        self.assertTrue(np.allclose(np.abs(cv), np.abs(q.hl.data), atol=1e-5))
        self.assertTrue(np.allclose(np.abs(cd), np.abs(q.hh.data), atol=1e-5))


class MultilevelTests(unittest.TestCase):
    """Tests for the Mallat decomposition."""

    def test_constant(self):
        dec = wavelet.dwt_multilevel(Plane(np.full((4, 4), 1.5)), 2)
        self.assertEqual((1, 1), dec.low.shape)
        self.assertEqual(6.0, float(dec.low.data[0, 0]))
        for level in dec.details:
            for band in level:
                self.assertTrue(np.all(band.data == 0.0))

    def test_one_level_equals_dwt2(self):
        p = Plane(testing.random_planes(7, (8, 8)))
        dec = wavelet.dwt_multilevel(p, 1)
        q = wavelet.dwt2(p)
        self.assertEqual(q.ll, dec.low)
        self.assertEqual((q.lh, q.hl, q.hh), dec.details[0])

    def test_finest_first(self):
        dec = wavelet.dwt_multilevel(Plane(np.zeros((16, 16))), 3)
        self.assertEqual([(8, 8), (4, 4), (2, 2)], [level[0].shape for level in dec.details])

    def test_indivisible(self):
        with self.assertRaises(exceptions.DimensionError) as cm:
            wavelet.dwt_multilevel(Plane(np.zeros((12, 16))), 3)
        self.assertIn("not divisible by 8", str(cm.exception))

    def test_roundtrip(self):
        p = Plane(testing.random_planes(8, (32, 16)))
        rec = wavelet.iwt_multilevel(wavelet.dwt_multilevel(p, 4))
        self.assertLess(np.max(np.abs(rec.data - p.data)), 1e-5)

    def test_orthonormal_every_level(self):
        p = Plane(testing.random_planes(9, (16, 16), low=-1.0))
        dec = wavelet.dwt_multilevel(p, 3)
        energy = dec.low.energy() + sum(band.energy() for level in dec.details for band in level)
        self.assertLess(abs(energy - p.energy()) / p.energy(), 1e-5)

    def test_matches_pywavelets(self):
        x = testing.random_planes(10, (16, 16))
        dec = wavelet.dwt_multilevel(Plane(x), 3)
        coeffs = pywt.wavedec2(x, "haar", level=3)
        self.assertTrue(np.allclose(coeffs[0], dec.low.data, atol=1e-5))


def _random_cases(count, seed=2024):
    """Yield ``(seed, levels, height, width)`` with sides in 8..64 divisible by 2**levels."""
    rng = np.random.default_rng(seed)
    for case in range(count):
        levels = int(rng.integers(1, 4))
        step = 2 ** levels
        sizes = np.arange(8, 65, step)
        yield case, levels, int(rng.choice(sizes)), int(rng.choice(sizes))


class RandomPlaneTests(unittest.TestCase):
    """Reconstruction and energy checks over 100 randomly sized planes."""

    def test_multilevel_reconstruction(self):
        for seed, levels, height, width in _random_cases(100):
            p = Plane(testing.random_planes(seed, (height, width), low=-1.0))
            rec = wavelet.iwt_multilevel(wavelet.dwt_multilevel(p, levels))
            self.assertEqual(p.shape, rec.shape)
            self.assertLess(np.max(np.abs(rec.data - p.data)), 1e-5, (levels, height, width))

    def test_multilevel_energy(self):
        for seed, levels, height, width in _random_cases(100):
            p = Plane(testing.random_planes(seed, (height, width), low=-1.0))
            dec = wavelet.dwt_multilevel(p, levels)
            energy = dec.low.energy() + sum(
                band.energy() for level in dec.details for band in level
            )
            self.assertLess(abs(energy - p.energy()) / p.energy(), 1e-5, (levels, height, width))

    def test_packet_reconstruction_and_energy(self):
        for seed, levels, height, width in _random_cases(100, seed=7):
            p = Plane(testing.random_planes(500 + seed, (height, width), low=-1.0))
            tree = wavelet.packet_decompose(p, levels)
            self.assertEqual(4 ** levels, len(tree.leaves))
            energy = sum(leaf.energy() for leaf in tree.leaves)
            self.assertLess(abs(energy - p.energy()) / p.energy(), 1e-5)
            rec = wavelet.packet_reconstruct(tree)
            self.assertLess(np.max(np.abs(rec.data - p.data)), 1e-5, (levels, height, width))


class PacketTests(unittest.TestCase):
    """Tests for the wavelet-packet decomposition."""

    def test_leaf_energy(self):
        p = Plane(testing.random_planes(11, (16, 16), low=-1.0))
        tree = wavelet.packet_decompose(p, 3)
        self.assertEqual(64, len(tree.leaves))
        energy = sum(leaf.energy() for leaf in tree.leaves)
        self.assertLess(abs(energy - p.energy()) / p.energy(), 1e-5)

    def test_depth_one_equals_dwt2(self):
        p = Plane(testing.random_planes(12, (8, 8)))
        self.assertEqual(list(wavelet.dwt2(p)), wavelet.packet_decompose(p, 1).leaves)

    def test_child_positions(self):
        tree = wavelet.packet_decompose(Plane(testing.random_planes(13, (8, 8))), 2)
        for parent in range(4):
            children = wavelet.dwt2(tree.nodes[1][parent])
            for index in range(4):
                self.assertTrue(
                    np.allclose(
                        children[index].data, tree.nodes[2][4 * parent + index].data, atol=1e-6
                    )
                )

    def test_reconstruct(self):
        p = Plane(testing.random_planes(14, (16, 8)))
        rec = wavelet.packet_reconstruct(wavelet.packet_decompose(p, 3))
        self.assertLess(np.max(np.abs(rec.data - p.data)), 1e-5)

    def test_matches_pywavelets_packets(self):
        x = testing.random_planes(15, (8, 8))
        tree = wavelet.packet_decompose(Plane(x), 2)
        packet = pywt.WaveletPacket2D(x, "haar", maxlevel=2)
        self.assertTrue(np.allclose(packet["aa"].data, tree.leaves[0].data, atol=1e-5))

    def test_indivisible(self):
        self.assertRaises(
            exceptions.DimensionError, wavelet.packet_decompose, Plane(np.zeros((8, 6))), 2
        )

    def test_tree_validates_node_count(self):
        self.assertRaises(
            exceptions.ShapeError, wavelet.PacketTree, [[Plane.zeros(4, 4)], [Plane.zeros(2, 2)]]
        )


class AdjointTests(unittest.TestCase):
    """Tests for :func:`uhr_wavelets.wavelet.dwt_adjoint_scatter`."""

    def test_quad_adjoint_identity(self):
        for seed in range(100):
            x = testing.random_planes(seed, (8, 8), low=-1.0)
            y = testing.random_planes(1000 + seed, (4, 4, 4), low=-1.0)
            forward = wavelet.dwt2(Plane(x)).as_array(np.float64)
            back = wavelet.dwt_adjoint_scatter(wavelet.SubbandQuad(*(Plane(b) for b in y)))
            lhs = _inner(forward, y)
            rhs = _inner(x, back)
            self.assertLess(abs(lhs - rhs), 1e-4 * max(1.0, abs(lhs)))

    def test_tree_adjoint_identity(self):
        x = testing.random_planes(20, (8, 8), low=-1.0)
        tree = wavelet.packet_decompose(Plane(x), 2)
        grads = wavelet.PacketTree(
            [
                [Plane(g) for g in testing.random_planes(30 + level, (4 ** level, size, size))]
                for level, size in enumerate((8, 4, 2))
            ]
        )
        back = wavelet.dwt_adjoint_scatter(grads)
        lhs = sum(
            _inner(tree.level_array(level), grads.level_array(level)) for level in range(3)
        )
        self.assertLess(abs(lhs - _inner(x, back)), 1e-4 * max(1.0, abs(lhs)))

    def test_missing_levels_are_zero(self):
        leaves = testing.random_planes(21, (16, 2, 2))
        tree = wavelet.PacketTree([None, None, [Plane(g) for g in leaves]])
        back = wavelet.dwt_adjoint_scatter(tree)
        expected = wavelet.packet_synthesis(leaves, 2)
        self.assertTrue(np.allclose(expected, back.data, atol=1e-6))

    def test_scatter_levels_shape_mismatch(self):
        self.assertRaises(
            exceptions.ShapeError,
            wavelet.scatter_levels,
            [np.zeros((1, 8, 8)), np.zeros((4, 3, 3))],
        )

    def test_scatter_levels_nothing(self):
        self.assertRaises(exceptions.ShapeError, wavelet.scatter_levels, [None, None])
