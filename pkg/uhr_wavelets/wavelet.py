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
Orthonormal 2D Haar wavelet transforms.

The four analysis filters are applied as a stride-2 correlation on disjoint
2×2 blocks ``[[a, b], [c, d]]``::

    LL = (a + b + c + d) / 2        f_LL = 1/2 [[1,  1], [ 1,  1]]
    LH = (a + b - c - d) / 2        f_LH = 1/2 [[1,  1], [-1, -1]]
    HL = (a - b + c - d) / 2        f_HL = 1/2 [[1, -1], [ 1, -1]]
    HH = (a - b - c + d) / 2        f_HH = 1/2 [[1, -1], [-1,  1]]

The transform matrix is orthonormal, so the inverse equals the adjoint and
energy is conserved at every level.

Two families of functions are provided. The array kernels
(:func:`haar_analysis`, :func:`haar_synthesis`, :func:`packet_analysis`,
:func:`packet_synthesis`) work on the last two axes of numpy arrays of any
floating dtype and are what the network and the loss use. The plane functions
(:func:`dwt2`, :func:`iwt2`, :func:`dwt_multilevel`, :func:`packet_decompose`
and friends) wrap them with the :class:`~uhr_wavelets.core.Plane` types.
"""

import collections

import numpy as np

from . import exceptions
from .core import Plane


#: The index of each subband along the subband axis of the array kernels.
LL, LH, HL, HH = 0, 1, 2, 3


def check_divisible(height, width, levels):
    """
    Check a plane can be halved ``levels`` times.

    Raises:
        exceptions.DimensionError: Naming the first axis that isn't divisible
            by ``2 ** levels``.
    """
    divisor = 2 ** levels
    if height % divisor:
        raise exceptions.DimensionError("height", height, divisor)
    if width % divisor:
        raise exceptions.DimensionError("width", width, divisor)


def _float_array(x):
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.floating):
        x = x.astype(np.float32)
    return x


def haar_analysis(x):
    """
    One level of the Haar transform over the last two axes.

    Args:
        x (numpy.ndarray): An array of shape (..., H, W) with H and W even.

    Returns:
        numpy.ndarray: An array of shape (..., 4, H/2, W/2) holding the LL, LH,
        HL and HH subbands in that order.

    Raises:
        exceptions.DimensionError: If H or W is odd.
    """
    x = _float_array(x)
    check_divisible(x.shape[-2], x.shape[-1], 1)
    a = x[..., 0::2, 0::2]
    b = x[..., 0::2, 1::2]
    c = x[..., 1::2, 0::2]
    d = x[..., 1::2, 1::2]
    half = x.dtype.type(0.5)
    return np.stack(
        [
            (a + b + c + d) * half,
            (a + b - c - d) * half,
            (a - b + c - d) * half,
            (a - b - c + d) * half,
        ],
        axis=-3,
    )


def haar_synthesis(q):
    """
    Invert :func:`haar_analysis`.

    Args:
        q (numpy.ndarray): An array of shape (..., 4, h, w).

    Returns:
        numpy.ndarray: An array of shape (..., 2h, 2w).

    Raises:
        exceptions.ShapeError: If the subband axis doesn't have 4 entries.
    """
    q = _float_array(q)
    if q.ndim < 3 or q.shape[-3] != 4:
        raise exceptions.ShapeError(
            "expected 4 subbands on axis -3, got shape {}".format(q.shape)
        )
    ll, lh, hl, hh = q[..., 0, :, :], q[..., 1, :, :], q[..., 2, :, :], q[..., 3, :, :]
    half = q.dtype.type(0.5)
    out = np.empty(q.shape[:-3] + (2 * q.shape[-2], 2 * q.shape[-1]), dtype=q.dtype)
    out[..., 0::2, 0::2] = (ll + lh + hl + hh) * half
    out[..., 0::2, 1::2] = (ll + lh - hl - hh) * half
    out[..., 1::2, 0::2] = (ll - lh + hl - hh) * half
    out[..., 1::2, 1::2] = (ll - lh - hl + hh) * half
    return out


def packet_analysis(x, levels):
    """
    The full wavelet-packet decomposition over the last two axes.

    Every subband is decomposed again at each level. Child ``i`` of parent
    ``b`` lands at position ``4 * b + i``, so the result for two levels of a
    single plane is ordered LL-LL, LL-LH, ..., HH-HH.

    Args:
        x (numpy.ndarray): An array of shape (..., H, W).
        levels (int): The decomposition depth L ≥ 0.

    Returns:
        numpy.ndarray: An array of shape (..., 4**L, H/2**L, W/2**L).

    Raises:
        exceptions.DimensionError: If H or W is not divisible by 2**L.
    """
    x = _float_array(x)
    check_divisible(x.shape[-2], x.shape[-1], levels)
    nodes = x[..., np.newaxis, :, :]
    for _ in range(levels):
        children = haar_analysis(nodes)
        nodes = children.reshape(
            children.shape[:-4] + (children.shape[-4] * 4,) + children.shape[-2:]
        )
    return nodes


def packet_synthesis(nodes, levels):
    """
    Invert :func:`packet_analysis`.

    Args:
        nodes (numpy.ndarray): An array of shape (..., 4**L, h, w).
        levels (int): The depth L the nodes were produced with.

    Returns:
        numpy.ndarray: An array of shape (..., h * 2**L, w * 2**L).

    Raises:
        exceptions.ShapeError: If the node axis doesn't hold 4**L entries.
    """
    nodes = _float_array(nodes)
    if nodes.ndim < 3 or nodes.shape[-3] != 4 ** levels:
        raise exceptions.ShapeError(
            "expected {} packet nodes on axis -3, got shape {}".format(
                4 ** levels, nodes.shape
            )
        )
    for _ in range(levels):
        parents = nodes.shape[-3] // 4
        grouped = nodes.reshape(nodes.shape[:-3] + (parents, 4) + nodes.shape[-2:])
        nodes = haar_synthesis(grouped)
    return nodes[..., 0, :, :]


class SubbandQuad(collections.namedtuple("SubbandQuad", ["ll", "lh", "hl", "hh"])):
    """
    The four subbands of a one-level transform, each a :class:`Plane` of half
    the input height and width.
    """

    __slots__ = ()

    def as_array(self, dtype=np.float32):
        """Stack the subbands into a (4, h, w) array."""
        return np.stack([np.asarray(p, dtype=dtype) for p in self])


class PacketTree(object):
    """
    A full wavelet-packet decomposition.

    Attributes:
        depth (int): The number of decomposition levels L.
        nodes (list): ``nodes[l]`` is the list of ``4 ** l`` planes at level
            ``l``, for ``l`` in 0..L. Level 0 holds the input itself. Child
            ``i`` of parent ``b`` sits at position ``4 * b + i``. A tree of
            gradients may hold None for levels without a gradient.
    """

    def __init__(self, nodes):
        if not nodes:
            raise exceptions.ShapeError("a packet tree needs at least the root level")
        for level, planes in enumerate(nodes):
            if planes is None:
                continue
            if len(planes) != 4 ** level:
                raise exceptions.ShapeError(
                    "level {} of a packet tree needs {} nodes, not {}".format(
                        level, 4 ** level, len(planes)
                    )
                )
            shapes = set(p.shape for p in planes)
            if len(shapes) != 1:
                raise exceptions.ShapeError(
                    "level {} mixes node shapes {}".format(level, sorted(shapes))
                )
        self.nodes = [None if planes is None else list(planes) for planes in nodes]

    @property
    def depth(self):
        return len(self.nodes) - 1

    @property
    def leaves(self):
        return self.nodes[-1]

    def level(self, level):
        return self.nodes[level]

    def level_array(self, level, dtype=np.float32):
        """
        Stack the planes of one level into a (4**l, h, w) array, or return
        None for a level given as None.
        """
        if self.nodes[level] is None:
            return None
        return np.stack([np.asarray(p, dtype=dtype) for p in self.nodes[level]])

    def __repr__(self):
        leaf_shape = self.leaves[0].shape if self.leaves else None
        return "PacketTree(depth={}, leaf_shape={})".format(self.depth, leaf_shape)


#: The Mallat decomposition: the coarsest low-pass plane and the detail
#: subbands ``(lh, hl, hh)`` of every level, finest level first.
MultilevelDecomposition = collections.namedtuple(
    "MultilevelDecomposition", ["low", "details"]
)


def _plane_array(p):
    if not isinstance(p, Plane):
        p = Plane(p)
    return p.data


def dwt2(p):
    """
    One level of the 2D Haar transform.

    Args:
        p (Plane): The input plane; height and width must be even.

    Returns:
        SubbandQuad: The LL, LH, HL and HH subbands.

    Raises:
        exceptions.DimensionError: If the height or width is odd.
    """
    q = haar_analysis(_plane_array(p))
    return SubbandQuad(*(Plane(band) for band in q))


def iwt2(q):
    """
    Invert :func:`dwt2`.

    Args:
        q (SubbandQuad): The four subbands.

    Returns:
        Plane: The reconstructed plane.

    Raises:
        exceptions.ShapeError: If the subbands don't share one shape.
    """
    bands = [_plane_array(p) for p in q]
    shapes = set(b.shape for b in bands)
    if len(bands) != 4 or len(shapes) != 1:
        raise exceptions.ShapeError(
            "the four subbands must share one shape, got {}".format(
                [b.shape for b in bands]
            )
        )
    return Plane(haar_synthesis(np.stack(bands)))


def dwt_multilevel(p, levels):
    """
    The Mallat multi-level transform: only the LL subband is decomposed again.

    Args:
        p (Plane): The input plane.
        levels (int): The number of levels L ≥ 1.

    Returns:
        MultilevelDecomposition: The (H/2**L)×(W/2**L) low-pass plane and the
        detail triples of every level, finest first.

    Raises:
        exceptions.DimensionError: If the height or width isn't divisible by
            2**L.
    """
    low = _plane_array(p)
    check_divisible(low.shape[0], low.shape[1], levels)
    details = []
    for _ in range(levels):
        q = haar_analysis(low)
        details.append(tuple(Plane(q[band]) for band in (LH, HL, HH)))
        low = q[LL]
    return MultilevelDecomposition(Plane(low), details)


def iwt_multilevel(decomposition):
    """
    Invert :func:`dwt_multilevel`.

    Raises:
        exceptions.ShapeError: If a level's detail planes don't match the
            low-pass plane being reconstructed.
    """
    low = _plane_array(decomposition.low)
    for lh, hl, hh in reversed(decomposition.details):
        low = np.asarray(iwt2(SubbandQuad(Plane(low), lh, hl, hh)))
    return Plane(low)


def packet_decompose(p, depth):
    """
    The full wavelet-packet decomposition of a plane.

    Args:
        p (Plane): The input plane.
        depth (int): The number of levels L.

    Returns:
        PacketTree: Every level from the input (level 0) down to the 4**L
        leaves.

    Raises:
        exceptions.DimensionError: If the height or width isn't divisible by
            2**L.
    """
    root = _plane_array(p)
    check_divisible(root.shape[0], root.shape[1], depth)
    levels = [[Plane(root)]]
    nodes = root[np.newaxis]
    for _ in range(depth):
        children = packet_analysis(nodes, 1)
        nodes = children.reshape((-1,) + children.shape[-2:])
        levels.append([Plane(node) for node in nodes])
    return PacketTree(levels)


def packet_reconstruct(tree):
    """Rebuild the input plane of a :class:`PacketTree` from its leaves."""
    return Plane(packet_synthesis(tree.level_array(tree.depth), tree.depth))


def dwt_adjoint_scatter(grad):
    """
    Carry gradients given on transform outputs back to the input plane.

    For the orthonormal Haar transform the adjoint is the inverse transform.
    For a packet tree the gradients of every level are accumulated from the
    deepest level upwards, so a loss that reads several levels gets its full
    gradient. A level given as ``None`` contributes nothing.

    Args:
        grad (SubbandQuad or PacketTree): Gradients with respect to the
            subbands (or to every node of every level).

    Returns:
        Plane: The gradient with respect to the input plane.

    Raises:
        exceptions.ShapeError: If the gradient shapes are inconsistent.
    """
    if isinstance(grad, SubbandQuad):
        return iwt2(grad)
    if not isinstance(grad, PacketTree):
        raise exceptions.ShapeError(
            "expected a SubbandQuad or PacketTree, not {}".format(type(grad).__name__)
        )
    return Plane(scatter_levels([grad.level_array(l) for l in range(grad.depth + 1)]))


def scatter_levels(level_grads):
    """
    Array form of :func:`dwt_adjoint_scatter` for packet trees.

    Args:
        level_grads (list): ``level_grads[l]`` is an array of shape
            (..., 4**l, h_l, w_l) or ``None``.

    Returns:
        numpy.ndarray: The gradient of shape (..., H, W).
    """
    acc = None
    for level in range(len(level_grads) - 1, -1, -1):
        g = level_grads[level]
        if g is not None:
            g = _float_array(g)
            if g.shape[-3] != 4 ** level:
                raise exceptions.ShapeError(
                    "level {} gradients need {} nodes, got shape {}".format(
                        level, 4 ** level, g.shape
                    )
                )
            if acc is not None and acc.shape != g.shape:
                raise exceptions.ShapeError(
                    "level {} gradients have shape {} but {} was expected".format(
                        level, g.shape, acc.shape
                    )
                )
            acc = g if acc is None else acc + g
        if acc is not None and level > 0:
            grouped = acc.reshape(acc.shape[:-3] + (4 ** (level - 1), 4) + acc.shape[-2:])
            acc = haar_synthesis(grouped)
    if acc is None:
        raise exceptions.ShapeError("no gradients were given")
    return acc[..., 0, :, :]
