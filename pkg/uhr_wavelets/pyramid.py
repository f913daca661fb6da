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
Gaussian pyramids and the high-frequency Laplacian residuals fed to the
shallow branch of the network.

The residual at level ``i`` is ``H_i = g_i(I) - U(g_{i+1}(I))`` where ``g_i``
is the image blurred and decimated ``i`` times and ``U`` is corner-aligned
bilinear upsampling. The blur is the separable 5-tap binomial kernel
``[1, 4, 6, 4, 1] / 16`` with borders reflected about the edge sample.
"""

import collections
import logging

import numpy as np
from scipy import ndimage

from . import exceptions
from .core import Plane
from .wavelet import check_divisible


_log = logging.getLogger(__name__)

#: The 1D binomial kernel; it sums to one so constants pass through unchanged.
BINOMIAL_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0

#: The number of residual levels concatenated into the shallow-branch input.
SHALLOW_LEVELS = 2


#: The residual planes ``H_0 .. H_{n-1}``, finest first, and the coarsest
#: Gaussian level ``g_n``.
ResidualStack = collections.namedtuple("ResidualStack", ["residuals", "base"])


def _as_array(p):
    if isinstance(p, Plane):
        return p.data
    return np.asarray(p)


def gaussian_blur(p):
    """
    Blur a plane with the separable binomial kernel.

    Args:
        p (Plane or numpy.ndarray): The input, at least 2×2. Arrays of shape
            (..., H, W) are blurred over their last two axes.

    Returns:
        Plane or numpy.ndarray: The blurred input, of the same type and shape.

    Raises:
        exceptions.DimensionError: If the height or width is below 2.
    """
    x = _as_array(p)
    if x.shape[-2] < 2:
        raise exceptions.DimensionError("height", x.shape[-2], reason="must be at least 2")
    if x.shape[-1] < 2:
        raise exceptions.DimensionError("width", x.shape[-1], reason="must be at least 2")
    dtype = x.dtype if np.issubdtype(x.dtype, np.floating) else np.float32
    x = x.astype(np.float64)
    kernel = BINOMIAL_KERNEL
    blurred = ndimage.convolve1d(x, kernel, axis=-2, mode="mirror")
    blurred = ndimage.convolve1d(blurred, kernel, axis=-1, mode="mirror")
    blurred = blurred.astype(dtype)
    if isinstance(p, Plane):
        return Plane(blurred)
    return blurred


def gaussian_reduce(p):
    """
    Blur then keep every second row and column.

    Args:
        p (Plane or numpy.ndarray): The input, at least 2×2.

    Returns:
        Plane or numpy.ndarray: A ceil(H/2)×ceil(W/2) result.

    Raises:
        exceptions.DimensionError: If the height or width is below 2.
    """
    blurred = _as_array(gaussian_blur(p))
    reduced = blurred[..., 0::2, 0::2]
    if isinstance(p, Plane):
        return Plane(reduced)
    return np.ascontiguousarray(reduced)


def bilinear_matrix(n_in, n_out, dtype=np.float64):
    """
    The corner-aligned linear interpolation operator along one axis.

    Output sample ``i`` reads the input at ``i * (n_in - 1) / (n_out - 1)``,
    so the first and last samples of input and output coincide.

    Args:
        n_in (int): The input length.
        n_out (int): The output length.
        dtype: The matrix dtype.

    Returns:
        numpy.ndarray: An (n_out, n_in) matrix ``M`` with ``out = M @ in``.
    """
    matrix = np.zeros((n_out, n_in), dtype=np.float64)
    if n_in == 1 or n_out == 1:
        matrix[:, 0] = 1.0
        return matrix.astype(dtype)
    src = np.arange(n_out, dtype=np.float64) * (n_in - 1) / (n_out - 1)
    left = np.minimum(np.floor(src).astype(np.int64), n_in - 2)
    frac = src - left
    rows = np.arange(n_out)
    matrix[rows, left] = 1.0 - frac
    matrix[rows, left + 1] += frac
    return matrix.astype(dtype)


def upsample_array(x, out_h, out_w):
    """
    Bilinear upsampling over the last two axes of an array.

    Raises:
        exceptions.DimensionError: If the output is smaller than the input.
    """
    x = np.asarray(x)
    in_h, in_w = x.shape[-2], x.shape[-1]
    if out_h < in_h:
        raise exceptions.DimensionError(
            "height", out_h, reason="cannot upsample from {} to a smaller size".format(in_h)
        )
    if out_w < in_w:
        raise exceptions.DimensionError(
            "width", out_w, reason="cannot upsample from {} to a smaller size".format(in_w)
        )
    dtype = x.dtype if np.issubdtype(x.dtype, np.floating) else np.float32
    rows = bilinear_matrix(in_h, out_h, dtype)
    cols = bilinear_matrix(in_w, out_w, dtype)
    return np.matmul(np.matmul(rows, x.astype(dtype)), cols.T)


def upsample_adjoint(g, in_h, in_w):
    """
    The adjoint of :func:`upsample_array`: gradients at the output carried back
    to an input of shape (..., in_h, in_w).
    """
    g = np.asarray(g)
    rows = bilinear_matrix(in_h, g.shape[-2], g.dtype)
    cols = bilinear_matrix(in_w, g.shape[-1], g.dtype)
    return np.matmul(np.matmul(rows.T, g), cols)


def _centred_matrix(n_in, factor, dtype):
    n_out = n_in // factor
    src = np.arange(n_out, dtype=np.float64) * factor + (factor - 1) / 2.0
    left = np.floor(src).astype(np.int64)
    frac = src - left
    rows = np.arange(n_out)
    matrix = np.zeros((n_out, n_in), dtype=np.float64)
    matrix[rows, left] = 1.0 - frac
    matrix[rows, np.minimum(left + 1, n_in - 1)] += frac
    return matrix.astype(dtype)


def downsample_array(x, factor):
    """
    Bilinear downsampling by an integer factor over the last two axes.

    Pixel centres are aligned: output sample ``i`` reads the input at
    ``factor * i + (factor - 1) / 2``, so an even factor averages the two
    middle samples of every block along each axis.

    Args:
        x (numpy.ndarray): An array shaped (..., H, W).
        factor (int): The reduction factor; H and W must be multiples of it.

    Returns:
        numpy.ndarray: The (..., H / factor, W / factor) array.

    Raises:
        exceptions.DimensionError: If H or W is not a multiple of ``factor``.
    """
    x = np.asarray(x)
    height, width = x.shape[-2], x.shape[-1]
    if height % factor:
        raise exceptions.DimensionError("height", height, divisor=factor)
    if width % factor:
        raise exceptions.DimensionError("width", width, divisor=factor)
    dtype = x.dtype if np.issubdtype(x.dtype, np.floating) else np.float32
    rows = _centred_matrix(height, factor, dtype)
    cols = _centred_matrix(width, factor, dtype)
    return np.matmul(np.matmul(rows, x.astype(dtype)), cols.T)


def upsample_bilinear(p, out_h, out_w):
    """
    Corner-aligned bilinear upsampling of a plane.

    Args:
        p (Plane): The input plane.
        out_h (int): The output height, at least the input height.
        out_w (int): The output width, at least the input width.

    Returns:
        Plane: The upsampled plane.

    Raises:
        exceptions.DimensionError: If the output is smaller than the input.
    """
    return Plane(upsample_array(_as_array(p), out_h, out_w))


def laplacian_residuals(p, levels=SHALLOW_LEVELS):
    """
    Split a plane into high-frequency residuals and a coarse base.

    Args:
        p (Plane or numpy.ndarray): The input. Arrays of shape (..., H, W) are
            processed over their last two axes.
        levels (int): The number of residuals n.

    Returns:
        ResidualStack: ``residuals[i]`` has the size of the ``i``-fold reduced
        input; ``base`` has the size of the ``n``-fold reduced input. Planes
        come back for a plane input, arrays otherwise.

    Raises:
        exceptions.DimensionError: If the height or width isn't divisible by
            2**n.
    """
    x = _as_array(p)
    x = x if np.issubdtype(x.dtype, np.floating) else x.astype(np.float32)
    check_divisible(x.shape[-2], x.shape[-1], levels)
    residuals = []
    current = x
    for _ in range(levels):
        reduced = gaussian_reduce(current)
        expanded = upsample_array(reduced, current.shape[-2], current.shape[-1])
        residuals.append(current - expanded.astype(current.dtype))
        current = reduced
    if isinstance(p, Plane):
        return ResidualStack([Plane(r) for r in residuals], Plane(current))
    return ResidualStack(residuals, current)


def reconstruct(stack):
    """
    Telescope a :class:`ResidualStack` back into the input:
    ``g_i = H_i + U(g_{i+1})`` from the base upwards.
    """
    current = _as_array(stack.base)
    for residual in reversed(stack.residuals):
        residual = _as_array(residual)
        current = residual + upsample_array(current, residual.shape[-2], residual.shape[-1])
    if isinstance(stack.base, Plane):
        return Plane(current)
    return current


def shallow_stack(image):
    """
    Build the shallow-branch input from a C×H×W image.

    The result stacks the full-resolution residual ``H_0`` of every channel,
    followed by the second residual ``H_1`` upsampled to full resolution.

    Args:
        image (numpy.ndarray): A C×H×W array with H and W divisible by 4.

    Returns:
        numpy.ndarray: A 2C×H×W array.
    """
    image = np.asarray(image)
    stack = laplacian_residuals(image, SHALLOW_LEVELS)
    fine, coarse = stack.residuals
    coarse = upsample_array(coarse, image.shape[-2], image.shape[-1]).astype(fine.dtype)
    return np.concatenate([fine, coarse], axis=-3)
