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
Cutting ultra-high-resolution images into overlapping patches and merging
per-patch predictions back into a full-size result.

Window starts along an axis are ``0, s, 2s, ...`` with stride
``s = patch - overlap``. The last start is clamped to ``dim - patch`` so the
final window ends exactly on the border. An axis no longer than the patch
gets a single window covering all of it.
"""

import collections
import logging

import numpy as np

from . import exceptions, manifest
from .core import LabelMap


_log = logging.getLogger(__name__)


#: One crop of the image: top-left corner and extents, in pixels.
TileWindow = collections.namedtuple("TileWindow", ["x0", "y0", "w", "h"])


class TilePlan(
    collections.namedtuple("TilePlan", ["image_w", "image_h", "patch", "overlap", "windows"])
):
    """
    The windows covering an image, in row-major order.

    Attributes:
        image_w (int): The image width.
        image_h (int): The image height.
        patch (int): The nominal patch size.
        overlap (int): The overlap between neighbouring windows.
        windows (tuple): The :class:`TileWindow` instances.
    """

    __slots__ = ()

    def as_dict(self):
        return {
            "image_w": self.image_w,
            "image_h": self.image_h,
            "patch": self.patch,
            "overlap": self.overlap,
            "windows": [dict(window._asdict()) for window in self.windows],
        }


def window_starts(dim, patch, overlap):
    """
    The window start offsets along one axis.

    Args:
        dim (int): The axis length.
        patch (int): The patch size.
        overlap (int): The overlap, in 0..patch-1.

    Returns:
        list: The starts, ascending.
    """
    if dim <= patch:
        return [0]
    stride = patch - overlap
    starts = []
    start = 0
    while start + patch < dim:
        starts.append(start)
        start += stride
    starts.append(dim - patch)
    return starts


def plan_tiles(image_w, image_h, patch=1000, overlap=120):
    """
    Plan the windows covering an image.

    Args:
        image_w (int): The image width.
        image_h (int): The image height.
        patch (int): The patch size.
        overlap (int): The overlap between neighbouring windows.

    Returns:
        TilePlan: The plan.

    Raises:
        exceptions.DataError: If the overlap is negative or not smaller than
            the patch, or an extent is not positive.
    """
    if patch < 1:
        raise exceptions.DataError("patch must be at least 1, not {}".format(patch))
    if overlap < 0 or overlap >= patch:
        raise exceptions.DataError(
            "overlap must lie in 0..{}, not {}".format(patch - 1, overlap)
        )
    if image_w < 1 or image_h < 1:
        raise exceptions.DataError(
            "image extents must be positive, not {}×{}".format(image_w, image_h)
        )
    xs = window_starts(image_w, patch, overlap)
    ys = window_starts(image_h, patch, overlap)
    width = min(patch, image_w)
    height = min(patch, image_h)
    windows = tuple(TileWindow(x0, y0, width, height) for y0 in ys for x0 in xs)
    _log.debug(
        "planned tiles",
        extra={"fields": {"image": [image_w, image_h], "windows": len(windows)}},
    )
    return TilePlan(image_w, image_h, patch, overlap, windows)


def coverage(plan):
    """
    Count the windows covering each pixel.

    Returns:
        numpy.ndarray: An image_h×image_w array of counts; every entry is at
        least 1 for a valid plan.
    """
    counts = np.zeros((plan.image_h, plan.image_w), dtype=np.int64)
    for win in plan.windows:
        counts[win.y0 : win.y0 + win.h, win.x0 : win.x0 + win.w] += 1
    return counts


def _check_image(plan, height, width):
    if (height, width) != (plan.image_h, plan.image_w):
        raise exceptions.ShapeError(
            "the plan covers {}×{} pixels but the input is {}×{}".format(
                plan.image_w, plan.image_h, width, height
            )
        )


def crop_array(plan, array):
    """
    Cut an array of shape (..., H, W) into the plan's patches.

    Returns:
        list: One array per window, in plan order.

    Raises:
        exceptions.ShapeError: If the array doesn't match the plan.
    """
    array = np.asarray(array)
    _check_image(plan, array.shape[-2], array.shape[-1])
    return [
        array[..., win.y0 : win.y0 + win.h, win.x0 : win.x0 + win.w] for win in plan.windows
    ]


def crop_labels(plan, label_map):
    """Cut a :class:`LabelMap` into the plan's patches."""
    return [
        LabelMap(patch, label_map.num_categories)
        for patch in crop_array(plan, np.asarray(label_map))
    ]


def _check_patches(plan, patches):
    if len(patches) != len(plan.windows):
        raise exceptions.ShapeError(
            "the plan has {} windows but {} patches were given".format(
                len(plan.windows), len(patches)
            )
        )
    for index, (win, patch) in enumerate(zip(plan.windows, patches)):
        if patch.shape[-2:] != (win.h, win.w):
            raise exceptions.ShapeError(
                "patch {} is {}×{} but its window is {}×{}".format(
                    index, patch.shape[-1], patch.shape[-2], win.w, win.h
                )
            )


def merge_labels(plan, patches):
    """
    Merge label patches into one map.

    Pixels covered by a single window are copied. Where windows overlap the
    most frequent label wins, and the lowest id wins a tie. Ignore labels vote
    like any other value.

    Votes are counted one label value at a time, so beyond the output the
    merge holds two H×W count arrays of the smallest unsigned type that can
    count every window.

    Args:
        plan (TilePlan): The plan the patches were cut with.
        patches (list): One :class:`LabelMap` or 2D array per window.

    Returns:
        LabelMap: The merged map.

    Raises:
        exceptions.ShapeError: If the patch count or a patch size doesn't
            match the plan.
    """
    patches = [np.asarray(patch, dtype=np.uint8) for patch in patches]
    _check_patches(plan, patches)
    values = np.unique(np.concatenate([patch.ravel() for patch in patches]))
    shape = (plan.image_h, plan.image_w)
    merged = np.zeros(shape, dtype=np.uint8)
    best = np.zeros(shape, dtype=np.min_scalar_type(len(plan.windows)))
    count = np.empty_like(best)
    # ascending values and a strict comparison keep the lowest id on ties
    for value in values:
        count.fill(0)
        for win, patch in zip(plan.windows, patches):
            count[win.y0 : win.y0 + win.h, win.x0 : win.x0 + win.w] += patch == value
        wins = count > best
        merged[wins] = value
        best[wins] = count[wins]
    return LabelMap(merged)


def merge_logits(plan, patches):
    """
    Merge per-window arrays of shape C×h×w by averaging overlaps.

    Sums and counts are accumulated in 64-bit floats; the result has the dtype
    of the first patch.

    Returns:
        numpy.ndarray: A C×image_h×image_w array.

    Raises:
        exceptions.ShapeError: If the patch count, a patch size or a channel
            count doesn't match.
    """
    patches = [np.asarray(patch) for patch in patches]
    _check_patches(plan, patches)
    channels = patches[0].shape[:-2]
    for index, patch in enumerate(patches):
        if patch.shape[:-2] != channels:
            raise exceptions.ShapeError(
                "patch {} has leading shape {} but {} was expected".format(
                    index, patch.shape[:-2], channels
                )
            )
    sums = np.zeros(channels + (plan.image_h, plan.image_w), dtype=np.float64)
    for win, patch in zip(plan.windows, patches):
        sums[..., win.y0 : win.y0 + win.h, win.x0 : win.x0 + win.w] += patch
    merged = sums / coverage(plan)
    dtype = patches[0].dtype if np.issubdtype(patches[0].dtype, np.floating) else np.float32
    return merged.astype(dtype)


def dumps_plan(plan):
    """Serialize a plan to its JSON manifest."""
    return manifest.dumps(plan.as_dict(), manifest.TILE_PLAN_SCHEMA)


def plan_from_document(document):
    """
    Build a plan from a decoded manifest, checking it is the plan that
    :func:`plan_tiles` would produce for the same parameters.

    Raises:
        exceptions.ManifestError: If the windows are inconsistent.
        exceptions.DataError: If the parameters are invalid.
    """
    manifest.validate(document, manifest.TILE_PLAN_SCHEMA)
    plan = plan_tiles(
        document["image_w"], document["image_h"], document["patch"], document["overlap"]
    )
    windows = tuple(TileWindow(**window) for window in document["windows"])
    if windows != plan.windows:
        raise exceptions.ManifestError(
            "the plan windows are not the ones patch={} and overlap={} give for a "
            "{}×{} image".format(
                plan.patch, plan.overlap, plan.image_w, plan.image_h
            )
        )
    return plan


def loads_plan(text):
    """Parse a plan manifest produced by :func:`dumps_plan`."""
    return plan_from_document(manifest.loads(text, manifest.TILE_PLAN_SCHEMA))
