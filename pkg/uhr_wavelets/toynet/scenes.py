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
"""Synthetic labelled scenes for training and testing the toy network."""

import logging
import math

import numpy as np

from .. import exceptions
from ..core import LabelMap, SeededRng


_log = logging.getLogger(__name__)

NOISE_SIGMA = 0.05
TEXTURE_AMPLITUDE = 0.04
MAX_CATEGORIES = 8


def gen_scene(rng, height, width, num_categories):
    """
    Draw a random scene.

    Category 0 is the background. Random axis-aligned rectangles and
    ellipses of the other categories are painted over it. Every category has
    a base colour and a sinusoidal texture; Gaussian noise is added and the
    result is clamped to [0, 1].

    Args:
        rng (SeededRng): The random source.
        height (int): The image height, at least 2.
        width (int): The image width, at least 2.
        num_categories (int): C, in 2..8.

    Returns:
        tuple: A 3×height×width float32 image and its :class:`LabelMap`, which
        always holds at least two categories.

    Raises:
        exceptions.DataError: If C or the size is out of range.
    """
    if not 2 <= num_categories <= MAX_CATEGORIES:
        raise exceptions.DataError(
            "num_categories must lie in 2..{}, not {}".format(MAX_CATEGORIES, num_categories)
        )
    if height < 2 or width < 2:
        raise exceptions.DataError(
            "scenes must be at least 2×2, not {}×{}".format(width, height)
        )
    labels = np.zeros((height, width), dtype=np.uint8)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    shapes = int(rng.integers(num_categories, 2 * num_categories + 1))
    for _ in range(shapes):
        category = int(rng.integers(1, num_categories))
        shape_h = int(rng.integers(max(1, height // 8), max(2, height // 2) + 1))
        shape_w = int(rng.integers(max(1, width // 8), max(2, width // 2) + 1))
        shape_h = min(shape_h, height)
        shape_w = min(shape_w, width)
        y0 = int(rng.integers(0, height - shape_h + 1))
        x0 = int(rng.integers(0, width - shape_w + 1))
        if rng.random() < 0.5:
            labels[y0 : y0 + shape_h, x0 : x0 + shape_w] = category
        else:
            cy = y0 + shape_h / 2.0
            cx = x0 + shape_w / 2.0
            inside = ((yy + 0.5 - cy) / (shape_h / 2.0)) ** 2 + (
                (xx + 0.5 - cx) / (shape_w / 2.0)
            ) ** 2 <= 1.0
            labels[inside] = category
    if np.unique(labels).size < 2:
        labels[: max(1, height // 2), : max(1, width // 2)] = 1
        labels[-1, -1] = 0

    colours = rng.uniform(0.15, 0.85, size=(num_categories, 3))
    frequencies = rng.uniform(0.1, 0.6, size=(num_categories, 2))
    phases = rng.uniform(0.0, 2.0 * math.pi, size=num_categories)
    texture = TEXTURE_AMPLITUDE * np.sin(
        frequencies[labels, 0] * xx + frequencies[labels, 1] * yy + phases[labels]
    )
    image = colours[labels].transpose(2, 0, 1) + texture[np.newaxis]
    image += rng.normal(0.0, NOISE_SIGMA, size=image.shape)
    image = np.clip(image, 0.0, 1.0).astype(np.float32)
    return image, LabelMap(labels, num_categories)


def gen_dataset(seed, count, size, num_categories):
    """
    Draw ``count`` square scenes; scene ``k`` uses ``SeededRng(seed).child(k)``.

    Returns:
        list: (image, LabelMap) pairs.
    """
    rng = SeededRng(seed)
    return [gen_scene(rng.child(k), size, size, num_categories) for k in range(count)]
