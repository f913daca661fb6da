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
The Scene Context Richness statistic of a set of label maps.

Random regions are cut from each map. In every region the pixel fraction
``p_c`` and the number of object instances of each category are measured;
an instance is a 4-connected component of at least ``min_area`` pixels.
Averaging over regions gives ``O_c`` (instances) and ``p_c`` (fraction), and

    R = - sum_c O_c ** (1 / q) * p_c * ln(p_c)

with categories where ``p_c == 0`` contributing nothing.
"""

import collections
import logging
import math

import numpy as np
from scipy import ndimage

from . import exceptions
from .core import IGNORE_LABEL
from .parallel import ordered_map


_log = logging.getLogger(__name__)

#: The default region size as (height, width).
DEFAULT_REGION = (512, 512)

# 4-connectivity: edge neighbours only
_FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


#: The connected components of one category: how many survived the area
#: filter, an image numbering them 1..count (0 elsewhere), and their areas.
Components = collections.namedtuple("Components", ["count", "label_image", "areas"])


#: Statistics of one sampled region. ``window`` is a (y0, x0, height, width)
#: tuple; ``fractions`` and ``instances`` map category ids to the pixel
#: fraction and the instance count; ``valid_pixels`` counts non-ignore pixels.
RegionStats = collections.namedtuple(
    "RegionStats", ["window", "fractions", "instances", "valid_pixels"]
)


class RichnessReport(
    collections.namedtuple(
        "RichnessReport",
        [
            "R",
            "q",
            "per_category",
            "region_count",
            "region_size",
            "mean_categories",
            "mean_instances",
        ],
    )
):
    """
    The richness of a set of regions.

    Attributes:
        R (float): The richness score.
        q (float): The temperature used.
        per_category (list): ``{"id", "O", "p"}`` dicts sorted by id.
        region_count (int): The number of regions averaged.
        region_size (tuple): The (height, width) of the regions, or None when
            the regions had different sizes.
        mean_categories (float): The average number of categories per region.
        mean_instances (float): The average number of instances per region.
    """

    __slots__ = ()

    def as_dict(self, regions_per_image=None, summary=False):
        """The JSON document written by the "richness" command."""
        document = {
            "R": self.R,
            "q": self.q,
            "region_size": list(self.region_size) if self.region_size else None,
            "regions_per_image": (
                self.region_count if regions_per_image is None else regions_per_image
            ),
            "per_category": self.per_category,
        }
        if summary:
            document["mean_categories"] = self.mean_categories
            document["mean_instances"] = self.mean_instances
        return document


def connected_components(labels, category, min_area=32, num_categories=None):
    """
    Find the instances of one category.

    Args:
        labels (LabelMap or numpy.ndarray): The label map.
        category (int): The category id.
        min_area (int): Components smaller than this many pixels are dropped.
        num_categories (int): The category count; taken from the label map
            when it declares one.

    Returns:
        Components: The surviving components, renumbered from 1.

    Raises:
        exceptions.LabelError: If the category is not below the category count.
    """
    if num_categories is None:
        num_categories = getattr(labels, "num_categories", None)
    if category < 0 or (num_categories is not None and category >= num_categories):
        raise exceptions.LabelError(
            "category {} is out of range for {} categories".format(category, num_categories)
        )
    labels = np.asarray(labels)
    component_image, found = ndimage.label(labels == category, structure=_FOUR_CONNECTED)
    if found == 0:
        return Components(0, component_image, np.zeros(0, dtype=np.int64))
    areas = np.bincount(component_image.ravel(), minlength=found + 1)[1:]
    keep = areas >= min_area
    # new id for every old id, 0 for dropped components
    renumber = np.zeros(found + 1, dtype=component_image.dtype)
    renumber[1:][keep] = np.arange(1, int(keep.sum()) + 1)
    return Components(int(keep.sum()), renumber[component_image], areas[keep])


def region_stats(labels, window, min_area=32):
    """
    Measure one region of a label map.

    Args:
        labels (numpy.ndarray): The full label map.
        window (tuple): The (y0, x0, height, width) of the region.
        min_area (int): The minimum instance area.

    Returns:
        RegionStats: The statistics; categories absent from the region don't
        appear in ``fractions`` or ``instances``.
    """
    y0, x0, height, width = window
    crop = np.asarray(labels)[y0 : y0 + height, x0 : x0 + width]
    valid = crop[crop != IGNORE_LABEL]
    fractions = {}
    instances = {}
    if valid.size:
        counts = np.bincount(valid, minlength=IGNORE_LABEL)
        for category in np.flatnonzero(counts):
            category = int(category)
            fractions[category] = float(counts[category]) / valid.size
            instances[category] = connected_components(crop, category, min_area).count
    return RegionStats(tuple(window), fractions, instances, int(valid.size))


def sample_regions(labels, rng, region=DEFAULT_REGION, count=64, min_area=32):
    """
    Sample regions uniformly by their top-left corner and measure them.

    Args:
        labels (LabelMap or numpy.ndarray): The label map.
        rng (SeededRng): The random source.
        region (tuple): The (height, width) of each region.
        count (int): The number of regions.
        min_area (int): The minimum instance area.

    Returns:
        list: ``count`` :class:`RegionStats`.

    Raises:
        exceptions.DimensionError: If the region is larger than the map.
    """
    labels = np.asarray(labels)
    height, width = int(region[0]), int(region[1])
    if height > labels.shape[0] or height < 1:
        raise exceptions.DimensionError(
            "height",
            height,
            reason="region must fit in the {}-pixel label map".format(labels.shape[0]),
        )
    if width > labels.shape[1] or width < 1:
        raise exceptions.DimensionError(
            "width",
            width,
            reason="region must fit in the {}-pixel label map".format(labels.shape[1]),
        )
    stats = []
    for _ in range(count):
        y0 = int(rng.integers(0, labels.shape[0] - height + 1))
        x0 = int(rng.integers(0, labels.shape[1] - width + 1))
        stats.append(region_stats(labels, (y0, x0, height, width), min_area))
    return stats


def sample_dataset(label_maps, rng, region=DEFAULT_REGION, count=64, min_area=32, threads=1):
    """
    Sample ``count`` regions from every map.

    Map ``k`` draws from ``rng.child(k)``, so the result doesn't depend on the
    thread count.

    Returns:
        list: The region statistics, map by map in input order.
    """

    def _sample(item):
        index, labels = item
        return sample_regions(labels, rng.child(index), region, count, min_area)

    stats = []
    for per_map in ordered_map(_sample, list(enumerate(label_maps)), threads):
        stats.extend(per_map)
    return stats


def richness_score(stats, q=2.0):
    """
    Compute the richness of a set of regions.

    Args:
        stats (list): The :class:`RegionStats` to average.
        q (float): The temperature weighting the instance counts.

    Returns:
        RichnessReport: The score and its per-category parts.

    Raises:
        exceptions.DataError: If ``stats`` is empty or ``q`` isn't positive.
    """
    if not stats:
        raise exceptions.DataError("richness needs at least one region")
    if q <= 0:
        raise exceptions.DataError("q must be positive, not {}".format(q))
    categories = sorted(set(c for s in stats for c in s.fractions))
    total = len(stats)
    richness = 0.0
    per_category = []
    for category in categories:
        o_c = math.fsum(s.instances.get(category, 0) for s in stats) / total
        p_c = math.fsum(s.fractions.get(category, 0.0) for s in stats) / total
        if p_c > 0:
            richness -= o_c ** (1.0 / q) * p_c * math.log(p_c)
        per_category.append({"id": category, "O": o_c, "p": p_c})
    sizes = set(s.window[2:] for s in stats)
    region_size = sizes.pop() if len(sizes) == 1 else None
    mean_categories = math.fsum(len(s.fractions) for s in stats) / total
    mean_instances = math.fsum(sum(s.instances.values()) for s in stats) / total
    return RichnessReport(
        richness, q, per_category, total, region_size, mean_categories, mean_instances
    )
