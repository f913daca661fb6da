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
Deterministic worker parallelism.

Work items are independent (channels, tiles, images), but every reduction over
their results happens in input order. Running with one thread or many
therefore produces byte-identical outputs.
"""

from concurrent import futures
import logging


_log = logging.getLogger(__name__)


def ordered_map(func, items, threads=1):
    """
    Apply ``func`` to every item, in a thread pool when ``threads`` > 1.

    Args:
        func (callable): A function of one argument.
        items (iterable): The work items.
        threads (int): The maximum number of worker threads.

    Returns:
        list: The results, in the same order as ``items``.

    Raises:
        ValueError: If ``threads`` is less than 1.
    """
    if threads < 1:
        raise ValueError("threads must be at least 1, not {}".format(threads))
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [func(item) for item in items]
    _log.debug(
        "mapping over work items",
        extra={"fields": {"items": len(items), "threads": threads}},
    )
    with futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
