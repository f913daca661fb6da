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
Once you've written code on top of the transforms, losses or the toy
network, you'll probably want to test it. The :mod:`uhr_wavelets.testing`
module has utilities for common test patterns: seeded random inputs, a
finite-difference gradient check and configuration overrides.

If you find yourself implementing a pattern over and over in your test code,
consider contributing it here!
"""

from contextlib import contextmanager

import numpy as np

try:
    from unittest import mock
except ImportError:
    import mock

from . import config
from .core import SeededRng


def random_planes(seed, shape, dtype=np.float64, low=0.0, high=1.0):
    """
    Draw uniformly distributed samples of the given shape from ``SeededRng(seed)``.

    Args:
        seed (int): The seed.
        shape (tuple): The array shape, for example (3, 16, 16).
        dtype: The array dtype.
        low (float): The lower bound.
        high (float): The upper bound.

    Returns:
        numpy.ndarray: The samples.
    """
    return SeededRng(seed).uniform(low, high, size=shape).astype(dtype)


def relative_error(actual, expected, floor=1e-8):
    """
    The largest absolute difference relative to the larger magnitude of the
    two inputs, never dividing by less than ``floor``.
    """
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    scale = max(
        float(np.max(np.abs(actual), initial=0.0)),
        float(np.max(np.abs(expected), initial=0.0)),
        floor,
    )
    return float(np.max(np.abs(actual - expected), initial=0.0)) / scale


def numerical_gradient(func, x, indices, eps=1e-6):
    """
    Central finite differences of a scalar function at some entries of ``x``.

    Args:
        func (callable): Maps an array shaped like ``x`` to a float.
        x (numpy.ndarray): The point, ideally float64.
        indices (list): Multi-indices of the entries to check.
        eps (float): The step.

    Returns:
        numpy.ndarray: One derivative per index.
    """
    x = np.array(x, dtype=np.float64)
    derivatives = []
    for index in indices:
        index = tuple(index)
        original = x[index]
        x[index] = original + eps
        plus = func(x)
        x[index] = original - eps
        minus = func(x)
        x[index] = original
        derivatives.append((plus - minus) / (2.0 * eps))
    return np.array(derivatives)


def sample_indices(shape, count, seed=0):
    """Pick ``count`` random multi-indices into an array of ``shape``."""
    rng = SeededRng(seed)
    flat = rng.permutation(int(np.prod(shape)))[:count]
    return [np.unravel_index(int(i), shape) for i in flat]


def assert_gradient_close(func, x, gradient, samples=20, eps=1e-6, rtol=1e-3, seed=0):
    """
    Compare an analytic gradient with central finite differences at randomly
    chosen entries.

    Args:
        func (callable): Maps an array shaped like ``x`` to a float.
        x (numpy.ndarray): The point.
        gradient (numpy.ndarray): The analytic gradient at ``x``.
        samples (int): The number of entries to check; all entries if None.
        eps (float): The finite-difference step.
        rtol (float): The largest acceptable :func:`relative_error`.
        seed (int): Seed used to pick the entries.

    Raises:
        AssertionError: If the gradients disagree.
    """
    x = np.asarray(x)
    gradient = np.asarray(gradient)
    if gradient.shape != x.shape:
        raise AssertionError(
            "Gradient shape {} does not match input shape {}".format(gradient.shape, x.shape)
        )
    if samples is None or samples >= x.size:
        indices = list(np.ndindex(*x.shape))
    else:
        indices = sample_indices(x.shape, samples, seed)
    numeric = numerical_gradient(func, x, indices, eps)
    analytic = np.array([gradient[index] for index in indices], dtype=np.float64)
    error = relative_error(analytic, numeric)
    if error > rtol:
        raise AssertionError(
            "Analytic and numerical gradients differ by {:.3g} (tolerance {:.3g})".format(
                error, rtol
            )
        )


@contextmanager
def configured(**settings):
    """
    Override configuration settings for the duration of a ``with`` block.

    Sections are merged key by key, so only the keys given change:

        >>> from uhr_wavelets import config, testing
        >>> with testing.configured(seed=7, tiler={"overlap": 0}):
        ...     config.conf["tiler"]["patch"], config.conf["tiler"]["overlap"]
        (1000, 0)

    Args:
        **settings: Top-level settings, or dicts of section settings.
    """
    values = {}
    for key, value in settings.items():
        if isinstance(value, dict) and isinstance(config.conf.get(key), dict):
            section = dict(config.conf[key])
            section.update(value)
            value = section
        values[key] = value
    with mock.patch.dict(config.conf, values):
        yield config.conf
