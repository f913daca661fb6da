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
Plane, tensor and label map types, the seeded random number generator, and
the file formats shared by every other module.

Samples are stored as 32-bit floats in row-major order. Reductions accumulate
in 64 bits.

Raw tensor format
=================

All integers and floats are little-endian::

    "UTSR"                        4 bytes of magic
    rank                          unsigned 32-bit
    extent[0] .. extent[rank-1]   unsigned 32-bit each
    data                          32-bit floats, row-major

A 2×2 tensor therefore takes 4 + 4 + 8 + 16 = 32 bytes.
"""

import logging

import numpy as np
from PIL import Image

from . import exceptions


_log = logging.getLogger(__name__)

#: The label value excluded from losses, metrics and statistics.
IGNORE_LABEL = 255

RAW_MAGIC = b"UTSR"

_U32 = np.dtype("<u4")
_F32 = np.dtype("<f4")
_MAX_EXTENT = 2 ** 32 - 1


def _frozen(array, dtype):
    array = np.array(array, dtype=dtype, order="C", copy=True)
    array.setflags(write=False)
    return array


class Plane(object):
    """
    A single image or feature channel.

    Planes are immutable; the underlying array is read-only. A plane can be
    handed to any numpy function since it implements ``__array__``.

    Args:
        data (numpy.ndarray): A two-dimensional array of samples. It is copied
            and stored as 32-bit floats.

    Raises:
        exceptions.ShapeError: If ``data`` is not two-dimensional or is empty.
    """

    def __init__(self, data):
        data = np.asarray(data)
        if data.ndim != 2:
            raise exceptions.ShapeError(
                "a plane must be two-dimensional, not {}-dimensional".format(data.ndim)
            )
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise exceptions.ShapeError(
                "a plane must be at least 1x1, not {}x{}".format(*data.shape)
            )
        self.data = _frozen(data, np.float32)

    @classmethod
    def from_array(cls, data):
        """Build a plane from any two-dimensional array-like object."""
        return cls(data)

    @classmethod
    def zeros(cls, height, width):
        return cls(np.zeros((height, width), dtype=np.float32))

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def energy(self):
        """The sum of squared samples, accumulated in 64 bits."""
        return float(np.sum(np.square(self.data, dtype=np.float64)))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, Plane):
            return False
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "Plane(height={}, width={})".format(self.height, self.width)


class Tensor(object):
    """
    An n-dimensional block of samples, the unit of the raw tensor format.

    Args:
        data (numpy.ndarray): The samples. Stored as 32-bit floats.
        dims (tuple): Optional extents; ``data`` is reshaped to them.

    Raises:
        exceptions.ShapeError: If the product of ``dims`` doesn't match the
            number of samples.
        exceptions.FormatError: If the tensor has rank 0.
    """

    def __init__(self, data, dims=None):
        data = np.asarray(data)
        if dims is not None:
            dims = tuple(int(d) for d in dims)
            if int(np.prod(dims, dtype=np.int64)) != data.size:
                raise exceptions.ShapeError(
                    "dims {} hold {} samples but {} were provided".format(
                        list(dims), int(np.prod(dims, dtype=np.int64)), data.size
                    )
                )
            data = data.reshape(dims)
        if data.ndim < 1:
            raise exceptions.FormatError("a tensor must have rank 1 or more")
        self.data = _frozen(data, np.float32)

    @property
    def dims(self):
        return tuple(self.data.shape)

    @property
    def rank(self):
        return self.data.ndim

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return False
        return self.dims == other.dims and np.array_equal(self.data, other.data)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "Tensor(dims={})".format(list(self.dims))


class LabelMap(object):
    """
    A map of category identifiers, one per pixel.

    Args:
        labels (numpy.ndarray): A two-dimensional array of integer ids in
            0..255. The value :data:`IGNORE_LABEL` marks pixels to skip.
        num_categories (int): The declared category count C, if known. When
            given, the map is validated against it.

    Raises:
        exceptions.ShapeError: If ``labels`` is not two-dimensional.
        exceptions.LabelError: If a value doesn't fit in 8 bits or a non-ignore
            value is not below ``num_categories``.
    """

    ignore_value = IGNORE_LABEL

    def __init__(self, labels, num_categories=None):
        labels = np.asarray(labels)
        if labels.ndim != 2 or labels.size == 0:
            raise exceptions.ShapeError(
                "a label map must be a non-empty two-dimensional array, not "
                "shape {}".format(labels.shape)
            )
        if labels.size and (labels.min() < 0 or labels.max() > 255):
            raise exceptions.LabelError("label values must lie in 0..255")
        self.labels = _frozen(labels, np.uint8)
        self.num_categories = num_categories
        if num_categories is not None:
            self.validate(num_categories)

    @property
    def height(self):
        return self.labels.shape[0]

    @property
    def width(self):
        return self.labels.shape[1]

    @property
    def shape(self):
        return self.labels.shape

    def valid_mask(self):
        """A boolean array that is true wherever the label is not ignored."""
        return self.labels != IGNORE_LABEL

    def categories(self):
        """The sorted list of category ids present, ignore excluded."""
        present = np.unique(self.labels)
        return [int(c) for c in present if c != IGNORE_LABEL]

    def validate(self, num_categories):
        """
        Check every non-ignore label is below ``num_categories``.

        Raises:
            exceptions.LabelError: If an out-of-range label is present.
        """
        valid = self.labels[self.valid_mask()]
        if valid.size and int(valid.max()) >= num_categories:
            raise exceptions.LabelError(
                "label {} is out of range for {} categories".format(
                    int(valid.max()), num_categories
                )
            )

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.labels
        return self.labels.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, LabelMap):
            return False
        return self.shape == other.shape and np.array_equal(self.labels, other.labels)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "LabelMap(height={}, width={}, num_categories={})".format(
            self.height, self.width, self.num_categories
        )


class SeededRng(object):
    """
    A deterministic random number generator.

    The generator is numpy's PCG64 bit generator driven through
    :class:`numpy.random.Generator`. Its output stream depends only on the
    seed, so identical seeds give identical samples on every platform.

    Args:
        seed (int): A non-negative integer below 2**64.
    """

    algorithm = "PCG64"

    def __init__(self, seed=0):
        seed = int(seed)
        if seed < 0 or seed >= 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer, not {}".format(seed))
        self.seed = seed
        self._generator = np.random.Generator(np.random.PCG64(seed))

    def child(self, key):
        """
        Derive an independent generator for a sub-task.

        The child depends only on this generator's seed and ``key``, never on
        how many samples have been drawn, so work split across threads stays
        reproducible.

        Args:
            key (int): A non-negative integer identifying the sub-task.

        Returns:
            SeededRng: A new generator.
        """
        sequence = np.random.SeedSequence([self.seed, int(key)])
        child = SeededRng.__new__(SeededRng)
        child.seed = int(sequence.generate_state(1, dtype=np.uint64)[0])
        child._generator = np.random.Generator(np.random.PCG64(sequence))
        return child

    def random(self, size=None):
        return self._generator.random(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._generator.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._generator.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        """Draw integers from the half-open range [low, high)."""
        return self._generator.integers(low, high, size)

    def permutation(self, n):
        return self._generator.permutation(n)

    def __repr__(self):
        return "SeededRng(seed={})".format(self.seed)


def _open_png(path):
    try:
        image = Image.open(path)
        image.load()
    except (IOError, OSError, SyntaxError, ValueError) as e:
        _log.debug("PNG decode failed", extra={"fields": {"path": str(path)}})
        raise exceptions.DecodeError(str(path), str(e))
    if image.format != "PNG":
        raise exceptions.DecodeError(
            str(path), "expected a PNG file, found {}".format(image.format)
        )
    return image


def _eight_bit_array(image, path, modes):
    if image.mode in ("I", "I;16", "I;16B", "I;16L", "F", "1"):
        raise exceptions.UnsupportedDepthError(
            str(path), "mode {} is not 8 bits per sample".format(image.mode)
        )
    if image.mode not in modes:
        raise exceptions.DecodeError(
            str(path),
            "mode {} is not supported; expected one of {}".format(
                image.mode, ", ".join(modes)
            ),
        )
    return np.asarray(image, dtype=np.uint8)


def read_plane_png(path):
    """
    Read an 8-bit grayscale or RGB PNG file.

    Each byte ``v`` becomes the sample ``v / 255``.

    Args:
        path (str): The file to read.

    Returns:
        list: One :class:`Plane` for a grayscale file, three for RGB.

    Raises:
        exceptions.DecodeError: If the file is not a readable PNG file.
        exceptions.UnsupportedDepthError: If the file is not 8 bits per sample.
    """
    image = _open_png(path)
    pixels = _eight_bit_array(image, path, ("L", "RGB"))
    samples = pixels.astype(np.float32) / np.float32(255.0)
    if samples.ndim == 2:
        return [Plane(samples)]
    return [Plane(samples[:, :, c]) for c in range(samples.shape[2])]


def png_mode(path):
    """
    The Pillow mode of a PNG file, such as "L" for grayscale or "RGB".

    Raises:
        exceptions.DecodeError: If the file is not a readable PNG file.
    """
    return _open_png(path).mode


def planes_to_array(planes):
    """Stack planes into a C×H×W float32 array."""
    return np.stack([np.asarray(p, dtype=np.float32) for p in planes])


def write_plane_png(planes, path):
    """
    Write one or three planes to an 8-bit PNG file.

    Samples are scaled by 255, rounded and clipped to 0..255, which makes
    :func:`read_plane_png` followed by this function lossless.

    Args:
        planes (list or numpy.ndarray): One or three planes, or a C×H×W array.
        path (str): The file to write.

    Raises:
        exceptions.ShapeError: If there isn't one or three channels.
    """
    if isinstance(planes, (list, tuple)):
        samples = planes_to_array(planes).astype(np.float64)
    else:
        samples = np.asarray(planes, dtype=np.float64)
    if samples.ndim == 2:
        samples = samples[np.newaxis]
    if samples.shape[0] not in (1, 3):
        raise exceptions.ShapeError(
            "PNG output needs 1 or 3 channels, not {}".format(samples.shape[0])
        )
    pixels = np.clip(np.rint(samples * 255.0), 0, 255).astype(np.uint8)
    if pixels.shape[0] == 1:
        Image.fromarray(pixels[0]).save(path, format="PNG")
    else:
        Image.fromarray(np.ascontiguousarray(pixels.transpose(1, 2, 0))).save(
            path, format="PNG"
        )


def read_label_png(path, num_categories=None):
    """
    Read a label map stored as an 8-bit grayscale or palette PNG file.

    Palette files contribute their palette indices, not their colours.

    Args:
        path (str): The file to read.
        num_categories (int): The declared category count, if known.

    Returns:
        LabelMap: The label map.

    Raises:
        exceptions.DecodeError: If the file is not a readable PNG file.
        exceptions.UnsupportedDepthError: If the file is not 8 bits per sample.
        exceptions.LabelError: If a label is out of range.
    """
    image = _open_png(path)
    return LabelMap(_eight_bit_array(image, path, ("L", "P")), num_categories)


def write_label_png(label_map, path):
    """Write a :class:`LabelMap` as an 8-bit grayscale PNG file."""
    Image.fromarray(np.ascontiguousarray(label_map, dtype=np.uint8)).save(
        path, format="PNG"
    )


def encode_raw_tensor(tensor):
    """
    Encode a tensor in the raw tensor format.

    Args:
        tensor (Tensor or numpy.ndarray): The tensor to encode.

    Returns:
        bytes: The encoded tensor.

    Raises:
        exceptions.FormatError: If an extent doesn't fit in 32 bits or the
            tensor has rank 0.
    """
    if not isinstance(tensor, Tensor):
        tensor = Tensor(tensor)
    for extent in tensor.dims:
        if extent > _MAX_EXTENT:
            raise exceptions.FormatError(
                "extent {} does not fit in an unsigned 32-bit integer".format(extent)
            )
    header = np.array([tensor.rank] + list(tensor.dims), dtype=_U32).tobytes()
    return RAW_MAGIC + header + tensor.data.astype(_F32).tobytes(order="C")


def decode_raw_tensor(payload, source="<bytes>"):
    """
    Decode a tensor from the raw tensor format.

    Args:
        payload (bytes): The encoded tensor.
        source (str): A description of where the bytes came from, used in
            error messages.

    Returns:
        Tensor: The decoded tensor.

    Raises:
        exceptions.FormatError: On a bad magic, a zero rank, a short read,
            an extent overflow or trailing bytes.
    """
    if len(payload) < 8:
        raise exceptions.FormatError("{}: short read in header".format(source))
    if payload[:4] != RAW_MAGIC:
        raise exceptions.FormatError(
            "{}: bad magic {!r}, expected {!r}".format(source, payload[:4], RAW_MAGIC)
        )
    rank = int(np.frombuffer(payload, dtype=_U32, count=1, offset=4)[0])
    if rank < 1:
        raise exceptions.FormatError("{}: rank must be at least 1".format(source))
    data_offset = 8 + 4 * rank
    if len(payload) < data_offset:
        raise exceptions.FormatError("{}: short read in extents".format(source))
    dims = [int(d) for d in np.frombuffer(payload, dtype=_U32, count=rank, offset=8)]
    count = 1
    for extent in dims:
        count *= extent
    expected = data_offset + 4 * count
    if count * 4 > len(payload):
        raise exceptions.FormatError(
            "{}: extents {} overflow the {}-byte file".format(source, dims, len(payload))
        )
    if len(payload) < expected:
        raise exceptions.FormatError(
            "{}: short read, expected {} bytes but found {}".format(
                source, expected, len(payload)
            )
        )
    if len(payload) > expected:
        raise exceptions.FormatError(
            "{}: {} trailing bytes after the data".format(source, len(payload) - expected)
        )
    data = np.frombuffer(payload, dtype=_F32, count=count, offset=data_offset)
    return Tensor(data.astype(np.float32), dims)


def write_raw_tensor(tensor, path):
    """Write ``tensor`` to ``path`` in the raw tensor format."""
    payload = encode_raw_tensor(tensor)
    with open(path, "wb") as fd:
        fd.write(payload)
    _log.debug(
        "wrote raw tensor",
        extra={"fields": {"path": str(path), "bytes": len(payload)}},
    )


def read_raw_tensor(path):
    """Read a :class:`Tensor` from a raw tensor file."""
    with open(path, "rb") as fd:
        payload = fd.read()
    return decode_raw_tensor(payload, source=str(path))
