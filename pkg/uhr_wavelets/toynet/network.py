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
A desk-scale two-branch wavelet segmentation network.

The shallow branch reads the Laplacian residuals of the full image and
downsamples with strided 3×3 convolutions to 1/8 and 1/16 resolution. The
deep branch reads the two-level wavelet packet of the image (1/4 resolution,
48 channels), goes down to 1/32 and comes back to 1/8 with a two-level
inverse wavelet transform of a 256-channel projection. The fused 1/8
features give the segmentation logits; an auxiliary head and a
super-resolution head (three-level inverse transform back to the full image)
hang off the deep features during training only.

The deep branch can instead reach 1/4 resolution by bilinear resampling or
with two strided 3×3 convolutions (``downsample="bilinear"`` or ``"cnn"``).
"""

import collections
import logging

import numpy as np

from .. import exceptions, tiler
from ..core import LabelMap, SeededRng
from ..parallel import ordered_map
from ..pyramid import downsample_array, shallow_stack, upsample_adjoint, upsample_array
from ..wavelet import check_divisible, packet_analysis, packet_synthesis
from .layers import ConvLayer


_log = logging.getLogger(__name__)

#: Image extents must be a multiple of this (the deepest stride).
SIZE_MULTIPLE = 32

#: Input channels (RGB).
IMAGE_CHANNELS = 3

#: Channels coming out of the deep branch after the inverse transform.
DEEP_CHANNELS = 16

#: How the deep branch reduces the image to 1/4 resolution: a two-level
#: wavelet packet, bilinear resampling or two strided convolutions.
DOWNSAMPLERS = ("dwt", "bilinear", "cnn")

_ENTRY_CHANNELS = {"dwt": 4 * 4 * IMAGE_CHANNELS, "bilinear": IMAGE_CHANNELS, "cnn": 48}

_SHALLOW = (
    ("shallow1", 6, 16),
    ("shallow2", 16, 32),
    ("shallow3", 32, 32),
    ("shallow4", 32, 32),
)
_DEEP = (
    ("deep1", 32, 64),
    ("deep2", 64, 64),
    ("deep3", 64, 64),
)


#: The outputs of a forward pass. ``aux_logits``, ``i_rec`` and ``cache`` are
#: None for an inference pass.
ForwardResult = collections.namedtuple(
    "ForwardResult", ["seg_logits", "aux_logits", "i_rec", "cache"]
)


def _layer_specs(num_categories, downsample="dwt"):
    layers = [ConvLayer(name, cin, cout, 3, 2) for name, cin, cout in _SHALLOW]
    if downsample == "cnn":
        layers.append(ConvLayer("cnn1", IMAGE_CHANNELS, 16, 3, 2))
        layers.append(ConvLayer("cnn2", 16, _ENTRY_CHANNELS["cnn"], 3, 2))
    layers.append(ConvLayer("deep_entry", _ENTRY_CHANNELS[downsample], 32, 1, 1))
    layers.extend(ConvLayer(name, cin, cout, 3, 2) for name, cin, cout in _DEEP)
    layers.append(ConvLayer("deep_proj", 64, 16 * DEEP_CHANNELS, 1, 1, relu=False))
    layers.append(ConvLayer("fuse", 32 + DEEP_CHANNELS, num_categories, 1, 1, relu=False))
    layers.append(ConvLayer("aux", DEEP_CHANNELS, num_categories, 1, 1, relu=False))
    layers.append(
        ConvLayer("sr", DEEP_CHANNELS, IMAGE_CHANNELS * 4 ** 3, 1, 1, relu=False)
    )
    return layers


def _iwt_channels(x, levels):
    # groups of 4**levels channels become one channel 2**levels times larger
    channels = x.shape[0] // 4 ** levels
    return packet_synthesis(x.reshape((channels, 4 ** levels) + x.shape[1:]), levels)


def _iwt_channels_adjoint(grad, levels):
    nodes = packet_analysis(grad, levels)
    return nodes.reshape((-1,) + nodes.shape[-2:])


class ToyWSDNet(object):
    """
    The toy two-branch network.

    Args:
        num_categories (int): The number of segmentation categories C.
        seed (int): Seed for the uniform ``±1/sqrt(fan_in)`` initialisation.
        dtype: The parameter and activation dtype; float64 is useful for
            gradient checks.
        downsample (str): How the deep branch reaches 1/4 resolution, one of
            :data:`DOWNSAMPLERS`.

    Attributes:
        params (collections.OrderedDict): Parameters keyed
            ``"<layer>.weight"`` and ``"<layer>.bias"``.
    """

    def __init__(self, num_categories, seed=0, dtype=np.float32, downsample="dwt"):
        if num_categories < 2 or num_categories > 255:
            raise exceptions.ModelError(
                "num_categories must lie in 2..255, not {}".format(num_categories)
            )
        if downsample not in DOWNSAMPLERS:
            raise exceptions.ModelError(
                "downsample must be one of {}, not {!r}".format(
                    ", ".join(DOWNSAMPLERS), downsample
                )
            )
        self.num_categories = num_categories
        self.dtype = np.dtype(dtype)
        self.downsample = downsample
        self.layers = collections.OrderedDict(
            (layer.name, layer) for layer in _layer_specs(num_categories, downsample)
        )
        self.params = collections.OrderedDict()
        rng = SeededRng(seed)
        for layer in self.layers.values():
            weight, bias = layer.init_parameters(rng, self.dtype)
            self.params[layer.weight_name] = weight
            self.params[layer.bias_name] = bias

    def parameter_count(self):
        return sum(p.size for p in self.params.values())

    def set_parameters(self, params):
        """
        Replace parameter values.

        Raises:
            exceptions.ModelError: On an unknown name or a shape mismatch.
        """
        for name, value in params.items():
            if name not in self.params:
                raise exceptions.ModelError("unknown parameter {!r}".format(name))
            value = np.asarray(value, dtype=self.dtype)
            if value.shape != self.params[name].shape:
                raise exceptions.ModelError(
                    "parameter {!r} has shape {} but {} was given".format(
                        name, self.params[name].shape, value.shape
                    )
                )
            self.params[name] = value.copy()

    def _apply(self, name, x, cache):
        layer = self.layers[name]
        y, layer_cache = layer.forward(
            x,
            self.params[layer.weight_name],
            self.params[layer.bias_name],
            keep_cache=cache is not None,
        )
        if cache is not None:
            cache[name] = layer_cache
        return y

    def _check_image(self, image):
        image = np.asarray(image)
        if image.ndim != 3 or image.shape[0] != IMAGE_CHANNELS:
            raise exceptions.ShapeError(
                "expected a {}×H×W image, got shape {}".format(IMAGE_CHANNELS, image.shape)
            )
        check_divisible(image.shape[1], image.shape[2], 5)
        return image.astype(self.dtype)

    def _quarter(self, image, cache):
        if self.downsample == "dwt":
            packets = packet_analysis(image, 2)
            return packets.reshape((-1,) + packets.shape[-2:])
        if self.downsample == "bilinear":
            return downsample_array(image, 4)
        return self._apply("cnn2", self._apply("cnn1", image, cache), cache)

    def forward(self, image, train=True):
        """
        Run the network.

        Args:
            image (numpy.ndarray): A 3×H×W image, H and W divisible by 32.
            train (bool): Whether to compute the auxiliary and reconstruction
                heads and keep the cache :meth:`backward` needs.

        Returns:
            ForwardResult: The C×H×W segmentation logits and, when training,
            the C×H×W auxiliary logits, the 3×H×W reconstruction and the cache.

        Raises:
            exceptions.DimensionError: If H or W is not a multiple of 32.
        """
        image = self._check_image(image)
        height, width = image.shape[1:]
        cache = {} if train else None

        x = shallow_stack(image).astype(self.dtype)
        s1 = self._apply("shallow1", x, cache)
        s2 = self._apply("shallow2", s1, cache)
        s3 = self._apply("shallow3", s2, cache)
        s4 = self._apply("shallow4", s3, cache)

        d = self._apply("deep_entry", self._quarter(image, cache), cache)
        d = self._apply("deep1", d, cache)
        d = self._apply("deep2", d, cache)
        d = self._apply("deep3", d, cache)
        d = self._apply("deep_proj", d, cache)
        f_d = _iwt_channels(d, 2)

        eighth = s3.shape[1:]
        shallow = s3 + upsample_array(s4, eighth[0], eighth[1])
        fused = np.concatenate([shallow, f_d], axis=0)
        seg_small = self._apply("fuse", fused, cache)
        seg_logits = upsample_array(seg_small, height, width)
        if not train:
            return ForwardResult(seg_logits, None, None, None)

        aux_small = self._apply("aux", f_d, cache)
        aux_logits = upsample_array(aux_small, height, width)
        i_rec = _iwt_channels(self._apply("sr", f_d, cache), 3)
        cache["shapes"] = {
            "eighth": eighth,
            "sixteenth": s4.shape[1:],
        }
        return ForwardResult(seg_logits, aux_logits, i_rec, cache)

    def _back(self, name, grad, cache, grads, need_input_grad=True):
        layer = self.layers[name]
        grad_x, grad_w, grad_b = layer.backward(
            grad, cache[name], self.params[layer.weight_name], need_input_grad
        )
        grads[layer.weight_name] = grad_w.astype(self.dtype)
        grads[layer.bias_name] = grad_b.astype(self.dtype)
        return grad_x

    def backward(self, cache, grad_seg, grad_aux=None, grad_rec=None):
        """
        Compute parameter gradients from the gradients of the three outputs.

        Args:
            cache (dict): The cache of a training forward pass.
            grad_seg (numpy.ndarray): Gradient of the segmentation logits.
            grad_aux (numpy.ndarray): Gradient of the auxiliary logits, or
                None for zero.
            grad_rec (numpy.ndarray): Gradient of the reconstruction, or None
                for zero.

        Returns:
            collections.OrderedDict: One gradient per parameter, in the order
            of :attr:`params`.

        Raises:
            exceptions.ModelError: If ``cache`` is missing.
        """
        if not cache:
            raise exceptions.ModelError(
                "backward needs the cache of a forward pass run with train=True"
            )
        grads = {}
        eighth = cache["shapes"]["eighth"]
        sixteenth = cache["shapes"]["sixteenth"]
        dtype = self.dtype

        grad_seg = upsample_adjoint(np.asarray(grad_seg, dtype=dtype), eighth[0], eighth[1])
        grad_fused = self._back("fuse", grad_seg, cache, grads)
        grad_shallow = grad_fused[:32]
        grad_fd = grad_fused[32:]

        if grad_aux is not None:
            grad_aux = upsample_adjoint(np.asarray(grad_aux, dtype=dtype), eighth[0], eighth[1])
            grad_fd = grad_fd + self._back("aux", grad_aux, cache, grads)
        if grad_rec is not None:
            grad_sr = _iwt_channels_adjoint(np.asarray(grad_rec, dtype=dtype), 3)
            grad_fd = grad_fd + self._back("sr", grad_sr, cache, grads)

        g = _iwt_channels_adjoint(grad_fd, 2)
        g = self._back("deep_proj", g, cache, grads)
        g = self._back("deep3", g, cache, grads)
        g = self._back("deep2", g, cache, grads)
        g = self._back("deep1", g, cache, grads)
        learned = self.downsample == "cnn"
        g = self._back("deep_entry", g, cache, grads, need_input_grad=learned)
        if learned:
            g = self._back("cnn2", g, cache, grads)
            self._back("cnn1", g, cache, grads, need_input_grad=False)

        g4 = self._back(
            "shallow4",
            upsample_adjoint(grad_shallow, sixteenth[0], sixteenth[1]),
            cache,
            grads,
        )
        g = self._back("shallow3", grad_shallow + g4, cache, grads)
        g = self._back("shallow2", g, cache, grads)
        self._back("shallow1", g, cache, grads, need_input_grad=False)

        ordered = collections.OrderedDict()
        for name, value in self.params.items():
            ordered[name] = grads.get(name, np.zeros_like(value))
        return ordered

    def predict(self, image):
        """
        Segment an image.

        Returns:
            LabelMap: The argmax of the inference segmentation logits.
        """
        logits = self.forward(image, train=False).seg_logits
        return LabelMap(np.argmax(logits, axis=0).astype(np.uint8), self.num_categories)

    def __repr__(self):
        return "ToyWSDNet(num_categories={}, downsample={!r}, parameters={})".format(
            self.num_categories, self.downsample, self.parameter_count()
        )


def predict(net, image):
    """Segment ``image`` with ``net``; see :meth:`ToyWSDNet.predict`."""
    return net.predict(image)


def _pad_to_multiple(x, multiple):
    pad_h = -x.shape[-2] % multiple
    pad_w = -x.shape[-1] % multiple
    if not pad_h and not pad_w:
        return x
    return np.pad(x, ((0, 0), (0, pad_h), (0, pad_w)), mode="edge")


def predict_logits(net, image):
    """
    Inference logits for an image of any size.

    The image is padded by edge replication to a multiple of 32 and the
    logits are cropped back to the input size.
    """
    image = np.asarray(image)
    height, width = image.shape[-2:]
    logits = net.forward(_pad_to_multiple(image, SIZE_MULTIPLE), train=False).seg_logits
    return logits[:, :height, :width]


def predict_tiled(net, image, plan, threads=1):
    """
    Sliding-window inference.

    Every window of ``plan`` is segmented on its own and the logits are
    averaged where windows overlap before taking the argmax.

    Args:
        net (ToyWSDNet): The network.
        image (numpy.ndarray): A 3×H×W image matching the plan.
        plan (tiler.TilePlan): The windows.
        threads (int): Worker threads for the windows.

    Returns:
        LabelMap: The merged prediction.
    """
    patches = tiler.crop_array(plan, image)
    logits = ordered_map(lambda patch: predict_logits(net, patch), patches, threads)
    merged = tiler.merge_logits(plan, logits)
    _log.debug(
        "merged window logits",
        extra={"fields": {"windows": len(plan.windows), "threads": threads}},
    )
    return LabelMap(np.argmax(merged, axis=0).astype(np.uint8), net.num_categories)
