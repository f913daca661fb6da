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
The training objective: the Wavelet Smooth Loss (WSL), pixel cross-entropy,
and their weighted combination. Every loss comes with its analytic gradient.

The WSL compares a reference image ``i`` with a reconstruction ``i_rec`` in
the wavelet-packet domain. At every level ``l`` in 1..L and for every packet
parent, the low-frequency child contributes ``lambda1 * mean(diff ** 2)``
and the three high-frequency children contribute ``lambda2 * mean(|diff|)``.
The parts are summed over levels, parents and channels, then divided by the
channel count.

The combined loss is ``seg + lambda3 * aux + wsl + sr``, where ``sr`` is the
plain pixel-space reconstruction loss and is zero unless selected with
``recon="pixel"``.
"""

import collections
import logging

import numpy as np
from scipy import special

from . import exceptions
from .core import IGNORE_LABEL
from .wavelet import check_divisible, haar_analysis, scatter_levels


_log = logging.getLogger(__name__)

#: The reconstruction losses the combined objective can use.
RECON_MODES = ("wsl", "pixel", "none")


class LossWeights(object):
    """
    Weights of the combined objective.

    The defaults are the values used for the published experiments.

    Args:
        lambda1 (float): Weight of the low-frequency (squared) WSL term.
        lambda2 (float): Weight of the high-frequency (absolute) WSL term.
        lambda3 (float): Weight of the auxiliary segmentation loss.
        depth (int): The number of wavelet-packet levels L.
        recon (str): The reconstruction loss, one of :data:`RECON_MODES`.

    Raises:
        ValueError: If a weight is negative, the depth is below 1, or the
            reconstruction mode is unknown.
    """

    def __init__(self, lambda1=1.0, lambda2=0.8, lambda3=0.1, depth=3, recon="wsl"):
        for name, value in (("lambda1", lambda1), ("lambda2", lambda2), ("lambda3", lambda3)):
            if value < 0:
                raise ValueError("{} must not be negative, not {}".format(name, value))
        if int(depth) != depth or depth < 1:
            raise ValueError("depth must be an integer of at least 1, not {}".format(depth))
        if recon not in RECON_MODES:
            raise ValueError(
                "recon must be one of {}, not {!r}".format(", ".join(RECON_MODES), recon)
            )
        self.lambda1 = float(lambda1)
        self.lambda2 = float(lambda2)
        self.lambda3 = float(lambda3)
        self.depth = int(depth)
        self.recon = recon

    @classmethod
    def from_config(cls, section):
        """Build weights from the ``loss`` section of the configuration."""
        return cls(
            lambda1=section["lambda1"],
            lambda2=section["lambda2"],
            lambda3=section["lambda3"],
            depth=section["depth"],
            recon=section["recon"],
        )

    def replace(self, **changes):
        """Return a copy with some weights changed."""
        values = dict(
            lambda1=self.lambda1,
            lambda2=self.lambda2,
            lambda3=self.lambda3,
            depth=self.depth,
            recon=self.recon,
        )
        values.update(changes)
        return LossWeights(**values)

    def __eq__(self, other):
        return isinstance(other, LossWeights) and self.__dict__ == other.__dict__

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return (
            "LossWeights(lambda1={}, lambda2={}, lambda3={}, depth={}, recon={!r})".format(
                self.lambda1, self.lambda2, self.lambda3, self.depth, self.recon
            )
        )


#: The WSL value and its low- and high-frequency parts (value == low + high).
WslValue = collections.namedtuple("WslValue", ["value", "low", "high"])

#: A cross-entropy value and its gradient with respect to the logits.
CrossEntropy = collections.namedtuple("CrossEntropy", ["value", "gradient"])

#: Gradients of the combined loss with respect to the segmentation logits,
#: the auxiliary logits (already scaled by lambda3) and the reconstruction.
LossGradients = collections.namedtuple("LossGradients", ["seg", "aux", "rec"])


class LossReport(
    collections.namedtuple(
        "LossReport", ["total", "seg", "aux", "wsl", "wsl_low", "wsl_high", "sr"]
    )
):
    """
    The parts of the combined loss.

    ``total == seg + lambda3 * aux + wsl + sr``; ``sr`` is zero unless the
    pixel reconstruction loss is selected.
    """

    __slots__ = ()

    def as_dict(self):
        return dict((key, float(value)) for key, value in self._asdict().items())


def _as_channels(x):
    if isinstance(x, (list, tuple)):
        x = np.stack([np.asarray(p) for p in x])
    else:
        x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.floating):
        x = x.astype(np.float32)
    if x.ndim == 2:
        return x[np.newaxis]
    if x.ndim != 3:
        raise exceptions.ShapeError(
            "expected a plane or a C×H×W stack, got shape {}".format(x.shape)
        )
    return x


def _shape_of(x):
    if isinstance(x, (list, tuple)):
        return (len(x),) + np.shape(np.asarray(x[0]))
    return np.shape(np.asarray(x))


def _difference(i, i_rec):
    ref = _as_channels(i)
    rec = _as_channels(i_rec)
    if ref.shape != rec.shape:
        raise exceptions.ShapeError(
            "reference shape {} does not match reconstruction shape {}".format(
                ref.shape, rec.shape
            )
        )
    dtype = np.result_type(ref.dtype, rec.dtype)
    return ref.astype(dtype) - rec.astype(dtype)


def _wsl(diff, weights, with_gradient):
    channels, height, width = diff.shape
    check_divisible(height, width, weights.depth)
    dtype = diff.dtype
    low = 0.0
    high = 0.0
    level_grads = [None]
    nodes = diff[:, np.newaxis]
    for _ in range(weights.depth):
        children = haar_analysis(nodes)
        count = children.shape[-2] * children.shape[-1]
        lows = children[:, :, 0]
        highs = children[:, :, 1:]
        low += weights.lambda1 * float(
            np.sum(np.square(lows, dtype=np.float64)) / count
        )
        high += weights.lambda2 * float(
            np.sum(np.abs(highs), dtype=np.float64) / count
        )
        if with_gradient:
            grad = np.empty_like(children)
            grad[:, :, 0] = lows * dtype.type(2.0 * weights.lambda1 / count)
            grad[:, :, 1:] = np.sign(highs) * dtype.type(weights.lambda2 / count)
            level_grads.append(grad.reshape((channels, -1) + grad.shape[-2:]))
        nodes = children.reshape((channels, -1) + children.shape[-2:])
    value = WslValue((low + high) / channels, low / channels, high / channels)
    if not with_gradient:
        return value, None
    grad_diff = scatter_levels(level_grads) / dtype.type(channels)
    return value, grad_diff


def wsl_value(i, i_rec, weights=None):
    """
    The Wavelet Smooth Loss between a reference and a reconstruction.

    Args:
        i (Plane, list, or numpy.ndarray): The reference: a plane, a list of
            planes, or an H×W or C×H×W array.
        i_rec: The reconstruction, shaped like ``i``.
        weights (LossWeights): The weights and depth; defaults apply if None.

    Returns:
        WslValue: The loss and its low- and high-frequency parts.

    Raises:
        exceptions.ShapeError: If the inputs differ in shape.
        exceptions.DimensionError: If H or W isn't divisible by 2**depth.
    """
    weights = weights or LossWeights()
    value, _ = _wsl(_difference(i, i_rec), weights, with_gradient=False)
    return value


def wsl_gradient(i, i_rec, weights=None):
    """
    The gradient of :func:`wsl_value` with respect to ``i_rec``.

    The absolute value has subgradient 0 where a high-frequency difference is
    exactly zero.

    Returns:
        numpy.ndarray: The gradient, shaped like ``i_rec``.
    """
    return wsl_value_and_gradient(i, i_rec, weights)[1]


def wsl_value_and_gradient(i, i_rec, weights=None):
    """Compute :func:`wsl_value` and :func:`wsl_gradient` in one pass."""
    weights = weights or LossWeights()
    value, grad_diff = _wsl(_difference(i, i_rec), weights, with_gradient=True)
    # d(i - i_rec) / d(i_rec) = -1
    return value, -grad_diff.reshape(_shape_of(i_rec))


def pixel_recon_value(i, i_rec):
    """The mean squared difference between reference and reconstruction."""
    diff = _difference(i, i_rec)
    return float(np.mean(np.square(diff, dtype=np.float64)))


def pixel_recon_gradient(i, i_rec):
    """The gradient of :func:`pixel_recon_value` with respect to ``i_rec``."""
    diff = _difference(i, i_rec)
    return (diff * diff.dtype.type(-2.0 / diff.size)).reshape(_shape_of(i_rec))


def cross_entropy(logits, labels):
    """
    Mean pixel cross-entropy over the non-ignore pixels.

    Args:
        logits (numpy.ndarray): A C×H×W array of unnormalised scores.
        labels (LabelMap or numpy.ndarray): An H×W map of category ids, with
            :data:`~uhr_wavelets.core.IGNORE_LABEL` marking skipped pixels.

    Returns:
        CrossEntropy: The loss and its C×H×W gradient
        ``(softmax - onehot) / N_valid``, zero at ignored pixels.

    Raises:
        exceptions.ShapeError: If the spatial shapes differ.
        exceptions.LabelError: If there are no valid pixels, or a label is not
            below C.
    """
    logits = np.asarray(logits)
    if not np.issubdtype(logits.dtype, np.floating):
        logits = logits.astype(np.float32)
    labels = np.asarray(labels)
    if logits.ndim != 3 or labels.shape != logits.shape[1:]:
        raise exceptions.ShapeError(
            "logits of shape {} do not match labels of shape {}".format(
                logits.shape, labels.shape
            )
        )
    categories = logits.shape[0]
    valid = labels != IGNORE_LABEL
    n_valid = int(np.count_nonzero(valid))
    if n_valid == 0:
        raise exceptions.LabelError("there are no valid (non-ignore) pixels")
    if int(labels[valid].max()) >= categories:
        raise exceptions.LabelError(
            "label {} is out of range for {} categories".format(
                int(labels[valid].max()), categories
            )
        )
    target = np.where(valid, labels, 0).astype(np.intp)
    log_probs = special.log_softmax(logits, axis=0)
    picked = np.take_along_axis(log_probs, target[np.newaxis], axis=0)[0]
    value = -float(np.sum(picked[valid], dtype=np.float64)) / n_valid
    onehot = np.arange(categories)[:, np.newaxis, np.newaxis] == target[np.newaxis]
    grad = (np.exp(log_probs) - onehot) * valid[np.newaxis]
    grad = (grad / n_valid).astype(logits.dtype)
    return CrossEntropy(value, grad)


def total_loss_and_grad(seg_logits, aux_logits, labels, i, i_rec, weights=None):
    """
    The combined objective and the gradients of each of its inputs.

    Args:
        seg_logits (numpy.ndarray): C×H×W final segmentation logits.
        aux_logits (numpy.ndarray): C×H×W auxiliary head logits.
        labels (LabelMap or numpy.ndarray): The H×W ground truth.
        i (numpy.ndarray): The input image, 3×H×W.
        i_rec (numpy.ndarray): The reconstruction from the SR head.
        weights (LossWeights): The loss weights; defaults apply if None.

    Returns:
        tuple: A :class:`LossReport` and the :class:`LossGradients`.
    """
    weights = weights or LossWeights()
    seg = cross_entropy(seg_logits, labels)
    aux = cross_entropy(aux_logits, labels)
    wsl = WslValue(0.0, 0.0, 0.0)
    sr = 0.0
    rec_grad = np.zeros(_shape_of(i_rec), dtype=_as_channels(i_rec).dtype)
    if weights.recon == "wsl":
        wsl, rec_grad = wsl_value_and_gradient(i, i_rec, weights)
    elif weights.recon == "pixel":
        sr = pixel_recon_value(i, i_rec)
        rec_grad = pixel_recon_gradient(i, i_rec)
    total = seg.value + weights.lambda3 * aux.value + wsl.value + sr
    report = LossReport(total, seg.value, aux.value, wsl.value, wsl.low, wsl.high, sr)
    grads = LossGradients(
        seg.gradient,
        aux.gradient * aux.gradient.dtype.type(weights.lambda3),
        rec_grad,
    )
    return report, grads


def total_loss(seg_logits, aux_logits, labels, i, i_rec, weights=None):
    """
    The combined objective ``seg + lambda3 * aux + wsl + sr``.

    Returns:
        LossReport: Every part of the loss.
    """
    return total_loss_and_grad(seg_logits, aux_logits, labels, i, i_rec, weights)[0]
