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
"""Confusion-matrix segmentation metrics: mIoU, macro F1 and pixel accuracy."""

import logging

import numpy as np

from . import exceptions
from .core import IGNORE_LABEL


_log = logging.getLogger(__name__)


class ConfusionMatrix(object):
    """
    Pixel counts of (ground truth, prediction) pairs.

    Instances are immutable: :func:`accumulate` and ``+`` return new
    matrices, so accumulation order never matters.

    Args:
        num_categories (int): The category count C.
        counts (numpy.ndarray): Optional C×C counts, rows indexed by ground
            truth and columns by prediction.
    """

    def __init__(self, num_categories, counts=None):
        if num_categories < 1:
            raise ValueError("num_categories must be at least 1")
        if counts is None:
            counts = np.zeros((num_categories, num_categories), dtype=np.int64)
        counts = np.array(counts, dtype=np.int64)
        if counts.shape != (num_categories, num_categories):
            raise exceptions.ShapeError(
                "counts of shape {} do not fit {} categories".format(
                    counts.shape, num_categories
                )
            )
        counts.setflags(write=False)
        self.num_categories = num_categories
        self.counts = counts

    @property
    def total(self):
        return int(self.counts.sum())

    def __add__(self, other):
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        if other.num_categories != self.num_categories:
            raise exceptions.ShapeError(
                "cannot merge matrices for {} and {} categories".format(
                    self.num_categories, other.num_categories
                )
            )
        return ConfusionMatrix(self.num_categories, self.counts + other.counts)

    def __eq__(self, other):
        return (
            isinstance(other, ConfusionMatrix)
            and other.num_categories == self.num_categories
            and np.array_equal(other.counts, self.counts)
        )

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "ConfusionMatrix(num_categories={}, total={})".format(
            self.num_categories, self.total
        )


def accumulate(cm, pred, gt):
    """
    Add one prediction/ground-truth pair to a matrix.

    Pixels where either map holds the ignore label are skipped.

    Args:
        cm (ConfusionMatrix): The matrix so far.
        pred (LabelMap or numpy.ndarray): The predicted labels.
        gt (LabelMap or numpy.ndarray): The ground-truth labels.

    Returns:
        ConfusionMatrix: A new matrix with the pair's counts added.

    Raises:
        exceptions.ShapeError: If the maps differ in size.
        exceptions.LabelError: If a non-ignore label is not below C.
    """
    pred = np.asarray(pred).astype(np.int64)
    gt = np.asarray(gt).astype(np.int64)
    if pred.shape != gt.shape:
        raise exceptions.ShapeError(
            "prediction of shape {} does not match ground truth of shape {}".format(
                pred.shape, gt.shape
            )
        )
    keep = (pred != IGNORE_LABEL) & (gt != IGNORE_LABEL)
    pred = pred[keep]
    gt = gt[keep]
    size = cm.num_categories
    for name, labels in (("prediction", pred), ("ground truth", gt)):
        if labels.size and (labels.min() < 0 or labels.max() >= size):
            raise exceptions.LabelError(
                "{} label {} is out of range for {} categories".format(
                    name, int(labels.max()), size
                )
            )
    counts = np.bincount(size * gt + pred, minlength=size * size).reshape(size, size)
    return cm + ConfusionMatrix(size, counts)


def _check(cm):
    if cm.total == 0:
        raise exceptions.DataError("the confusion matrix holds no pixels")


def _supported(cm):
    return cm.counts.sum(axis=1) > 0


def _iou(cm):
    counts = cm.counts.astype(np.float64)
    tp = np.diag(counts)
    union = counts.sum(axis=0) + counts.sum(axis=1) - tp
    with np.errstate(divide="ignore", invalid="ignore"):
        return tp / union


def _f1(cm):
    counts = cm.counts.astype(np.float64)
    tp = np.diag(counts)
    denominator = counts.sum(axis=0) + counts.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return 2.0 * tp / denominator


def miou(cm):
    """
    The mean intersection over union over categories that occur in the
    ground truth.

    Raises:
        exceptions.DataError: If the matrix is empty.
    """
    _check(cm)
    return float(np.mean(_iou(cm)[_supported(cm)]))


def f1(cm):
    """The macro-averaged F1 score over categories present in the ground truth."""
    _check(cm)
    return float(np.mean(_f1(cm)[_supported(cm)]))


def accuracy(cm):
    """The fraction of counted pixels labelled correctly."""
    _check(cm)
    return float(np.trace(cm.counts)) / cm.total


def per_category(cm):
    """
    Per-category IoU and F1.

    Returns:
        list: One ``{"id", "iou", "f1"}`` dict per category; both scores are
        None for categories absent from the ground truth.
    """
    _check(cm)
    supported = _supported(cm)
    ious = _iou(cm)
    f1s = _f1(cm)
    return [
        {
            "id": category,
            "iou": float(ious[category]) if supported[category] else None,
            "f1": float(f1s[category]) if supported[category] else None,
        }
        for category in range(cm.num_categories)
    ]


def report(cm):
    """The full metrics document written by the "eval" command."""
    return {
        "miou": miou(cm),
        "f1": f1(cm),
        "accuracy": accuracy(cm),
        "per_category": per_category(cm),
    }
