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
Side-by-side training runs of the toy network variants.

Every variant pairs a deep-branch reduction with a reconstruction loss and is
trained from the same initial seed on the same scenes, so the results differ
only in those two choices.
"""

import collections
import itertools
import logging

from .. import metrics
from ..loss import RECON_MODES
from ..parallel import ordered_map
from .network import DOWNSAMPLERS, ToyWSDNet
from .train import TrainConfig, train


_log = logging.getLogger(__name__)


class VariantResult(
    collections.namedtuple(
        "VariantResult",
        ["downsample", "recon", "initial_loss", "final_loss", "accuracy", "miou"],
    )
):
    """
    The outcome of one variant: its settings, the first and last total loss
    and the pixel accuracy and mIoU of its predictions on the evaluation scenes.
    """

    __slots__ = ()

    def as_dict(self):
        return dict(self._asdict())


def with_recon(cfg, recon):
    """A copy of the training settings ``cfg`` using the ``recon`` loss."""
    return TrainConfig(
        lr=cfg.lr,
        momentum=cfg.momentum,
        iterations=cfg.iterations,
        batch_size=cfg.batch_size,
        seed=cfg.seed,
        weights=cfg.weights.replace(recon=recon),
        poly_power=cfg.poly_power,
    )


def evaluate(net, scenes):
    """The confusion matrix of ``net`` over (image, labels) pairs."""
    empty = metrics.ConfusionMatrix(net.num_categories)
    total = empty
    for image, labels in scenes:
        total = total + metrics.accumulate(empty, net.predict(image), labels)
    return total


def compare_variants(
    dataset,
    num_categories,
    cfg,
    downsamples=DOWNSAMPLERS,
    recons=RECON_MODES,
    seed=0,
    eval_set=None,
    threads=1,
):
    """
    Train one network per (downsample, recon) pair and score it.

    Args:
        dataset (list): The (image, labels) training pairs.
        num_categories (int): The category count C.
        cfg (TrainConfig): The shared settings; only the reconstruction mode
            of its loss weights changes between variants.
        downsamples (tuple): Values of :data:`~uhr_wavelets.toynet.network.DOWNSAMPLERS`.
        recons (tuple): Values of :data:`~uhr_wavelets.loss.RECON_MODES`.
        seed (int): The initialisation seed shared by every network.
        eval_set (list): The pairs to score on; the training pairs if None.
        threads (int): Variants trained at the same time.

    Returns:
        list: One :class:`VariantResult` per pair, downsample-major.
    """
    dataset = list(dataset)
    scenes = dataset if eval_set is None else list(eval_set)

    def _run(variant):
        downsample, recon = variant
        net = ToyWSDNet(num_categories, seed=seed, downsample=downsample)
        history = train(net, dataset, with_recon(cfg, recon)).history
        cm = evaluate(net, scenes)
        result = VariantResult(
            downsample,
            recon,
            float(history[0].total),
            float(history[-1].total),
            float(metrics.accuracy(cm)),
            float(metrics.miou(cm)),
        )
        _log.info("trained variant", extra={"fields": result.as_dict()})
        return result

    return ordered_map(_run, list(itertools.product(downsamples, recons)), threads)
