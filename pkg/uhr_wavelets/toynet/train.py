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
Training the toy network with stochastic gradient descent and momentum.

Every iteration draws a batch from a seeded shuffled order of the dataset,
averages the parameter gradients of the combined loss over the batch and
applies ``v = momentum * v + g; p = p - lr_t * v``. The learning rate is
constant unless a decay power is given, ``lr_t = lr * (1 - t / T) ** poly_power``.
"""

import collections
import logging

import numpy as np

from .. import exceptions
from ..core import SeededRng
from ..loss import LossReport, LossWeights, total_loss_and_grad
from ..signals import train_finished_signal, train_iteration_signal


_log = logging.getLogger(__name__)


#: The trained network and one :class:`~uhr_wavelets.loss.LossReport` per
#: iteration.
TrainResult = collections.namedtuple("TrainResult", ["net", "history"])


class TrainConfig(object):
    """
    Optimiser settings.

    Args:
        lr (float): The base learning rate.
        momentum (float): The momentum coefficient, in [0, 1).
        iterations (int): The number of updates T.
        batch_size (int): Samples per update.
        seed (int): Seed of the shuffled sample order.
        weights (LossWeights): The loss weights; defaults apply if None.
        poly_power (float): Power of the polynomial learning rate decay; 0
            keeps the rate constant.
    """

    def __init__(
        self,
        lr=1e-3,
        momentum=0.9,
        iterations=100,
        batch_size=1,
        seed=0,
        weights=None,
        poly_power=0.0,
    ):
        if lr < 0:
            raise ValueError("lr must not be negative, not {}".format(lr))
        if not 0 <= momentum < 1:
            raise ValueError("momentum must lie in [0, 1), not {}".format(momentum))
        if iterations < 1:
            raise ValueError("iterations must be at least 1, not {}".format(iterations))
        if batch_size < 1:
            raise ValueError("batch_size must be at least 1, not {}".format(batch_size))
        if poly_power < 0:
            raise ValueError("poly_power must not be negative, not {}".format(poly_power))
        self.lr = float(lr)
        self.momentum = float(momentum)
        self.iterations = int(iterations)
        self.batch_size = int(batch_size)
        self.seed = int(seed)
        self.weights = weights or LossWeights()
        self.poly_power = float(poly_power)

    @classmethod
    def from_config(cls, conf, **overrides):
        """
        Build the settings from a loaded configuration.

        Args:
            conf (dict): The configuration, with ``train`` and ``loss``
                sections and a top-level ``seed``.
            overrides: Settings that take precedence, ignored when None.
        """
        section = conf["train"]
        values = dict(
            lr=section["lr"],
            momentum=section["momentum"],
            iterations=section["iterations"],
            batch_size=section["batch_size"],
            seed=conf["seed"],
            weights=LossWeights.from_config(conf["loss"]),
            poly_power=section["poly_power"],
        )
        values.update((key, value) for key, value in overrides.items() if value is not None)
        return cls(**values)

    def learning_rate(self, iteration):
        """The learning rate of the zero-based ``iteration``."""
        if not self.poly_power:
            return self.lr
        return self.lr * (1.0 - float(iteration) / self.iterations) ** self.poly_power


def _batches(rng, size, batch_size):
    order = []
    while True:
        batch = []
        while len(batch) < batch_size:
            if not order:
                order = [int(i) for i in rng.permutation(size)]
            batch.append(order.pop(0))
        yield batch


def _mean_report(reports):
    count = float(len(reports))
    return LossReport(*[sum(values) / count for values in zip(*reports)])


def train(net, dataset, cfg):
    """
    Train ``net`` in place.

    Args:
        net (ToyWSDNet): The network.
        dataset (list): (image, labels) pairs; images are 3×H×W arrays and
            labels are :class:`~uhr_wavelets.core.LabelMap` instances.
        cfg (TrainConfig): The settings.

    Returns:
        TrainResult: The network and the per-iteration loss history.

    Raises:
        exceptions.DataError: If the dataset is empty.
    """
    dataset = list(dataset)
    if not dataset:
        raise exceptions.DataError("cannot train on an empty dataset")
    rng = SeededRng(cfg.seed)
    batches = _batches(rng, len(dataset), cfg.batch_size)
    velocity = collections.OrderedDict(
        (name, np.zeros_like(value)) for name, value in net.params.items()
    )
    history = []
    for iteration in range(cfg.iterations):
        lr = cfg.learning_rate(iteration)
        reports = []
        total = None
        for index in next(batches):
            image, labels = dataset[index]
            result = net.forward(image, train=True)
            report, grads = total_loss_and_grad(
                result.seg_logits,
                result.aux_logits,
                labels,
                image,
                result.i_rec,
                cfg.weights,
            )
            param_grads = net.backward(result.cache, grads.seg, grads.aux, grads.rec)
            reports.append(report)
            if total is None:
                total = param_grads
            else:
                for name in total:
                    total[name] = total[name] + param_grads[name]
        report = _mean_report(reports)
        scale = net.dtype.type(1.0 / len(reports))
        step = net.dtype.type(lr)
        momentum = net.dtype.type(cfg.momentum)
        for name, value in net.params.items():
            velocity[name] = momentum * velocity[name] + total[name] * scale
            net.params[name] = value - step * velocity[name]
        history.append(report)
        _log.debug(
            "training iteration",
            extra={"fields": dict(report.as_dict(), iteration=iteration, lr=lr)},
        )
        train_iteration_signal.send(net, iteration=iteration, report=report, lr=lr)
    _log.info(
        "training finished",
        extra={
            "fields": {
                "iterations": cfg.iterations,
                "first_total": history[0].total,
                "last_total": history[-1].total,
            }
        },
    )
    train_finished_signal.send(net, history=history)
    return TrainResult(net, history)
