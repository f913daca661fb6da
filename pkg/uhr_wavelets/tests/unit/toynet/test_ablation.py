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
"""Unit tests for :mod:`uhr_wavelets.toynet.ablation`."""

import unittest

import numpy as np

from uhr_wavelets import loss, metrics, toynet
from uhr_wavelets.toynet import ablation


class WithReconTests(unittest.TestCase):
    def test_only_recon_changes(self):
        cfg = toynet.TrainConfig(
            lr=0.02,
            iterations=7,
            batch_size=2,
            seed=3,
            poly_power=0.5,
            weights=loss.LossWeights(0.5, 0.4, 0.2, depth=2),
        )
        copy = ablation.with_recon(cfg, "pixel")
        self.assertEqual(loss.LossWeights(0.5, 0.4, 0.2, depth=2, recon="pixel"), copy.weights)
        self.assertEqual("wsl", cfg.weights.recon)
        self.assertEqual(
            (0.02, 0.9, 7, 2, 3, 0.5),
            (copy.lr, copy.momentum, copy.iterations, copy.batch_size, copy.seed, copy.poly_power),
        )


class CompareVariantsTests(unittest.TestCase):
    def setUp(self):
        self.dataset = toynet.gen_dataset(4, 2, 32, 2)
        self.cfg = toynet.TrainConfig(lr=0.01, iterations=2)

    def test_every_pair_in_order(self):
        results = toynet.compare_variants(
            self.dataset, 2, self.cfg, downsamples=("dwt", "cnn"), recons=("wsl", "none")
        )
        self.assertEqual(
            [("dwt", "wsl"), ("dwt", "none"), ("cnn", "wsl"), ("cnn", "none")],
            [(r.downsample, r.recon) for r in results],
        )
        for result in results:
            self.assertIsInstance(result, toynet.VariantResult)
            self.assertTrue(np.isfinite(result.final_loss))
            self.assertTrue(0.0 <= result.accuracy <= 1.0)

    def test_matches_a_single_run(self):
        result = toynet.compare_variants(
            self.dataset, 2, self.cfg, downsamples=("bilinear",), recons=("pixel",), seed=5
        )[0]
        net = toynet.ToyWSDNet(2, seed=5, downsample="bilinear")
        history = toynet.train(net, self.dataset, ablation.with_recon(self.cfg, "pixel")).history
        self.assertEqual(history[0].total, result.initial_loss)
        self.assertEqual(history[-1].total, result.final_loss)
        cm = ablation.evaluate(net, self.dataset)
        self.assertEqual(metrics.accuracy(cm), result.accuracy)
        self.assertEqual(metrics.miou(cm), result.miou)

    def test_threads(self):
        kwargs = dict(downsamples=("dwt", "bilinear"), recons=("none",))
        serial = toynet.compare_variants(self.dataset, 2, self.cfg, threads=1, **kwargs)
        pooled = toynet.compare_variants(self.dataset, 2, self.cfg, threads=2, **kwargs)
        self.assertEqual(serial, pooled)

    def test_eval_set(self):
        held_out = toynet.gen_dataset(9, 1, 32, 2)
        result = toynet.compare_variants(
            self.dataset, 2, self.cfg, downsamples=("dwt",), recons=("none",), eval_set=held_out
        )[0]
        net = toynet.ToyWSDNet(2, seed=0)
        toynet.train(net, self.dataset, ablation.with_recon(self.cfg, "none"))
        cm = ablation.evaluate(net, held_out)
        self.assertEqual(metrics.accuracy(cm), result.as_dict()["accuracy"])
