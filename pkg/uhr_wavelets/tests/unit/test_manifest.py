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
"""Unit tests for :mod:`uhr_wavelets.manifest`."""

import os
import shutil
import tempfile
import unittest

from uhr_wavelets import exceptions, manifest


class ManifestTests(unittest.TestCase):
    def setUp(self):
        self.sidecar = {"height": 6, "width": 10, "levels": 1, "channels": 3}

    def test_dumps_sorted(self):
        self.assertEqual(
            '{"channels": 3, "height": 6, "levels": 1, "width": 10}\n',
            manifest.dumps(self.sidecar, manifest.DWT_SIDECAR_SCHEMA),
        )

    def test_invalid_document(self):
        self.sidecar["height"] = 0
        with self.assertRaises(exceptions.ManifestError) as cm:
            manifest.dumps(self.sidecar, manifest.DWT_SIDECAR_SCHEMA)
        self.assertIn("The original extents of a wavelet-packet tensor", str(cm.exception))

    def test_nan_refused(self):
        history = [dict((k, 1.0) for k in ("total", "seg", "aux", "wsl", "wsl_low", "wsl_high"))]
        history[0]["sr"] = float("nan")
        self.assertRaises(ValueError, manifest.dumps, history, manifest.HISTORY_SCHEMA)

    def test_loads_bad_json(self):
        with self.assertRaises(exceptions.ManifestError) as cm:
            manifest.loads("{", manifest.DWT_SIDECAR_SCHEMA, source="out.json")
        self.assertIn("out.json is not valid JSON", str(cm.exception))

    def test_eval_allows_missing_categories(self):
        document = {
            "miou": 0.5,
            "f1": 0.5,
            "accuracy": 0.5,
            "per_category": [{"id": 0, "iou": 0.5, "f1": 0.5}, {"id": 1, "iou": None, "f1": None}],
        }
        manifest.validate(document, manifest.EVAL_SCHEMA)

    def test_file_roundtrip(self):
        directory = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, directory)
        path = os.path.join(directory, "out.json")
        manifest.dump(self.sidecar, path, manifest.DWT_SIDECAR_SCHEMA)
        self.assertEqual(self.sidecar, manifest.load(path, manifest.DWT_SIDECAR_SCHEMA))

    def test_missing_file(self):
        self.assertRaises(
            exceptions.ManifestError,
            manifest.load,
            "/nonexistent/plan.json",
            manifest.TILE_PLAN_SCHEMA,
        )
