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
"""Tests for the ``uhr-wavelets`` command-line interface run as a process."""
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from uhr_wavelets import testing
from uhr_wavelets.core import write_label_png, write_plane_png
from uhr_wavelets.tests import FIXTURES_DIR


GOOD_CONF = os.path.join(FIXTURES_DIR, "good_conf.toml")


def run(*args):
    """Run the CLI in a fresh interpreter and return the completed process."""
    return subprocess.run(
        [sys.executable, "-m", "uhr_wavelets"] + [str(arg) for arg in args],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        env=dict(os.environ, UHR_WAVELETS_CONF=""),
    )


def read_bytes(path):
    with open(str(path), "rb") as fd:
        return fd.read()


@pytest.fixture
def rgb_image(tmp_path):
    path = tmp_path / "scene.png"
    image = np.rint(testing.random_planes(7, (3, 37, 53)) * 255) / 255
    write_plane_png(image, str(path))
    return path


@pytest.fixture
def label_dir(tmp_path):
    directory = tmp_path / "labels"
    directory.mkdir()
    for k in range(3):
        labels = (testing.random_planes(k, (48, 40)) * 4).astype(np.uint8)
        labels[:24] = k
        write_label_png(labels, str(directory / "map_{}.png".format(k)))
    return directory


@pytest.mark.parametrize("levels", [1, 3])
def test_dwt_idwt_roundtrip(levels, tmp_path, rgb_image):
    """Assert a decomposed and reconstructed PNG is byte-identical."""
    leaves = tmp_path / "leaves.utsr"
    out = tmp_path / "out.png"
    assert run("dwt", "--in", rgb_image, "--out", leaves, "--levels", levels).returncode == 0
    assert run("idwt", "--in", leaves, "--out", out).returncode == 0
    assert read_bytes(rgb_image) == read_bytes(out)


def test_tile_merge_roundtrip(tmp_path, rgb_image):
    tiles = tmp_path / "tiles"
    out = tmp_path / "merged.png"
    result = run("tile", "--in", rgb_image, "--out-dir", tiles, "--patch", 20, "--overlap", 6)
    assert result.returncode == 0
    result = run("merge", "--plan", tiles / "plan.json", "--patches", tiles, "--out", out)
    assert result.returncode == 0
    assert read_bytes(rgb_image) == read_bytes(out)


def _square_images(directory):
    """Two 32×32 RGB images; a reference and a noisy copy."""
    directory.mkdir()
    ref = np.rint(testing.random_planes(11, (3, 32, 32)) * 255) / 255
    rec = np.clip(ref + testing.random_planes(12, (3, 32, 32), low=-0.05, high=0.05), 0, 1)
    write_plane_png(ref, str(directory / "ref.png"))
    write_plane_png(rec, str(directory / "rec.png"))
    return directory / "ref.png", directory / "rec.png"


def _thread_command(command, inputs, rgb_image, label_dir):
    """
    Build the inputs of ``command`` under ``inputs`` and return a function
    giving its arguments for an output directory.
    """
    inputs.mkdir()
    if command == "dwt":
        return lambda out: ["dwt", "--in", rgb_image, "--out", out / "leaves.utsr", "--levels", 2]
    if command == "idwt":
        leaves = inputs / "leaves.utsr"
        assert run("dwt", "--in", rgb_image, "--out", leaves, "--levels", 2).returncode == 0
        return lambda out: ["idwt", "--in", leaves, "--out", out / "image.png"]
    if command == "pyramid":
        ref, _ = _square_images(inputs / "images")
        return lambda out: ["pyramid", "--in", ref, "--out-dir", out, "--levels", 2]
    if command == "wsl":
        ref, rec = _square_images(inputs / "images")
        return lambda out: ["wsl", "--ref", ref, "--rec", rec, "--depth", 2]
    if command == "richness":
        options = ["--count", 6, "--region", 16, "--min-area", 4]
        return lambda out: ["richness", "--labels", label_dir, "--out", out / "r.json"] + options
    if command == "tile":
        options = ["--patch", 16, "--overlap", 5]
        return lambda out: ["tile", "--in", rgb_image, "--out-dir", out] + options
    if command == "merge":
        tiles = inputs / "tiles"
        labels = label_dir / "map_1.png"
        args = ("tile", "--in", labels, "--out-dir", tiles, "--patch", 16, "--overlap", 5)
        assert run(*args).returncode == 0
        plan = tiles / "plan.json"
        return lambda out: ["merge", "--plan", plan, "--patches", tiles, "--out", out / "m.png"]
    if command == "eval":
        pred = inputs / "pred"
        pred.mkdir()
        for k in range(3):
            labels = (testing.random_planes(20 + k, (48, 40)) * 4).astype(np.uint8)
            write_label_png(labels, str(pred / "map_{}.png".format(k)))
        return lambda out: ["eval", "--pred", pred, "--gt", label_dir, "--out", out / "e.json"]
    scenes = ["--size", 32, "--scenes", 1, "--num-categories", 2, "--iterations", 2]
    if command == "train-toy":
        return lambda out: ["train-toy", "--out-dir", out] + scenes
    if command == "ablate-toy":
        return lambda out: ["ablate-toy"] + scenes
    checkpoint = inputs / "ckpt"
    assert run("train-toy", "--out-dir", checkpoint, *scenes).returncode == 0
    options = ["--patch", 32, "--overlap", 8]
    return lambda out: [
        "infer-toy", "--checkpoint", checkpoint, "--in", rgb_image, "--out", out / "l.png"
    ] + options


@pytest.mark.parametrize(
    "command",
    [
        "dwt",
        "idwt",
        "pyramid",
        "wsl",
        "richness",
        "tile",
        "merge",
        "eval",
        "train-toy",
        "ablate-toy",
        "infer-toy",
    ],
)
def test_thread_count_does_not_change_outputs(command, tmp_path, rgb_image, label_dir):
    """Assert one and eight worker threads write byte-identical outputs."""
    arguments = _thread_command(command, tmp_path / "inputs", rgb_image, label_dir)
    outputs = []
    for threads in (1, 8):
        out = tmp_path / "out_{}".format(threads)
        out.mkdir()
        result = run("--seed", 3, "--threads", threads, *arguments(out))
        assert result.returncode == 0, result.stderr
        files = [(p.name, read_bytes(p)) for p in sorted(out.iterdir())]
        outputs.append((result.stdout, files))
    assert outputs[0] == outputs[1]
    assert outputs[0][0] or outputs[0][1]


def test_richness_seed(label_dir):
    """Assert the same seed gives the same report and stdout is one JSON document."""
    first = run("--seed", 9, "richness", "--labels", label_dir, "--region", 16, "--min-area", 4)
    second = run("--seed", 9, "richness", "--labels", label_dir, "--region", 16, "--min-area", 4)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    report = json.loads(first.stdout.decode("utf-8"))
    assert report["R"] > 0
    assert report["region_size"] == [16, 16]


def test_exit_codes(tmp_path, rgb_image):
    """Assert usage errors exit with 1 and data errors with 2 and a JSON line."""
    usage = run("--conf", tmp_path / "missing.toml", "dwt", "--in", rgb_image, "--out", "x")
    assert usage.returncode == 1

    data = run("pyramid", "--in", rgb_image, "--out-dir", tmp_path / "pyr")
    assert data.returncode == 2
    error = json.loads(data.stderr.decode("utf-8").strip().splitlines()[-1])
    assert error["error"] == "DimensionError"
    assert error["level"] == "ERROR"


def test_configuration_file(tmp_path, rgb_image):
    leaves = tmp_path / "leaves.utsr"
    assert run("--conf", GOOD_CONF, "dwt", "--in", rgb_image, "--out", leaves).returncode == 0
    with open(str(leaves) + ".json") as fd:
        assert json.load(fd)["levels"] == 2


def test_train_and_infer(tmp_path, rgb_image):
    checkpoint = tmp_path / "ckpt"
    result = run(
        "train-toy",
        "--out-dir",
        checkpoint,
        "--iterations",
        3,
        "--size",
        32,
        "--scenes",
        2,
        "--num-categories",
        3,
    )
    assert result.returncode == 0, result.stderr
    summary = json.loads(result.stdout.decode("utf-8"))
    assert summary["num_categories"] == 3
    assert os.path.isfile(str(checkpoint / "checkpoint.utsr"))

    labels = tmp_path / "labels.png"
    result = run(
        "infer-toy",
        "--checkpoint",
        checkpoint,
        "--in",
        rgb_image,
        "--out",
        labels,
        "--patch",
        32,
        "--overlap",
        8,
    )
    assert result.returncode == 0, result.stderr
    assert labels.exists()
