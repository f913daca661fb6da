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
The ``uhr-wavelets`` `Click`_ CLI.

Results go to the paths given on the command line or to standard output as
JSON. Diagnostics go to standard error as JSON lines. The exit status is 0 on
success, 1 for usage errors and 2 when the input data or the configuration
is at fault.

.. _Click: http://click.pocoo.org/
"""
from __future__ import absolute_import

import json
import logging
import os
import re
import sys

import click
import numpy as np

from . import config, exceptions, manifest, metrics, richness, tiler
from .core import (
    SeededRng,
    Tensor,
    planes_to_array,
    png_mode,
    read_label_png,
    read_plane_png,
    read_raw_tensor,
    write_label_png,
    write_plane_png,
    write_raw_tensor,
)
from .loss import RECON_MODES, LossWeights, wsl_value
from .parallel import ordered_map
from .pyramid import SHALLOW_LEVELS, laplacian_residuals, shallow_stack
from .signals import train_iteration_signal
from .toynet import (
    DOWNSAMPLERS,
    ToyWSDNet,
    TrainConfig,
    compare_variants,
    evaluate,
    gen_dataset,
    load_checkpoint,
    predict_logits,
    predict_tiled,
    save_checkpoint,
    train,
)
from .wavelet import packet_analysis, packet_synthesis


_log = logging.getLogger(__name__)

#: Exit status for usage errors.
EXIT_USAGE = 1
#: Exit status for bad input data or configuration.
EXIT_DATA = 2

RAW_SUFFIX = ".utsr"

_conf_help = (
    "Path to a valid configuration file to use in place of the "
    "configuration in /etc/uhr-wavelets/config.toml."
)
_seed_help = "The seed of every random choice. Overrides the configuration file."
_threads_help = (
    "The number of worker threads. Outputs are identical for any value. "
    "Overrides the configuration file."
)
_image_in_help = "An 8-bit grayscale or RGB PNG file, or a raw tensor (.utsr) file."
_image_out_help = "The output file; a .utsr suffix writes a raw tensor, anything else a PNG."
_patch_help = "The side of the square sliding windows, in pixels."
_overlap_help = "The overlap between neighbouring windows, in pixels."
_downsample_help = "How the deep branch reduces the image to 1/4 resolution."
_tile_in_help = (
    "An 8-bit RGB PNG image, or a grayscale or palette PNG label map whose "
    "patches keep the raw label ids."
)


def _error_line(error):
    return json.dumps(
        {
            "level": "ERROR",
            "logger": __name__,
            "event": str(error),
            "error": error.__class__.__name__,
        },
        sort_keys=True,
    )


class _Group(click.Group):
    """A command group that maps failures to the tool's exit statuses."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super(_Group, self).main(
                args=args,
                prog_name=prog_name,
                complete_var=complete_var,
                standalone_mode=False,
                **extra
            )
            code = result if isinstance(result, int) else 0
        except click.UsageError as e:
            if e.ctx is not None:
                click.echo(e.ctx.get_help(), err=True)
            click.echo("Error: {}".format(e.format_message()), err=True)
            code = EXIT_USAGE
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_USAGE
        except (exceptions.DataError, exceptions.ConfigurationException) as e:
            click.echo(_error_line(e), err=True)
            code = EXIT_DATA
        except click.ClickException as e:
            click.echo(_error_line(e.format_message()), err=True)
            code = EXIT_DATA
        except (IOError, OSError) as e:
            click.echo(_error_line(e), err=True)
            code = EXIT_DATA
        if standalone_mode:
            sys.exit(code)
        return code


@click.group(cls=_Group)
@click.option("--conf", envvar=config.CONF_ENV, help=_conf_help)
@click.option("--seed", type=int, help=_seed_help)
@click.option("--threads", type=int, help=_threads_help)
def cli(conf, seed, threads):
    """Wavelet tools for ultra-high-resolution segmentation."""
    if conf:
        if not os.path.isfile(conf):
            raise click.exceptions.BadParameter("{} is not a file".format(conf))
        config.conf.load_config(config_path=conf)
    if seed is not None:
        config.validate_seed(seed)
        config.conf.update(seed=seed)
    if threads is not None:
        config.validate_threads(threads)
        config.conf.update(threads=threads)
    config.conf.setup_logging()


def _setting(value, section, key):
    """Return ``value`` unless it is None, else the configured setting."""
    if value is not None:
        return value
    return config.conf[section][key]


def _threads():
    return config.conf["threads"]


def _read_image(path):
    """Read a PNG or raw tensor file as a C×H×W float32 array."""
    if path.endswith(RAW_SUFFIX):
        data = np.asarray(read_raw_tensor(path))
        if data.ndim == 2:
            return data[np.newaxis]
        if data.ndim != 3:
            raise exceptions.FormatError(
                "{}: expected a rank 2 or 3 tensor, not rank {}".format(path, data.ndim)
            )
        return data
    return planes_to_array(read_plane_png(path))


def _write_image(array, path):
    if path.endswith(RAW_SUFFIX):
        write_raw_tensor(Tensor(array), path)
    else:
        write_plane_png(array, path)


def _emit(document, out, schema=None):
    """Write a JSON document to ``out``, or to standard output when it's None."""
    if schema is not None:
        text = manifest.dumps(document, schema)
    else:
        text = json.dumps(document, sort_keys=True, allow_nan=False) + "\n"
    if out:
        with open(out, "w") as fd:
            fd.write(text)
    else:
        click.echo(text, nl=False)


def _edge_pad(image, multiple):
    pad_h = -image.shape[-2] % multiple
    pad_w = -image.shape[-1] % multiple
    if not pad_h and not pad_w:
        return image
    return np.pad(image, ((0, 0), (0, pad_h), (0, pad_w)), mode="edge")


def _list_pngs(directory):
    if not os.path.isdir(directory):
        raise exceptions.DataError("{} is not a directory".format(directory))
    names = sorted(name for name in os.listdir(directory) if name.lower().endswith(".png"))
    if not names:
        raise exceptions.DataError("{} holds no PNG files".format(directory))
    return names


@cli.command()
@click.option("--in", "in_path", required=True, help=_image_in_help)
@click.option("--out", "out_path", required=True, help="The raw tensor (.utsr) to write.")
@click.option("--levels", type=click.IntRange(min=0), help="Wavelet-packet levels.")
def dwt(in_path, out_path, levels):
    """Decompose an image into its wavelet-packet leaves.

    The image is padded by edge replication to a multiple of 2**levels. The
    output tensor is channels × 4**levels × height × width and a sidecar
    OUT.json records the original size.
    """
    levels = _setting(levels, "wavelet", "levels")
    image = _read_image(in_path)
    channels, height, width = image.shape
    padded = _edge_pad(image, 2 ** levels)
    leaves = ordered_map(lambda plane: packet_analysis(plane, levels), list(padded), _threads())
    write_raw_tensor(Tensor(np.stack(leaves)), out_path)
    manifest.dump(
        {"height": height, "width": width, "levels": levels, "channels": channels},
        out_path + ".json",
        manifest.DWT_SIDECAR_SCHEMA,
    )
    _log.info(
        "decomposed image",
        extra={"fields": {"input": in_path, "levels": levels, "channels": channels}},
    )


@cli.command()
@click.option("--in", "in_path", required=True, help="A tensor written by the dwt command.")
@click.option("--out", "out_path", required=True, help=_image_out_help)
def idwt(in_path, out_path):
    """Reconstruct an image from its wavelet-packet leaves."""
    sidecar = manifest.load(in_path + ".json", manifest.DWT_SIDECAR_SCHEMA)
    leaves = np.asarray(read_raw_tensor(in_path))
    levels = sidecar["levels"]
    divisor = 2 ** levels
    expected = (
        sidecar["channels"],
        4 ** levels,
        -(-sidecar["height"] // divisor),
        -(-sidecar["width"] // divisor),
    )
    if leaves.shape != expected:
        raise exceptions.ShapeError(
            "{} has shape {} but its sidecar describes {}".format(in_path, leaves.shape, expected)
        )
    planes = ordered_map(lambda nodes: packet_synthesis(nodes, levels), list(leaves), _threads())
    image = np.stack(planes)[:, : sidecar["height"], : sidecar["width"]]
    _write_image(image, out_path)


@cli.command()
@click.option("--in", "in_path", required=True, help=_image_in_help)
@click.option("--out-dir", required=True, help="The directory to write the pyramid to.")
@click.option("--levels", type=click.IntRange(min=1), help="The number of residuals.")
def pyramid(in_path, out_dir, levels):
    """Split an image into Laplacian residuals and a coarse base."""
    levels = _setting(levels, "pyramid", "levels")
    image = _read_image(in_path)
    stacks = ordered_map(
        lambda plane: laplacian_residuals(plane, levels), list(image), _threads()
    )
    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)
    index = {
        "height": image.shape[1],
        "width": image.shape[2],
        "levels": levels,
        "residuals": [],
        "base": "base" + RAW_SUFFIX,
    }
    for level in range(levels):
        name = "residual_{}{}".format(level, RAW_SUFFIX)
        residual = np.stack([stack.residuals[level] for stack in stacks])
        write_raw_tensor(Tensor(residual), os.path.join(out_dir, name))
        index["residuals"].append(name)
    base = np.stack([stack.base for stack in stacks])
    write_raw_tensor(Tensor(base), os.path.join(out_dir, index["base"]))
    if levels >= SHALLOW_LEVELS:
        index["shallow"] = "shallow" + RAW_SUFFIX
        write_raw_tensor(Tensor(shallow_stack(image)), os.path.join(out_dir, index["shallow"]))
    manifest.dump(index, os.path.join(out_dir, "pyramid.json"), manifest.PYRAMID_SCHEMA)


def _pairs(ref, rec):
    if os.path.isdir(ref) != os.path.isdir(rec):
        raise exceptions.DataError("--ref and --rec must both be files or both be directories")
    if not os.path.isdir(ref):
        return [(os.path.basename(ref), ref, rec)]
    names = [
        name for name in sorted(os.listdir(ref)) if name.lower().endswith((".png", RAW_SUFFIX))
    ]
    missing = [name for name in names if not os.path.exists(os.path.join(rec, name))]
    if missing:
        raise exceptions.DataError(
            "{} has no reconstruction for {}".format(rec, ", ".join(missing))
        )
    return [(name, os.path.join(ref, name), os.path.join(rec, name)) for name in names]


@cli.command()
@click.option("--ref", required=True, help="A reference image, or a directory of them.")
@click.option("--rec", required=True, help="The reconstruction, or a directory of them.")
@click.option("--depth", type=click.IntRange(min=1), help="Wavelet-packet levels.")
@click.option("--lambda1", type=click.FloatRange(min=0), help="Low-frequency weight.")
@click.option("--lambda2", type=click.FloatRange(min=0), help="High-frequency weight.")
def wsl(ref, rec, depth, lambda1, lambda2):
    """Print the Wavelet Smooth Loss of each image as a JSON line."""
    weights = LossWeights.from_config(config.conf["loss"]).replace(
        depth=_setting(depth, "loss", "depth"),
        lambda1=_setting(lambda1, "loss", "lambda1"),
        lambda2=_setting(lambda2, "loss", "lambda2"),
    )

    def _measure(pair):
        name, ref_path, rec_path = pair
        value = wsl_value(_read_image(ref_path), _read_image(rec_path), weights)
        return {"image": name, "wsl": value.value, "wsl_low": value.low, "wsl_high": value.high}

    for line in ordered_map(_measure, _pairs(ref, rec), _threads()):
        _emit(line, None)


@cli.command("richness")
@click.option("--labels", "labels_dir", required=True, help="A directory of label PNG files.")
@click.option("--out", help="The report file; standard output if not given.")
@click.option("--region", type=click.IntRange(min=1), help="The side of the square regions.")
@click.option("--count", type=click.IntRange(min=1), help="Regions sampled per image.")
@click.option("--q", type=click.FloatRange(min=0, min_open=True), help="The temperature.")
@click.option("--min-area", type=click.IntRange(min=0), help="The smallest instance counted.")
@click.option("--num-categories", type=click.IntRange(1, 255), help="Check labels are below this.")
@click.option("--summary", is_flag=True, help="Add the mean categories and instances per region.")
def richness_command(labels_dir, out, region, count, q, min_area, num_categories, summary):
    """Compute the scene context richness of a set of label maps."""
    num_categories = _setting(num_categories, "richness", "num_categories")
    label_maps = ordered_map(
        lambda name: read_label_png(os.path.join(labels_dir, name), num_categories),
        _list_pngs(labels_dir),
        _threads(),
    )
    side = region if region is not None else config.conf["richness"]["region"]
    size = (side, side)
    if region is None:
        size = (
            min(side, min(m.height for m in label_maps)),
            min(side, min(m.width for m in label_maps)),
        )
    count = _setting(count, "richness", "count")
    stats = richness.sample_dataset(
        label_maps,
        SeededRng(config.conf["seed"]),
        region=size,
        count=count,
        min_area=_setting(min_area, "richness", "min_area"),
        threads=_threads(),
    )
    report = richness.richness_score(stats, _setting(q, "richness", "q"))
    _emit(
        report.as_dict(regions_per_image=count, summary=summary),
        out,
        manifest.RICHNESS_SCHEMA,
    )


@cli.command()
@click.option("--in", "in_path", required=True, help=_tile_in_help)
@click.option("--out-dir", required=True, help="The directory to write the patches to.")
@click.option("--patch", type=click.IntRange(min=1), help=_patch_help)
@click.option("--overlap", type=click.IntRange(min=0), help=_overlap_help)
def tile(in_path, out_dir, patch, overlap):
    """Cut an image or a label map into overlapping patches and write the plan."""
    if png_mode(in_path) in ("L", "P"):
        image = np.asarray(read_label_png(in_path))
        writer = write_label_png
    else:
        image = planes_to_array(read_plane_png(in_path))
        writer = write_plane_png
    plan = tiler.plan_tiles(
        image.shape[-1],
        image.shape[-2],
        _setting(patch, "tiler", "patch"),
        _setting(overlap, "tiler", "overlap"),
    )
    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)

    def _write(item):
        index, crop = item
        writer(crop, os.path.join(out_dir, "patch_{}.png".format(index)))

    ordered_map(_write, list(enumerate(tiler.crop_array(plan, image))), _threads())
    with open(os.path.join(out_dir, "plan.json"), "w") as fd:
        fd.write(tiler.dumps_plan(plan))
    _log.info(
        "tiled image", extra={"fields": {"input": in_path, "windows": len(plan.windows)}}
    )


_PATCH_NAME = re.compile(r"^patch_(\d+)\.(png|utsr)$")


def _patch_files(directory):
    if not os.path.isdir(directory):
        raise exceptions.DataError("{} is not a directory".format(directory))
    found = []
    for name in os.listdir(directory):
        match = _PATCH_NAME.match(name)
        if match:
            found.append((int(match.group(1)), os.path.join(directory, name)))
    if not found:
        raise exceptions.DataError("{} holds no patch_<index> files".format(directory))
    return [path for _, path in sorted(found)]


@cli.command()
@click.option("--plan", "plan_path", required=True, help="The plan.json written by tile.")
@click.option("--patches", required=True, help="The directory of patch_<index> files.")
@click.option("--out", "out_path", required=True, help=_image_out_help)
def merge(plan_path, patches, out_path):
    """Merge patches back into a full image.

    Grayscale PNG patches are label maps merged by majority vote; RGB PNG and
    raw tensor patches are averaged where they overlap.
    """
    with open(plan_path) as fd:
        plan = tiler.loads_plan(fd.read())
    paths = _patch_files(patches)
    if not paths[0].endswith(RAW_SUFFIX) and png_mode(paths[0]) in ("L", "P"):
        labels = ordered_map(read_label_png, paths, _threads())
        write_label_png(tiler.merge_labels(plan, labels), out_path)
        return
    arrays = ordered_map(_read_image, paths, _threads())
    _write_image(tiler.merge_logits(plan, arrays), out_path)


@cli.command("eval")
@click.option("--pred", required=True, help="A directory of predicted label PNG files.")
@click.option("--gt", required=True, help="A directory of ground-truth label PNG files.")
@click.option("--num-categories", type=click.IntRange(1, 255), help="The category count C.")
@click.option("--out", help="The report file; standard output if not given.")
def eval_command(pred, gt, num_categories, out):
    """Score predicted label maps against the ground truth."""
    names = _list_pngs(gt)
    missing = [name for name in names if not os.path.exists(os.path.join(pred, name))]
    if missing:
        raise exceptions.DataError("{} has no prediction for {}".format(pred, ", ".join(missing)))
    pairs = ordered_map(
        lambda name: (
            read_label_png(os.path.join(pred, name)),
            read_label_png(os.path.join(gt, name)),
        ),
        names,
        _threads(),
    )
    if num_categories is None:
        present = [c for p, g in pairs for c in p.categories() + g.categories()]
        num_categories = max(present) + 1 if present else 1
    empty = metrics.ConfusionMatrix(num_categories)
    matrices = ordered_map(lambda pair: metrics.accumulate(empty, *pair), pairs, _threads())
    total = empty
    for matrix in matrices:
        total = total + matrix
    _emit(metrics.report(total), out, manifest.EVAL_SCHEMA)


@cli.command("train-toy")
@click.option("--out-dir", required=True, help="The directory to write the checkpoint to.")
@click.option("--iterations", type=click.IntRange(min=1), help="The number of updates.")
@click.option("--size", type=click.IntRange(min=32), help="The side of the scenes.")
@click.option("--num-categories", type=click.IntRange(2, 8), help="The category count C.")
@click.option("--scenes", type=click.IntRange(min=1), help="The number of training scenes.")
@click.option("--lr", type=click.FloatRange(min=0), help="The base learning rate.")
@click.option("--batch-size", type=click.IntRange(min=1), help="Scenes per update.")
@click.option("--downsample", type=click.Choice(DOWNSAMPLERS), help=_downsample_help)
def train_toy(out_dir, iterations, size, num_categories, scenes, lr, batch_size, downsample):
    """Train the toy network on synthetic scenes."""
    size = _setting(size, "train", "size")
    num_categories = _setting(num_categories, "train", "num_categories")
    seed = config.conf["seed"]
    cfg = TrainConfig.from_config(
        config.conf, lr=lr, iterations=iterations, batch_size=batch_size
    )
    dataset = gen_dataset(seed, _setting(scenes, "train", "scenes"), size, num_categories)
    downsample = _setting(downsample, "train", "downsample")
    net = ToyWSDNet(num_categories, seed=seed, downsample=downsample)
    every = max(1, cfg.iterations // 20)

    def _progress(sender, iteration, report, lr):
        if iteration % every == 0 or iteration == cfg.iterations - 1:
            _log.info(
                "training progress",
                extra={"fields": dict(report.as_dict(), iteration=iteration, lr=lr)},
            )

    train_iteration_signal.connect(_progress)
    try:
        result = train(net, dataset, cfg)
    finally:
        train_iteration_signal.disconnect(_progress)
    save_checkpoint(net, out_dir)
    manifest.dump(
        [report.as_dict() for report in result.history],
        os.path.join(out_dir, "history.json"),
        manifest.HISTORY_SCHEMA,
    )
    total = evaluate(net, dataset)
    summary = {
        "iterations": cfg.iterations,
        "parameters": net.parameter_count(),
        "initial_loss": result.history[0].total,
        "final_loss": result.history[-1].total,
        "train_accuracy": metrics.accuracy(total),
        "train_miou": metrics.miou(total),
        "size": size,
        "num_categories": num_categories,
        "downsample": downsample,
    }
    _emit(summary, None)


@cli.command("ablate-toy")
@click.option("--iterations", type=click.IntRange(min=1), help="The number of updates.")
@click.option("--size", type=click.IntRange(min=32), help="The side of the scenes.")
@click.option("--num-categories", type=click.IntRange(2, 8), help="The category count C.")
@click.option("--scenes", type=click.IntRange(min=1), help="The number of training scenes.")
@click.option("--lr", type=click.FloatRange(min=0), help="The base learning rate.")
@click.option(
    "--downsample",
    "downsamples",
    multiple=True,
    type=click.Choice(DOWNSAMPLERS),
    help="A deep-branch reduction to compare; repeat for several. Defaults to all.",
)
@click.option(
    "--recon",
    "recons",
    multiple=True,
    type=click.Choice(RECON_MODES),
    help="A reconstruction loss to compare; repeat for several. Defaults to all.",
)
def ablate_toy(iterations, size, num_categories, scenes, lr, downsamples, recons):
    """Train every toy network variant on the same scenes and compare them.

    Each variant is scored on a second set of scenes drawn after the training
    scenes from the same seed.
    """
    size = _setting(size, "train", "size")
    num_categories = _setting(num_categories, "train", "num_categories")
    scenes = _setting(scenes, "train", "scenes")
    seed = config.conf["seed"]
    cfg = TrainConfig.from_config(config.conf, lr=lr, iterations=iterations)
    drawn = gen_dataset(seed, 2 * scenes, size, num_categories)
    results = compare_variants(
        drawn[:scenes],
        num_categories,
        cfg,
        downsamples=downsamples or DOWNSAMPLERS,
        recons=recons or RECON_MODES,
        seed=seed,
        eval_set=drawn[scenes:],
        threads=_threads(),
    )
    _emit([result.as_dict() for result in results], None)


@cli.command("infer-toy")
@click.option("--checkpoint", required=True, help="A directory written by train-toy.")
@click.option("--in", "in_path", required=True, help="An RGB PNG or 3-channel .utsr image.")
@click.option("--out", "out_path", required=True, help="The label PNG to write.")
@click.option("--patch", type=click.IntRange(min=1), help=_patch_help)
@click.option("--overlap", type=click.IntRange(min=0), help=_overlap_help)
def infer_toy(checkpoint, in_path, out_path, patch, overlap):
    """Segment an image with a trained toy network.

    Images larger than the patch are segmented window by window and the
    window logits are averaged where they overlap.
    """
    net = load_checkpoint(checkpoint)
    image = _read_image(in_path)
    patch = _setting(patch, "tiler", "patch")
    height, width = image.shape[1:]
    if height <= patch and width <= patch:
        logits = predict_logits(net, image)
        labels = np.argmax(logits, axis=0).astype(np.uint8)
    else:
        plan = tiler.plan_tiles(width, height, patch, _setting(overlap, "tiler", "overlap"))
        labels = np.asarray(predict_tiled(net, image, plan, _threads()))
    write_label_png(labels, out_path)
