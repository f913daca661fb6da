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
uhr-wavelets can be configured with the ``/etc/uhr-wavelets/config.toml``
file or by setting the ``UHR_WAVELETS_CONF`` environment variable to the path
of the configuration file. The command line ``--conf`` option takes
precedence over both, and explicit command line flags take precedence over
the file.

Each configuration option has a default value. Sections given in the file
are merged key by key with the default section.

.. contents:: Table of Configuration Options
    :local:

A complete example TOML configuration:

.. literalinclude:: ../configs/uhr-wavelets.toml


Generic Options
===============

.. _conf-seed:

seed
----
The seed of every random choice: region sampling, scene generation,
parameter initialisation and the training sample order. Defaults to ``0``.

.. _conf-threads:

threads
-------
The number of worker threads used for independent channels, tiles and
images. Results do not depend on it. Defaults to ``1``.

.. _conf-log-config:

log_config
----------
A dictionary describing the logging configuration to use, in a format accepted
by :func:`logging.config.dictConfig`. By default ``uhr_wavelets`` loggers write
one JSON object per line to standard error using
:class:`uhr_wavelets.logs.JsonLinesFormatter`.


Transform Options
=================

.. _conf-wavelet:

wavelet
-------
``levels``: the number of wavelet-packet levels the ``dwt`` command applies.
Defaults to ``1``.

.. _conf-pyramid:

pyramid
-------
``levels``: the number of Laplacian residuals the ``pyramid`` command
computes. Defaults to ``2``.


Loss Options
============

.. _conf-loss:

loss
----
The weights of the training objective::

    [loss]
    lambda1 = 1.0   # low-frequency (squared) wavelet term
    lambda2 = 0.8   # high-frequency (absolute) wavelet terms
    lambda3 = 0.1   # auxiliary segmentation head
    depth = 3       # wavelet-packet levels of the smooth loss
    recon = "wsl"   # "wsl", "pixel" or "none"


Dataset Options
===============

.. _conf-tiler:

tiler
-----
``patch`` (default ``1000``) and ``overlap`` (default ``120``) of the
sliding windows used by ``tile`` and ``infer-toy``.

.. _conf-richness:

richness
--------
``region`` (default ``512``) is the side of the square regions sampled,
``count`` (default ``64``) the number of regions per image, ``q`` (default
``2.0``) the temperature, ``min_area`` (default ``32``) the smallest instance
counted and ``num_categories`` an optional category count labels are checked
against.


Training Options
================

.. _conf-train:

train
-----
The settings of the ``train-toy`` command::

    [train]
    lr = 0.01
    momentum = 0.9
    poly_power = 0.0    # 0 keeps the learning rate constant
    iterations = 200    # at least 1
    batch_size = 1
    size = 64           # side of the synthetic scenes
    num_categories = 4
    scenes = 8
    downsample = "dwt"  # or "bilinear" or "cnn"
"""
from __future__ import unicode_literals

import copy
import logging
import logging.config
import os

import toml

from . import exceptions
from .loss import RECON_MODES
from .toynet.network import DOWNSAMPLERS


_log = logging.getLogger(__name__)

#: The environment variable naming the configuration file.
CONF_ENV = "UHR_WAVELETS_CONF"

#: The configuration file used when the environment variable is not set.
DEFAULT_PATH = "/etc/uhr-wavelets/config.toml"

#: The default configuration settings for uhr-wavelets. This should not be
#: modified and should be copied with :func:`copy.deepcopy`.
DEFAULTS = dict(
    seed=0,
    threads=1,
    wavelet={"levels": 1},
    pyramid={"levels": 2},
    loss={"lambda1": 1.0, "lambda2": 0.8, "lambda3": 0.1, "depth": 3, "recon": "wsl"},
    tiler={"patch": 1000, "overlap": 120},
    richness={"region": 512, "count": 64, "q": 2.0, "min_area": 32, "num_categories": None},
    train={
        "lr": 0.01,
        "momentum": 0.9,
        "poly_power": 0.0,
        "iterations": 200,
        "batch_size": 1,
        "size": 64,
        "num_categories": 4,
        "scenes": 8,
        "downsample": "dwt",
    },
    log_config={
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"json": {"()": "uhr_wavelets.logs.JsonLinesFormatter"}},
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "formatter": "json",
                "stream": "ext://sys.stderr",
            }
        },
        "loggers": {
            "uhr_wavelets": {"level": "INFO", "propagate": False, "handlers": ["console"]}
        },
        # The root logger configuration; this is a catch-all configuration
        # that applies to all log messages not handled by a different logger
        "root": {"level": "WARNING", "handlers": ["console"]},
    },
)

_SECTIONS = ("wavelet", "pyramid", "loss", "tiler", "richness", "train")


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _require(condition, key, value, description):
    if not condition:
        raise exceptions.ConfigurationException(
            '"{}" must be {}, not {!r}'.format(key, description, value)
        )


def validate_seed(seed):
    """
    Validate the ``seed`` setting.

    Raises:
        exceptions.ConfigurationException: If it isn't a 64-bit unsigned integer.
    """
    _require(
        _is_int(seed) and 0 <= seed < 2 ** 64, "seed", seed, "an integer in 0..2**64-1"
    )


def validate_threads(threads):
    """Validate the ``threads`` setting."""
    _require(_is_int(threads) and threads >= 1, "threads", threads, "a positive integer")


def validate_wavelet(section):
    """Validate the ``wavelet`` section."""
    levels = section["levels"]
    _require(_is_int(levels) and levels >= 0, "wavelet.levels", levels, "a non-negative integer")


def validate_pyramid(section):
    """Validate the ``pyramid`` section."""
    levels = section["levels"]
    _require(_is_int(levels) and levels >= 1, "pyramid.levels", levels, "a positive integer")


def validate_loss(section):
    """
    Validate the ``loss`` section.

    Raises:
        exceptions.ConfigurationException: If a weight is negative, the depth
            is below 1 or the reconstruction loss is unknown.
    """
    for key in ("lambda1", "lambda2", "lambda3"):
        value = section[key]
        _require(_is_number(value) and value >= 0, "loss." + key, value, "a non-negative number")
    depth = section["depth"]
    _require(_is_int(depth) and depth >= 1, "loss.depth", depth, "a positive integer")
    _require(
        section["recon"] in RECON_MODES,
        "loss.recon",
        section["recon"],
        "one of " + ", ".join(RECON_MODES),
    )


def validate_tiler(section):
    """Validate the ``tiler`` section; the overlap must be smaller than the patch."""
    patch = section["patch"]
    overlap = section["overlap"]
    _require(_is_int(patch) and patch >= 1, "tiler.patch", patch, "a positive integer")
    _require(
        _is_int(overlap) and 0 <= overlap < patch,
        "tiler.overlap",
        overlap,
        "an integer in 0..{}".format(patch - 1),
    )


def validate_richness(section):
    """Validate the ``richness`` section."""
    for key in ("region", "count", "min_area"):
        value = section[key]
        _require(_is_int(value) and value >= 0, "richness." + key, value, "a non-negative integer")
    _require(section["region"] >= 1, "richness.region", section["region"], "a positive integer")
    q = section["q"]
    _require(_is_number(q) and q > 0, "richness.q", q, "a positive number")
    categories = section["num_categories"]
    _require(
        categories is None or (_is_int(categories) and 1 <= categories <= 255),
        "richness.num_categories",
        categories,
        "an integer in 1..255",
    )


def validate_train(section):
    """Validate the ``train`` section."""
    for key in ("lr", "poly_power"):
        value = section[key]
        _require(_is_number(value) and value >= 0, "train." + key, value, "a non-negative number")
    momentum = section["momentum"]
    _require(
        _is_number(momentum) and 0 <= momentum < 1, "train.momentum", momentum, "in [0, 1)"
    )
    for key in ("iterations", "batch_size", "size", "scenes"):
        value = section[key]
        _require(_is_int(value) and value >= 1, "train." + key, value, "an integer of at least 1")
    _require(
        section["size"] % 32 == 0, "train.size", section["size"], "a multiple of 32"
    )
    categories = section["num_categories"]
    _require(
        _is_int(categories) and 2 <= categories <= 8,
        "train.num_categories",
        categories,
        "an integer in 2..8",
    )
    _require(
        section["downsample"] in DOWNSAMPLERS,
        "train.downsample",
        section["downsample"],
        "one of " + ", ".join(DOWNSAMPLERS),
    )


_VALIDATORS = {
    "wavelet": validate_wavelet,
    "pyramid": validate_pyramid,
    "loss": validate_loss,
    "tiler": validate_tiler,
    "richness": validate_richness,
    "train": validate_train,
}


class LazyConfig(dict):
    """This class lazy-loads the configuration file."""

    loaded = False

    def __getitem__(self, *args, **kw):
        if not self.loaded:
            self.load_config()
        return super(LazyConfig, self).__getitem__(*args, **kw)

    def get(self, *args, **kw):
        if not self.loaded:
            self.load_config()
        return super(LazyConfig, self).get(*args, **kw)

    def pop(self, *args, **kw):
        raise exceptions.ConfigurationException("Configuration keys cannot be removed!")

    def copy(self, *args, **kw):
        if not self.loaded:
            self.load_config()
        return super(LazyConfig, self).copy(*args, **kw)

    def update(self, *args, **kw):
        if not self.loaded:
            self.load_config()
        return super(LazyConfig, self).update(*args, **kw)

    def setup_logging(self):
        if not self.loaded:
            self.load_config()
        logging.config.dictConfig(self["log_config"])

    def _validate(self):
        """
        Perform checks on the configuration to assert its validity

        Raises:
            ConfigurationException: If the configuration is invalid.
        """
        for key in self:
            if key not in DEFAULTS:
                raise exceptions.ConfigurationException(
                    'Unknown configuration key "{}"! Valid configuration keys are'
                    " {}".format(key, list(DEFAULTS.keys()))
                )
        for section in _SECTIONS:
            if not isinstance(self[section], dict):
                raise exceptions.ConfigurationException(
                    '"{}" must be a table, not {!r}'.format(section, self[section])
                )
            for key in self[section]:
                if key not in DEFAULTS[section]:
                    raise exceptions.ConfigurationException(
                        'Unknown configuration key "{}.{}"! Valid keys are {}'.format(
                            section, key, list(DEFAULTS[section].keys())
                        )
                    )
            _VALIDATORS[section](self[section])
        validate_seed(self["seed"])
        validate_threads(self["threads"])

    def load_config(self, config_path=None):
        """
        Load application configuration from a file and merge it with the default
        configuration.

        If the ``UHR_WAVELETS_CONF`` environment variable is set to a
        filesystem path, the configuration will be loaded from that location.
        Otherwise, the path defaults to ``/etc/uhr-wavelets/config.toml``.
        """
        self.loaded = True
        config = copy.deepcopy(DEFAULTS)

        if config_path is None:
            config_path = os.environ.get(CONF_ENV, DEFAULT_PATH)

        if os.path.exists(config_path):
            _log.info("Loading configuration from {}".format(config_path))
            with open(config_path) as fd:
                try:
                    file_config = toml.load(fd)
                except toml.TomlDecodeError as e:
                    msg = "Failed to parse {}: error at line {}, column {}: {}".format(
                        config_path, e.lineno, e.colno, e.msg
                    )
                    raise exceptions.ConfigurationException(msg)
            for key in file_config:
                name = key.lower()
                if name in _SECTIONS and isinstance(file_config[key], dict):
                    config[name].update(file_config[key])
                else:
                    config[name] = file_config[key]
        else:
            _log.info("The configuration file, {}, does not exist.".format(config_path))

        self.clear()
        super(LazyConfig, self).update(config)
        self._validate()
        return self


#: The configuration dictionary used by uhr-wavelets.
conf = LazyConfig()
