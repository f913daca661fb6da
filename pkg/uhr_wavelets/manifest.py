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
JSON schemas for every JSON document the tool reads or writes, and helpers
that serialize and validate them.

Documents are written with sorted keys so equal inputs give byte-identical
files.
"""

import json
import logging

import jsonschema

from .exceptions import ManifestError


_log = logging.getLogger(__name__)

_DRAFT = "http://json-schema.org/draft-04/schema#"

_COUNT = {"type": "integer", "minimum": 0}
_EXTENT = {"type": "integer", "minimum": 1}

#: The tile plan written next to the patches by the "tile" command.
TILE_PLAN_SCHEMA = {
    "$schema": _DRAFT,
    "description": "A tiling of an image into overlapping windows",
    "type": "object",
    "properties": {
        "image_w": _EXTENT,
        "image_h": _EXTENT,
        "patch": _EXTENT,
        "overlap": _COUNT,
        "windows": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {"x0": _COUNT, "y0": _COUNT, "w": _EXTENT, "h": _EXTENT},
                "required": ["x0", "y0", "w", "h"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["image_w", "image_h", "patch", "overlap", "windows"],
    "additionalProperties": False,
}

#: The sidecar describing a packet-leaves tensor written by the "dwt" command.
DWT_SIDECAR_SCHEMA = {
    "$schema": _DRAFT,
    "description": "The original extents of a wavelet-packet tensor",
    "type": "object",
    "properties": {
        "height": _EXTENT,
        "width": _EXTENT,
        "levels": _COUNT,
        "channels": _EXTENT,
    },
    "required": ["height", "width", "levels", "channels"],
    "additionalProperties": False,
}

#: The index written by the "pyramid" command.
PYRAMID_SCHEMA = {
    "$schema": _DRAFT,
    "description": "The files of a Laplacian residual pyramid",
    "type": "object",
    "properties": {
        "height": _EXTENT,
        "width": _EXTENT,
        "levels": _EXTENT,
        "residuals": {"type": "array", "items": {"type": "string"}},
        "base": {"type": "string"},
        "shallow": {"type": "string"},
    },
    "required": ["height", "width", "levels", "residuals", "base"],
}

#: The manifest describing how a checkpoint's flat tensor splits into layers.
CHECKPOINT_SCHEMA = {
    "$schema": _DRAFT,
    "description": "The parameter layout of a toy network checkpoint",
    "type": "object",
    "properties": {
        "num_categories": {"type": "integer", "minimum": 2, "maximum": 255},
        "downsample": {"enum": ["dwt", "bilinear", "cnn"]},
        "layers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "shape": {"type": "array", "items": _EXTENT, "minItems": 1},
                    "offset": _COUNT,
                },
                "required": ["name", "shape", "offset"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["num_categories", "layers"],
}

_PER_CATEGORY_METRIC = {
    "type": "object",
    "properties": {
        "id": _COUNT,
        "iou": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "f1": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
    },
    "required": ["id", "iou", "f1"],
}

#: The report written by the "eval" command.
EVAL_SCHEMA = {
    "$schema": _DRAFT,
    "description": "Segmentation quality of predicted label maps",
    "type": "object",
    "properties": {
        "miou": {"type": "number", "minimum": 0, "maximum": 1},
        "f1": {"type": "number", "minimum": 0, "maximum": 1},
        "accuracy": {"type": "number", "minimum": 0, "maximum": 1},
        "per_category": {"type": "array", "items": _PER_CATEGORY_METRIC},
    },
    "required": ["miou", "f1", "accuracy", "per_category"],
}

#: The report written by the "richness" command.
RICHNESS_SCHEMA = {
    "$schema": _DRAFT,
    "description": "The scene context richness of a set of label maps",
    "type": "object",
    "properties": {
        "R": {"type": "number", "minimum": 0},
        "q": {"type": "number", "exclusiveMinimum": True, "minimum": 0},
        "region_size": {
            "type": ["array", "null"],
            "items": _EXTENT,
            "minItems": 2,
            "maxItems": 2,
        },
        "regions_per_image": _COUNT,
        "per_category": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "id": _COUNT,
                    "O": {"type": "number", "minimum": 0},
                    "p": {"type": "number", "minimum": 0, "maximum": 1},
                },
                "required": ["id", "O", "p"],
            },
        },
        "mean_categories": {"type": "number", "minimum": 0},
        "mean_instances": {"type": "number", "minimum": 0},
    },
    "required": ["R", "q", "region_size", "regions_per_image", "per_category"],
}

#: The loss history written by the "train-toy" command.
HISTORY_SCHEMA = {
    "$schema": _DRAFT,
    "description": "The loss reports of a training run, one per iteration",
    "type": "array",
    "items": {
        "type": "object",
        "properties": dict(
            (key, {"type": "number"})
            for key in ("total", "seg", "aux", "wsl", "wsl_low", "wsl_high", "sr")
        ),
        "required": ["total", "seg", "aux", "wsl", "wsl_low", "wsl_high", "sr"],
    },
}


def validate(document, schema):
    """
    Validate a JSON-compatible document against one of the schemas above.

    Args:
        document: The decoded document.
        schema (dict): The schema to validate against.

    Raises:
        ManifestError: If the document doesn't conform to the schema.
    """
    try:
        jsonschema.validate(document, schema)
    except jsonschema.exceptions.ValidationError as e:
        raise ManifestError("{} failed validation: {}".format(schema["description"], e.message))


def dumps(document, schema):
    """
    Validate ``document`` and serialize it to a JSON string.

    Returns:
        str: The document with sorted keys and a trailing newline.
    """
    validate(document, schema)
    return json.dumps(document, sort_keys=True, allow_nan=False) + "\n"


def loads(text, schema, source="<string>"):
    """
    Parse and validate a JSON document.

    Raises:
        ManifestError: If the text isn't JSON or doesn't match the schema.
    """
    try:
        document = json.loads(text)
    except ValueError as e:
        raise ManifestError("{} is not valid JSON: {}".format(source, e))
    validate(document, schema)
    return document


def dump(document, path, schema):
    """Write a validated document to ``path``."""
    text = dumps(document, schema)
    with open(path, "w") as fd:
        fd.write(text)
    _log.debug("wrote manifest", extra={"fields": {"path": str(path)}})


def load(path, schema):
    """Read and validate the document at ``path``."""
    try:
        with open(path, "r") as fd:
            text = fd.read()
    except IOError as e:
        raise ManifestError("Unable to read {}: {}".format(path, e.strerror))
    return loads(text, schema, source=str(path))
