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
Saving and loading network parameters.

A checkpoint is a directory holding ``checkpoint.utsr``, every parameter
flattened and concatenated into one rank-1 raw tensor, and
``checkpoint.json``, which records where each parameter starts and its shape.
"""

import logging
import os

import numpy as np

from .. import exceptions, manifest
from ..core import Tensor, read_raw_tensor, write_raw_tensor
from .network import ToyWSDNet


_log = logging.getLogger(__name__)

TENSOR_FILE = "checkpoint.utsr"
MANIFEST_FILE = "checkpoint.json"


def checkpoint_document(net):
    """The manifest describing the parameter layout of ``net``."""
    layers = []
    offset = 0
    for name, value in net.params.items():
        layers.append({"name": name, "shape": list(value.shape), "offset": offset})
        offset += value.size
    return {
        "num_categories": net.num_categories,
        "downsample": net.downsample,
        "layers": layers,
    }


def save_checkpoint(net, directory):
    """
    Write the parameters of ``net`` to ``directory``, creating it if needed.

    Returns:
        tuple: The paths of the tensor file and the manifest.
    """
    if not os.path.isdir(directory):
        os.makedirs(directory)
    flat = np.concatenate([value.ravel() for value in net.params.values()])
    tensor_path = os.path.join(directory, TENSOR_FILE)
    manifest_path = os.path.join(directory, MANIFEST_FILE)
    write_raw_tensor(Tensor(flat), tensor_path)
    manifest.dump(checkpoint_document(net), manifest_path, manifest.CHECKPOINT_SCHEMA)
    _log.info(
        "saved checkpoint",
        extra={"fields": {"directory": str(directory), "parameters": int(flat.size)}},
    )
    return tensor_path, manifest_path


def load_checkpoint(directory, dtype=np.float32):
    """
    Rebuild a network from a checkpoint directory.

    Raises:
        exceptions.ManifestError: If the manifest is invalid or doesn't match
            the network layout or the tensor.
        exceptions.FormatError: If the tensor file is malformed.
    """
    document = manifest.load(
        os.path.join(directory, MANIFEST_FILE), manifest.CHECKPOINT_SCHEMA
    )
    flat = read_raw_tensor(os.path.join(directory, TENSOR_FILE))
    if flat.rank != 1:
        raise exceptions.ManifestError(
            "checkpoint tensor must have rank 1, not {}".format(flat.rank)
        )
    net = ToyWSDNet(
        document["num_categories"],
        dtype=dtype,
        downsample=document.get("downsample", "dwt"),
    )
    expected = checkpoint_document(net)
    if document["layers"] != expected["layers"]:
        raise exceptions.ManifestError(
            "the checkpoint layout does not match the {} network for {} categories".format(
                net.downsample, net.num_categories
            )
        )
    last = expected["layers"][-1]
    size = last["offset"] + int(np.prod(last["shape"]))
    if flat.dims[0] != size:
        raise exceptions.ManifestError(
            "the checkpoint holds {} values but the network has {}".format(flat.dims[0], size)
        )
    params = {}
    for layer in document["layers"]:
        count = int(np.prod(layer["shape"]))
        params[layer["name"]] = flat.data[layer["offset"] : layer["offset"] + count].reshape(
            layer["shape"]
        )
    net.set_parameters(params)
    return net
