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
A small two-branch wavelet segmentation network written with numpy, its
training loop and a synthetic scene generator.
"""

from .ablation import VariantResult, compare_variants, evaluate  # noqa: F401
from .checkpoint import load_checkpoint, save_checkpoint  # noqa: F401
from .layers import ConvLayer  # noqa: F401
from .network import (  # noqa: F401
    DOWNSAMPLERS,
    ForwardResult,
    ToyWSDNet,
    predict,
    predict_logits,
    predict_tiled,
)
from .scenes import gen_dataset, gen_scene  # noqa: F401
from .train import TrainConfig, TrainResult, train  # noqa: F401
