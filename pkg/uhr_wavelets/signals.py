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
Signals sent during training using :class:`blinker.base.Signal` signals.
"""
from __future__ import absolute_import, unicode_literals

import blinker

_signals = blinker.Namespace()

train_iteration_signal = _signals.signal("train_iteration")
train_iteration_signal.__doc__ = """
A signal triggered after every training iteration. The sender is the network
being trained. Handlers should accept the keyword arguments ``iteration``
(zero-based), ``report``, the :class:`uhr_wavelets.loss.LossReport` averaged
over the batch, and ``lr``, the learning rate used for the update.
"""

train_finished_signal = _signals.signal("train_finished")
train_finished_signal.__doc__ = """
A signal triggered once training ends. The sender is the trained network and
handlers should accept a single keyword argument, ``history``, the list of
:class:`uhr_wavelets.loss.LossReport` instances, one per iteration.
"""
