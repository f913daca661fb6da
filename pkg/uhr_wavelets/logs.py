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
Logging helpers.

Diagnostics are written as one JSON object per line so scripts can consume
them without parsing prose. Structured values are attached to a record with
``extra={"fields": {...}}``::

    _log.info("tile written", extra={"fields": {"index": 3, "path": path}})

Records carry no timestamps, so two runs with the same inputs produce the
same diagnostics.
"""

import json
import logging


class JsonLinesFormatter(logging.Formatter):
    """A :class:`logging.Formatter` that renders records as single-line JSON."""

    def format(self, record):
        entry = {
            "level": record.levelname,
            "logger": record.name,
            "event": record.getMessage(),
        }
        fields = getattr(record, "fields", None)
        if fields:
            entry.update(fields)
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry, sort_keys=True, default=str)
