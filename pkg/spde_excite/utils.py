# Copyright 2026 The spde-excite developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import hashlib
import math

import numpy as np


def geometric_grid(lo, hi, count):
    """\
    count points from lo to hi (both included), equally spaced in log.
    """
    if not 0 < lo <= hi:
        raise ValueError(f"need 0 < lo <= hi, got lo={lo!r}, hi={hi!r}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count!r}")
    if count == 1:
        return [float(lo)]
    return [float(_) for _ in np.geomspace(lo, hi, count)]


def format_float(value):
    """\
    17 significant digits: round-trips every double exactly.
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def json_float(value):
    value = float(value)
    return value if math.isfinite(value) else None


def short_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
