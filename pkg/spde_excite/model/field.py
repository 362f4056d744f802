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

from dataclasses import dataclass

import numpy as np


Z_95 = 1.959963984540054


@dataclass(frozen=True)
class FieldSnapshot:
    time: float
    values: np.ndarray


@dataclass(frozen=True)
class FieldMoment:
    """\
    Per-gridpoint estimate of E|u_t(x)|^2 with 95% half-widths.

    ``failed`` counts replicas that produced non-finite values; they are
    excluded from the estimate and from ``n``.
    """
    x: np.ndarray
    estimate: np.ndarray
    halfwidth: np.ndarray
    n: int
    failed: int = 0

    @property
    def failure_rate(self):
        total = self.n + self.failed
        return self.failed / total if total else 0.0

    @property
    def reliable(self):
        return self.n >= 2 and self.failure_rate <= 0.01
