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

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class IndexFit:
    """\
    Least-squares fit of log log Y against log x.

    ``slope`` is None when fewer than three usable points survive;
    ``rejected`` lists the x values whose log Y was not positive and
    ``window`` the (min, max) x actually fitted.
    """
    slope: Optional[float]
    intercept: Optional[float]
    stderr: Optional[float]
    residual_se: Optional[float]
    window: Optional[tuple]
    n_points: int
    rejected: tuple = ()

    @property
    def defined(self):
        return self.slope is not None

    def as_dict(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "residual_se": self.residual_se,
            "window": list(self.window) if self.window else None,
            "n_points": self.n_points,
            "rejected": list(self.rejected),
        }


@dataclass(frozen=True)
class SweepResult:
    lambdas: np.ndarray
    log_energy: np.ndarray
    log_energy_ci: np.ndarray
    inf: np.ndarray
    sup: np.ndarray
    inf_eps: np.ndarray
    n_effective: np.ndarray
    failed: np.ndarray
    fit: IndexFit
    fits: dict = field(default_factory=dict)
    dropped: tuple = ()
