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

import enum
from dataclasses import dataclass
from typing import Optional


DEFAULT_TOL = 1e-12
MIN_IMAGES = 3


class KernelKind(enum.Enum):
    GAUSSIAN = "gaussian"
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @property
    def bounded(self):
        return self is not KernelKind.GAUSSIAN


KIND_MAP = {_.value: _ for _ in KernelKind}


def get_kind(name):
    if isinstance(name, KernelKind):
        return name
    try:
        return KIND_MAP[str(name).strip().lower()]
    except KeyError:
        raise ValueError(f"Unknown kernel kind: {name}")


@dataclass(frozen=True)
class KernelParams:
    """\
    Interval (0, L), diffusion coefficient and image-series truncation.

    The kernels are normalized as exp(-(x-y)^2 / (4 nu t)) / sqrt(4 pi nu t):
    nu = 1 gives the textbook image formulas, nu = 1/2 the generator of
    the (1/2) Laplacian. If ``images`` is set, exactly that many image
    pairs are summed on each side; otherwise the count is chosen so that
    the certified tail bound does not exceed ``tol``.
    """
    L: float = 1.0
    nu: float = 1.0
    images: Optional[int] = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"interval length must be positive, got L={self.L!r}")
        if not self.nu > 0:
            raise ValueError(f"diffusion must be positive, got nu={self.nu!r}")
        if self.images is not None and self.images < 1:
            raise ValueError(f"image count must be >= 1, got {self.images!r}")
        if self.images is None and not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got tol={self.tol!r}")

    def contains(self, x):
        return 0.0 <= x <= self.L
