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
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .initial_condition import Flat, InitialCondition
from .kernel_params import KernelKind, KernelParams
from .noise import Linear, NoiseCoefficient


CFL_BOUND = 0.25
WINDOW_BOUND = 0.2


class BoundaryCondition(enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @property
    def kernel_kind(self):
        return KernelKind(self.value)


def get_bc(name):
    if isinstance(name, BoundaryCondition):
        return name
    try:
        return BoundaryCondition(str(name).strip().lower())
    except ValueError:
        raise ValueError(f"Unknown boundary condition: {name}")


def cfl_dt(params, nx):
    """\
    Largest time step allowed by nu * dt / dx^2 <= 1/4.
    """
    dx = params.L / (nx + 1)
    return CFL_BOUND * dx * dx / params.nu


@dataclass(frozen=True)
class SimConfig:
    params: KernelParams = field(default_factory=lambda: KernelParams(nu=0.5))
    bc: BoundaryCondition = BoundaryCondition.DIRICHLET
    sigma: NoiseCoefficient = field(default_factory=Linear)
    u0: InitialCondition = field(default_factory=Flat)
    nx: int = 255
    dt: float = 5e-6
    t_end: float = 0.05
    lam: float = 1.0

    def __post_init__(self):
        if self.nx < 1:
            raise ValueError(f"nx must be >= 1, got {self.nx!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.t_end < self.dt:
            raise ValueError(f"t_end={self.t_end!r} must be >= dt={self.dt!r}")
        if self.lam < 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam!r}")
        bound = cfl_dt(self.params, self.nx)
        if self.dt > bound * (1 + 1e-12):
            raise ValueError(
                f"dt={self.dt!r} violates nu*dt/dx^2 <= {CFL_BOUND} for nx={self.nx} "
                f"(dx={self.dx!r}); largest allowed dt is {bound!r}"
            )
        if self.bc is BoundaryCondition.DIRICHLET:
            self.u0.validate(self.params.L)
        if self.lam ** 2 * self.dx > WINDOW_BOUND:
            warnings.warn(
                f"lambda^2 * dx = {self.lam ** 2 * self.dx:.3g} exceeds {WINDOW_BOUND}: "
                "the grid does not resolve the solution's correlation length",
                RuntimeWarning
            )

    @property
    def dx(self):
        return self.params.L / (self.nx + 1)

    @property
    def ratio(self):
        return self.params.nu * self.dt / (self.dx * self.dx)

    @property
    def grid(self):
        return np.linspace(0.0, self.params.L, self.nx + 2)

    def steps_to(self, t):
        """\
        Number of steps needed to reach time t, which must be a multiple
        of dt within 1e-9 relative.
        """
        if t < 0 or t > self.t_end * (1 + 1e-12):
            raise ValueError(f"time {t!r} outside [0, t_end={self.t_end!r}]")
        n = round(t / self.dt)
        if abs(n * self.dt - t) > 1e-9 * max(t, self.dt):
            raise ValueError(f"time {t!r} is not a multiple of dt={self.dt!r}")
        return n

    def with_lambda(self, lam):
        return replace(self, lam=float(lam))
