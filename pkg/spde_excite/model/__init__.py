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

"""
Domain types of the stochastic heat equation laboratory.

Kernel parameters, initial data, noise coefficients and simulation
settings, plus the containers returned by the solvers and estimators.
"""

from .field import FieldMoment, FieldSnapshot
from .initial_condition import Bump, Flat, InitialCondition, Table
from .kernel_params import KernelKind, KernelParams, get_kind
from .noise import Linear, NoiseCoefficient, SinePerturbed
from .renewal_spec import GridFunction, RenewalSpec
from .sim_config import BoundaryCondition, SimConfig, cfl_dt, get_bc
from .sweep_result import IndexFit, SweepResult

__all__ = [
    "BoundaryCondition",
    "Bump",
    "FieldMoment",
    "FieldSnapshot",
    "Flat",
    "GridFunction",
    "IndexFit",
    "InitialCondition",
    "KernelKind",
    "KernelParams",
    "Linear",
    "NoiseCoefficient",
    "RenewalSpec",
    "SimConfig",
    "SinePerturbed",
    "SweepResult",
    "Table",
    "cfl_dt",
    "get_bc",
    "get_kind",
]
