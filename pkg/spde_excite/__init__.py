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
Measure the excitation index of the stochastic heat equation.

This package simulates du = nu u'' dt + lambda sigma(u) dW on an interval
with Dirichlet or Neumann boundary conditions, estimates how fast the
energy E_t(lambda) grows with the noise level, and validates the heat
kernel and renewal-equation estimates the growth law rests on.
"""

__author__ = "The spde-excite developers"
__copyright__ = "Copyright 2026 The spde-excite developers"
__license__ = ("Apache License, version 2.0 "
               "<https://www.apache.org/licenses/LICENSE-2.0>")

# Convenience export of public functions/types
from .config import ConfigError, ExperimentConfig, parse_config  # noqa
from .model import KernelKind, KernelParams, SimConfig  # noqa
from ._version import __version__  # noqa
