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

import math
import pathlib

import numpy as np
import pytest
from scipy.integrate import quad


THIS_DIR = pathlib.Path(__file__).absolute().parent

SWEEP_CONFIG = """\
[run]
replicas = 8
seed = 7
batch_size = 4

[kernel]
L = 1.0

[sim]
bc = neumann
u0 = flat
nx = 15
t_obs = 0.01

[sweep]
lambda_min = 0.5
lambda_max = 1.5
lambda_count = 3
"""


class Helpers:
    """\
    Eigenfunction series for the interval kernels, independent of the
    image sums under test.
    """

    TERMS = 400

    @classmethod
    def _decay(cls, t, nu, L):
        k = np.arange(1, cls.TERMS + 1)
        return k, np.exp(-nu * (k * math.pi / L) ** 2 * t)

    @classmethod
    def dirichlet_series(cls, t, x, y, nu=1.0, L=1.0):
        k, decay = cls._decay(t, nu, L)
        return float(2 / L * np.sum(decay * np.sin(k * math.pi * x / L) * np.sin(k * math.pi * y / L)))

    @classmethod
    def neumann_series(cls, t, x, y, nu=1.0, L=1.0):
        k, decay = cls._decay(t, nu, L)
        return float(1 / L + 2 / L * np.sum(decay * np.cos(k * math.pi * x / L) * np.cos(k * math.pi * y / L)))

    @classmethod
    def dirichlet_mass_series(cls, t, x, nu=1.0, L=1.0):
        k, decay = cls._decay(t, nu, L)
        odd = k % 2 == 1
        return float(np.sum(4 / (k[odd] * math.pi) * decay[odd] * np.sin(k[odd] * math.pi * x / L)))

    @classmethod
    def dirichlet_semigroup_series(cls, u0, t, x, nu=1.0, L=1.0, terms=200):
        lo, hi = u0.support if u0.support else (0.0, L)
        total = 0.0
        for k in range(1, terms + 1):
            w = k * math.pi / L
            coeff, _ = quad(lambda y: u0(y) * math.sin(w * y), lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)
            total += 2 / L * math.exp(-nu * w * w * t) * math.sin(w * x) * coeff
        return total

    @staticmethod
    def write_config(path, text):
        path = pathlib.Path(path)
        path.write_text(text)
        return path


@pytest.fixture
def helpers():
    return Helpers


# pytest's default tmpdir returns a py.path object
@pytest.fixture
def tmpdir(tmpdir):
    return pathlib.Path(tmpdir)


@pytest.fixture
def sweep_config(tmpdir):
    return Helpers.write_config(tmpdir / "sweep.ini", SWEEP_CONFIG)
