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

import numpy as np
import pytest
from scipy.integrate import quad

from spde_excite.quadrature import QuadratureError, composite_simpson


def test_simpson_smooth():
    assert composite_simpson(np.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-9)


def test_simpson_breakpoints():
    def fn(x):
        return np.abs(x - 0.3)

    value = composite_simpson(fn, 0.0, 1.0, breakpoints=(0.3, 5.0))
    assert value == pytest.approx(0.5 * 0.3 ** 2 + 0.5 * 0.7 ** 2, abs=1e-12)


def test_simpson_vector_integrand():
    ks = np.arange(1, 4)

    def fn(nodes):
        return np.cos(ks[:, None] * nodes[None, :])

    values = composite_simpson(fn, 0.0, 1.0)
    np.testing.assert_allclose(values, np.sin(ks) / ks, atol=1e-9)


def test_simpson_matches_adaptive_quadrature():
    def fn(x):
        return np.exp(-((x - 0.4) ** 2) / 0.01)

    expected, _ = quad(fn, 0.0, 1.0, epsabs=1e-13)
    assert composite_simpson(fn, 0.0, 1.0) == pytest.approx(expected, abs=1e-8)


def test_simpson_not_converged():
    def spike(x):
        return np.exp(-1e6 * (x - 0.5) ** 2)

    with pytest.raises(QuadratureError) as exc_info:
        composite_simpson(spike, 0.0, 1.0, start=4, max_level=1)
    assert exc_info.value.error > 0
    with pytest.raises(ValueError):
        composite_simpson(spike, 0.0, 1.0, max_level=0)
