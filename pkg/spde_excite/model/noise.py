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

import numpy as np


class NoiseCoefficient:
    """\
    Noise coefficient sigma with sigma(0) = 0 and
    lower <= |sigma(u) / u| <= upper for u != 0.
    """

    linear = False

    def __call__(self, u):
        raise NotImplementedError

    @property
    def lower(self):
        raise NotImplementedError

    @property
    def upper(self):
        raise NotImplementedError

    def describe(self):
        raise NotImplementedError


class Linear(NoiseCoefficient):

    linear = True

    def __init__(self, c=1.0):
        if not c > 0:
            raise ValueError(f"noise coefficient must be positive, got c={c!r}")
        self.c = float(c)

    def __call__(self, u):
        return self.c * u

    @property
    def lower(self):
        return self.c

    @property
    def upper(self):
        return self.c

    def describe(self):
        return f"linear({self.c!r})"


class SinePerturbed(NoiseCoefficient):

    def __init__(self, c=1.0, delta=0.5):
        if not c > 0:
            raise ValueError(f"noise coefficient must be positive, got c={c!r}")
        if not 0 <= delta < 1:
            raise ValueError(f"delta must lie in [0, 1), got {delta!r}")
        self.c = float(c)
        self.delta = float(delta)

    def __call__(self, u):
        return self.c * u * (1.0 + self.delta * np.sin(u))

    @property
    def lower(self):
        return self.c * (1.0 - self.delta)

    @property
    def upper(self):
        return self.c * (1.0 + self.delta)

    def describe(self):
        return f"sine({self.c!r}, {self.delta!r})"
