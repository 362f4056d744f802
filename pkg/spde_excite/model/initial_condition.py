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


class InitialCondition:
    """\
    Nonnegative, bounded initial datum u_0 on [0, L].

    Instances are callables accepting scalars or arrays. ``breakpoints``
    lists the points where the datum is not smooth, so that quadrature
    panels can be split there.
    """

    def __call__(self, y):
        raise NotImplementedError

    @property
    def breakpoints(self):
        return ()

    @property
    def support(self):
        return None

    def validate(self, L):
        pass

    def describe(self):
        raise NotImplementedError


class Bump(InitialCondition):

    def __init__(self, center, half_width, height=1.0):
        if not half_width > 0:
            raise ValueError(f"bump half-width must be positive, got {half_width!r}")
        if height < 0:
            raise ValueError(f"bump height must be nonnegative, got {height!r}")
        self.center = float(center)
        self.half_width = float(half_width)
        self.height = float(height)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        r = (y - self.center) / self.half_width
        inside = np.abs(r) < 1.0
        return np.where(inside, self.height * np.cos(0.5 * np.pi * r) ** 2, 0.0)

    @property
    def breakpoints(self):
        return (self.center - self.half_width, self.center + self.half_width)

    @property
    def support(self):
        return self.breakpoints

    def validate(self, L):
        lo, hi = self.support
        if lo <= 0 or hi >= L:
            raise ValueError(f"bump support [{lo}, {hi}] must lie strictly inside (0, {L})")

    def describe(self):
        return f"bump({self.center!r}, {self.half_width!r}, {self.height!r})"


class Flat(InitialCondition):

    def __init__(self, height=1.0):
        if height < 0:
            raise ValueError(f"flat height must be nonnegative, got {height!r}")
        self.height = float(height)

    def __call__(self, y):
        return np.full(np.shape(y), self.height)

    def describe(self):
        return f"flat({self.height!r})"


class Table(InitialCondition):
    """\
    Sampled values on an increasing grid, linearly interpolated.
    """

    def __init__(self, points, values):
        points = np.asarray(points, dtype=float)
        values = np.asarray(values, dtype=float)
        if points.ndim != 1 or points.shape != values.shape or points.size < 2:
            raise ValueError("table needs matching 1-D points and values (at least two)")
        if np.any(np.diff(points) <= 0):
            raise ValueError("table points must be strictly increasing")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("table values must be finite and nonnegative")
        self.points = points
        self.values = values

    def __call__(self, y):
        return np.interp(y, self.points, self.values, left=0.0, right=0.0)

    @property
    def breakpoints(self):
        return tuple(self.points)

    def validate(self, L):
        if self.points[0] < 0 or self.points[-1] > L:
            raise ValueError(f"table points must lie in [0, {L}]")

    def describe(self):
        return f"table({self.points.size} points)"
