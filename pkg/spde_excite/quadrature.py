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
from scipy.integrate import simpson


class QuadratureError(RuntimeError):

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


def _panels(a, b, breakpoints):
    cuts = sorted({float(_) for _ in breakpoints if a < _ < b})
    edges = [a] + cuts + [b]
    return list(zip(edges[:-1], edges[1:]))


def composite_simpson(fn, a, b, breakpoints=(), tol=1e-8, start=64, max_level=14):
    """\
    Integrate fn over [a, b] by composite Simpson, splitting panels at
    the given breakpoints and doubling the node count until successive
    estimates differ by less than tol (scaled by max(1, |estimate|)).

    fn maps a 1-D array of nodes to an array whose last axis runs over
    the nodes, so many integrals sharing the same nodes (for instance one
    per output grid point) are computed at once. Returns an array with
    the last axis integrated out, or a float for scalar integrands.
    """
    if max_level < 1:
        raise ValueError(f"max_level must be >= 1, got {max_level!r}")
    total = 0.0
    for lo, hi in _panels(a, b, breakpoints):
        m = start
        nodes = np.linspace(lo, hi, m + 1)
        prev = simpson(fn(nodes), x=nodes, axis=-1)
        for _ in range(max_level):
            m *= 2
            nodes = np.linspace(lo, hi, m + 1)
            est = simpson(fn(nodes), x=nodes, axis=-1)
            diff = np.max(np.abs(est - prev))
            scale = max(1.0, float(np.max(np.abs(est))))
            prev = est
            if diff < tol * scale:
                break
        else:
            raise QuadratureError(
                f"composite Simpson did not converge on [{lo}, {hi}] after {m} intervals "
                f"(last change {diff:.3g}, tolerance {tol:.3g})",
                estimate=est, error=diff
            )
        total = total + est
    return total
