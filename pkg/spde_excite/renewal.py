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

"""\
The renewal equation f(t) = a + c int_0^t f(s) / sqrt(t - s) ds.

Its solution grows like exp(pi c^2 t), so the growth exponent of f in c
(equivalently in k, with c = b k) is 2. Everything here works with
log-values because the interesting regime overflows double precision.
"""

import math
import warnings

import numpy as np
from scipy.special import erf, erfc, erfcx, gammainc, gammaincc

from .model import GridFunction, IndexFit


COARSE_GRID_RTOL = 1e-2
# in units of 1 / (pi c^2)
GRADED_SPAN = 40.0
LAG_CUTOFF = 50.0
# below this pi c^2 T the exponential weight is dropped
FLAT_RATE = 1e-12


class FitError(ValueError):

    def __init__(self, message, rejected=()):
        super().__init__(message)
        self.rejected = tuple(rejected)


def renewal_closed_form(a, c, t):
    """\
    Exact solution a exp(pi c^2 t) erfc(-c sqrt(pi t)) of the renewal
    equation, returned as (value, log-value). The value is inf once it
    overflows; the log-value is always finite.

    erfc(-z) is computed as 2 - exp(-z^2) erfcx(z), which stays accurate
    for every z >= 0.
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a!r}")
    if c < 0:
        raise ValueError(f"c must be nonnegative, got {c!r}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError(f"t must be nonnegative, got {t!r}")
    z = c * np.sqrt(math.pi * t)
    log_value = math.log(a) + z * z + np.log(2.0 - np.exp(-z * z) * erfcx(z))
    with np.errstate(over="ignore"):
        value = np.exp(log_value)
    if log_value.ndim == 0:
        return float(value), float(log_value)
    return value, log_value


def _panel_moments(beta, u):
    """\
    Integrals of x^(-1/2) e^(-beta x) and x^(1/2) e^(-beta x) over the
    panels between consecutive entries of the decreasing lags ``u``.

    A panel whose nearer lag has beta u >= 1 is differenced through the
    upper incomplete gamma function, any other through the lower one.
    """
    if beta == 0:
        root = np.sqrt(u)
        zeroth, first = 2.0 * root, 2.0 / 3.0 * u * root
        return zeroth[:-1] - zeroth[1:], first[:-1] - first[1:]
    z = beta * u
    far = z >= 1
    near = ~far
    root = np.sqrt(z)
    lower0, upper0 = erf(root), erfc(root)
    lower1 = np.empty_like(z)
    upper1 = np.empty_like(z)
    lower1[near] = gammainc(1.5, z[near])
    upper1[near] = 1.0 - lower1[near]
    upper1[far] = gammaincc(1.5, z[far])
    lower1[far] = 1.0 - upper1[far]
    tail = far[1:]
    m0 = np.where(tail, upper0[1:] - upper0[:-1], lower0[:-1] - lower0[1:])
    m1 = np.where(tail, upper1[1:] - upper1[:-1], lower1[:-1] - lower1[1:])
    return math.sqrt(math.pi / beta) * m0, 0.5 * math.sqrt(math.pi) * beta ** -1.5 * m1


def _solver_nodes(spec, beta):
    """\
    The grid of ``spec`` refined near t = 0 by nodes uniform in sqrt(t)
    over the first GRADED_SPAN / beta of the horizon, wherever they are
    finer than the grid. Graded nodes within half a spacing of a grid
    point are dropped. Returns the nodes and the positions of the grid
    points among them.
    """
    times = spec.times
    h = spec.h
    span = spec.T if beta == 0 else min(spec.T, GRADED_SPAN / beta)
    m = max(spec.n // 2, 1)
    graded = span * (np.arange(1, m + 1) / m) ** 2
    spacing = np.diff(graded, prepend=0.0)
    finer = spacing < h
    graded, spacing = graded[finer], spacing[finer]
    offset = np.abs(graded - h * np.round(graded / h))
    graded = graded[offset > 0.5 * spacing]
    nodes = np.union1d(times, graded)
    return nodes, np.searchsorted(nodes, times)


def solve_renewal(spec):
    """\
    Product-integration solution of the renewal equation on the grid of
    ``spec``.

    The solver works with g(t) = f(t) exp(-beta t), beta = pi c^2, which
    stays between a and 2a and solves

        g(t) = a exp(-beta t) + c int_0^t g(s) exp(-beta (t - s)) / sqrt(t - s) ds

    g is interpolated piecewise linearly and the weighted kernel is
    integrated exactly against the interpolant. g rises from a to 2a on
    the time scale 1 / beta with a sqrt(t) onset, so the grid is refined
    there (see _solver_nodes); history older than LAG_CUTOFF / beta
    carries weight below e^-50 and is dropped. log f = log g + beta t.
    """
    times = spec.times
    log_a = math.log(spec.a)
    c = spec.c
    if c == 0:
        return GridFunction(times, np.full(spec.n + 1, log_a))
    beta = math.pi * c * c
    if beta * spec.T < FLAT_RATE:
        beta = 0.0
    nodes, grid = _solver_nodes(spec, beta)
    count = len(nodes)
    if beta:
        starts = np.searchsorted(nodes, nodes - LAG_CUTOFF / beta)
    else:
        starts = np.zeros(count, dtype=int)
    forcing = spec.a * np.exp(-beta * nodes)
    g = np.empty(count)
    g[0] = spec.a
    for i in range(1, count):
        lo = min(starts[i], i - 1)
        u = nodes[i] - nodes[lo:i + 1]
        m0, m1 = _panel_moments(beta, u)
        width = np.diff(nodes[lo:i + 1])
        weights = np.zeros(len(u))
        weights[:-1] += (m1 - u[1:] * m0) / width
        weights[1:] += (u[:-1] * m0 - m1) / width
        g[i] = (forcing[i] + c * np.dot(weights[:-1], g[lo:i])) / (1.0 - c * weights[-1])
    log_f = np.log(g[grid]) + beta * times
    solution = GridFunction(times, log_f)
    _, exact = renewal_closed_form(spec.a, c, spec.T)
    if abs(math.expm1(log_f[-1] - exact)) > COARSE_GRID_RTOL:
        warnings.warn(
            f"renewal grid n={spec.n} too coarse: relative error {math.expm1(log_f[-1] - exact):.3g} at T",
            RuntimeWarning
        )
    return solution


def loglog_fit(xs, log_values, min_points=3, strict=True):
    """\
    Ordinary least squares of log log Y against log x, given log Y.

    Points with log Y <= 0 (or non-finite) have no log log and are
    rejected with a warning. With fewer than ``min_points`` survivors a
    FitError is raised, or an undefined IndexFit returned if not strict.
    """
    xs = np.asarray(xs, dtype=float)
    log_values = np.asarray(log_values, dtype=float)
    usable = np.isfinite(log_values) & (log_values > 0)
    rejected = tuple(float(_) for _ in xs[~usable])
    if rejected:
        warnings.warn(f"log log undefined at {list(rejected)}; points rejected", RuntimeWarning)
    n = int(np.count_nonzero(usable))
    if n < min_points:
        if strict:
            raise FitError(f"only {n} usable points, need {min_points}", rejected)
        return IndexFit(None, None, None, None, None, n, rejected)
    X = np.log(xs[usable])
    Y = np.log(log_values[usable])
    x_mean = X.mean()
    y_mean = Y.mean()
    sxx = np.sum((X - x_mean) ** 2)
    if sxx == 0:
        raise FitError("need at least two distinct x values", rejected)
    slope = float(np.sum((X - x_mean) * (Y - y_mean)) / sxx)
    intercept = float(y_mean - slope * x_mean)
    residuals = Y - (intercept + slope * X)
    dof = n - 2
    residual_se = float(math.sqrt(np.sum(residuals ** 2) / dof))
    stderr = residual_se / math.sqrt(sxx)
    window = (float(xs[usable].min()), float(xs[usable].max()))
    return IndexFit(slope, intercept, stderr, residual_se, window, n, rejected)


def growth_exponent(values, t=None):
    """\
    Slope of log log f(t; k) against log k from a mapping k -> log f(t; k).

    ``t`` only labels the evaluation time; the mapping already holds the
    values at that time.
    """
    if len(set(values)) < 3:
        raise FitError(f"need at least 3 distinct k values, got {len(set(values))}")
    ks = sorted(values)
    return loglog_fit(ks, [values[k] for k in ks])


def renewal_family(a, b, ks, t):
    """\
    Mapping k -> log f(t; k) from the closed form, for growth_exponent.
    """
    return {float(k): renewal_closed_form(a, b * k, t)[1] for k in ks}


def pam_second_moment(lam, t, nu):
    """\
    E|u_t(x)|^2 for the whole-line parabolic Anderson model with flat unit
    initial data, as (value, log-value).

    The second moment solves m(t) = 1 + lam^2 int_0^t m(s) p(2(t - s), 0, 0) ds
    with p(2 tau, 0, 0) = 1 / sqrt(8 pi nu tau), a renewal equation with
    c = lam^2 / sqrt(8 pi nu).
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam!r}")
    if not t > 0:
        raise ValueError(f"time must be positive, got t={t!r}")
    if not nu > 0:
        raise ValueError(f"diffusion must be positive, got nu={nu!r}")
    return renewal_closed_form(1.0, pam_rate(lam, nu), t)


def pam_rate(lam, nu):
    return lam * lam / math.sqrt(8 * math.pi * nu)
