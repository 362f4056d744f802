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
Heat kernels on the whole line and on (0, L).

The bounded-interval kernels are evaluated from their method-of-images
series, truncated at a number of image pairs chosen so that a rigorous
Gaussian tail bound stays below the requested tolerance.
"""

import math
import warnings

import numpy as np
from scipy.integrate import quad

from .model import KernelKind, KernelParams, get_kind
from .model.kernel_params import MIN_IMAGES
from .quadrature import QuadratureError, composite_simpson


MAX_IMAGES = 100000


def _check_time(t):
    if not t > 0:
        raise ValueError(f"time must be positive, got t={t!r}")


def _check_points(params, *points):
    for p in points:
        p = np.asarray(p, dtype=float)
        if np.any(p < 0) or np.any(p > params.L):
            raise ValueError(f"points must lie in [0, {params.L}], got {p!r}")


def _scalar(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


def gaussian_kernel(t, x, y, nu=1.0):
    _check_time(t)
    if not nu > 0:
        raise ValueError(f"diffusion must be positive, got nu={nu!r}")
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return _scalar(np.exp(-d * d / (4 * nu * t)) / math.sqrt(4 * math.pi * nu * t))


def image_truncation_error(t, params, N):
    """\
    Upper bound on the absolute contribution of images with |n| > N.

    For x, y in [0, L] every dropped image lies at distance at least
    2(|n| - 1)L, so the four tails (two series, two signs of n) are each
    dominated by sum_{j >= N} exp(-j^2 alpha) with alpha = L^2 / (nu t),
    which is in turn at most exp(-N^2 alpha) / (1 - exp(-(2N + 1) alpha)).
    """
    _check_time(t)
    if N < 1:
        raise ValueError(f"image count must be >= 1, got {N!r}")
    alpha = params.L ** 2 / (params.nu * t)
    head = math.exp(-N * N * alpha)
    if head == 0.0:
        return 0.0
    geometric = -math.expm1(-(2 * N + 1) * alpha)
    return 4.0 * head / geometric / math.sqrt(4 * math.pi * params.nu * t)


def image_count(t, params):
    """\
    Number of image pairs on each side used by the evaluators at time t.
    """
    if params.images is not None:
        return params.images
    N = MIN_IMAGES
    while image_truncation_error(t, params, N) > params.tol:
        N += 1
        if N > MAX_IMAGES:
            raise ValueError(f"cannot reach tol={params.tol!r} at t={t!r} with {MAX_IMAGES} images")
    if N > 1000:
        warnings.warn(f"{N} images needed at t={t!r}; consider a spectral evaluation", RuntimeWarning)
    return N


def _image_sum(t, x, y, params, sign):
    _check_time(t)
    _check_points(params, x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    L, nu = params.L, params.nu
    N = image_count(t, params)
    scale = 4 * nu * t
    # |x - y| keeps the image terms identical under x <-> y
    direct = np.abs(x - y)
    reflected = x + y
    total = np.zeros(np.broadcast(x, y).shape)
    for n in range(-N, N + 1):
        shift = 2 * n * L
        a = direct - shift
        b = reflected - shift
        total += np.exp(-a * a / scale) + sign * np.exp(-b * b / scale)
    return total / math.sqrt(math.pi * scale)


def dirichlet_kernel(t, x, y, params):
    value = _image_sum(t, x, y, params, -1.0)
    L = params.L
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    boundary = (x == 0) | (x == L) | (y == 0) | (y == L)
    return _scalar(np.where(boundary, 0.0, value))


def neumann_kernel(t, x, y, params):
    return _scalar(_image_sum(t, x, y, params, 1.0))


def kernel(kind, t, x, y, params):
    kind = get_kind(kind)
    if kind is KernelKind.DIRICHLET:
        return dirichlet_kernel(t, x, y, params)
    if kind is KernelKind.NEUMANN:
        return neumann_kernel(t, x, y, params)
    return gaussian_kernel(t, x, y, params.nu)


def truncation_bound(kind, t, params):
    """\
    Certified error of kernel(kind, t, ...) against the exact series.
    """
    if get_kind(kind) is KernelKind.GAUSSIAN:
        return 0.0
    return image_truncation_error(t, params, image_count(t, params))


def dirichlet_lower_factor(t, eps, nu=1.0):
    """\
    Factor 1 - 2 exp(-eps^2 / (nu t)) in p_D >= factor * p, valid for
    x, y at distance at least eps from the boundary. May be negative.
    """
    _check_time(t)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    return 1.0 - 2.0 * math.exp(-eps * eps / (nu * t))


def half_bound_time(eps, nu=1.0):
    """\
    Largest t at which dirichlet_lower_factor(t, eps, nu) is still >= 1/2.
    """
    return eps * eps / (nu * math.log(4.0))


def _quad(fn, a, b, points=()):
    inner = sorted({p for p in points if a < p < b})
    out = quad(fn, a, b, points=inner or None, epsabs=1e-13, epsrel=1e-11, limit=500, full_output=1)
    value, error = out[0], out[1]
    if error > 1e-9 * max(1.0, abs(value)):
        raise QuadratureError(
            f"adaptive quadrature on [{a}, {b}] did not converge (error estimate {error:.3g})",
            estimate=value, error=error
        )
    return value


def kernel_mass(kind, t, x, params):
    """\
    Integral over (0, L) of kernel(kind, t, x, .): one for Neumann, the
    survival probability of killed Brownian motion for Dirichlet.
    """
    _check_time(t)
    _check_points(params, x)
    return _quad(lambda y: kernel(kind, t, x, y, params), 0.0, params.L, points=(x,))


def semigroup_apply(kind, u0, t, params, xs):
    """\
    Deterministic part of the mild solution: int_0^L u0(y) p(t, x, y) dy
    for every x in xs.
    """
    _check_time(t)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    _check_points(params, xs)

    def integrand(nodes):
        return u0(nodes)[None, :] * kernel(kind, t, xs[:, None], nodes[None, :], params)

    values = composite_simpson(integrand, 0.0, params.L, breakpoints=u0.breakpoints, start=128, max_level=8)
    return np.maximum(values, 0.0)


def neumann_gaussian_ratio(t, x, y, params):
    """\
    p_N(t, x, y) / p(t, x, y) evaluated through exponent differences, so
    that it stays finite where both kernels underflow.
    """
    _check_time(t)
    _check_points(params, x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    L = params.L
    N = image_count(t, params)
    scale = 4 * params.nu * t
    direct = np.abs(x - y)
    d2 = direct ** 2
    total = np.zeros(np.broadcast(x, y).shape)
    for n in range(-N, N + 1):
        a = direct - 2 * n * L
        b = x + y - 2 * n * L
        total += np.exp(-(a * a - d2) / scale) + np.exp(-(b * b - d2) / scale)
    return _scalar(total)


def ordering_slack(t, xs, ys, params):
    """\
    Worst violations of p_D <= p <= p_N on the grid xs x ys, together
    with the truncation bound they are allowed. Positive values mean the
    inequality is violated by that much.
    """
    X, Y = np.meshgrid(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), indexing="ij")
    pd = dirichlet_kernel(t, X, Y, params)
    p = gaussian_kernel(t, X, Y, params.nu)
    pn = neumann_kernel(t, X, Y, params)
    return {
        "dirichlet_le_gaussian": float(np.max(pd - p)),
        "gaussian_le_neumann": float(np.max(p - pn)),
        "bound": image_truncation_error(t, params, image_count(t, params)),
    }


def lower_bound_slack(t, xs, ys, params):
    """\
    Worst violation of p_D >= (1 - 2 exp(-eps^2 / (nu t))) p with
    eps = min(x, y, L - x, L - y), over interior grid points.
    """
    X, Y = np.meshgrid(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), indexing="ij")
    L = params.L
    eps = np.minimum(np.minimum(X, Y), np.minimum(L - X, L - Y))
    inside = eps > 0
    X, Y, eps = X[inside], Y[inside], eps[inside]
    factor = 1.0 - 2.0 * np.exp(-eps * eps / (params.nu * t))
    pd = dirichlet_kernel(t, X, Y, params)
    p = gaussian_kernel(t, X, Y, params.nu)
    return float(np.max(factor * p - pd)) if X.size else 0.0


def half_bound_slack(eps, xs, ys, params, t=None):
    """\
    Worst violation of p_D >= p / 2 for x, y in [eps, L - eps] at
    t (defaulting to the largest time the factor bound allows).
    """
    if t is None:
        t = half_bound_time(eps, params.nu)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    L = params.L
    tiny = 1e-12 * L
    xs = xs[(xs >= eps - tiny) & (xs <= L - eps + tiny)]
    ys = ys[(ys >= eps - tiny) & (ys <= L - eps + tiny)]
    if not xs.size or not ys.size:
        raise ValueError(f"no grid points in [{eps}, {L - eps}]")
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pd = dirichlet_kernel(t, X, Y, params)
    p = gaussian_kernel(t, X, Y, params.nu)
    return float(np.max(0.5 * p - pd))


def chapman_kolmogorov_residual(kind, t, s, x, y, params):
    """\
    |int_0^L p(t, x, z) p(s, z, y) dz - p(t + s, x, y)|.
    """
    _check_time(s)
    composed = _quad(
        lambda z: kernel(kind, t, x, z, params) * kernel(kind, s, z, y, params),
        0.0, params.L, points=(x, y)
    )
    return abs(composed - kernel(kind, t + s, x, y, params))


def diagonal_identity_residual(kind, t, x, params):
    """\
    |int_0^L p(t, x, y)^2 dy - p(2t, x, x)|.
    """
    squared = _quad(lambda y: kernel(kind, t, x, y, params) ** 2, 0.0, params.L, points=(x,))
    return abs(squared - kernel(kind, 2 * t, x, x, params))


def certify_neumann_constant(params, T, times, points):
    """\
    Largest p_N / p over the grid with t <= T: an empirical c_T for
    p_N <= c_T p on [0, T].
    """
    times = [t for t in times if 0 < t <= T]
    if not times:
        raise ValueError(f"no grid times in (0, {T}]")
    X, Y = np.meshgrid(np.asarray(points, dtype=float), np.asarray(points, dtype=float), indexing="ij")
    return max(float(np.max(neumann_gaussian_ratio(t, X, Y, params))) for t in times)


def tabulate_kernels(params, times, points):
    """\
    Rows of (t, x, y, gaussian, dirichlet, neumann, truncation bound).
    """
    rows = []
    for t in times:
        bound = truncation_bound(KernelKind.NEUMANN, t, params)
        for x in points:
            for y in points:
                rows.append((
                    t, x, y,
                    gaussian_kernel(t, x, y, params.nu),
                    dirichlet_kernel(t, x, y, params),
                    neumann_kernel(t, x, y, params),
                    bound,
                ))
    return rows


__all__ = [
    "KernelKind",
    "KernelParams",
    "certify_neumann_constant",
    "chapman_kolmogorov_residual",
    "half_bound_time",
    "diagonal_identity_residual",
    "dirichlet_kernel",
    "dirichlet_lower_factor",
    "gaussian_kernel",
    "half_bound_slack",
    "image_count",
    "image_truncation_error",
    "kernel",
    "kernel_mass",
    "lower_bound_slack",
    "neumann_gaussian_ratio",
    "neumann_kernel",
    "ordering_slack",
    "semigroup_apply",
    "tabulate_kernels",
    "truncation_bound",
]
