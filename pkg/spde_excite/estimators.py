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
Monte Carlo estimation of second moments, energy and their extrema, and
extraction of the excitation index from a sweep over the noise level.
"""

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .model import BoundaryCondition, FieldMoment, SweepResult
from .model.field import Z_95
from .renewal import loglog_fit
from .sim import derive_replica_seed, second_moment_recursion, simulate_batch


DEFAULT_BATCH_SIZE = 64
FAILURE_THRESHOLD = 0.01


def resolve_workers(workers=None):
    """\
    Worker count: explicit value, else SPDE_WORKERS, else all CPUs.
    Zero means all CPUs.
    """
    if workers is None:
        env = os.environ.get("SPDE_WORKERS")
        if env is not None:
            try:
                workers = int(env)
            except ValueError:
                raise ValueError(f"SPDE_WORKERS must be a nonnegative integer, got {env!r}")
    if workers is None or workers == 0:
        return os.cpu_count() or 1
    if workers < 0:
        raise ValueError(f"worker count must be nonnegative, got {workers!r}")
    return workers


def trapezoid_weights(n, dx):
    w = np.full(n, dx)
    w[0] = w[-1] = 0.5 * dx
    return w


class MomentAccumulator:
    """\
    Streaming per-point mean and sum of squared deviations of u^2, plus
    the same for the discrete L^2 norm. Batches merge with the pairwise
    update of Chan et al., always in batch order.
    """

    def __init__(self, width):
        self.n = 0
        self.failed = 0
        self.mean = np.zeros(width)
        self.m2 = np.zeros(width)
        self.norm_mean = 0.0
        self.norm_m2 = 0.0

    @classmethod
    def from_batch(cls, squares, norms, failed):
        acc = cls(squares.shape[1])
        acc.n = squares.shape[0]
        acc.failed = int(failed)
        if acc.n:
            # deviations about the first row: identical rows give m2 == 0 exactly
            shifted = squares - squares[0]
            offset = shifted.mean(axis=0)
            acc.mean = squares[0] + offset
            acc.m2 = ((shifted - offset) ** 2).sum(axis=0)
            shifted = norms - norms[0]
            offset = shifted.mean()
            acc.norm_mean = float(norms[0] + offset)
            acc.norm_m2 = float(((shifted - offset) ** 2).sum())
        return acc

    def merge(self, other):
        n = self.n + other.n
        self.failed += other.failed
        if other.n == 0:
            return self
        if self.n == 0:
            self.n, self.mean, self.m2 = other.n, other.mean.copy(), other.m2.copy()
            self.norm_mean, self.norm_m2 = other.norm_mean, other.norm_m2
            return self
        delta = other.mean - self.mean
        self.mean = self.mean + delta * (other.n / n)
        self.m2 = self.m2 + other.m2 + delta ** 2 * (self.n * other.n / n)
        d = other.norm_mean - self.norm_mean
        self.norm_mean += d * (other.n / n)
        self.norm_m2 += other.norm_m2 + d * d * (self.n * other.n / n)
        self.n = n
        return self

    def halfwidth(self, m2):
        if self.n < 2:
            return np.full(np.shape(m2), np.inf) if np.ndim(m2) else math.inf
        return Z_95 * np.sqrt(m2 / (self.n - 1) / self.n)


def _run_batch(cfg, t, master_seed, start, stop):
    seeds = [derive_replica_seed(master_seed, i) for i in range(start, stop)]
    u, failed = simulate_batch(cfg, seeds, t)
    good = u[~failed]
    squares = good * good
    norms = squares @ trapezoid_weights(u.shape[1], cfg.dx)
    return MomentAccumulator.from_batch(squares, norms, np.count_nonzero(failed))


def _batches(n, batch_size):
    return [(i, min(i + batch_size, n)) for i in range(0, n, batch_size)]


def accumulate_replicas(cfg, t, n, master_seed, workers=1, batch_size=DEFAULT_BATCH_SIZE):
    """\
    Simulate replicas 0..n-1 in fixed batches and merge their moments in
    batch order; the result does not depend on the worker count.
    """
    batches = _batches(n, batch_size)
    acc = MomentAccumulator(cfg.nx + 2)
    if workers <= 1 or len(batches) == 1:
        for start, stop in batches:
            acc.merge(_run_batch(cfg, t, master_seed, start, stop))
        return acc
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_batch, cfg, t, master_seed, start, stop) for start, stop in batches]
        for f in futures:
            acc.merge(f.result())
    return acc


def _field_from(cfg, acc):
    fm = FieldMoment(cfg.grid, acc.mean.copy(), acc.halfwidth(acc.m2), acc.n, acc.failed)
    if not fm.reliable:
        warnings.warn(
            f"{acc.failed} of {acc.n + acc.failed} replicas failed at lambda={cfg.lam!r}: estimate unreliable",
            RuntimeWarning
        )
    return fm


def second_moment_field(cfg, t, n, master_seed, workers=1, batch_size=DEFAULT_BATCH_SIZE):
    """\
    Sample mean of u_t(x_j)^2 over n independent paths, with 95%
    normal-approximation half-widths per grid point.
    """
    if not 0 < t <= cfg.t_end * (1 + 1e-12):
        raise ValueError(f"t={t!r} outside (0, t_end={cfg.t_end!r}]")
    if n < 2:
        raise ValueError(f"need at least 2 replicas, got {n!r}")
    acc = accumulate_replicas(cfg, t, n, master_seed, workers=workers, batch_size=batch_size)
    return _field_from(cfg, acc)


def energy_from_field(fm, dx):
    """\
    E_t = sqrt(int_0^L E|u_t|^2 dx) by the trapezoid rule, with a
    conservative half-width (per-point half-widths added, then pushed
    through the square root). Returns (energy, halfwidth).
    """
    w = trapezoid_weights(len(fm.estimate), dx)
    mass = float(fm.estimate @ w)
    mass_hw = float(np.asarray(fm.halfwidth) @ w)
    energy = math.sqrt(max(mass, 0.0))
    if mass_hw == 0:
        return energy, 0.0
    if energy == 0:
        return energy, math.sqrt(mass_hw)
    return energy, mass_hw / (2 * energy)


def field_extrema(fm, eps, dx):
    """\
    (I, S, I_eps): minimum and maximum over all grid points and minimum
    over the grid points in [eps, L - eps].
    """
    x = np.asarray(fm.x)
    L = x[-1]
    if not 0 <= eps < L / 2:
        raise ValueError(f"eps must lie in [0, {L / 2}), got {eps!r}")
    tiny = 1e-9 * dx
    window = (x >= eps - tiny) & (x <= L - eps + tiny)
    if not np.any(window):
        raise ValueError(f"no grid points in [{eps}, {L - eps}]")
    est = np.asarray(fm.estimate)
    return float(est.min()), float(est.max()), float(est[window].min())


def fit_excitation_index(data, strict=True):
    """\
    Slope of log log E against log lambda from a mapping lambda -> log E.
    """
    lambdas = sorted(data)
    return loglog_fit(lambdas, [data[_] for _ in lambdas], strict=strict)


def continuum_window(lambdas, dx, bound=0.2):
    """\
    Split lambdas into those with lambda^2 dx <= bound and the rest.
    """
    kept = [lam for lam in lambdas if lam * lam * dx <= bound]
    dropped = [lam for lam in lambdas if lam * lam * dx > bound]
    return kept, dropped


def _log_or_nan(value):
    return math.log(value) if value > 0 else math.nan


def _exact_point(cfg, t):
    m = second_moment_recursion(cfg, t)
    fm = FieldMoment(cfg.grid, m, np.zeros_like(m), 0, 0)
    return fm


def sweep(cfg, t, lambdas, n, master_seed, eps=None, method="montecarlo",
          workers=1, batch_size=DEFAULT_BATCH_SIZE, synthetic=None):
    """\
    Estimate log E_t(lambda), I_t, S_t and I_eps,t over a lambda grid and
    fit the excitation index on the points inside the continuum window.

    ``method`` is "montecarlo" or "moments" (the exact recursion of the
    discrete scheme, linear sigma only). ``synthetic`` is a power p that
    replaces the simulation by log E = lambda^p, for pipeline checks.
    """
    if eps is None:
        eps = cfg.params.L / 4
    lambdas = sorted(float(_) for _ in lambdas)
    rows = []
    for lam in lambdas:
        if synthetic is not None:
            log_e = lam ** synthetic
            value = math.exp(2 * log_e) if 2 * log_e < 700 else math.inf
            rows.append((log_e, 0.0, value, value, value, 0, 0))
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            point = cfg.with_lambda(lam)
        if method == "moments":
            fm = _exact_point(point, t)
        elif method == "montecarlo":
            fm = second_moment_field(point, t, n, master_seed, workers=workers, batch_size=batch_size)
        else:
            raise ValueError(f"Unknown sweep method: {method}")
        energy, hw = energy_from_field(fm, cfg.dx)
        inf, sup, inf_eps = field_extrema(fm, eps, cfg.dx)
        log_e = _log_or_nan(energy)
        log_ci = hw / energy if energy > 0 else math.inf
        rows.append((log_e, log_ci, inf, sup, inf_eps, fm.n, fm.failed))
    columns = [np.array(_, dtype=float) for _ in zip(*rows)] if rows else [np.array([])] * 7
    log_energy, log_ci, inf, sup, inf_eps, n_eff, failed = columns
    if synthetic is None:
        kept, dropped = continuum_window(lambdas, cfg.dx)
        if dropped:
            warnings.warn(f"lambda values {dropped} outside the continuum window dropped from the fit", RuntimeWarning)
    else:
        kept, dropped = lambdas, []
    keep = np.isin(lambdas, kept)
    lam_arr = np.array(lambdas)

    def _fit(log_values):
        return loglog_fit(lam_arr[keep], np.asarray(log_values)[keep], strict=False)

    with np.errstate(divide="ignore", invalid="ignore"):
        fits = {
            "energy": _fit(log_energy),
            "inf": _fit(np.log(inf)),
            "sup": _fit(np.log(sup)),
            "inf_eps": _fit(np.log(inf_eps)),
        }
    return SweepResult(
        lambdas=lam_arr,
        log_energy=log_energy,
        log_energy_ci=log_ci,
        inf=inf,
        sup=sup,
        inf_eps=inf_eps,
        n_effective=n_eff.astype(int),
        failed=failed.astype(int),
        fit=fits["energy"],
        fits=fits,
        dropped=tuple(dropped),
    )


def same_bc(cfg, bc):
    """\
    Copy of cfg with another boundary condition, for Dirichlet/Neumann
    comparisons at otherwise matched settings.
    """
    return replace(cfg, bc=BoundaryCondition(bc))
