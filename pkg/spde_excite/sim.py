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
Finite-difference simulation of the stochastic heat equation on (0, L).

Explicit Euler-Maruyama in time, central differences in space and cell
averages of space-time white noise. Every replica owns a Philox stream
keyed by its derived seed, so a path only depends on (config, seed).
"""

import hashlib
import math

import numpy as np

from .model import BoundaryCondition, FieldSnapshot


BLOCK_STEPS = 64


class NonFiniteStateError(FloatingPointError):

    def __init__(self, message, time=None, step=None):
        super().__init__(message)
        self.time = time
        self.step = step


def derive_replica_seed(master_seed, replica_index):
    """\
    128-bit Philox key for a replica: a keyed hash of the master seed in
    the high word, the replica index in the low word.
    """
    if replica_index < 0:
        raise ValueError(f"replica index must be nonnegative, got {replica_index!r}")
    digest = hashlib.blake2b(
        int(master_seed).to_bytes(16, "little", signed=True), digest_size=8, person=b"spde-replica"
    ).digest()
    return (int.from_bytes(digest, "little") << 64) | int(replica_index)


def replica_rng(seed):
    return np.random.Generator(np.random.Philox(key=seed))


def noise_increments(rng, nx, dt, dx):
    """\
    Cell averages of space-time white noise over dt x dx cells, scaled so
    that the update is u += lambda sigma(u) xi: centered Gaussians with
    variance dt / dx.
    """
    if not dt > 0 or not dx > 0:
        raise ValueError(f"dt and dx must be positive, got dt={dt!r}, dx={dx!r}")
    return rng.standard_normal(nx) * math.sqrt(dt / dx)


def _width(cfg):
    return cfg.nx if cfg.bc is BoundaryCondition.DIRICHLET else cfg.nx + 2


def _noise_weights(cfg):
    # Neumann boundary nodes own half cells
    w = np.ones(_width(cfg))
    if cfg.bc is BoundaryCondition.NEUMANN:
        w[0] = w[-1] = math.sqrt(2.0)
    return w


class NoiseStream:
    """\
    Per-replica noise, drawn BLOCK_STEPS steps at a time. Drawing a block
    consumes the generator exactly like that many noise_increments calls.
    """

    def __init__(self, seed, cfg, block=BLOCK_STEPS):
        self.rng = replica_rng(seed)
        self.width = _width(cfg)
        self.scale = math.sqrt(cfg.dt / cfg.dx)
        self.weights = _noise_weights(cfg) if cfg.bc is BoundaryCondition.NEUMANN else None
        self.block = block
        self._buffer = None
        self._pos = block

    def draw_block(self):
        self._buffer = self.rng.standard_normal((self.block, self.width)) * self.scale
        if self.weights is not None:
            self._buffer *= self.weights
        self._pos = 0
        return self._buffer

    def next(self):
        if self._pos >= self.block:
            self.draw_block()
        row = self._buffer[self._pos]
        self._pos += 1
        return row


def initial_state(cfg):
    u = np.asarray(cfg.u0(cfg.grid), dtype=float).copy()
    if cfg.bc is BoundaryCondition.DIRICHLET:
        u[0] = u[-1] = 0.0
    return u


def _advance(u, cfg, xi):
    """\
    One Euler-Maruyama step on the last axis of u (shape (..., nx + 2)).
    xi holds the scaled noise: nx columns for Dirichlet, nx + 2 for Neumann.
    """
    r = cfg.ratio
    lam = cfg.lam
    out = np.empty_like(u)
    if cfg.bc is BoundaryCondition.DIRICHLET:
        inner = u[..., 1:-1]
        lap = u[..., 2:] - 2 * inner + u[..., :-2]
        out[..., 1:-1] = inner + r * lap + lam * cfg.sigma(inner) * xi
        out[..., 0] = 0.0
        out[..., -1] = 0.0
    else:
        lap = np.empty_like(u)
        lap[..., 1:-1] = u[..., 2:] - 2 * u[..., 1:-1] + u[..., :-2]
        lap[..., 0] = 2 * (u[..., 1] - u[..., 0])
        lap[..., -1] = 2 * (u[..., -2] - u[..., -1])
        out[...] = u + r * lap + lam * cfg.sigma(u) * xi
    return out


def step(state, cfg, rng):
    """\
    Advance a snapshot by dt, drawing fresh noise from rng.
    """
    xi = noise_increments(rng, _width(cfg), cfg.dt, cfg.dx)
    if cfg.bc is BoundaryCondition.NEUMANN:
        xi *= _noise_weights(cfg)
    time = state.time + cfg.dt
    with np.errstate(over="ignore", invalid="ignore"):
        values = _advance(state.values, cfg, xi)
    if not np.all(np.isfinite(values)):
        raise NonFiniteStateError(f"non-finite state at t={time!r}", time=time)
    return FieldSnapshot(time, values)


def simulate_path(cfg, seed, output_times):
    """\
    Snapshots of one path at the requested times (multiples of dt in
    [0, t_end]), in time order. Identical (cfg, seed) give bitwise
    identical output.
    """
    targets = sorted({cfg.steps_to(t): t for t in output_times}.items())
    if not targets:
        return []
    stream = NoiseStream(seed, cfg)
    u = initial_state(cfg)
    snapshots = []
    n = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for target, _ in targets:
            while n < target:
                u = _advance(u, cfg, stream.next())
                n += 1
                if not np.all(np.isfinite(u)):
                    raise NonFiniteStateError(
                        f"non-finite state at step {n} (t={n * cfg.dt!r})", time=n * cfg.dt, step=n
                    )
            snapshots.append(FieldSnapshot(n * cfg.dt, u.copy()))
    return snapshots


def simulate_batch(cfg, seeds, t):
    """\
    States at time t for a batch of replicas, one row per seed, plus a
    boolean mask of the replicas whose state became non-finite (their
    rows are zeroed). Rows equal simulate_path(cfg, seed, [t]).
    """
    n_steps = cfg.steps_to(t)
    streams = [NoiseStream(seed, cfg) for seed in seeds]
    u = np.tile(initial_state(cfg), (len(streams), 1))
    failed = np.zeros(len(streams), dtype=bool)
    done = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while done < n_steps:
            block = np.stack([s.draw_block() for s in streams], axis=1)
            for xi in block[:min(BLOCK_STEPS, n_steps - done)]:
                u = _advance(u, cfg, xi)
                done += 1
            bad = ~np.all(np.isfinite(u), axis=1)
            if np.any(bad):
                failed |= bad
                u[bad] = 0.0
    return u, failed


def _diffuse(V, cfg):
    """\
    Apply the explicit diffusion matrix A along axis 0 of V, restricted
    to the nodes that carry noise (interior for Dirichlet, all for Neumann).
    """
    r = cfg.ratio
    out = (1 - 2 * r) * V
    out[1:] += r * V[:-1]
    out[:-1] += r * V[1:]
    if cfg.bc is BoundaryCondition.NEUMANN:
        out[0] += r * V[1]
        out[-1] += r * V[-2]
    return out


def second_moment_recursion(cfg, t, coefficient=None):
    """\
    Exact E|u_t(x_j)|^2 of the discrete scheme for linear sigma.

    M = E[u u^T] evolves as M <- A M A^T + lam^2 c^2 diag(q * diag M) with
    q the per-node noise variance. ``coefficient`` replaces c; with l_sigma
    and L_sigma it gives entrywise brackets for any admissible sigma.
    """
    if coefficient is None:
        if not cfg.sigma.linear:
            raise ValueError("exact moment recursion needs a linear sigma; use second_moment_bounds")
        coefficient = cfg.sigma.c
    n_steps = cfg.steps_to(t)
    u = initial_state(cfg)
    dirichlet = cfg.bc is BoundaryCondition.DIRICHLET
    active = u[1:-1] if dirichlet else u
    M = np.outer(active, active)
    q = (cfg.dt / cfg.dx) * _noise_weights(cfg) ** 2
    gain = (cfg.lam * coefficient) ** 2 * q
    idx = np.arange(M.shape[0])
    for _ in range(n_steps):
        noise = gain * M[idx, idx]
        M = _diffuse(_diffuse(M, cfg).T, cfg)
        M[idx, idx] += noise
    diag = np.array(M[idx, idx])
    if dirichlet:
        return np.concatenate(([0.0], diag, [0.0]))
    return diag


def second_moment_bounds(cfg, t):
    lower = second_moment_recursion(cfg, t, coefficient=cfg.sigma.lower)
    upper = second_moment_recursion(cfg, t, coefficient=cfg.sigma.upper)
    return lower, upper
