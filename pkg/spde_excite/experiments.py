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
Experiment runners behind the command line modes.
"""

import math
import warnings

import numpy as np

from .artifacts import KernelTable, LogLogPlot, RunDirectory, SweepTable, ValidationReport
from .estimators import resolve_workers, second_moment_field, sweep
from .kernels import (
    KernelKind, certify_neumann_constant, chapman_kolmogorov_residual,
    diagonal_identity_residual, half_bound_slack, half_bound_time, kernel_mass, lower_bound_slack,
    ordering_slack, tabulate_kernels,
)
from .quadrature import QuadratureError
from .renewal import growth_exponent, pam_second_moment, renewal_closed_form, renewal_family, solve_renewal
from .sim import second_moment_recursion


SLACK_TOL = 1e-12
IDENTITY_TOL = 1e-6
MASS_TOL = 1e-8
RENEWAL_RTOL = 1e-4
EXPONENT_TOL = 0.02
PAM_HALFWIDTHS = 3
PAM_RTOL = 0.1
# quadrature-based identities use a coarser subset of the check grid
IDENTITY_STRIDE = 5


class RunFailure(RuntimeError):
    pass


class CheckList:
    """\
    Aggregates named checks; a failing check never stops the others.
    """

    def __init__(self):
        self.checks = []

    def add(self, name, value, threshold, passed=None, **info):
        if passed is None:
            passed = value is not None and math.isfinite(value) and value <= threshold
        entry = {"name": name, "value": value, "threshold": threshold, "passed": bool(passed)}
        entry.update(info)
        self.checks.append(entry)
        return entry

    def error(self, name, exc):
        self.checks.append({"name": name, "value": None, "threshold": None, "passed": False, "error": str(exc)})

    @property
    def passed(self):
        return all(_["passed"] for _ in self.checks)

    @property
    def failures(self):
        return [_["name"] for _ in self.checks if not _["passed"]]


class CaptureWarnings(warnings.catch_warnings):
    """\
    Records warnings raised inside the block as a deduplicated list of
    messages, in order of first appearance.
    """

    def __init__(self):
        super().__init__(record=True)
        self.messages = []

    def __enter__(self):
        self._log = super().__enter__()
        warnings.simplefilter("always")
        return self

    def __exit__(self, *exc_info):
        super().__exit__(*exc_info)
        for w in self._log:
            message = str(w.message)
            if message not in self.messages:
                self.messages.append(message)


def check_kernels(cfg):
    params = cfg.kernel_params()
    times = list(cfg["check_times"])
    points = cfg.check_points()
    checks = CheckList()
    for t in times:
        slack = ordering_slack(t, points, points, params)
        allowed = slack["bound"] + SLACK_TOL
        checks.add(f"p_D <= p at t={t}", slack["dirichlet_le_gaussian"], allowed)
        checks.add(f"p <= p_N at t={t}", slack["gaussian_le_neumann"], allowed)
        checks.add(f"factor lower bound at t={t}", lower_bound_slack(t, points, points, params), allowed)
    eps = cfg["check_epsilon"]
    t0 = half_bound_time(eps, params.nu)
    try:
        checks.add(f"p_D >= p/2 at t0={t0:.6g}, eps={eps}", half_bound_slack(eps, points, points, params), SLACK_TOL)
    except ValueError as exc:
        checks.error(f"p_D >= p/2 at eps={eps}", exc)
    sample = points[::IDENTITY_STRIDE]
    interior = [x for x in sample if 0 < x < params.L]
    for kind in KernelKind.NEUMANN, KernelKind.DIRICHLET:
        for t in times:
            name = kind.value
            try:
                ck = max(chapman_kolmogorov_residual(kind, t, t, x, y, params) for x in interior for y in interior)
                checks.add(f"{name} Chapman-Kolmogorov at t=s={t}", ck, IDENTITY_TOL)
                diag = max(diagonal_identity_residual(kind, t, x, params) for x in interior)
                checks.add(f"{name} diagonal identity at t={t}", diag, IDENTITY_TOL)
                masses = [kernel_mass(kind, t, x, params) for x in interior]
            except QuadratureError as exc:
                checks.error(f"{name} quadrature at t={t}", exc)
                continue
            if kind is KernelKind.NEUMANN:
                checks.add(f"neumann mass at t={t}", max(abs(m - 1) for m in masses), MASS_TOL)
            else:
                # the upper bound holds up to quadrature error where exit is negligible
                excess = max(masses) - 1.0
                checks.add(
                    f"dirichlet mass in (0, 1] at t={t}", excess, MASS_TOL,
                    passed=min(masses) > 0 and excess <= MASS_TOL, min=min(masses), max=max(masses)
                )
    report = {"checks": checks.checks}
    try:
        report["c_T"] = certify_neumann_constant(params, cfg["ct_horizon"], times, points)
        report["c_T_horizon"] = cfg["ct_horizon"]
    except ValueError as exc:
        checks.error("c_T certification", exc)
    report["nu"] = params.nu
    report["L"] = params.L
    return report, checks


def check_renewal(cfg):
    checks = CheckList()
    base = cfg.renewal_spec(1.0)
    solver = {}
    try:
        solution = solve_renewal(base)
        times = base.times[1:]
        _, exact = renewal_closed_form(base.a, base.c, times)
        rel = float(np.max(np.abs(np.expm1(solution.log_values[1:] - exact))))
        checks.add(f"solver vs closed form (c={base.c}, n={base.n})", rel, RENEWAL_RTOL)
        solver = {"c": base.c, "n": base.n, "max_relative_error": rel}
    except ValueError as exc:
        checks.error("solver vs closed form", exc)
    t = cfg["t_eval"]
    ks = cfg.ks()
    family = renewal_family(base.a, base.b, ks, t)
    table = []
    for k in ks:
        numeric = solve_renewal(cfg.renewal_spec(k)).log_at(t)
        table.append({"k": k, "log_f": family[k], "solver_relative_error": abs(math.expm1(numeric - family[k]))})
    report = {"solver": solver, "family": table, "t_eval": t}
    try:
        fit = growth_exponent(family, t)
        report["fit"] = fit.as_dict()
        checks.add("growth exponent", abs(fit.slope - 2.0), EXPONENT_TOL, slope=fit.slope)
    except ValueError as exc:
        checks.error("growth exponent", exc)
    report["checks"] = checks.checks
    return report, checks


def check_pam(cfg, workers=1):
    checks = CheckList()
    t = cfg.t_obs
    rows = []
    for lam in cfg["pam_lambdas"]:
        sim = cfg.sim_config(lam)
        j = int(np.argmin(np.abs(sim.grid - cfg["pam_x"])))
        oracle, _ = pam_second_moment(lam, t, sim.params.nu)
        fm = second_moment_field(sim, t, cfg.replicas, cfg.seed, workers=workers, batch_size=cfg["batch_size"])
        estimate = float(fm.estimate[j])
        halfwidth = float(fm.halfwidth[j])
        row = {
            "lambda": lam,
            "x": float(sim.grid[j]),
            "estimate": estimate,
            "halfwidth": halfwidth,
            "oracle": oracle,
            "n": fm.n,
            "failed": fm.failed,
        }
        if sim.sigma.linear:
            row["discrete_exact"] = float(second_moment_recursion(sim, t)[j])
        rows.append(row)
        error = abs(estimate - oracle)
        checks.add(f"pam lambda={lam}: within {PAM_HALFWIDTHS} half-widths", error, PAM_HALFWIDTHS * halfwidth)
        checks.add(f"pam lambda={lam}: relative error", error / oracle, PAM_RTOL)
    return {"table": rows, "t": t, "checks": checks.checks}, checks


VALIDATIONS = {
    "kernels-check": check_kernels,
    "renewal": check_renewal,
    "pam-validate": check_pam,
}


def run_validation(cfg, workers=None):
    """\
    Run the checks of a validation mode and write validation.json under
    the configured output directory. Returns (report, passed).
    """
    if cfg.mode not in VALIDATIONS:
        raise ValueError(f"mode {cfg.mode!r} is not a validation mode")
    workers = resolve_workers(cfg.workers if workers is None else workers)
    with CaptureWarnings() as captured:
        if cfg.mode == "pam-validate":
            report, checks = check_pam(cfg, workers=workers)
        else:
            report, checks = VALIDATIONS[cfg.mode](cfg)
    report.update(
        mode=cfg.mode,
        passed=checks.passed,
        failures=checks.failures,
        warnings=cfg.warnings + captured.messages,
        config=cfg.as_dict(),
    )
    run = RunDirectory(cfg.out, cfg.config_hash, cfg.seed)
    run.add(ValidationReport, report)
    run.write()
    return report, checks.passed


def run_sweep(cfg, workers=None):
    """\
    Run a lambda sweep and write sweep.csv, summary.json and loglog.svg.
    Returns the SweepResult.
    """
    if cfg.mode != "sweep":
        raise ValueError(f"mode {cfg.mode!r} is not sweep")
    workers = resolve_workers(cfg.workers if workers is None else workers)
    sim = cfg.sim_config()
    synthetic = cfg["synthetic"]
    with CaptureWarnings() as captured:
        result = sweep(
            sim, cfg.t_obs, cfg.lambdas(), cfg.replicas, cfg.seed,
            eps=cfg.epsilon,
            method=cfg["method"],
            workers=workers,
            batch_size=cfg["batch_size"],
            synthetic=synthetic,
        )
    run = RunDirectory(cfg.out, cfg.config_hash, cfg.seed)
    run.add(SweepTable, result)
    if synthetic is None and cfg["method"] == "montecarlo" and not np.any(result.n_effective):
        run.write()
        raise RunFailure(
            f"every replica failed at every lambda ({int(np.sum(result.failed))} failures); "
            f"see {run.out / SweepTable.BASENAME}"
        )
    run.add_summary(result, extra={
        "mode": cfg.mode,
        "method": "synthetic" if synthetic is not None else cfg["method"],
        "replicas": cfg.replicas,
        "t_obs": cfg.t_obs,
        "dt": sim.dt,
        "dx": sim.dx,
        "epsilon": cfg.epsilon,
        "warnings": cfg.warnings + captured.messages,
        "config": cfg.as_dict(),
    })
    run.add(LogLogPlot, result)
    run.write()
    return result


def run_tabulate(cfg):
    """\
    Write kernels.csv for the check grid of ``cfg``.
    """
    params = cfg.kernel_params()
    rows = tabulate_kernels(params, cfg["check_times"], cfg.check_points())
    run = RunDirectory(cfg.out, cfg.config_hash, cfg.seed)
    run.add(KernelTable, rows)
    return run.write()
