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

import json
import math
import warnings

import numpy as np
import pytest

from spde_excite.config import parse_config
from spde_excite.experiments import (
    CaptureWarnings, CheckList, RunFailure, check_kernels, check_pam, check_renewal,
    run_sweep, run_tabulate, run_validation,
)


MINIMAL_SWEEP = "[sweep]\nlambda_min = 1\nlambda_max = 2\n"


def configure(text="", mode=None, **overrides):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return parse_config(text, overrides={k: str(v) for k, v in overrides.items()}, mode=mode)


def test_check_list():
    checks = CheckList()
    checks.add("small", 1e-13, 1e-12)
    assert checks.passed
    checks.add("nan", math.nan, 1.0)
    checks.add("forced", 5.0, 1.0, passed=True, note="x")
    checks.error("broken", ValueError("boom"))
    assert not checks.passed
    assert checks.failures == ["nan", "broken"]
    assert checks.checks[2]["note"] == "x"
    assert checks.checks[3]["error"] == "boom"


def test_capture_warnings():
    with CaptureWarnings() as captured:
        for _ in range(3):
            warnings.warn("first", RuntimeWarning)
        warnings.warn("second", UserWarning)
    assert captured.messages == ["first", "second"]


def test_check_kernels():
    cfg = configure(mode="kernels-check")
    report, checks = check_kernels(cfg)
    assert checks.passed, checks.failures
    assert report["nu"] == 1.0
    assert report["c_T"] >= 1.0
    names = [_["name"] for _ in report["checks"]]
    assert "p_D <= p at t=0.001" in names
    assert "neumann mass at t=0.5" in names
    assert any(_.startswith("dirichlet Chapman-Kolmogorov") for _ in names)


def test_check_renewal():
    cfg = configure(mode="renewal")
    report, checks = check_renewal(cfg)
    assert checks.passed, checks.failures
    assert report["solver"]["max_relative_error"] < 1e-4
    assert report["fit"]["slope"] == pytest.approx(2.0, abs=0.02)
    assert len(report["family"]) == 9
    assert all(_["solver_relative_error"] < 1e-4 for _ in report["family"])


def test_check_renewal_small_k():
    cfg = configure(mode="renewal", k_min=1, k_max=4, k_count=3)
    report, checks = check_renewal(cfg)
    assert checks.failures == ["growth exponent"]
    assert report["fit"]["slope"] < 1.98
    assert all(_["solver_relative_error"] < 1e-4 for _ in report["family"])


def test_check_pam():
    cfg = configure(mode="pam-validate", nx=15, dt="auto", replicas=400, pam_lambdas="0.5, 1")
    report, _ = check_pam(cfg, workers=1)
    assert report["t"] == 0.05
    assert [_["lambda"] for _ in report["table"]] == [0.5, 1.0]
    for row in report["table"]:
        assert row["x"] == 0.5
        assert row["n"] == 400 and row["failed"] == 0
        assert row["oracle"] > 1.0
        assert abs(row["estimate"] - row["discrete_exact"]) <= 4 * row["halfwidth"]


def test_run_validation(tmpdir):
    cfg = configure(mode="renewal", out=tmpdir / "renewal")
    report, passed = run_validation(cfg)
    assert passed
    content = json.loads((tmpdir / "renewal" / "validation.json").read_text())
    assert content["passed"] is True
    assert content["mode"] == "renewal"
    assert content["config_hash"] == cfg.config_hash
    assert content["failures"] == []
    with pytest.raises(ValueError):
        run_validation(configure(MINIMAL_SWEEP))


def test_run_sweep(tmpdir, sweep_config):
    out = tmpdir / "run"
    cfg = configure(sweep_config.read_text(), out=out)
    result = run_sweep(cfg, workers=1)
    assert sorted(_.name for _ in out.iterdir()) == ["loglog.svg", "summary.json", "sweep.csv"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["method"] == "montecarlo"
    assert summary["replicas"] == 8
    assert summary["seed"] == 7
    assert summary["dt"] * round(0.01 / summary["dt"]) == pytest.approx(0.01)
    assert "workers" not in summary["config"]["run"]
    assert list(result.n_effective) == [8, 8, 8]
    rows = (out / "sweep.csv").read_text().splitlines()
    assert len(rows) == 3 + 3


def test_run_sweep_moments(tmpdir, sweep_config):
    cfg = configure(sweep_config.read_text(), out=tmpdir, method="moments")
    result = run_sweep(cfg)
    assert np.all(np.diff(result.log_energy) > 0)
    summary = json.loads((tmpdir / "summary.json").read_text())
    assert summary["method"] == "moments"


def test_run_sweep_all_failed(tmpdir, sweep_config):
    cfg = configure(sweep_config.read_text(), out=tmpdir, t_obs=1, lambda_min=1000, lambda_max=1000, lambda_count=1)
    with pytest.raises(RunFailure, match="every replica failed"):
        run_sweep(cfg, workers=1)
    assert (tmpdir / "sweep.csv").is_file()
    assert not (tmpdir / "summary.json").exists()
    assert "# lambda=1000: 8 of 8 replicas failed" in (tmpdir / "sweep.csv").read_text()


def test_run_tabulate(tmpdir):
    cfg = configure(mode="kernels-check", out=tmpdir, check_points=3, check_times="0.01, 0.1")
    paths = run_tabulate(cfg)
    assert paths == [tmpdir / "kernels.csv"]
    lines = paths[0].read_text().splitlines()
    assert len(lines) == 3 + 2 * 3 * 3
    assert lines[2] == "t,x,y,gaussian,dirichlet,neumann,truncation_bound"
