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

import numpy as np
import pytest

from spde_excite.artifacts import (
    UNDEFINED_SLOPE, KernelTable, LogLogPlot, RunDirectory, Summary, SweepTable, ValidationReport, jsonable,
)
from spde_excite.model import IndexFit, SweepResult
from spde_excite.renewal import loglog_fit


def make_result(lambdas, log_energy, failed=None):
    lambdas = np.asarray(lambdas, dtype=float)
    log_energy = np.asarray(log_energy, dtype=float)
    n = len(lambdas)
    fit = loglog_fit(lambdas, log_energy, strict=False)
    return SweepResult(
        lambdas=lambdas,
        log_energy=log_energy,
        log_energy_ci=np.full(n, 0.01),
        inf=np.exp(log_energy),
        sup=np.exp(2 * log_energy),
        inf_eps=np.exp(1.5 * log_energy),
        n_effective=np.full(n, 100),
        failed=np.zeros(n, dtype=int) if failed is None else np.asarray(failed),
        fit=fit,
        fits={"energy": fit},
    )


@pytest.fixture
def result():
    lams = [1.5, 2.0, 3.0]
    return make_result(lams, [lam ** 3 for lam in lams])


def test_jsonable():
    assert jsonable({"a": np.float64(1.5), 2: (np.int64(3), math.inf)}) == {"a": 1.5, "2": [3, None]}
    assert jsonable(np.array([True, False])) == [True, False]
    assert jsonable(np.bool_(True)) is True


def test_sweep_table(result):
    text = SweepTable("abc", 7, result).generate()
    lines = text.splitlines()
    assert lines[0] == "# config_hash=abc"
    assert lines[1] == "# seed=7"
    assert lines[2] == "lambda,log_energy,log_energy_ci,I,S,I_eps,n_effective"
    assert len(lines) == 6
    cells = lines[3].split(",")
    assert cells[0] == "1.5"
    assert cells[-1] == "100"
    assert float(lines[5].split(",")[1]) == 27.0


def test_sweep_table_failures():
    r = make_result([1.0, 2.0, 4.0], [2.0, 8.0, 64.0], failed=[0, 3, 0])
    lines = SweepTable("abc", 0, r).generate().splitlines()
    assert lines[2] == "# lambda=2: 3 of 103 replicas failed"


def test_kernel_table(tmpdir):
    rows = [(0.1, 0.5, 0.5, 1.2, 1.1, 1.3, 0.0)]
    path = KernelTable("h", 1, rows).write(tmpdir)
    assert path == tmpdir / "kernels.csv"
    lines = path.read_text().splitlines()
    assert lines[2].startswith("t,x,y,gaussian")
    assert tuple(float(_) for _ in lines[3].split(",")) == rows[0]


def test_summary(result):
    content = json.loads(Summary.from_sweep("abc", 3, result, extra={"mode": "sweep"}).generate())
    assert content["slope"] == pytest.approx(3.0)
    assert content["window"] == [1.5, 3.0]
    assert content["config_hash"] == "abc"
    assert content["seed"] == 3
    assert content["mode"] == "sweep"
    assert content["failed_replicas"] == 0
    assert content["fits"]["energy"]["n_points"] == 3


def test_summary_undefined():
    r = make_result([2.0], [16.0])
    assert not r.fit.defined
    content = json.loads(Summary.from_sweep("abc", 3, r).generate())
    assert content["slope"] == UNDEFINED_SLOPE
    assert content["stderr"] is None
    svg = LogLogPlot("abc", 3, r).generate()
    assert UNDEFINED_SLOPE in svg


def test_validation_report():
    text = ValidationReport("h", 0, {"passed": True, "checks": [{"value": math.nan}]}).generate()
    content = json.loads(text)
    assert content["checks"][0]["value"] is None
    assert text.endswith("}\n")


def test_loglog_plot(result):
    svg = LogLogPlot("abc123", 5, result).generate()
    assert svg.startswith("<?xml")
    assert "config_hash=abc123 seed=5" in svg
    assert svg.count("<circle") == 3
    assert "stroke-dasharray" in svg
    assert "slope 3.000" in svg
    assert LogLogPlot("abc123", 5, result).generate() == svg


def test_run_directory(tmpdir, result):
    run = RunDirectory(tmpdir / "run", "abc", 1)
    run.add(SweepTable, result)
    run.add_summary(result)
    run.add(LogLogPlot, result)
    paths = run.write()
    assert sorted(_.name for _ in paths) == ["loglog.svg", "summary.json", "sweep.csv"]
    assert all(_.is_file() for _ in paths)


def test_index_fit_dict():
    fit = IndexFit(None, None, None, None, None, 1)
    assert fit.as_dict()["window"] is None
    assert not fit.defined
