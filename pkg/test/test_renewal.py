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

import math

import numpy as np
import pytest

from spde_excite.model import RenewalSpec
from spde_excite.renewal import (
    FitError, growth_exponent, loglog_fit, pam_rate, pam_second_moment, renewal_closed_form,
    renewal_family, solve_renewal,
)


def test_closed_form():
    value, log_value = renewal_closed_form(1.0, 1.0, 1.0)
    assert value == pytest.approx(46.00, abs=5e-3)
    assert log_value == pytest.approx(math.log(value))
    _, log_value = renewal_closed_form(1.0, 10.0, 1.0)
    assert log_value == pytest.approx(100 * math.pi + math.log(2), abs=1e-6)
    assert log_value == pytest.approx(314.852, abs=1e-3)
    assert renewal_closed_form(2.5, 0.0, 3.0) == pytest.approx((2.5, math.log(2.5)))
    assert renewal_closed_form(2.5, 4.0, 0.0)[0] == pytest.approx(2.5)


def test_closed_form_overflow():
    value, log_value = renewal_closed_form(1.0, 100.0, 1.0)
    assert value == math.inf
    assert log_value == pytest.approx(1e4 * math.pi + math.log(2))


def test_closed_form_array():
    t = np.array([0.0, 0.5, 1.0])
    values, logs = renewal_closed_form(1.0, 1.0, t)
    assert values.shape == logs.shape == (3,)
    assert values[0] == pytest.approx(1.0)
    assert np.all(np.diff(values) > 0)


def test_closed_form_rejects():
    with pytest.raises(ValueError):
        renewal_closed_form(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        renewal_closed_form(1.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        renewal_closed_form(1.0, 1.0, -0.1)


def test_renewal_spec():
    spec = RenewalSpec(a=1.0, b=2.0, k=3.0, T=0.5, n=10)
    assert spec.c == 6.0
    assert spec.h == 0.05
    assert len(spec.times) == 11
    for kwargs in dict(a=0.0), dict(b=0.0), dict(T=0.0), dict(k=-1.0), dict(n=1):
        args = dict(a=1.0, b=1.0, k=1.0, T=1.0)
        args.update(kwargs)
        with pytest.raises(ValueError):
            RenewalSpec(**args)


def test_solve_constant():
    f = solve_renewal(RenewalSpec(a=3.0, b=1.0, k=0.0, T=2.0, n=16))
    np.testing.assert_allclose(f.values, 3.0)


def test_solve_matches_closed_form():
    spec = RenewalSpec(a=1.0, b=1.0, k=1.0, T=1.0, n=4096)
    f = solve_renewal(spec)
    assert f.at(1.0) == pytest.approx(46.00, abs=5e-3)
    _, exact = renewal_closed_form(1.0, 1.0, spec.times[1:])
    rel = np.abs(np.expm1(f.log_values[1:] - exact))
    assert rel.max() < 1e-4


def test_solve_refinement():
    errors = []
    _, exact = renewal_closed_form(1.0, 0.5, 1.0)
    for n in 64, 128, 256, 512:
        f = solve_renewal(RenewalSpec(a=1.0, b=1.0, k=0.5, T=1.0, n=n))
        errors.append(abs(math.expm1(f.log_values[-1] - exact)))
    assert all(e > d for e, d in zip(errors, errors[1:]))


def test_solve_monotone():
    base = dict(a=1.0, b=1.0, k=1.0, T=1.0, n=256)
    f = solve_renewal(RenewalSpec(**base))
    assert np.all(np.diff(f.log_values) >= 0)
    for key, value in ("a", 2.0), ("k", 1.5):
        g = solve_renewal(RenewalSpec(**dict(base, **{key: value})))
        assert np.all(g.log_values >= f.log_values)


@pytest.mark.parametrize("a,b,k", [
    (1.0, 1.0, 3.0),
    (2.0, 0.5, 24.0),
    (0.5, 2.0, 10.0),
    (1.0, 1.0, 50 / math.sqrt(math.pi)),
])
def test_solve_matches_closed_form_large_rates(a, b, k):
    spec = RenewalSpec(a=a, b=b, k=k, T=1.0, n=4096)
    assert spec.c * math.sqrt(math.pi * spec.T) <= 50 + 1e-12
    f = solve_renewal(spec)
    assert np.all(np.isfinite(f.log_values))
    _, exact = renewal_closed_form(a, spec.c, spec.times[1:])
    rel = np.abs(np.expm1(f.log_values[1:] - exact))
    assert rel.max() < 1e-4


def test_solve_large_values_stay_finite():
    spec = RenewalSpec(a=1.0, b=1.0, k=20.0, T=1.0, n=4096)
    f = solve_renewal(spec)
    _, exact = renewal_closed_form(1.0, 20.0, 1.0)
    assert np.all(np.isfinite(f.log_values))
    assert f.log_values[-1] == pytest.approx(exact, rel=1e-6)


def test_solve_beyond_grid_resolution():
    # pi c^2 h is far above 1: f / exp(pi c^2 t) is flat at 2a on every grid panel
    spec = RenewalSpec(a=1.0, b=1.0, k=1e4, T=1.0, n=4096)
    f = solve_renewal(spec)
    _, exact = renewal_closed_form(1.0, 1e4, spec.times)
    growth = math.pi * 1e8 * spec.times
    np.testing.assert_allclose(f.log_values - growth, exact - growth, atol=1e-4)
    assert f.log_values[-1] - growth[-1] == pytest.approx(math.log(2.0), abs=1e-4)


def test_solve_coarse_grid():
    with pytest.warns(RuntimeWarning, match="too coarse"):
        solve_renewal(RenewalSpec(a=1.0, b=1.0, k=5.0, T=1.0, n=8))


def test_loglog_fit_synthetic():
    ks = np.geomspace(2, 50, 7)
    fit = loglog_fit(ks, ks ** 2)
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.residual_se == pytest.approx(0.0, abs=1e-12)
    fit = loglog_fit(ks, ks ** 4)
    assert fit.slope == pytest.approx(4.0, abs=1e-12)
    assert fit.window == pytest.approx((2.0, 50.0))
    assert fit.n_points == 7


def test_loglog_fit_scale_invariance():
    ks = np.geomspace(2, 50, 7)
    log_e = 0.3 * ks ** 4
    a = loglog_fit(ks, log_e)
    b = loglog_fit(ks, log_e * 5.0)
    assert b.slope == pytest.approx(a.slope, abs=1e-12)
    assert b.intercept == pytest.approx(a.intercept + math.log(5.0), abs=1e-12)


def test_loglog_fit_rejects_points():
    xs = [1.0, 2.0, 3.0, 4.0, 5.0]
    log_values = [-1.0, 0.0, 9.0, 16.0, 25.0]
    with pytest.warns(RuntimeWarning):
        fit = loglog_fit(xs, log_values)
    assert fit.rejected == (1.0, 2.0)
    assert fit.slope == pytest.approx(2.0)
    with pytest.warns(RuntimeWarning):
        with pytest.raises(FitError) as exc_info:
            loglog_fit(xs[:4], log_values[:4])
    assert exc_info.value.rejected == (1.0, 2.0)
    with pytest.warns(RuntimeWarning):
        fit = loglog_fit(xs[:4], log_values[:4], strict=False)
    assert not fit.defined
    assert fit.as_dict()["slope"] is None


def test_growth_exponent():
    ks = np.geomspace(1e2, 1e4, 9)
    fit = growth_exponent(renewal_family(1.0, 1.0, ks, 1.0), 1.0)
    assert fit.slope == pytest.approx(2.0, abs=0.02)
    synthetic = {k: k ** 2 for k in (2.0, 3.0, 5.0)}
    assert growth_exponent(synthetic).slope == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(FitError):
        growth_exponent({2.0: 4.0, 3.0: 9.0})


def test_pam_second_moment():
    value, _ = pam_second_moment(1.0, 1.0, 0.5)
    assert value == pytest.approx(1.9524, abs=1e-4)
    _, log_value = pam_second_moment(3.0, 0.5, 0.5)
    assert log_value == pytest.approx(10.818, abs=1e-3)
    for lam, t, nu in (0.5, 0.05, 0.5), (2.0, 0.3, 1.0):
        assert pam_second_moment(lam, t, nu) == renewal_closed_form(1.0, pam_rate(lam, nu), t)
    assert pam_second_moment(0.0, 1.0, 0.5)[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        pam_second_moment(-1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        pam_second_moment(1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        pam_second_moment(1.0, 1.0, 0.0)


def test_pam_second_moment_solver_cross_check():
    c = pam_rate(1.0, 0.5)
    f = solve_renewal(RenewalSpec(a=1.0, b=c, k=1.0, T=1.0, n=1024))
    assert f.at(1.0) == pytest.approx(pam_second_moment(1.0, 1.0, 0.5)[0], rel=1e-4)
