import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neckforge import asymptotics as AS
from neckforge import potentials as PT
from neckforge.errors import DomainError, IllConditioned

A2 = -math.log(2)


@settings(max_examples=50, deadline=None)
@given(p=st.floats(-5, 5), c=st.floats(1e-3, 1e3))
def test_property_fit_power_exact(p, c):
    x = np.geomspace(1.0, 100.0, 15)
    f = AS.fit_power(x, c * x ** p)
    assert f.exponent == pytest.approx(p, abs=1e-9)
    assert f.coefficient == pytest.approx(c, rel=1e-8)
    assert f.residual_norm <= 1e-10


def test_fit_power_trim_and_errors():
    x = np.geomspace(1.0, 10.0, 10)
    f = AS.fit_power(x, x ** 2, trim=0.1)
    assert f.window == pytest.approx((x[1], x[-2]))
    with pytest.raises(IllConditioned):
        AS.fit_power([1.0, 2.0], [0.0, 1.0])
    with pytest.raises(IllConditioned):
        AS.fit_power([1.0], [1.0])


def test_bounded_and_exponent_checks():
    assert AS.bounded_check("x", [1.0, 2.9]).passed
    assert not AS.bounded_check("x", [1.0, 3.1]).passed
    assert not AS.bounded_check("x", [0.0, 1.0]).passed
    assert AS.bounded_check("x", [1.0, 2.0]).spread == 2.0
    x = np.geomspace(1, 10, 5)
    assert AS.exponent_check("e", AS.fit_power(x, x ** -4.05), -4.0).passed
    assert not AS.exponent_check("e", AS.fit_power(x, x ** -4.2), -4.0).passed


def test_interior_derivative_scaling(horn):
    checks = AS.check_interior_derivatives(horn)
    assert len(checks) == 4
    for c in checks:
        assert c.passed, (c.name, c.observed_ratio_range)


def test_interior_errors_vanish_with_b(horn):
    e6 = AS.interior_derivative_errors(horn)
    e8 = AS.interior_derivative_errors(PT.solve_horn(2, A2, -1e-8, -10.0)[0])
    assert np.all(e8 / e6 == pytest.approx(1e-2, rel=0.2))


def test_interior_errors_tip_inside():
    h = PT.solve_horn(2, A2, -0.008, -10.0)[0]
    with pytest.raises(DomainError):
        AS.interior_derivative_errors(h)


def test_eta_expansion(horn):
    c = AS.check_eta_expansion(horn)
    assert c.passed
    assert c.data["max_rel_residual"] <= 0.1
    with pytest.raises(DomainError):
        AS.check_eta_expansion(horn, eta_grid=[0.1, 0.5])


def test_eta_limit_gap_small_eta():
    # the b -> 0 gap vanishes like eta^(n+1)
    eta = np.array([0.02, 0.04])
    g = AS.eta_limit_gap(2, eta)
    assert abs(g[1] / g[0]) == pytest.approx(8.0, rel=0.05)


def test_tip_error_coefficient(horn):
    te = AS.horn_tip_error(horn, T0=abs(horn.T) ** 0.05)
    assert te.coefficient == pytest.approx(0.2, rel=0.02)
    with pytest.raises(DomainError):
        AS.horn_tip_error(horn)


def test_tip_error_collapse():
    _, spread = AS.tip_error_collapse(2, A2, -10.0, (1e-6, 1e-7, 1e-8), np.linspace(1e-3, 3e-3, 9))
    assert spread <= 1e-4


def test_bT_drift_bounded():
    c = AS.check_bT_drift(2, A2)
    assert c.passed
    signs = np.sign(c.data["drift_over_tau"])
    assert np.all(signs == signs[0])


def test_profile_error_decreases():
    s = np.linspace(0.1, 0.9, 17)
    errs = [AS.profile_error(PT.solve_horn(2, A2, -b, -10.0)[0], s) for b in (1e-6, 1e-8, 1e-10)]
    assert errs[0] > errs[1] > errs[2]


def test_coefficient_errors_halving():
    s = np.linspace(0.1, 0.9, 41)
    e = [max(AS.coefficient_errors(PT.solve_horn(2, A2, -b, -10.0)[0], s)) for b in (1e-6, 5e-7)]
    assert e[1] / e[0] == pytest.approx(2 ** (-1 / 3), rel=0.6)
