import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neckforge import special as SP
from neckforge.errors import DomainError, NonIntegrableSingularity

# independent values: mpmath, 30 digits
D2 = float((mpmath.mpf(2) / 3) ** 0.5 * (2 * mpmath.pi / mpmath.sqrt(3)) ** 1.5)
LAMBDA2 = float(mpmath.sqrt(mpmath.mpf(8) / 9 * D2))


def test_integrate_singular_power():
    v = SP.integrate_singular(SP.QuadratureSpec(lambda s: s ** (-1 / 3), 0.0, 1.0, -1 / 3, 1e-13))
    assert v == pytest.approx(1.5, rel=1e-12)


def test_integrate_singular_exponential_tail():
    v = SP.integrate_singular(SP.QuadratureSpec(lambda s: np.exp(-s), 0.0, math.inf, 0.0, 1e-13))
    assert v == pytest.approx(1.0, rel=1e-12)


def test_integrate_singular_rejects_nonintegrable():
    with pytest.raises(NonIntegrableSingularity):
        SP.integrate_singular(SP.QuadratureSpec(lambda s: 1 / s, 0.0, 1.0, -1.0))


def test_integrate_singular_rejects_empty_interval():
    with pytest.raises(DomainError):
        SP.integrate_singular(SP.QuadratureSpec(lambda s: s, 1.0, 1.0))


@pytest.mark.parametrize("n,expected", [(1, math.pi), (2, 2 * math.pi / math.sqrt(3)),
                                        (3, math.pi * math.sqrt(2))])
def test_c_n_closed_forms(n, expected):
    assert SP.c_n(n) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_c_n_against_mpmath_quadrature(n):
    p = mpmath.mpf(1) / (n + 1)
    ref = mpmath.quad(lambda s: mpmath.expm1(s) ** (-p), [0, 1, 10, mpmath.inf])
    assert SP.c_n(n) == pytest.approx(float(ref), rel=1e-11)


def test_c_n_rejects_zero():
    with pytest.raises(DomainError):
        SP.c_n(0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_c1_defining_integral(n):
    c1 = SP.c_1_const(n)
    val = (n + 1) * math.expm1(c1 / (n + 1))
    assert val == pytest.approx(n + 1, rel=1e-14)


def test_c1_values():
    assert SP.c_1_const(2) == pytest.approx(3 * math.log(2), abs=1e-14)
    assert SP.c_1_const(1) == pytest.approx(2 * math.log(2), abs=1e-14)


def test_d_n_values():
    assert SP.d_n(2) == pytest.approx(D2, rel=1e-12)
    assert SP.d_n(1) == pytest.approx(math.pi ** 2 / 2, rel=1e-12)


def test_d_n_tolerance_stability():
    assert SP.d_n(2, 1e-10) == pytest.approx(SP.d_n(2, 1e-11), rel=1e-10)


def test_lambda_n_value():
    assert SP.lambda_n(2) == pytest.approx(LAMBDA2, rel=1e-12)


def test_frak_c():
    for n in (1, 2, 3):
        assert SP.frak_c(n) ** n == pytest.approx(n, rel=1e-15)


@pytest.mark.parametrize("nu", [1 / 3, 0.25, 0.5, 0.9])
@pytest.mark.parametrize("x", [1e-3, 0.3, 1.0, 4.0, 25.0, 120.0])
def test_bessel_against_mpmath(nu, x):
    o = SP.BesselOrder(nu)
    assert SP.bessel_i(o, x) == pytest.approx(float(mpmath.besseli(nu, x)), rel=1e-12)
    assert SP.bessel_k(o, x) == pytest.approx(float(mpmath.besselk(nu, x)), rel=1e-12)
    dI = float(mpmath.diff(lambda y: mpmath.besseli(nu, y), x))
    dK = float(mpmath.diff(lambda y: mpmath.besselk(nu, y), x))
    assert SP.bessel_i_prime(o, x) == pytest.approx(dI, rel=1e-11)
    assert SP.bessel_k_prime(o, x) == pytest.approx(dK, rel=1e-11)


def test_bessel_small_argument_law():
    o = SP.BesselOrder(1 / 3)
    x = 1e-8
    lead = (x / 2) ** (1 / 3) / math.gamma(4 / 3)
    assert SP.bessel_i(o, x) / lead == pytest.approx(1.0, abs=1e-12)


def test_bessel_wronskian_at_one():
    assert SP.bessel_wronskian(SP.BesselOrder(1 / 3), 1.0) == pytest.approx(-1.0, rel=1e-12)


def test_bessel_ode_residual():
    o = SP.BesselOrder(1 / 3)
    y = np.linspace(0.2, 8.0, 15)
    h = 1e-3 * y
    v = SP.bessel_i(o, y)
    vp = SP.bessel_i_prime(o, y)

    def D(hh):
        return (SP.bessel_i_prime(o, y + hh) - SP.bessel_i_prime(o, y - hh)) / (2 * hh)
    vpp = (4 * D(h / 2) - D(h)) / 3
    res = y ** 2 * vpp + y * vp - (o.nu ** 2 + y ** 2) * v
    assert np.max(np.abs(res) / (y ** 2 * np.abs(v))) <= 1e-8


def test_bessel_domain_errors():
    with pytest.raises(DomainError):
        SP.BesselOrder(1.5)
    with pytest.raises(DomainError):
        SP.bessel_i(SP.BesselOrder(0.3), -1.0)


@settings(max_examples=40, deadline=None)
@given(nu=st.floats(0.05, 0.95), x=st.floats(0.01, 50.0))
def test_property_wronskian(nu, x):
    w = SP.bessel_wronskian(SP.BesselOrder(nu), x)
    assert w * x == pytest.approx(-1.0, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(nu=st.floats(0.05, 0.95), x=st.floats(0.05, 30.0))
def test_property_k_recurrence(nu, x):
    # K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu with K_{-mu} = K_mu
    o = SP.BesselOrder(nu)
    k = SP.bessel_k(o, x)
    kp = SP.bessel_k_prime(o, x)
    # K' = -K_{nu-1} - (nu/x) K and K' = -K_{nu+1} + (nu/x) K
    k_minus = -kp - nu / x * k
    k_plus = -kp + nu / x * k
    assert k_plus == pytest.approx(k_minus + 2 * nu / x * k, rel=1e-12)


def test_beta_gamma():
    assert SP.beta(1 / 3, 2 / 3) == pytest.approx(2 * math.pi / math.sqrt(3), rel=1e-14)
    assert SP.gamma(5.0) == pytest.approx(24.0)
