"""Quadrature with power-law endpoint singularities, Gamma/Beta, modified
Bessel functions of fractional order, and the universal neck constants.

Every routine here is a pure function of its arguments.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NoConvergence, NonIntegrableSingularity

EULER_GAMMA = 0.57721566490153286061

# Gauss-Kronrod 15-point rule on [-1, 1]; the embedded 7-point Gauss rule
# uses every second abscissa.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[1:7:2] = _WG[:3]
_WG_FULL[7] = _WG[3]
_WG_FULL[9:14:2] = _WG[2::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    """Integral of ``integrand`` over ``[lo, hi]``.

    ``singularity_exponent_lo`` is the exponent ``e`` in a ``(x - lo)**e``
    blowup at the left end; ``hi`` may be ``math.inf``.
    """

    integrand: Callable
    lo: float
    hi: float
    singularity_exponent_lo: float = 0.0
    tol: float = 1e-10


@dataclass(frozen=True)
class BesselOrder:
    nu: float

    def __post_init__(self):
        if not 0.0 < self.nu < 1.0:
            raise DomainError(f"Bessel order must lie in (0, 1), got {self.nu}")


def _as_vector_fn(f):
    def g(x):
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([float(f(xi)) for xi in x])
    return g


def _gk_panel(F, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    y = F(c + h * _NODES)
    k = h * float(np.dot(_WK, y))
    g = h * float(np.dot(_WG_FULL, y))
    return k, abs(k - g), h * float(np.dot(_WK, np.abs(y)))


def _adaptive(F, a, b, tol, max_panels=4000, initial=8):
    """Globally adaptive Gauss-Kronrod on a finite interval."""
    edges = np.linspace(a, b, initial + 1)
    heap = []
    total = err = absum = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        k, e, ab = _gk_panel(F, lo, hi)
        heapq.heappush(heap, (-e, lo, hi, k, ab))
        total += k
        err += e
        absum += ab
    tol = max(tol, 50 * _EPS)
    while err > max(tol * abs(total), 50 * _EPS * absum):
        if len(heap) >= max_panels:
            raise NoConvergence(
                f"quadrature stalled: error estimate {err:.3e} after {len(heap)} panels")
        e0, lo, hi, k0, ab0 = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise NoConvergence("quadrature panel width reached machine resolution")
        total -= k0
        err += e0
        absum -= ab0
        for plo, phi in ((lo, mid), (mid, hi)):
            k, e, ab = _gk_panel(F, plo, phi)
            heapq.heappush(heap, (-e, plo, phi, k, ab))
            total += k
            err += e
            absum += ab
    # Re-sum to drop accumulated cancellation in the running totals.
    return math.fsum(item[3] for item in heap)


def _tail_split(f, lo):
    ref = abs(float(f(np.array([lo + 1.0]))[0]))
    x = lo + 1.0
    step = 1.0
    for _ in range(200):
        val = abs(float(f(np.array([x]))[0]))
        if val <= 1e-3 * ref:
            return x
        x += step
        step *= 1.5
    raise NoConvergence("integrand does not decay on the infinite interval")


def integrate_singular(spec: QuadratureSpec) -> float:
    """Integrate with a power-law singularity at ``lo`` neutralized by
    ``u = (x - lo)**(1 + e)``; an infinite ``hi`` is split off and mapped
    through ``x = X - L log v`` with ``L`` tied to the observed decay rate.
    """
    e = float(spec.singularity_exponent_lo)
    if e <= -1.0:
        raise NonIntegrableSingularity(f"exponent {e} <= -1 is not integrable")
    if e > 0.0:
        e = 0.0
    lo, hi = float(spec.lo), float(spec.hi)
    if not hi > lo:
        raise DomainError("need hi > lo")
    f = _as_vector_fn(spec.integrand)
    tol = float(spec.tol)

    split = hi
    tail = 0.0
    if math.isinf(hi):
        split = _tail_split(f, lo)
        f1, f2 = (abs(float(v)) for v in f(np.array([split, split + 1.0])))
        ell = 1.0 / math.log(f1 / f2) if f2 > 0 and f1 > f2 else 1.0
        L = 2.0 * ell

        def F_tail(v):
            return f(split - L * np.log(v)) * (L / v)

        tail = _adaptive(F_tail, 0.0, 1.0, tol)

    m = 1.0 + e
    U = (split - lo) ** m

    def F_head(u):
        return f(lo + u ** (1.0 / m)) * (u ** (1.0 / m - 1.0) / m)

    head = _adaptive(F_head, 0.0, U, tol)
    return head + tail


# ---------------------------------------------------------------- constants

def c_n(n: int, tol: float = 1e-13) -> float:
    """``int_0^inf (e^s - 1)^(-1/(n+1)) ds`` by singular quadrature."""
    if n < 1:
        raise DomainError("n must be >= 1")
    p = 1.0 / (n + 1)
    spec = QuadratureSpec(lambda s: np.expm1(s) ** (-p), 0.0, math.inf, -p, tol)
    return integrate_singular(spec)


def c_n_closed(n: int) -> float:
    """Reflection-formula value ``pi / sin(pi/(n+1))`` used as an oracle."""
    return math.pi / math.sin(math.pi / (n + 1))


def c_1_const(n: int) -> float:
    """Positive root of ``int_{-c1}^0 e^(-s/(n+1)) ds = n + 1``.

    The integral equals ``(n+1)(e^(c1/(n+1)) - 1)``, so ``c1 = (n+1) log 2``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    return (n + 1) * math.log(2.0)


def d_n(n: int, tol: float = 1e-13) -> float:
    if n < 1:
        raise DomainError("n must be >= 1")
    return (n / (n + 1)) ** (1.0 / n) * c_n(n, tol) ** ((n + 1) / n)


def lambda_n(n: int, tol: float = 1e-13) -> float:
    """Bessel argument scale of the s -> 0 endpoint model."""
    return math.sqrt(4 * n * d_n(n, tol) / (n + 1) ** 2)


def frak_c(n: int) -> float:
    """Scale of the Calabi cap, ``n**(1/n)``."""
    return n ** (1.0 / n)


def gamma(x: float) -> float:
    return math.gamma(x)


def beta(a: float, b: float) -> float:
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


# ------------------------------------------------------------------ Bessel

_MAXIT = 100000
_X_MAX = 700.0


def _nu_of(order) -> float:
    if isinstance(order, BesselOrder):
        return order.nu
    return BesselOrder(float(order)).nu


def _series_i(nu: float, x: float) -> float:
    # All terms positive, so the sum is stable wherever it does not overflow.
    q = 0.25 * x * x
    term = (0.5 * x) ** nu / math.gamma(1.0 + nu)
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if term < 1e-17 * total:
            return total
        if k > _MAXIT:
            raise NoConvergence("I_nu series did not converge")


def _gam1(mu: float) -> float:
    if abs(mu) < 1e-3:
        mu2 = mu * mu
        return -(EULER_GAMMA - 0.0420026350340952 * mu2 - 0.0421977345555443 * mu2 * mu2)
    return (1.0 / math.gamma(1.0 - mu) - 1.0 / math.gamma(1.0 + mu)) / (2.0 * mu)


def _k_pair(mu: float, x: float):
    """``(K_mu(x), K_{mu+1}(x))`` for ``|mu| <= 1/2``.

    Temme's series below x = 2, Steed's continued fraction above.
    """
    mu2 = mu * mu
    if x < 2.0:
        x2 = 0.5 * x
        pimu = math.pi * mu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = mu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gampl = 1.0 / math.gamma(1.0 + mu)
        gammi = 1.0 / math.gamma(1.0 - mu)
        gam1 = _gam1(mu)
        gam2 = 0.5 * (gammi + gampl)
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        total = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d = x2 * x2
        total1 = p
        for i in range(1, _MAXIT):
            ff = (i * ff + p + q) / (i * i - mu2)
            c *= d / i
            p /= i - mu
            q /= i + mu
            delta = c * ff
            total += delta
            total1 += c * (p - i * ff)
            if abs(delta) < abs(total) * 1e-17:
                break
        else:
            raise NoConvergence("Temme series did not converge")
        return total, total1 * 2.0 / x
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu2
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < 1e-17:
            break
    else:
        raise NoConvergence("Steed continued fraction did not converge")
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    return kmu, kmu * (mu + x + 0.5 - h) / x


def _check_x(x):
    if not x > 0.0:
        raise DomainError(f"Bessel argument must be positive, got {x}")
    if x > _X_MAX:
        raise DomainError(f"Bessel argument {x} beyond double-precision range")


def _i_scalar(nu, x):
    _check_x(x)
    i = _series_i(nu, x)
    ip = _series_i(nu + 1.0, x) + nu / x * i
    return i, ip


def _k_scalar(nu, x):
    _check_x(x)
    nl = int(nu + 0.5)
    mu = nu - nl
    k0, k1 = _k_pair(mu, x)
    for j in range(1, nl + 1):
        k0, k1 = k1, (mu + j) * 2.0 / x * k1 + k0
    return k0, nu / x * k0 - k1


def _vectorized(scalar_fn, nu, x, which):
    xa = np.asarray(x, dtype=float)
    out = np.empty(xa.shape)
    flat = out.reshape(-1)
    for j, xv in enumerate(xa.reshape(-1)):
        flat[j] = scalar_fn(nu, float(xv))[which]
    return float(out) if out.ndim == 0 else out


def bessel_i(order, x):
    """Modified Bessel function ``I_nu(x)`` (positive-term power series)."""
    return _vectorized(_i_scalar, _nu_of(order), x, 0)


def bessel_i_prime(order, x):
    return _vectorized(_i_scalar, _nu_of(order), x, 1)


def bessel_k(order, x):
    """Modified Bessel function ``K_nu(x)``, computed independently of ``I``."""
    return _vectorized(_k_scalar, _nu_of(order), x, 0)


def bessel_k_prime(order, x):
    return _vectorized(_k_scalar, _nu_of(order), x, 1)


def bessel_wronskian(order, x):
    """``I K' - I' K``; equals ``-1/x`` identically."""
    nu = _nu_of(order)
    i, ip = _i_scalar(nu, float(x))
    k, kp = _k_scalar(nu, float(x))
    return i * kp - ip * k
