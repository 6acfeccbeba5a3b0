"""Radial model potentials: cusp, shifted Calabi, the horn family and the
collapsed neck profile.

Horn solutions solve ``(psi')^(n-1) psi'' = exp(psi + a)`` with first
integral ``(psi')^(n+1)/(n+1) = exp(psi + a) + b`` and tip value
``exp(psi(T) + a) = |b|``.  Writing ``psi = log|b| - a + z`` turns the first
integral into ``dz / (e^z - 1)^p = k dt`` with ``p = 1/(n+1)`` and
``k = ((n+1)|b|)^p``, so everything reduces to the two incomplete integrals

    G(z) = int_0^z (e^u - 1)^(-p) du,     H(z) = int_z^inf (e^u - 1)^(-p) du,

with ``G + H = c(n)``.  Both are evaluated by convergent binomial series
(``x = 1 - e^-z`` for small z, ``y = e^-z`` for large z) and inverted by
Newton's method in log coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from . import special
from .errors import DomainError, InvalidMatching, NoConvergence

MAX_ORDER = 6
_SPLIT = math.log(2.0)
_NTERMS = 64


def default_a(n: int) -> float:
    """Normalization making the Calabi-cap tip defect vanish for n = 2."""
    return -(2.0 / n) * math.log(n)


@lru_cache(maxsize=None)
def c_const(n: int) -> float:
    return special.c_n(n)


# ------------------------------------------------------------------ params

@dataclass(frozen=True)
class NeckParams:
    """Parameter tuple of one gluing instance.

    Fields left as ``None`` are resolved by the schedule or by attaching a
    horn.  ``sigma_abs`` may underflow for realistic |T|, so the schedule
    works with ``log_sigma`` and keeps ``sigma_abs`` only when representable.
    """

    n: int = 2
    a: Optional[float] = None
    b: Optional[float] = None
    T: Optional[float] = None
    tau: Optional[float] = None
    T0: Optional[float] = None
    alpha: float = 0.05
    delta0: float = 4.0
    log_sigma: Optional[float] = None
    delta: float = 0.01
    a_bold: float = 0.15

    def __post_init__(self):
        if self.a is None:
            object.__setattr__(self, "a", default_a(self.n))
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.b is not None and not self.b < 0:
            raise DomainError("b must be negative")
        if self.T is not None and not self.T < 0:
            raise DomainError("T must be negative")
        if self.tau is not None and not self.tau < 0:
            raise DomainError("tau must be negative")

    @property
    def sigma_abs(self) -> Optional[float]:
        if self.log_sigma is None:
            return None
        return math.exp(self.log_sigma)

    def with_(self, **kw) -> "NeckParams":
        return replace(self, **kw)

    def regions_ordered(self) -> bool:
        T, T0, tau = self.T, self.T0, self.tau
        return T < T + 2 * T0 < 2 * tau < tau < 0


# ----------------------------------------------------- incomplete integrals

def _poch_coeffs(first: float, shift: float) -> np.ndarray:
    """``(first)_k / (k! (k + shift))`` for k < _NTERMS."""
    out = np.empty(_NTERMS)
    poch = 1.0
    for k in range(_NTERMS):
        out[k] = poch / (k + shift)
        poch *= (first + k) / (k + 1)
    return out


def _horner(coef, x):
    acc = np.zeros_like(x)
    for ck in coef[::-1]:
        acc = acc * x + ck
    return acc


@dataclass(frozen=True)
class TailIntegrals:
    """``G``, ``H`` and their inverses for one dimension ``n``."""

    n: int
    p: float = field(init=False)
    c: float = field(init=False)
    _g: np.ndarray = field(init=False, repr=False)
    _h: np.ndarray = field(init=False, repr=False)
    G_split: float = field(init=False)

    def __post_init__(self):
        p = 1.0 / (self.n + 1)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "c", c_const(self.n))
        object.__setattr__(self, "_g", _poch_coeffs(1.0 - p, 1.0 - p))
        object.__setattr__(self, "_h", _poch_coeffs(p, p))
        object.__setattr__(self, "G_split", float(self._G_series(np.array(_SPLIT))))

    def _G_series(self, z):
        x = -np.expm1(-z)
        return x ** (1.0 - self.p) * _horner(self._g, x)

    def _H_series(self, z):
        y = np.exp(-z)
        return y ** self.p * _horner(self._h, y)

    def G(self, z):
        z = np.asarray(z, dtype=float)
        lo = z <= _SPLIT
        zs = np.where(lo, z, _SPLIT)
        zl = np.where(lo, _SPLIT, z)
        return np.where(lo, self._G_series(np.maximum(zs, 0.0)),
                        self.c - self._H_series(zl))

    def H(self, z):
        z = np.asarray(z, dtype=float)
        lo = z <= _SPLIT
        zs = np.where(lo, z, _SPLIT)
        zl = np.where(lo, _SPLIT, z)
        return np.where(lo, self.c - self._G_series(np.maximum(zs, 0.0)),
                        self._H_series(zl))

    def integrand(self, z):
        return np.expm1(np.asarray(z, dtype=float)) ** (-self.p)

    def _G_inv_small(self, g):
        p = self.p
        s = ((1.0 - p) * g) ** (1.0 / (1.0 - p))
        u = np.log(s)
        logg = np.log(g)
        for _ in range(60):
            s = np.minimum(np.exp(u), _SPLIT * 1.5)
            Gs = self._G_series(s)
            step = (np.log(Gs) - logg) * Gs / (s * self.integrand(s))
            u = u - step
            if np.all(np.abs(step) <= 4e-15 * np.maximum(1.0, np.abs(u))):
                break
        if np.any(np.abs(step) > 1e-13 * np.maximum(1.0, np.abs(u))):
            raise NoConvergence("G inversion did not converge")
        return np.exp(u)

    def _H_inv_large(self, h):
        p = self.p
        s = np.maximum(-np.log(p * h) / p, _SPLIT)
        logh = np.log(h)
        for _ in range(60):
            Hs = self._H_series(s)
            step = (np.log(Hs) - logh) * Hs / self.integrand(s)
            s = np.maximum(s + step, 0.5 * _SPLIT)
            if np.all(np.abs(step) <= 4e-15 * np.maximum(1.0, s)):
                break
        if np.any(np.abs(step) > 1e-13 * np.maximum(1.0, s)):
            raise NoConvergence("H inversion did not converge")
        return s

    def invert(self, g, h):
        """Solve ``G(z) = g`` given both ``g`` and ``h = c - g``.

        Whichever of the two is small is used, so precision is kept at both
        ends of the range.
        """
        g = np.asarray(g, dtype=float)
        h = np.asarray(h, dtype=float)
        g, h = np.broadcast_arrays(g, h)
        out = np.zeros(g.shape)
        small = (g <= self.G_split) & (g > 0)
        large = g > self.G_split
        if np.any(small):
            out[small] = self._G_inv_small(g[small])
        if np.any(large):
            if np.any(h[large] <= 0):
                raise DomainError("point lies beyond the blow-up time")
            out[large] = self._H_inv_large(h[large])
        return out


@lru_cache(maxsize=None)
def tail_integrals(n: int) -> TailIntegrals:
    return TailIntegrals(n)


# ------------------------------------------------------ Taylor-mode ODE

def _ode_taylor(y0, y1, E0, n, order):
    """Taylor coefficients of a solution of ``y'' = e^(y+a) (y')^(1-n)``.

    ``E0`` is ``e^(y0 + a)``.  Returns coefficients ``y_0..y_order``.
    """
    y = [np.asarray(y0, float), np.asarray(y1, float)]
    for m in range(1, order):
        e = [np.asarray(E0, float)]
        for j in range(1, m):
            e.append(sum(i * y[i] * e[j - i] for i in range(1, j + 1)) / j)
        v = [(j + 1) * y[j + 1] for j in range(m)]
        w = [v[0] ** (1 - n)]
        for j in range(1, m):
            acc = sum(((1 - n) * i - (j - i)) * v[i] * w[j - i] for i in range(1, j + 1))
            w.append(acc / (j * v[0]))
        rhs = sum(e[i] * w[m - 1 - i] for i in range(m))
        y.append(rhs / ((m + 1) * m))
    return y


def _stack(coeffs):
    return np.stack([math.factorial(j) * cj for j, cj in enumerate(coeffs)])


# ------------------------------------------------------------- potentials

class RadialPotential:
    """Evaluable radial potential.  ``derivs(t, k)`` returns an array of
    shape ``(k+1,) + shape(t)`` holding ``psi, psi', ..., psi^(k)``."""

    kind: str = "abstract"
    n: int
    a: float

    def derivs(self, t, order=2):  # pragma: no cover - interface
        raise NotImplementedError

    def __call__(self, t):
        return self.derivs(t, 0)[0]


def _check_order(order):
    if not 0 <= order <= MAX_ORDER:
        raise DomainError(f"derivative order {order} exceeds max_order={MAX_ORDER}")


@dataclass(frozen=True)
class CuspPotential(RadialPotential):
    n: int = 2
    a: float = field(default_factory=lambda: default_a(2))
    kind: str = "cusp"

    @property
    def domain(self):
        return (-math.inf, 0.0)

    def derivs(self, t, order=2):
        return psi_cusp(self.n, self.a, t, order)


def psi_cusp(n, a, t, order=2):
    """``-(n+1) log(-t) + n log(n+1) - a`` with exact derivatives."""
    if isinstance(n, NeckParams):
        return psi_cusp(n.n, n.a, t, a if isinstance(a, int) else order)
    t = np.asarray(t, dtype=float)
    _check_order(order)
    if np.any(t >= 0):
        raise DomainError("cusp potential needs t < 0")
    out = [-(n + 1) * np.log(-t) + n * math.log(n + 1) - a]
    for k in range(1, order + 1):
        out.append((-1) ** k * (n + 1) * math.factorial(k - 1) / t ** k)
    return np.stack(out)


@dataclass(frozen=True)
class CalabiPotential(RadialPotential):
    """``scale * (n/(n+1)) (t - T)^((n+1)/n) + offset``."""

    n: int
    T: float
    scale: float = 1.0
    offset: float = 0.0
    a: float = 0.0
    kind: str = "calabi"

    @property
    def domain(self):
        return (self.T, math.inf)

    def derivs(self, t, order=2):
        return psi_calabi(self.n, self.T, t, order, self.scale, self.offset)


def psi_calabi(n, T, t, order=2, scale=1.0, offset=0.0):
    t = np.asarray(t, dtype=float)
    _check_order(order)
    if np.any(t <= T):
        raise DomainError("Calabi potential needs t > T")
    x = t - T
    q = (n + 1) / n
    coef = scale * n / (n + 1)
    out = [coef * x ** q + offset]
    fall = 1.0
    for j in range(1, order + 1):
        fall *= q - (j - 1)
        out.append(coef * fall * x ** (q - j))
    return np.stack(out)


@dataclass(frozen=True)
class HornPotential(RadialPotential):
    """Horn solution on ``(T, tau]`` matched to the cusp at ``tau``.

    ``z(t) = psi(t) - log|b| + a`` is kept as the primary variable; it is
    also the log of the radial volume density ``mu_T``.
    """

    n: int
    a: float
    b: float
    tau: float
    T: float
    t_inf: float
    k: float
    S_tau: float
    kind: str = "horn"

    @property
    def domain(self):
        return (self.T, self.tau)

    @property
    def tails(self) -> TailIntegrals:
        return tail_integrals(self.n)

    @property
    def tip_value(self) -> float:
        return math.log(-self.b) - self.a

    def _check(self, t):
        if np.any(t <= self.T) or np.any(t > self.tau):
            raise DomainError("horn evaluated outside (T, tau]")

    def z(self, t, check=True):
        t = np.asarray(t, dtype=float)
        if check:
            self._check(t)
        g = self.k * (t - self.T)
        h = self.k * (self.t_inf - t)
        z = self.tails.invert(g, h)
        return np.where(t == self.tau, self.S_tau, z)

    def derivs(self, t, order=2, check=True):
        _check_order(order)
        z = self.z(t, check)
        return self._derivs_from_z(z, order)

    def _derivs_from_z(self, z, order):
        p = 1.0 / (self.n + 1)
        psi = self.tip_value + z
        if order == 0:
            return psi[None]
        d1 = self.k * np.expm1(z) ** p
        E0 = -self.b * np.exp(z)
        coeffs = _ode_taylor(psi, d1, E0, self.n, order)
        return _stack(coeffs)

    def mu(self, t, check=True):
        """Radial volume density ``exp(psi(t) - psi(T))``."""
        return np.exp(self.z(t, check))


def solve_b_from_T(n: int, T: float) -> float:
    """``b`` such that ``c(n) = ((n+1)|b|)^(1/(n+1)) |T|`` exactly."""
    if not T < 0:
        raise DomainError("T must be negative")
    return -(c_const(n) / abs(T)) ** (n + 1) / (n + 1)


def solve_T_from_b(n: int, b: float) -> float:
    if not b < 0:
        raise DomainError("b must be negative")
    k = ((n + 1) * abs(b)) ** (1.0 / (n + 1))
    return -c_const(n) / k


def solve_horn(n, a=None, b=None, tau=None):
    """Horn through the cusp value at ``tau``; returns ``(horn, T)``.

    Accepts either explicit numbers or a :class:`NeckParams` as first
    argument.
    """
    if isinstance(n, NeckParams):
        prm = n
        n, a, b, tau = prm.n, prm.a, prm.b, prm.tau
    if a is None:
        a = default_a(n)
    if b is None or not b < 0:
        raise DomainError("b must be negative")
    if tau is None or not tau < 0:
        raise DomainError("tau must be negative")
    tails = tail_integrals(n)
    # exp(psi_cusp(tau) + a) / |b| = (n+1)^n / (|tau|^(n+1) |b|)
    S_tau = n * math.log(n + 1) - (n + 1) * math.log(-tau) - math.log(-b)
    if not S_tau > 0:
        raise InvalidMatching(
            f"exp(psi_cusp(tau)+a) + b <= 0 at tau={tau}, b={b}")
    k = ((n + 1) * abs(b)) ** (1.0 / (n + 1))
    G_tau = float(tails.G(S_tau))
    H_tau = float(tails.H(S_tau))
    T = tau - G_tau / k
    horn = HornPotential(n=n, a=a, b=b, tau=tau, T=T, t_inf=tau + H_tau / k,
                         k=k, S_tau=S_tau)
    return horn, T


def horn_derivative(horn: HornPotential, t, k: int):
    """k-th derivative by the Taylor recursion of the ODE, no differencing."""
    if k < 1:
        raise DomainError("k must be >= 1")
    return horn.derivs(t, k)[k]


# ------------------------------------------------------ collapsed profile

@dataclass(frozen=True)
class LimitProfile:
    """Collapsed neck profile on ``s`` in (0, 1).

    ``psi_inf`` solves ``G(psi_inf(s)) = c s``.  With ``t = (1 - s) T`` and
    ``k|T| = c`` one has ``|T| psi_T' = c (e^z - 1)^p`` and
    ``T^2 psi_T'' = (c^2/(n+1)) e^z (e^z - 1)^(-(n-1)/(n+1))``, which gives
    ``P`` and ``Q`` below exactly in the limit.
    """

    n: int

    @property
    def c(self):
        return c_const(self.n)

    def psi_inf(self, s, eta=None):
        s = np.asarray(s, dtype=float)
        if eta is None:
            eta = 1.0 - s
        if np.any(s <= 0) or np.any(np.asarray(eta) <= 0):
            raise DomainError("profile lives on 0 < s < 1")
        return tail_integrals(self.n).invert(self.c * s, self.c * np.asarray(eta))

    def P(self, s, eta=None):
        z = self.psi_inf(s, eta)
        return self.c * np.expm1(z) ** (1.0 / (self.n + 1))

    def Q(self, s, eta=None):
        z = self.psi_inf(s, eta)
        n = self.n
        return (self.c ** 2 / (n + 1)) * np.exp(z) * np.expm1(z) ** (-(n - 1) / (n + 1))

    def mu(self, s, eta=None):
        return np.exp(self.psi_inf(s, eta))


def limit_profile(n: int) -> LimitProfile:
    if n < 2:
        raise DomainError("limit profile needs n >= 2")
    return LimitProfile(n)


def profile_constants(n: int):
    """Endpoint constants ``(A0, A1)``:
    ``psi_inf(s) ~ A0 s^((n+1)/n)`` and
    ``psi_inf(1 - eta) + (n+1) log eta -> A1``.
    """
    c = c_const(n)
    return (n / (n + 1)) * special.d_n(n), (n + 1) * math.log((n + 1) / c)
