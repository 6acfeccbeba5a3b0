"""Collapsed neck operator, its endpoint models and the obstruction pair.

All boundary-value problems are solved on the logit lattice
``s = 1/(1 + e^-x)``, ``x_j = j dx``, which is geometric toward both ends
(node ratio ``e^dx`` in s near 0 and in ``eta = 1 - s`` near 1).  With
``s_x = s eta`` and ``s_xx = s eta (1 - 2s)``,

    a2 u_ss + a1 u_s + a0 u
        = (a2/s_x^2) u_xx + (a1/s_x - a2 (1-2s)/s_x^2 ... ) u_x + a0 u,

which is discretized by central differences.  The resulting tridiagonal
matrix is an M-matrix for every operator in scope once ``dx <= 0.05``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from . import special
from .asymptotics import PowerFit, fit_power
from .errors import DomainError, IllConditioned, NonIntegrable, NonMonotone
from .potentials import HornPotential, LimitProfile, limit_profile, psi_cusp

DEFAULT_EPS = (1e-4, 3e-5, 1e-5, 3e-6)
DEFAULT_WINDOW = (1e-4, 0.1)
NEUMANN_WINDOW = (3e-4, 0.05)
DEFAULT_DX = 0.01
ETA_RIGHT = 1e-6
# round-off allowance for the discrete maximum principle
MP_NOISE = 1e-10


# ------------------------------------------------------------------ types

@dataclass(frozen=True)
class OdeOperator:
    """``a2 u'' + a1 u' + a0 u``.

    Coefficients are called as ``f(s, eta)`` so that evaluation near the
    right end can use the exact complement ``eta``.
    """

    a2: Callable
    a1: Callable
    a0: Callable
    domain: tuple = (0.0, 1.0)
    variable: str = "s"
    n: int = 2

    def coeffs(self, s, eta=None):
        s = np.asarray(s, float)
        if eta is None:
            eta = 1.0 - s
        return (np.broadcast_to(self.a2(s, eta), s.shape),
                np.broadcast_to(self.a1(s, eta), s.shape),
                np.broadcast_to(self.a0(s, eta), s.shape))

    def apply(self, s, u, du, d2u, eta=None):
        a2, a1, a0 = self.coeffs(s, eta)
        return a2 * d2u + a1 * du + a0 * u


@dataclass(frozen=True)
class GridFunction:
    nodes: np.ndarray
    values: np.ndarray
    grading: str = "double-graded"
    eta: Optional[np.ndarray] = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, float)
        vals = np.asarray(self.values, float)
        if nodes.shape != vals.shape:
            raise DomainError("nodes and values differ in shape")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise DomainError("grid function has non-finite values")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", vals)
        if self.eta is None:
            object.__setattr__(self, "eta", 1.0 - nodes)

    @property
    def x(self):
        return np.log(self.nodes) - np.log(self.eta)

    def restrict(self, mask):
        return GridFunction(self.nodes[mask], self.values[mask], self.grading, self.eta[mask])

    def with_values(self, values):
        return GridFunction(self.nodes, values, self.grading, self.eta)


@dataclass(frozen=True)
class ExpansionFit:
    exponents: tuple
    coefficients: np.ndarray
    remainder: PowerFit
    window: tuple
    max_residual: float


@dataclass(frozen=True)
class ObstructionPair:
    uhat: GridFunction
    vhat: GridFunction
    C1_u: float
    C2_u: float
    C0_v: float
    C2_v: float
    lam: float
    neumann_coefficient: float
    fit_residuals: tuple
    uhat_fit: ExpansionFit
    vhat_fit: ExpansionFit
    dirichlet_v: GridFunction


@dataclass(frozen=True)
class DensityPair:
    mu_T: Optional[Callable]
    mu_inf: Optional[Callable]
    T: Optional[float] = None


# -------------------------------------------------------------- operators

def radial_laplacian_op(psi) -> OdeOperator:
    """Radial Laplacian minus identity in t: ``u''/psi'' + (n-1) u'/psi' - u``."""
    n = psi.n

    def a2(t, _eta=None):
        return 1.0 / psi.derivs(t, 2)[2]

    def a1(t, _eta=None):
        return (n - 1) / psi.derivs(t, 1)[1]

    dom = getattr(psi, "domain", (-math.inf, math.inf))
    return OdeOperator(a2, a1, lambda t, _e=None: -1.0, dom, "t", n)


def assemble_L_infinity(profile: LimitProfile) -> OdeOperator:
    n = profile.n
    return OdeOperator(lambda s, e: 1.0 / profile.Q(s, e),
                       lambda s, e: (n - 1) / profile.P(s, e),
                       lambda s, e: -1.0, (0.0, 1.0), "s", n)


def L_T_in_s(horn: HornPotential) -> OdeOperator:
    """Finite-T operator in ``s = 1 - t/T``: a2 = 1/(T^2 psi''), a1 = (n-1)/(|T| psi')."""
    n, T = horn.n, horn.T

    def a2(s, e):
        return 1.0 / (T * T * _horn_cusp_derivs(horn, s, e, 2)[2])

    def a1(s, e):
        return (n - 1) / (abs(T) * _horn_cusp_derivs(horn, s, e, 1)[1])

    return OdeOperator(a2, a1, lambda s, e: -1.0, (0.0, 1.0), "s", n)


def _horn_cusp_derivs(horn, s, eta, order):
    """psi_T on t <= tau and psi_cusp beyond, at ``t = eta T``."""
    eta = np.asarray(eta, float)
    t = eta * horn.T
    out = np.empty((order + 1,) + t.shape)
    left = t <= horn.tau
    if np.any(left):
        out[:, left] = horn.derivs(t[left], order, check=False)
    if np.any(~left):
        out[:, ~left] = psi_cusp(horn.n, horn.a, t[~left], order)
    return out


def endpoint_models(n):
    """Coefficients of ``L^-/d(n)`` (s -> 0) and ``L^+/(n+1)`` (eta -> 0) in s."""
    d = special.d_n(n)
    minus = OdeOperator(lambda s, e: n * s ** ((n - 1) / n) / d,
                        lambda s, e: (n - 1) * s ** (-1.0 / n) / d,
                        lambda s, e: -1.0 + 0.0 * s, (0.0, 1.0), "s", n)
    plus = OdeOperator(lambda s, e: e ** 2 / (n + 1),
                       lambda s, e: (n - 1) * e / (n + 1),
                       lambda s, e: -1.0 + 0.0 * s, (0.0, 1.0), "s", n)
    return minus, plus


def endpoint_defects(n, s_small=None, eta_small=None):
    """Relative deviation of (a2, a1) of L_inf from the endpoint models."""
    L = assemble_L_infinity(limit_profile(n))
    minus, plus = endpoint_models(n)
    if s_small is None:
        s_small = np.geomspace(1e-6, 1e-2, 25)
    if eta_small is None:
        eta_small = np.geomspace(1e-5, 1e-2, 25)
    a2, a1, _ = L.coeffs(s_small)
    m2, m1, _ = minus.coeffs(s_small)
    dev_minus = np.maximum(np.abs(a2 / m2 - 1), np.abs(a1 / m1 - 1))
    s1 = 1.0 - eta_small
    a2, a1, _ = L.coeffs(s1, eta_small)
    p2, p1, _ = plus.coeffs(s1, eta_small)
    dev_plus = np.maximum(np.abs(a2 / p2 - 1), np.abs(a1 / p1 - 1))
    return (s_small, dev_minus, fit_power(s_small, dev_minus)), \
           (eta_small, dev_plus, fit_power(eta_small, dev_plus))


# ------------------------------------------------- fundamental solutions

@dataclass(frozen=True)
class FundamentalPair:
    h1: Callable
    h2: Callable
    wronskian: Callable
    operator: Callable


def fundamental_solutions_plus(n) -> FundamentalPair:
    """``eta^(n+1)`` and ``eta^-1`` for ``eta^2 h'' - (n-1) eta h' - (n+1) h``.

    Each ``h`` returns ``(value, first, second)`` derivatives in eta.
    """
    def h1(eta):
        eta = np.asarray(eta, float)
        return eta ** (n + 1), (n + 1) * eta ** n, (n + 1) * n * eta ** (n - 1)

    def h2(eta):
        eta = np.asarray(eta, float)
        return 1.0 / eta, -1.0 / eta ** 2, 2.0 / eta ** 3

    def op(h, eta):
        v, d1, d2 = h(eta)
        return eta ** 2 * d2 - (n - 1) * eta * d1 - (n + 1) * v

    return FundamentalPair(h1, h2, lambda eta: -(n + 2) * np.asarray(eta, float) ** (n - 1), op)


def fundamental_solutions_minus(n) -> FundamentalPair:
    """``s^(1/2n) I_nu(lam y)`` and ``s^(1/2n) K_nu(lam y)``, ``y = s^((n+1)/(2n))``.

    These solve ``n s^((n-1)/n) h'' + (n-1) s^(-1/n) h' - d(n) h = 0``.

    Derivatives in s follow from the chain rule and the Bessel equation.
    """
    nu = special.BesselOrder(1.0 / (n + 1))
    lam = special.lambda_n(n)
    q = (n + 1) / (2 * n)
    m = 1.0 / (2 * n)

    def make(f, fp):
        def h(s):
            s = np.asarray(s, float)
            x = lam * s ** q
            F, Fp = f(nu, x), fp(nu, x)
            # d/ds of x and the Bessel equation for F''
            xs = q * x / s
            xss = q * (q - 1) * x / s ** 2
            Fpp = -Fp / x + (1.0 + nu.nu ** 2 / x ** 2) * F
            g, gs, gss = s ** m, m * s ** (m - 1), m * (m - 1) * s ** (m - 2)
            Fs = Fp * xs
            Fss = Fpp * xs ** 2 + Fp * xss
            return g * F, gs * F + g * Fs, gss * F + 2 * gs * Fs + g * Fss
        return h

    h1 = make(special.bessel_i, special.bessel_i_prime)
    h2 = make(special.bessel_k, special.bessel_k_prime)

    def op(h, s):
        s = np.asarray(s, float)
        v, d1, d2 = h(s)
        return n * s ** ((n - 1) / n) * d2 + (n - 1) * s ** (-1.0 / n) * d1 - special.d_n(n) * v

    return FundamentalPair(h1, h2, lambda s: -q * np.asarray(s, float) ** ((1 - n) / n), op)


def bessel_control_series(n):
    """Known coefficients of ``h2^-(s)/h2^-(0) = 1 - k1 s^(1/n) + k2 s^((n+1)/n) + ...``."""
    nu = 1.0 / (n + 1)
    lam = special.lambda_n(n)
    k1 = (lam / 2) ** (2 * nu) * math.gamma(1 - nu) / math.gamma(1 + nu)
    k2 = (lam / 2) ** 2 / (1 - nu)
    h0 = 0.5 * math.gamma(nu) * (lam / 2) ** (-nu)
    return k1, k2, h0


# ------------------------------------------------------- discretization

@dataclass(frozen=True)
class Lattice:
    dx: float
    j: np.ndarray

    @property
    def x(self):
        return self.j * self.dx

    @property
    def s(self):
        return 1.0 / (1.0 + np.exp(-self.x))

    @property
    def eta(self):
        return 1.0 / (1.0 + np.exp(self.x))

    def refine(self):
        return Lattice(self.dx / 2, np.arange(2 * self.j[0], 2 * self.j[-1] + 1))


def logit(s):
    return math.log(s) - math.log1p(-s)


def lattice(s_left, eta_right, dx=DEFAULT_DX):
    """Lattice with end nodes snapped to multiples of dx."""
    jl = int(round(logit(s_left) / dx))
    jr = int(round(-logit(eta_right) / dx))
    return Lattice(dx, np.arange(jl, jr + 1))


def _tridiag(L: OdeOperator, lat: Lattice, coeffs=None):
    s, eta, dx = lat.s, lat.eta, lat.dx
    a2, a1, a0 = coeffs if coeffs is not None else L.coeffs(s, eta)
    sx = s * eta
    A = a2 / sx ** 2
    B = a1 / sx - a2 * (1.0 - 2.0 * s) / sx ** 2
    lo = A / dx ** 2 - B / (2 * dx)
    di = -2 * A / dx ** 2 + a0
    up = A / dx ** 2 + B / (2 * dx)
    return lo, di, up


def solve_dirichlet(L: OdeOperator, lat: Lattice, left, right, rhs=None, coeffs=None,
                    check_m_matrix=True):
    """Solve ``L u = rhs`` on the lattice with Dirichlet end values."""
    lo, di, up = _tridiag(L, lat, coeffs)
    m = len(lat.j)
    if check_m_matrix and (np.any(lo[1:-1] < 0) or np.any(up[1:-1] < 0) or np.any(di[1:-1] >= 0)):
        raise IllConditioned("discrete operator is not an M-matrix; refine dx")
    ab = np.zeros((3, m))
    ab[0, 2:] = up[1:-1]
    ab[1, 1:-1] = di[1:-1]
    ab[2, :-2] = lo[1:-1]
    ab[1, 0] = ab[1, -1] = 1.0
    f = np.zeros(m) if rhs is None else np.array(rhs, float)
    f[0], f[-1] = left, right
    return solve_banded((1, 1), ab, f)


def apply_discrete(L: OdeOperator, lat: Lattice, u, coeffs=None):
    """Discrete ``L u`` on interior nodes (ends set to nan)."""
    lo, di, up = _tridiag(L, lat, coeffs)
    out = np.full_like(u, np.nan)
    out[1:-1] = lo[1:-1] * u[:-2] + di[1:-1] * u[1:-1] + up[1:-1] * u[2:]
    return out


def _richardson_dx(L, lat, left, right, rhs_fn=None):
    """Second-order Richardson between dx and dx/2, returned on the coarse lattice."""
    fine = lat.refine()
    rc = None if rhs_fn is None else rhs_fn(lat)
    rf = None if rhs_fn is None else rhs_fn(fine)
    uc = solve_dirichlet(L, lat, left, right, rc)
    uf = solve_dirichlet(L, fine, left, right, rf)
    return (4.0 * uf[::2] - uc) / 3.0, (uc, uf)


# ---------------------------------------------------------- obstruction

@dataclass(frozen=True)
class UhatSolution:
    uhat: GridFunction          # Richardson-extrapolated, s >= max eps
    full: GridFunction          # normalized smallest-eps solve, s >= min eps
    eps: tuple
    kappa_spread: float
    raw: dict


def solve_uhat(L: OdeOperator, eps_sequence=DEFAULT_EPS, dx=DEFAULT_DX, eta_right=ETA_RIGHT):
    """Dirichlet solves ``u(eps) = 1``, ``u(1 - eta_R) = 0``, extrapolated in eps.

    ``u_eps = uhat / uhat(eps)`` exactly, so the eps error is a series in
    ``eps^(j/n)``; three such terms are eliminated.
    """
    n = L.n
    eps = tuple(sorted(eps_sequence, reverse=True))
    lats = [lattice(e, eta_right, dx) for e in eps]
    eps_snapped = tuple(float(lt.s[0]) for lt in lats)
    sols = {}
    for e, lt in zip(eps_snapped, lats):
        u, raw = _richardson_dx(L, lt, 1.0, 0.0)
        for r in raw:
            if np.any(np.diff(r) > MP_NOISE) or r.max() > 1 + MP_NOISE or r.min() < -MP_NOISE:
                raise NonMonotone(f"Dirichlet solve at eps={e:g} breaks the maximum principle")
        sols[e] = (lt, u)
    base = lats[0]
    m = len(base.j)
    U = np.array([sols[e][1][-m:] for e in eps_snapped])
    k = len(eps_snapped)
    expo = [j / n for j in range(1, k)]
    V = np.array([[1.0] + [e ** q for q in expo] for e in eps_snapped])
    coef = np.linalg.solve(V, U)
    uhat_vals = coef[0]
    uh = GridFunction(base.s, uhat_vals, "double-graded", base.eta)
    lt_min, u_min = sols[eps_snapped[-1]]
    ratio = uhat_vals[:-1] / u_min[-m:][:-1]
    mid = (base.s[:-1] < 0.5)
    kappa = float(np.median(ratio[mid]))
    spread = float(np.max(np.abs(ratio[mid] / kappa - 1)))
    full = GridFunction(lt_min.s, kappa * u_min, "double-graded", lt_min.eta)
    return UhatSolution(uh, full, eps_snapped, spread, sols)


def default_exponents(n, terms=4):
    """Exponents ``k q`` and ``1/n + k q`` with ``q = (n+1)/n``, sorted."""
    q = (n + 1) / n
    return tuple(sorted([k * q for k in range(terms)] + [1.0 / n + k * q for k in range(terms)]))


def extract_expansion(f: GridFunction, exponents=None, n=2, window=DEFAULT_WINDOW,
                      remainder_window=None, n_lead=3):
    """Least squares in the power basis on ``window``.

    The remainder after the first ``n_lead`` terms is fitted for its slope
    on ``remainder_window`` (default: lower decade of the window).
    """
    if exponents is None:
        exponents = default_exponents(n)
    lo, hi = window
    sel = (f.nodes >= lo) & (f.nodes <= hi)
    if sel.sum() < len(exponents) + 4 or hi / lo < 10:
        raise IllConditioned("fit window too narrow")
    s, y = f.nodes[sel], f.values[sel]
    A = np.stack([s ** e for e in exponents], axis=1)
    cs = np.abs(A).max(axis=0)
    coef, *_ = np.linalg.lstsq(A / cs, y, rcond=None)
    coef = coef / cs
    resid = float(np.max(np.abs(y - A @ coef)))
    if remainder_window is None:
        remainder_window = (lo, 10 * lo)
    rs = (f.nodes >= remainder_window[0]) & (f.nodes <= remainder_window[1])
    s2 = f.nodes[rs]
    R = f.values[rs] - sum(c * s2 ** e for c, e in zip(coef[:n_lead], exponents[:n_lead]))
    rem = fit_power(s2, R, trim=0.0)
    return ExpansionFit(tuple(exponents), coef, rem, tuple(window), resid)


def solve_vhat(L: OdeOperator, usol: UhatSolution, dx=DEFAULT_DX, eta_right=ETA_RIGHT,
               window=DEFAULT_WINDOW):
    """Dirichlet ``L v = uhat``, ``v(eps) = -1``, then ``vhat = v + lam uhat``.

    ``lam`` cancels the fitted ``s^(1/n)`` coefficient.  Changing the
    Dirichlet data only adds multiples of uhat, which ``lam`` absorbs.
    """
    n = L.n
    full = usol.full
    lat = lattice(full.nodes[0], eta_right, dx)
    if len(lat.j) != len(full.nodes):
        raise DomainError("uhat lattice mismatch")
    fine = lat.refine()
    # uhat on the fine lattice: even nodes from the grid, odd by the solve
    uf = solve_dirichlet(L, fine, full.values[0], 0.0)
    uf *= full.values[0] / uf[0] if uf[0] != 0 else 1.0
    rc = full.values.copy()
    vc = solve_dirichlet(L, lat, -1.0, 0.0, rc)
    vf = solve_dirichlet(L, fine, -1.0, 0.0, uf)
    v = (4.0 * vf[::2] - vc) / 3.0
    vgf = GridFunction(lat.s, v, "double-graded", lat.eta)
    ufit = extract_expansion(full, n=n, window=window)
    vfit = extract_expansion(vgf, n=n, window=window)
    C1_u = -ufit.coefficients[1]
    lam = vfit.coefficients[1] / C1_u
    vhat = GridFunction(lat.s, v + lam * full.values, "double-graded", lat.eta)
    vhfit = extract_expansion(vhat, n=n, window=window)
    return vhat, vhfit, ufit, lam, vgf


def neumann_coefficient(vhat: GridFunction, n=2, window=NEUMANN_WINDOW):
    """``s^(1/n)`` coefficient of vhat refitted on a window other than the one fixing lam."""
    return float(extract_expansion(vhat, n=n, window=window).coefficients[1])


def obstruction_pair(n=2, eps_sequence=DEFAULT_EPS, dx=DEFAULT_DX, eta_right=ETA_RIGHT,
                     window=DEFAULT_WINDOW) -> ObstructionPair:
    L = assemble_L_infinity(limit_profile(n))
    usol = solve_uhat(L, eps_sequence, dx, eta_right)
    vhat, vhfit, ufit, lam, v = solve_vhat(L, usol, dx, eta_right, window)
    return ObstructionPair(
        uhat=usol.full, vhat=vhat,
        C1_u=float(-ufit.coefficients[1]), C2_u=float(ufit.coefficients[2]),
        C0_v=float(vhfit.coefficients[0]), C2_v=float(vhfit.coefficients[2]),
        lam=float(lam), neumann_coefficient=neumann_coefficient(vhat, n),
        fit_residuals=(ufit.max_residual, vhfit.max_residual),
        uhat_fit=ufit, vhat_fit=vhfit, dirichlet_v=v)


def liouville_check(L: OdeOperator, usol: UhatSolution, dx=DEFAULT_DX, eta_right=ETA_RIGHT,
                    right_values=(0.0, 0.5, -1.0), left_values=(1.0, -2.0)):
    """Discrete kernel vectors with varying end data.

    Near s = 1 each is fitted as ``A eta^(n+1) + B eta^-1``; vectors with
    ``B`` at tolerance are the weight-admissible ones and must be multiples
    of uhat.  Returns rows ``(left, right, B, projection residual)``.
    """
    n = L.n
    full = usol.full
    lat = lattice(full.nodes[0], eta_right, dx)
    rows = []
    uh = full.values
    for lv in left_values:
        for rv in right_values:
            u = solve_dirichlet(L, lat, lv, rv)
            sel = (lat.eta <= 1e-3) & (lat.eta >= 10 * eta_right)
            e = lat.eta[sel]
            A = np.stack([e ** (n + 1), 1.0 / e], axis=1)
            cf, *_ = np.linalg.lstsq(A * e[:, None], u[sel] * e, rcond=None)
            B = float(cf[1])
            proj = np.dot(u, uh) / np.dot(uh, uh)
            res = float(np.max(np.abs(u - proj * uh)) / max(1.0, abs(lv)))
            rows.append((lv, rv, B, res))
    return rows


# ------------------------------------------------------------ densities

def densities(source) -> DensityPair:
    """``mu_T(s) = exp(psi_T((1-s)T) - psi_T(T))`` or ``mu_inf = exp(psi_inf)``."""
    if isinstance(source, HornPotential):
        horn = source

        def mu_T(s, eta=None):
            s = np.asarray(s, float)
            if eta is None:
                eta = 1.0 - s
            return np.exp(_horn_cusp_derivs(horn, s, eta, 0)[0] - horn.tip_value)

        return DensityPair(mu_T, None, horn.T)
    if isinstance(source, LimitProfile):
        return DensityPair(None, source.mu)
    raise DomainError("densities need a horn or a limit profile")


def mu_inf_endpoint_constant(n):
    """``lim eta^(n+1) mu_inf(1 - eta) = ((n+1)/c)^(n+1)``."""
    return ((n + 1) / special.c_n(n)) ** (n + 1)


# -------------------------------------------------------------- pairing

def pairing(f, g, mu=None, weight_exponent=0.0, nodes=None, eta=None):
    """``int_0^1 f g mu s^-delta ds`` by the trapezoid rule in logit(s).

    The end pieces beyond the first and last node are integrated from a
    power law fitted to the two outermost samples.
    """
    if isinstance(f, GridFunction):
        nodes, eta = f.nodes, f.eta
        fv = f.values
    else:
        fv = np.asarray(f, float)
    gv = g.values if isinstance(g, GridFunction) else np.asarray(g, float)
    if nodes is None:
        raise DomainError("pairing needs nodes")
    s = np.asarray(nodes, float)
    eta = 1.0 - s if eta is None else np.asarray(eta, float)
    mv = np.ones_like(s) if mu is None else (mu(s, eta) if callable(mu) else np.asarray(mu, float))
    F = fv * gv * mv * s ** (-weight_exponent)
    x = np.log(s) - np.log(eta)
    core = float(np.trapezoid(F * s * eta, x))

    def tail(F0, F1, z0, z1):
        if F0 == 0.0:
            return 0.0
        if F1 == 0.0 or np.sign(F0) != np.sign(F1):
            return F0 * z0
        beta = math.log(abs(F1 / F0)) / math.log(z1 / z0)
        if beta <= -0.9:
            raise NonIntegrable(f"integrand grows like s^{beta:.3f} at the endpoint")
        return F0 * z0 / (beta + 1.0)

    left = tail(F[0], F[1], s[0], s[1])
    right = tail(F[-1], F[-2], eta[-1], eta[-2])
    return core + left + right
