"""Parameter schedule, glued radial potential, Ricci defect, weights and the
desk-scale obstructed fixed-point solver.

Regions in t (tip ``T`` of the attached horn):

    R7  (T, T+1]          Calabi cap
    R6  (T+1, T+T0]       Calabi cap
    R5  (T+T0, T+2T0)     cap -> horn blend, cutoff chi1
    R4  [T+2T0, 2 tau]    horn
    R3  (2 tau, tau)      horn -> cusp blend, cutoff chi2
    R2  [tau, 0)          cusp
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from . import special
from .asymptotics import fit_power
from .errors import (ConvexityLoss, DomainError, InvalidRegionOrder, NoContraction,
                     NoRoot, NoSignChange)
from .limitode import GridFunction
from .potentials import (NeckParams, RadialPotential, psi_calabi, psi_cusp, solve_b_from_T,
                         solve_horn)
from .transplant import make_cutoff, smoothstep

REGIONS = ("R7", "R6", "R5", "R4", "R3")
GLUE_MAX_ORDER = 3


# -------------------------------------------------------------- schedule

def schedule_from_sigma(log_sigma, alpha=0.05, delta0=4.0, n=2, a=None, delta=0.01,
                        a_bold=0.15) -> NeckParams:
    """``T = (2/3) log|sigma|``, ``T0 = |T|^alpha``, b from the bandT identity and
    tau from ``|b| |tau|^(n+1) = exp(-delta0 sqrt|tau|)``."""
    if log_sigma > -30:
        raise DomainError("need |sigma| <= e^-30")
    if not 0 < alpha < 0.2:
        raise DomainError("alpha must lie in (0, 1/5)")
    if not delta0 > 0:
        raise DomainError("delta0 must be positive")
    T = (2.0 / 3.0) * log_sigma
    T0 = abs(T) ** alpha
    b = solve_b_from_T(n, T)
    lb = math.log(abs(b))

    def F(r):
        return lb + (n + 1) * math.log(r) + delta0 * math.sqrt(r)

    hi = abs(T)
    if F(hi) <= 0:
        raise NoRoot(f"no tau root below |T|={hi:g}")
    r = brentq(F, 1e-12, hi, xtol=1e-15, maxiter=200)
    prm = NeckParams(n=n, a=a, b=b, T=T, tau=-r, T0=T0, alpha=alpha, delta0=delta0,
                     log_sigma=float(log_sigma), delta=delta, a_bold=a_bold)
    if not prm.regions_ordered():
        raise InvalidRegionOrder(f"T + 2T0 = {T + 2 * T0:g} is not below 2 tau = {-2 * r:g}")
    return prm


# --------------------------------------------------------------- glueing

def _blend(chi, F, G, order):
    """Leibniz for ``chi F + (1 - chi) G`` with stacked derivatives."""
    D = F - G
    out = np.array(G[: order + 1], copy=True)
    for k in range(order + 1):
        for j in range(k + 1):
            out[k] += math.comb(k, j) * chi[j] * D[k - j]
    return out


@dataclass(frozen=True)
class GluedPotential(RadialPotential):
    params: NeckParams
    horn: object
    T: float
    T0: float
    tau: float
    cap_scale: float
    n: int = 2
    a: float = 0.0
    kind: str = "glued"

    @property
    def domain(self):
        return (self.T, 0.0)

    def bounds(self):
        T, T0, tau = self.T, self.T0, self.tau
        return {"R7": (T, T + 1), "R6": (T + 1, T + T0), "R5": (T + T0, T + 2 * T0),
                "R4": (T + 2 * T0, 2 * tau), "R3": (2 * tau, tau)}

    def cap(self, t, order):
        return psi_calabi(self.n, self.T, t, order, self.cap_scale, self.horn.tip_value)

    def chi1(self, t, order):
        x = (np.asarray(t) - self.T - self.T0) / self.T0
        return np.stack([smoothstep(x, j) / self.T0 ** j for j in range(order + 1)])

    def chi2(self, t, order):
        at = abs(self.tau)
        x = (-np.asarray(t) - at) / at
        rows = [1.0 - smoothstep(x, 0)]
        for j in range(1, order + 1):
            rows.append(-smoothstep(x, j) * (-1.0 / at) ** j)
        return np.stack(rows)

    def derivs(self, t, order=2):
        if not 0 <= order <= GLUE_MAX_ORDER:
            raise DomainError(f"glued potential supports order <= {GLUE_MAX_ORDER}")
        t = np.atleast_1d(np.asarray(t, float))
        if np.any(t <= self.T) or np.any(t >= 0):
            raise DomainError("glued potential lives on (T, 0)")
        T, T0, tau = self.T, self.T0, self.tau
        out = np.empty((order + 1,) + t.shape)
        m6 = t <= T + T0
        m5 = (t > T + T0) & (t < T + 2 * T0)
        m4 = (t >= T + 2 * T0) & (t <= 2 * tau)
        m3 = (t > 2 * tau) & (t < tau)
        m2 = t >= tau
        if m6.any():
            out[:, m6] = self.cap(t[m6], order)
        if m5.any():
            tt = t[m5]
            out[:, m5] = _blend(self.chi1(tt, order), self.horn.derivs(tt, order, check=False),
                                self.cap(tt, order), order)
        if m4.any():
            out[:, m4] = self.horn.derivs(t[m4], order, check=False)
        if m3.any():
            tt = t[m3]
            out[:, m3] = _blend(self.chi2(tt, order), psi_cusp(self.n, self.a, tt, order),
                                self.horn.derivs(tt, order, check=False), order)
        if m2.any():
            out[:, m2] = psi_cusp(self.n, self.a, t[m2], order)
        return out

    def check_convexity(self, samples=2000):
        """Raise ConvexityLoss at the first sample with psi' or psi'' <= 0."""
        t = region_samples(self, samples)
        D = self.derivs(t, 2)
        bad = (D[1] <= 0) | (D[2] <= 0)
        if bad.any():
            raise ConvexityLoss("glued potential lost convexity", float(t[np.argmax(bad)]))
        return True


def glued_potential(params: NeckParams, check=True) -> GluedPotential:
    horn, Th = solve_horn(params.n, params.a, params.b, params.tau)
    cap_scale = special.frak_c(params.n) * abs(params.b) ** 0.5
    g = GluedPotential(params=params, horn=horn, T=Th, T0=params.T0, tau=params.tau,
                       cap_scale=cap_scale, n=params.n, a=params.a)
    if not (Th + 2 * params.T0 < 2 * params.tau):
        raise InvalidRegionOrder("horn tip leaves no room for the orange window")
    if check:
        g.check_convexity()
    return g


def region_samples(g: GluedPotential, per_region=400, region=None):
    """Samples per region; R7 is graded toward the tip."""
    b = g.bounds()
    names = REGIONS if region is None else (region,)
    parts = []
    for name in names:
        lo, hi = b[name]
        if name == "R7":
            parts.append(lo + np.geomspace(1e-9, hi - lo, per_region))
        else:
            parts.append(np.linspace(lo, hi, per_region + 2)[1:-1])
    return np.concatenate(parts)


# ---------------------------------------------------------------- defect

def ricci_defect(psi, t, with_gradient=False):
    """``f = psi + a - (n-1) log psi' - log psi''`` and optionally ``f'``."""
    n, a = psi.n, psi.a
    D = psi.derivs(t, 3 if with_gradient else 2)
    if np.any(D[1] <= 0) or np.any(D[2] <= 0):
        where = np.atleast_1d(t)[np.argmax(np.atleast_1d((D[1] <= 0) | (D[2] <= 0)))]
        raise ConvexityLoss("psi' or psi'' <= 0", float(where))
    f = D[0] + a - (n - 1) * np.log(D[1]) - np.log(D[2])
    if not with_gradient:
        return f
    fp = D[1] - (n - 1) * D[2] / D[1] - D[3] / D[2]
    return f, fp, D


# --------------------------------------------------------------- weights

@dataclass(frozen=True)
class WeightProfile:
    r: np.ndarray
    w: np.ndarray
    w_tilde: np.ndarray


def weights(g, t, N=1.0) -> WeightProfile:
    """Regularity scale and weights with their plateaus."""
    t = np.asarray(t, float)
    T, b, delta = g.T, abs(g.params.b), g.params.delta
    x = t - T
    r7 = x <= 1.0
    r = np.where(t < T / 2, np.minimum(1.0, b ** 0.25 * np.maximum(x, 1e-300) ** 0.75), 1.0)
    r = np.where(r7, b ** 0.25, r)
    w = np.where(t < -N, np.maximum(x, 1e-300) ** (-delta), abs(T) ** (-delta))
    w = np.where(r7, 1.0, w)
    return WeightProfile(r, w, w / r ** 2)


# --------------------------------------------------------- region report

@dataclass
class RegionReport:
    region: str
    sup_defect: float
    predicted_bound: float
    ratio: float
    passed: Optional[bool] = None
    T: Optional[float] = None


def region_defects(g: GluedPotential, per_region=400):
    """Weighted sup of ``|f| + r |f'| / sqrt(psi'')`` per region."""
    out = {}
    for name in REGIONS:
        t = region_samples(g, per_region, name)
        f, fp, D = ricci_defect(g, t, with_gradient=True)
        r = weights(g, t).r
        out[name] = float(np.max(np.abs(f) + r * np.abs(fp) / np.sqrt(D[2])))
    return out


def region_error_report(params_list, per_region=400, factor=3.0, slope_tol=0.1):
    """Per-sigma region reports plus the cross-grid verdicts.

    R3 is compared with ``|b||tau|^(n+1)``, R5-R7 with ``(T0/|T|)^(3/2)`` and R4
    with an absolute 1e-10.
    """
    rows = []
    sups57 = []
    Ts = []
    for prm in params_list:
        g = glued_potential(prm)
        d = region_defects(g, per_region)
        n = prm.n
        pred3 = abs(prm.b) * abs(prm.tau) ** (n + 1)
        pred57 = (prm.T0 / abs(prm.T)) ** 1.5
        s57 = max(d["R5"], d["R6"], d["R7"])
        rows.append(RegionReport("R3", d["R3"], pred3, d["R3"] / pred3, None, prm.T))
        rows.append(RegionReport("R4", d["R4"], 1e-10, d["R4"] / 1e-10, d["R4"] <= 1e-10, prm.T))
        rows.append(RegionReport("R5-R7", s57, pred57, s57 / pred57, None, prm.T))
        sups57.append(s57)
        Ts.append(abs(prm.T))
    r3 = np.array([r.ratio for r in rows if r.region == "R3"])
    ok3 = bool(r3.max() <= factor * r3.min())
    for r in rows:
        if r.region == "R3":
            r.passed = ok3
    fit = fit_power(np.array(Ts), np.array(sups57), trim=0.0)
    alpha = params_list[0].alpha
    target = -1.5 * (1 - alpha)
    ok57 = abs(fit.exponent - target) <= slope_tol
    for r in rows:
        if r.region == "R5-R7":
            r.passed = ok57
    return rows, {"R3_spread": float(r3.max() / r3.min()), "R57_slope": fit.exponent,
                  "R57_target": target}


def tip_defect(params: NeckParams, offset=1e-9):
    """Calabi-cap defect just above the tip."""
    g = glued_potential(params, check=False)
    return float(ricci_defect(g, np.array([g.T + offset]))[0])


# ------------------------------------------------------------- budget

def _exact(x):
    return Fraction(repr(float(x))) if not isinstance(x, Fraction) else x


def budget_check(alpha, a_bold, delta):
    """The two strict inequalities of the shift budget, in exact arithmetic."""
    al, a, d = _exact(alpha), _exact(a_bold), _exact(delta)
    lhs = Fraction(5, 6) * (1 - a) + Fraction(2, 3)
    first = lhs < Fraction(3, 2) - Fraction(5, 6) * al
    second = lhs < Fraction(5, 3) * (1 - a) - Fraction(2, 3) * d
    return bool(first), bool(second)


def shift_bound(b, a_bold):
    return abs(b) ** (5.0 / 6.0 * (1.0 - a_bold))


# ------------------------------------------------------------ toy solver

@dataclass
class ToyProblem:
    """Discrete radial problem on ``s in [s_min, 1 - s_min]``.

    ``L`` is the flux-form discretization of ``(1/mu)(p u')' - u`` with
    ``p = psi_t^(n-1) / (T^2 |b|)`` and ``mu = psi_t^(n-1) psi_tt / |b|``;
    it is symmetric in ``<u, v> = sum u v mu w``.  Left end Neumann, right
    end Dirichlet (last node removed).
    """

    s: np.ndarray
    h: float
    mu: np.ndarray
    wq: np.ndarray
    L: object
    a1: np.ndarray
    a2: np.ndarray
    vhat: np.ndarray
    uhat: np.ndarray
    f: np.ndarray
    s_const: float = 0.0
    n: int = 2
    T: float = -100.0
    b: float = -1e-5
    _lu: object = field(default=None, repr=False)

    @property
    def W(self):
        return self.mu * self.wq

    def inner(self, u, v):
        return float(np.sum(u * v * self.W))

    def lu(self):
        if self._lu is None:
            self._lu = splu(self.L.tocsc())
        return self._lu

    def d1(self, u):
        """Central first difference with u'(left) = 0 and u(right end) = 0."""
        up = np.append(u, 0.0)
        um = np.concatenate(([u[1]], u[:-1]))
        return (up[1:] - um) / (2 * self.h)

    def d2(self, u):
        up = np.append(u, 0.0)
        um = np.concatenate(([u[1]], u[:-1]))
        return (up[1:] - 2 * u + um) / self.h ** 2

    def Q(self, u):
        x1 = self.a1 * self.d1(u)
        x2 = self.a2 * self.d2(u)
        if np.any(x1 <= -1) or np.any(x2 <= -1):
            i = int(np.argmax((x1 <= -1) | (x2 <= -1)))
            raise ConvexityLoss("iterate left the admissible cone", float(self.s[i]))
        return (self.n - 1) * (np.log1p(x1) - x1) + (np.log1p(x2) - x2)

    def M(self, u):
        return self.L @ u + self.Q(u)

    def with_(self, **kw):
        d = dict(self.__dict__)
        d.update(kw)
        return ToyProblem(**d)


def build_toy(g: GluedPotential, vhat_fn, C0, s_star, nodes=801, f=None, s_const=0.0):
    """Toy problem on the glued potential.

    ``vhat_fn`` evaluates the limit companion vhat on (0, 1); it is cut off
    with ``s_star`` on the toy grid and ``uhat_T := L_h vhat_T``.
    """
    T, n = g.T, g.n
    b = abs(g.params.b)
    s_min = 2 * abs(g.params.T) ** (g.params.alpha - 1)
    s_full = np.linspace(s_min, 1.0 - s_min, nodes)
    h = s_full[1] - s_full[0]
    s = s_full[:-1]
    t = (1.0 - s) * T
    D = g.derivs(t, 2)
    tm = (1.0 - (s + h / 2)) * T
    pm = g.derivs(tm, 1)[1] ** (n - 1) / (T * T * b)
    mu = D[1] ** (n - 1) * D[2] / b
    wq = np.full(s.shape, h)
    wq[0] = h / 2
    m = len(s)
    main = np.empty(m)
    lower = np.empty(m - 1)
    upper = np.empty(m - 1)
    main[0] = -pm[0] / (mu[0] * wq[0] * h) - 1.0
    upper[0] = pm[0] / (mu[0] * wq[0] * h)
    main[1:] = -(pm[1:] + pm[:-1]) / (mu[1:] * h * h) - 1.0
    lower[:] = pm[:-1] / (mu[1:] * h * h)
    upper[1:] = pm[1:-1] / (mu[1:-1] * h * h)
    L = diags([lower, main, upper], [-1, 0, 1], format="csr")
    a1 = 1.0 / (abs(T) * D[1])
    a2 = 1.0 / (T * T * D[2])
    eta = 1.0 - s
    chi = make_cutoff(s_star, "left")(s)
    chr_ = make_cutoff(s_star, "right")(s, eta)
    vh = (chi * vhat_fn(s) + (1 - chi) * C0) * chr_
    uh = L @ vh
    if f is None:
        f = np.zeros(m)
    return ToyProblem(s=s, h=h, mu=mu, wq=wq, L=L, a1=a1, a2=a2, vhat=vh, uhat=uh,
                      f=np.asarray(f, float), s_const=float(s_const), n=n, T=T, b=-b)


def spline_of(gf: GridFunction):
    cs = CubicSpline(gf.x, gf.values)

    def fn(s):
        s = np.asarray(s, float)
        return cs(np.log(s) - np.log1p(-s))
    return fn


@dataclass(frozen=True)
class ToyResult:
    u: np.ndarray
    lam: float
    iterations: int
    residual: float
    ratios: tuple
    lam_projection: float


def toy_solve(prob: ToyProblem, max_iter=100, tol=1e-13, project=True, u0=None):
    """Fixed-point iteration ``u <- L^-1 [f + s - Q(u) + lam vhat]``.

    With ``project`` the multiplier keeps ``<Q(u) - f - s - lam vhat, vhat> = 0``,
    which by self-adjointness keeps ``<u, uhat> = 0``.
    """
    lu = prob.lu()
    vv = prob.inner(prob.vhat, prob.vhat)
    rhs0 = prob.f + prob.s_const
    scale = max(float(np.max(np.abs(rhs0))), 1e-300)
    u = np.zeros_like(prob.s) if u0 is None else np.array(u0, float)
    steps = []
    lam = 0.0
    for it in range(1, max_iter + 1):
        g = rhs0 - prob.Q(u)
        lam = -prob.inner(g, prob.vhat) / vv if project else 0.0
        un = lu.solve(g + lam * prob.vhat)
        step = float(np.max(np.abs(un - u)))
        steps.append(step)
        u = un
        if step <= tol * scale or step == 0.0:
            break
        if len(steps) >= 3 and steps[-1] > steps[-2] > steps[-3]:
            raise NoContraction("iteration is not contracting", steps[-2:])
    else:
        raise NoContraction("no convergence within the iteration budget", steps[-2:])
    res_vec = prob.M(u) - rhs0 - lam * prob.vhat
    residual = float(np.max(np.abs(res_vec)))
    lam_proj = prob.inner(prob.Q(u) - rhs0, prob.vhat) / vv
    ratios = tuple(steps[i + 1] / steps[i] for i in range(len(steps) - 1) if steps[i] > 0)
    return ToyResult(u, float(lam), it, residual, ratios, float(lam_proj))


def manufactured(prob: ToyProblem, amplitude=1e-4, lam_star=0.0):
    """Smooth ``u* _|_ uhat`` of the given size and the matching right-hand side."""
    s = prob.s
    x = (s - s[0]) / (s[-1] + prob.h - s[0])
    u0 = np.cos(0.5 * math.pi * x)
    c = prob.inner(u0, prob.uhat) / prob.inner(prob.vhat, prob.uhat)
    u = u0 - c * prob.vhat
    u *= amplitude / np.max(np.abs(u))
    f = prob.M(u) - lam_star * prob.vhat - prob.s_const
    return u, f


@dataclass(frozen=True)
class SweepResult:
    s_sigma: float
    lam_trace: tuple
    lam_lo: float
    lam_hi: float
    lam_zero: float
    A: float


def shift_sweep(prob: ToyProblem, A, tol=1e-10, max_bisect=200):
    """Bisection on ``s in [-A, A]`` for ``lambda(s) = 0``."""
    def lam_at(sc):
        return toy_solve(prob.with_(s_const=sc, _lu=prob._lu)).lam

    prob.lu()
    lo, hi = -A, A
    llo, lhi = lam_at(lo), lam_at(hi)
    l0 = lam_at(0.0)
    trace = [(lo, llo), (hi, lhi)]
    if not llo * lhi < 0:
        raise NoSignChange("lambda does not change sign on [-A, A]", llo, lhi)
    mid, lm = 0.0, l0
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        lm = lam_at(mid)
        trace.append((mid, lm))
        if abs(lm) <= tol:
            break
        if lm * llo < 0:
            hi, lhi = mid, lm
        else:
            lo, llo = mid, lm
    return SweepResult(mid, tuple(trace), trace[0][1], trace[1][1], l0, A)


def table2_r4_ratio(g: GluedPotential, t):
    """``w_tilde |T|^(-3/2) (t - T)^(3/2 + delta)`` on R4; equals ``(|b||T|^3)^(-1/2)``
    wherever ``r < 1``, i.e. ``t - T < |b|^(-1/3)``."""
    t = np.asarray(t, float)
    wp = weights(g, t)
    return wp.w_tilde * abs(g.T) ** -1.5 * (t - g.T) ** (1.5 + g.params.delta)


def tau_offset(params: NeckParams):
    """``delta0 sqrt|tau| + (n+1) log|tau| - (n+1) log|T|``; bounded along the schedule."""
    r, n = abs(params.tau), params.n
    return params.delta0 * math.sqrt(r) + (n + 1) * (math.log(r) - math.log(abs(params.T)))


def contraction_factor(res: ToyResult, head=3):
    """Largest step ratio over the first ``head`` ratios of a toy solve."""
    if not res.ratios:
        return 0.0
    return float(max(res.ratios[:head]))


def glued_defect_problem(params: NeckParams, pair, nodes=801, s_star=None):
    """Toy problem with ``f`` the glued Ricci defect on the toy window."""
    from .transplant import s_star_schedule
    g = glued_potential(params)
    if s_star is None:
        s_star = s_star_schedule(params.T, params.alpha, params.tau)
    prob = build_toy(g, spline_of(pair.vhat), pair.C0_v, s_star, nodes=nodes)
    f = ricci_defect(g, (1.0 - prob.s) * g.T)
    return g, prob.with_(f=f)
