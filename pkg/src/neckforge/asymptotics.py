"""Scaling-law checks for the horn family.

Each check re-solves horns over a parameter grid and compares an observed
error to its predicted order.  "Bounded" means max/min of the normalized
error stays within ``factor`` (default 3) across the grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import special
from .errors import DomainError, IllConditioned
from .potentials import (HornPotential, psi_calabi, psi_cusp, solve_b_from_T,
                         solve_horn, limit_profile)

DEFAULT_B_GRID = (1e-8, 1e-7, 1e-6)


@dataclass(frozen=True)
class PowerFit:
    exponent: float
    coefficient: float
    residual_norm: float
    window: tuple

    def __post_init__(self):
        if not np.isfinite(self.residual_norm):
            raise IllConditioned("non-finite fit residual")
        if not self.window[0] < self.window[1]:
            raise IllConditioned("degenerate fit window")


@dataclass
class ScalingCheck:
    name: str
    observed_ratio_range: tuple
    predicted: object
    passed: bool
    data: dict = field(default_factory=dict)

    @property
    def spread(self):
        lo, hi = self.observed_ratio_range
        return hi / lo if lo > 0 else math.inf


def fit_power(x, y, trim=0.1):
    """Least squares ``log|y| = log C + p log x`` on the interior window.

    ``trim`` drops that fraction of samples at each end.
    """
    x = np.asarray(x, float)
    y = np.abs(np.asarray(y, float))
    order = np.argsort(x)
    x, y = x[order], y[order]
    m = len(x)
    cut = int(math.floor(trim * m))
    if m - 2 * cut < 2:
        cut = 0
    xs, ys = x[cut:m - cut], y[cut:m - cut]
    if len(xs) < 2 or np.any(ys <= 0):
        raise IllConditioned("power fit needs >= 2 positive samples")
    A = np.vstack([np.ones_like(xs), np.log(xs)]).T
    coef, *_ = np.linalg.lstsq(A, np.log(ys), rcond=None)
    res = np.log(ys) - A @ coef
    return PowerFit(exponent=float(coef[1]), coefficient=float(math.exp(coef[0])),
                    residual_norm=float(np.sqrt(np.mean(res ** 2))),
                    window=(float(xs[0]), float(xs[-1])))


def bounded_check(name, values, factor=3.0, data=None):
    v = np.asarray(values, float)
    lo, hi = float(np.min(v)), float(np.max(v))
    ok = bool(lo > 0 and np.all(np.isfinite(v)) and hi <= factor * lo)
    return ScalingCheck(name, (lo, hi), "bounded", ok, dict(data or {}))


def exponent_check(name, fit: PowerFit, target, tol=0.1, data=None):
    ok = abs(fit.exponent - target) <= tol and fit.residual_norm <= math.log(1.25)
    d = dict(data or {})
    d.update(exponent=fit.exponent, residual=fit.residual_norm)
    return ScalingCheck(name, (fit.exponent, fit.exponent), target, ok, d)


def _template(horn):
    return horn.n, horn.a, horn.tau


# -------------------------------------------------------- green region

def interior_derivative_errors(horn, k_max=4, n_samples=41):
    """sup over [2 tau, tau] of |t^k psi^(k) - (-1)^k (n+1)(k-1)!| for k <= k_max."""
    n, tau = horn.n, horn.tau
    if horn.T >= 2 * tau:
        raise DomainError("horn tip lies inside [2 tau, tau]")
    t = np.linspace(2 * tau, tau, n_samples)
    D = horn.derivs(t, k_max)
    out = []
    for k in range(1, k_max + 1):
        target = (-1) ** k * (n + 1) * math.factorial(k - 1)
        out.append(float(np.max(np.abs(t ** k * D[k] - target))))
    return np.array(out)


def check_interior_derivatives(horn, k_max=4, b_grid=DEFAULT_B_GRID, factor=3.0):
    """One ScalingCheck per k: error / (|b| |tau|^(n+1)) over ``b_grid``."""
    n, a, tau = _template(horn)
    scale = np.array([abs(b) * abs(tau) ** (n + 1) for b in b_grid])
    errs = np.array([interior_derivative_errors(solve_horn(n, a, -abs(b), tau)[0], k_max)
                     for b in b_grid])
    checks = []
    for k in range(1, k_max + 1):
        ratio = errs[:, k - 1] / scale
        checks.append(bounded_check(f"interior_k{k}", ratio, factor,
                                    {"b": list(b_grid), "ratio": ratio.tolist()}))
    return checks


# -------------------------------------------------------- middle neck

def eta_gap(horn, eta):
    """``psi_T(eta T) - psi_cusp(eta T)`` and the derivative ratio."""
    t = np.asarray(eta, float) * horn.T
    D = horn.derivs(t, 1)
    C = psi_cusp(horn.n, horn.a, t, 1)
    return D[0] - C[0], D[1] / C[1]


def eta_limit_gap(n, eta):
    """b -> 0 limit of the gap: psi_inf(1 - eta) + (n+1) log eta - A1."""
    prof = limit_profile(n)
    eta = np.asarray(eta, float)
    c = prof.c
    return prof.psi_inf(1.0 - eta, eta) + (n + 1) * np.log(eta) - (n + 1) * math.log((n + 1) / c)


def check_eta_expansion(horn, eta_grid=None, b_grid=DEFAULT_B_GRID, delta=0.3):
    """Two-term fit of the gap against |b|^p |tau| and eta^(n+1).

    Pass if the residual after removing both fitted terms is <= 10% of the
    gap at every sample.  The default eta window keeps ``eta T <= 4 tau`` so
    samples stay in the middle neck, away from the cusp matching point.
    """
    n, a, tau = _template(horn)
    horns = [solve_horn(n, a, -abs(b), tau)[0] for b in b_grid]
    if eta_grid is None:
        lo = max(0.05, 4 * tau / max(h.T for h in horns))
        eta_grid = np.linspace(lo, delta, 11)
    eta_grid = np.asarray(eta_grid, float)
    if np.any(eta_grid <= 0) or np.any(eta_grid > delta):
        raise DomainError("eta grid must lie in (0, delta]")
    p = 1.0 / (n + 1)
    rows, gaps, dratio = [], [], []
    for b, h in zip(b_grid, horns):
        g, r = eta_gap(h, eta_grid)
        gaps.append(g)
        dratio.append(r)
        for e in eta_grid:
            rows.append([abs(b) ** p * abs(tau), e ** (n + 1)])
    A = np.array(rows)
    y = np.concatenate(gaps)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    rel = np.max(np.abs(resid) / np.abs(y))
    dr = np.concatenate(dratio)
    data = {"eta": eta_grid.tolist(), "coef_b": float(coef[0]), "coef_eta": float(coef[1]),
            "max_rel_residual": float(rel),
            "deriv_ratio_dev": float(np.max(np.abs(dr - 1.0)))}
    return ScalingCheck("eta_expansion", (float(rel), float(rel)), 0.1, bool(rel <= 0.1), data)


def eta_b_part(horn, eta, b_grid=DEFAULT_B_GRID):
    """Gap minus its b -> 0 limit, per b; the b-part of the expansion."""
    n, a, tau = _template(horn)
    lim = eta_limit_gap(n, eta)
    return np.array([eta_gap(solve_horn(n, a, -abs(b), tau)[0], eta)[0] - lim
                     for b in b_grid])


# -------------------------------------------------------- orange region

@dataclass(frozen=True)
class TipError:
    t: np.ndarray
    x: np.ndarray
    E: np.ndarray
    X: np.ndarray
    coefficient: float
    slope_term: float
    residual: float


def tip_error_values(horn, t):
    """``E = psi_T - psi_T(T) - frak_c |b|^(1/n) psi_C`` and ``X = |b|^(1/n) psi_C``."""
    n = horn.n
    t = np.asarray(t, float)
    z = horn.z(t)
    X = abs(horn.b) ** (1.0 / n) * psi_calabi(n, horn.T, t, 0)[0]
    return z - special.frak_c(n) * X, X


def horn_tip_error(horn, t=None, T0=None, n_samples=41):
    """E on the orange window with a fit of ``E / X^2 = beta + gamma X``."""
    if t is None:
        if T0 is None:
            raise DomainError("need a t grid or T0")
        t = horn.T + np.linspace(T0, 2 * T0, n_samples)
    E, X = tip_error_values(horn, t)
    A = np.vstack([np.ones_like(X), X]).T
    coef, *_ = np.linalg.lstsq(A, E / X ** 2, rcond=None)
    res = float(np.max(np.abs(E / X ** 2 - A @ coef)) / abs(coef[0]))
    x = abs(horn.b) ** (1.0 / horn.n) * (np.asarray(t) - horn.T) ** ((horn.n + 1) / horn.n)
    return TipError(np.asarray(t), x, E, X, float(coef[0]), float(coef[1]), res)


def tip_error_collapse(n, a, tau, b_grid, x_grid):
    """E as a function of ``x = |b|^(1/n) (t - T)^((n+1)/n)`` for each b.

    Returns the array of E values (rows = b) and the max relative spread.
    """
    rows = []
    for b in b_grid:
        h, T = solve_horn(n, a, -abs(b), tau)
        t = T + (np.asarray(x_grid) / abs(b) ** (1.0 / n)) ** (n / (n + 1))
        rows.append(tip_error_values(h, t)[0])
    E = np.array(rows)
    spread = np.max(np.abs(E - E[0]) / np.abs(E[0]))
    return E, float(spread)


# -------------------------------------------------------- b and T

def bT_drift(n, a, T, tau):
    """``(T_h + c k^-1)/|tau|`` for the horn through the bandT value of b."""
    b = solve_b_from_T(n, T)
    _, Th = solve_horn(n, a, b, tau)
    return (Th - T) / abs(tau)


def check_bT_drift(n, a, T_grid=(-50.0, -100.0, -200.0, -400.0, -800.0), tau=-5.0, bound=3.0):
    drift = np.array([bT_drift(n, a, T, tau) for T in T_grid])
    ok = bool(np.all(np.abs(drift) <= bound))
    return ScalingCheck("bT_drift", (float(np.min(np.abs(drift))), float(np.max(np.abs(drift)))),
                        bound, ok, {"T": list(T_grid), "drift_over_tau": drift.tolist(),
                                    "sign": int(np.sign(drift[0]))})


def profile_error(horn, s):
    """sup |psi_T((1-s)T) - psi_T(T) - psi_inf(s)| on the sample set."""
    s = np.asarray(s, float)
    z = horn.z((1.0 - s) * horn.T)
    return float(np.max(np.abs(z - limit_profile(horn.n).psi_inf(s))))


def coefficient_errors(horn, s):
    """sup |1/(T^2 psi'') - 1/Q| and sup |(n-1)/(|T| psi') - (n-1)/P| on ``s``."""
    n, T = horn.n, horn.T
    s = np.asarray(s, float)
    D = horn.derivs((1.0 - s) * T, 2)
    prof = limit_profile(n)
    e2 = np.max(np.abs(1.0 / (T * T * D[2]) - 1.0 / prof.Q(s)))
    e1 = np.max(np.abs((n - 1) / (abs(T) * D[1]) - (n - 1) / prof.P(s)))
    return float(e2), float(e1)
