"""Cutoffs, the finite-parameter obstruction pair and its pairing scalings.

``vhat_T = [chi vhat + (1 - chi) vhat(0)] chi(1 - s)`` and
``uhat_T = L_T vhat_T``.  Derivatives of the cutoff factors are exact; those
of vhat come from second-order differences on the logit lattice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import ScalingCheck, bounded_check
from .errors import CutoffOutsideNeck, DomainError
from .limitode import (GridFunction, OdeOperator, L_T_in_s, densities, pairing)

# s* sup|S'| + s*^2 sup|S''| for the quintic smoothstep
C_CHI = 15.0 / 8.0 + 10.0 / math.sqrt(3.0)


def smoothstep(x, order=0):
    """``6x^5 - 15x^4 + 10x^3`` clamped to [0, 1], with derivatives in x."""
    x = np.clip(np.asarray(x, float), 0.0, 1.0)
    inside = (x > 0) & (x < 1)
    if order == 0:
        return x ** 3 * (x * (6 * x - 15) + 10)
    if order == 1:
        return np.where(inside, 30 * x ** 2 * (x - 1) ** 2, 0.0)
    if order == 2:
        return np.where(inside, 60 * x * (x - 1) * (2 * x - 1), 0.0)
    if order == 3:
        return np.where(inside, 60 * (6 * x * x - 6 * x + 1), 0.0)
    raise DomainError("smoothstep derivatives implemented to order 3")


@dataclass(frozen=True)
class Cutoff:
    """0 below ``s_star``, 1 above ``2 s_star`` (kind ``left``/``radial_t``);
    ``right`` is ``s -> left(1 - s)``."""

    s_star: float
    kind: str = "left"

    def derivs(self, s, eta=None, order=2):
        s = np.asarray(s, float)
        a = self.s_star
        if self.kind in ("left", "radial_t"):
            x = (s - a) / a
            sign = 1.0
        else:
            e = 1.0 - s if eta is None else np.asarray(eta, float)
            x = (e - a) / a
            sign = -1.0
        return np.stack([smoothstep(x, k) * (sign / a) ** k for k in range(order + 1)])

    def __call__(self, s, eta=None):
        return self.derivs(s, eta, 0)[0]

    @property
    def derivative_bound(self):
        s = self.s_star * (1.0 + np.linspace(0, 1, 20001))
        d = Cutoff(self.s_star, "left").derivs(s)
        return float(self.s_star * np.max(np.abs(d[1])) + self.s_star ** 2 * np.max(np.abs(d[2])))


def make_cutoff(s_star, kind="left") -> Cutoff:
    if kind not in ("left", "right", "radial_t"):
        raise DomainError(f"unknown cutoff kind {kind!r}")
    if not s_star > 0:
        raise DomainError("s_star must be positive")
    if kind != "radial_t" and s_star > 0.2:
        raise DomainError("s_star must lie in (0, 1/5]")
    return Cutoff(float(s_star), kind)


def s_star_schedule(T, alpha, tau, floor=0.02):
    return max(3 * abs(T) ** (alpha - 1), 3 * abs(tau / T), floor)


def check_s_star(s_star, T, alpha, tau):
    need = max(3 * abs(T) ** (alpha - 1), 3 * abs(tau / T))
    if s_star < need or s_star > 0.2:
        raise CutoffOutsideNeck(f"s_star={s_star:g} outside [{need:g}, 0.2]")


# ----------------------------------------------------------- transplant

def _s_derivs(f: GridFunction):
    """First and second s-derivatives of a lattice function."""
    x = f.x
    fx = np.gradient(f.values, x, edge_order=2)
    fxx = np.gradient(fx, x, edge_order=2)
    sx = f.nodes * f.eta
    return fx / sx, (fxx - (1.0 - 2.0 * f.nodes) * fx) / sx ** 2


@dataclass(frozen=True)
class Transplanted:
    vhat_T: GridFunction
    d1: np.ndarray
    d2: np.ndarray
    s_star: float
    C0: float


def transplant_vhat(vhat: GridFunction, s_star, C0=None, T=None, alpha=None, tau=None,
                    limit_op: OdeOperator = None, uhat: GridFunction = None) -> Transplanted:
    """Glue vhat to its constant value on the left and to 0 on the right.

    If ``T``, ``alpha`` and ``tau`` are given the lower bound on ``s_star``
    is enforced.  With ``limit_op`` and ``uhat`` on the same lattice, the
    second derivative of vhat is read off ``L_inf vhat = uhat`` instead of
    differenced.
    """
    if T is not None:
        check_s_star(s_star, T, alpha, tau)
    elif not 0 < s_star <= 0.2:
        raise CutoffOutsideNeck("s_star must lie in (0, 1/5]")
    s, eta = vhat.nodes, vhat.eta
    if C0 is None:
        C0 = float(vhat.values[0])
    chi = make_cutoff(s_star, "left").derivs(s)
    chr_ = make_cutoff(s_star, "right").derivs(s, eta)
    v1, v2 = _s_derivs(vhat)
    if limit_op is not None:
        if uhat is None or uhat.nodes.shape != s.shape or np.any(uhat.nodes != s):
            raise DomainError("uhat must share the vhat lattice")
        a2, a1, a0 = limit_op.coeffs(s, eta)
        v2 = (uhat.values - a1 * v1 - a0 * vhat.values) / a2
    dv = vhat.values - C0
    A = chi[0] * dv + C0
    A1 = chi[1] * dv + chi[0] * v1
    A2 = chi[2] * dv + 2 * chi[1] * v1 + chi[0] * v2
    # exact plateaus: no difference noise where the cutoffs are flat
    A1 = np.where(chi[0] == 0, 0.0, A1)
    A2 = np.where(chi[0] == 0, 0.0, A2)
    A = np.where(chi[0] == 0, C0, A)
    B, B1, B2 = chr_
    val = A * B
    d1 = A1 * B + A * B1
    d2 = A2 * B + 2 * A1 * B1 + A * B2
    return Transplanted(vhat.with_values(val), d1, d2, float(s_star), float(C0))


def uhat_T(op_or_horn, tv: Transplanted) -> GridFunction:
    """``L_T vhat_T`` on the lattice of ``tv``."""
    op = op_or_horn if isinstance(op_or_horn, OdeOperator) else L_T_in_s(op_or_horn)
    g = tv.vhat_T
    a2, a1, a0 = op.coeffs(g.nodes, g.eta)
    out = a2 * tv.d2 + a1 * tv.d1 + a0 * g.values
    left = g.nodes <= tv.s_star
    right = g.eta <= tv.s_star
    out = np.where(left, -tv.C0, out)
    out = np.where(right, 0.0, out)
    return g.with_values(out)


def eta_weighted_sup(u: GridFunction, n=2):
    return float(np.max(np.abs(u.values) / u.eta ** (n + 1)))


# ------------------------------------------------------------- pairings

@dataclass(frozen=True)
class PairingRow:
    T: float
    vv: float
    one_v: float
    abs_v: float


def pairing_row(horn, tv: Transplanted) -> PairingRow:
    mu = densities(horn).mu_T
    g = tv.vhat_T
    vv = pairing(g, g.values, mu)
    one_v = pairing(g, np.ones_like(g.values), mu)
    av = pairing(g.with_values(np.abs(g.values)), np.ones_like(g.values), mu)
    return PairingRow(horn.T, vv, one_v, av)


def pairing_scalings(rows, limit_vv, factor=2.0):
    """Lower bound stability, sign and uniform upper bound across the T grid."""
    vv = np.array([r.vv for r in rows])
    ov = np.array([r.one_v for r in rows])
    av = np.array([r.abs_v for r in rows])
    lower = ScalingCheck("vv_lower", (float(vv.min()), float(vv.max())), limit_vv,
                         bool(vv.min() > 0 and np.all(vv / limit_vv <= factor)
                              and np.all(limit_vv / vv <= factor)),
                         {"T": [r.T for r in rows], "vv": vv.tolist(), "limit": limit_vv})
    sign = ScalingCheck("one_v_sign", (float(ov.min()), float(ov.max())), "negative",
                        bool(np.all(ov < 0)), {"one_v": ov.tolist()})
    upper = bounded_check("abs_v_upper", av, factor, {"abs_v": av.tolist()})
    return [lower, sign, upper]
