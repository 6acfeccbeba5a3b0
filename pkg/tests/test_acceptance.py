"""Acceptance criteria 1-11, one test each.

Every test prints and records a single ``PASS``/``FAIL`` line; the lines are
repeated in the terminal summary.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.integrate import quad

from neckforge import asymptotics as AS
from neckforge import conemaps as CM
from neckforge import gluesim as GS
from neckforge import limitode as LO
from neckforge import potentials as PT
from neckforge import special as SP
from neckforge import transplant as TR

from conftest import ACCEPTANCE

A2 = -math.log(2)
UHAT_L2_MU_INF = 0.07419698375675207


def verdict(num, title, parts):
    """``parts`` maps a sub-check label to (ok, detail)."""
    ok = all(p[0] for p in parts.values())
    failed = [k for k, p in parts.items() if not p[0]]
    detail = "; ".join(f"{k}={p[1]}" for k, p in parts.items())
    line = f"{'PASS' if ok else 'FAIL'}  [{num:2d}] {title}: {detail}"
    ACCEPTANCE[num] = line
    print(line)
    assert ok, f"criterion {num} failed: {failed}"


def rel(a, b):
    return abs(a - b) / abs(b)


def test_01_constants():
    t0 = time.perf_counter()
    c = SP.c_n(2)
    e_c = rel(c, 2 * math.pi / math.sqrt(3))
    e_c1 = abs(SP.c_1_const(2) - 3 * math.log(2))
    d_comp = (2 / 3) ** 0.5 * c ** 1.5
    e_d = rel(SP.d_n(2), d_comp)
    e_l = rel(SP.lambda_n(2), math.sqrt(8 * d_comp / 9))
    dt = time.perf_counter() - t0
    verdict(1, "constants", {
        "c(2)": (e_c <= 1e-10, f"{e_c:.1e}"),
        "c1(2)": (e_c1 <= 1e-12, f"{e_c1:.1e}"),
        "d(2)": (e_d <= 1e-9, f"{e_d:.1e}"),
        "lambda(2)": (e_l <= 1e-9, f"{e_l:.1e}"),
        "runtime": (dt < 1.0, f"{dt:.3f}s"),
    })


def test_02_bessel_oracle():
    nu = SP.BesselOrder(1 / 3)
    y = np.geomspace(1e-3, 30.0, 20)
    W = SP.bessel_i(nu, y) * SP.bessel_k_prime(nu, y) - SP.bessel_i_prime(nu, y) * SP.bessel_k(nu, y)
    ew = float(np.max(np.abs(W * y + 1)))
    fm = LO.fundamental_solutions_minus(2)
    s = np.geomspace(1e-3, 0.9, 40)
    res = max(float(np.max(np.abs(fm.operator(h, s)) / np.abs(h(s)[0]))) for h in (fm.h1, fm.h2))
    v1, d1, _ = fm.h1(s)
    v2, d2, _ = fm.h2(s)
    ewr = float(np.max(np.abs((v1 * d2 - d1 * v2) / (-0.75 * s ** -0.5) - 1)))
    verdict(2, "Bessel oracle", {
        "wronskian": (ew <= 1e-8, f"{ew:.1e}"),
        "model residual": (res <= 1e-6, f"{res:.1e}"),
        "model wronskian": (ewr <= 1e-8, f"{ewr:.1e}"),
    })


def test_03_horn_solver():
    t0 = time.perf_counter()
    h, T = PT.solve_horn(2, A2, -1e-6, -10.0)
    dt = time.perf_counter() - t0
    tau = np.array([h.tau])
    e_tau = abs(h.derivs(tau, 0)[0, 0] - PT.psi_cusp(2, A2, tau, 0)[0, 0])
    e_tip = abs(math.exp(h.tip_value + h.a) + h.b) / abs(h.b)
    rt = max(rel(PT.solve_T_from_b(2, PT.solve_b_from_T(2, Tg)), Tg)
             for Tg in (-50.0, -100.0, -200.0, -400.0, -800.0))
    drift = AS.check_bT_drift(2, A2, (-50.0, -100.0, -200.0, -400.0, -800.0))
    verdict(3, "horn solver", {
        "psi_T(tau)": (e_tau <= 1e-10, f"{e_tau:.1e}"),
        "tip": (e_tip <= 1e-10, f"{e_tip:.1e}"),
        "bandT": (rt <= 1e-10, f"{rt:.1e}"),
        "drift/|tau|": (drift.passed, f"{drift.observed_ratio_range[1]:.2e}"),
        "runtime": (dt < 5.0, f"{dt:.3f}s"),
    })


def test_04_asymptotics(horn):
    ks = AS.check_interior_derivatives(horn)
    worst = max(c.spread for c in ks)
    eta = AS.check_eta_expansion(horn)
    te = AS.horn_tip_error(horn, T0=abs(horn.T) ** 0.05)
    _, spread = AS.tip_error_collapse(2, A2, -10.0, (1e-6, 1e-7, 1e-8), np.linspace(1e-3, 3e-3, 9))
    verdict(4, "asymptotics", {
        "k<=4 spread": (all(c.passed for c in ks), f"{worst:.3f}"),
        "two-term fit": (eta.passed, f"{eta.data['max_rel_residual']:.3f}"),
        "E coefficient": (abs(te.coefficient / 0.2 - 1) <= 0.02, f"{te.coefficient:.5f}"),
        "E collapse": (spread <= 1e-4, f"{spread:.1e}"),
    })


def test_05_limit_operator():
    s = np.linspace(0.1, 0.9, 41)
    errs = [max(AS.coefficient_errors(PT.solve_horn(2, A2, -b, -10.0)[0], s))
            for b in (1e-6, 5e-7, 2.5e-7, 1.25e-7)]
    pred = 2 ** (-1 / 3)
    worst = max(max(o / pred, pred / o) for o in (errs[i + 1] / errs[i] for i in range(3)))
    (_, _, fm), (_, _, fp) = LO.endpoint_defects(2)
    verdict(5, "limit operator", {
        "halving": (worst <= 2.5, f"{worst:.3f}"),
        "slope s->0": (fm.exponent >= 1.4, f"{fm.exponent:.3f}"),
        "slope eta->0": (fp.exponent >= 2.8, f"{fp.exponent:.3f}"),
    })


def test_06_obstruction_pair(pair):
    u, v = pair.uhat, pair.vhat
    mono = bool(np.all(np.diff(u.values) <= LO.MP_NOISE)
                and u.values.max() <= 1 + LO.MP_NOISE and u.values.min() >= -LO.MP_NOISE)
    sel = (u.eta <= 1e-2) & (u.eta >= 1e-4)
    q = u.values[sel] / u.eta[sel] ** 3
    eta_ok = bool(q.min() > 0 and abs(q[0] / q[-1] - 1) < 0.05)
    rem = pair.uhat_fit.remainder.exponent
    neu = abs(pair.neumann_coefficient) / pair.C1_u
    l2 = LO.pairing(u, u.values, LO.densities(PT.limit_profile(2)).mu_inf)
    verdict(6, "obstruction pair", {
        "uhat monotone in [0,1]": (mono, mono),
        "uhat/eta^3": (eta_ok, f"{q[-1]:.4f}"),
        "C1,C2>0": (pair.C1_u > 0 and pair.C2_u > 0, f"{pair.C1_u:.4f},{pair.C2_u:.4f}"),
        "remainder slope": (rem >= 1.9, f"{rem:.3f}"),
        "vhat<=0": (v.values.max() <= LO.MP_NOISE and pair.C0_v < 0, f"{pair.C0_v:.4f}"),
        "Neumann/C1": (neu <= 1e-3, f"{neu:.1e}"),
        "int uhat^2 mu": (l2 > 0 and rel(l2, UHAT_L2_MU_INF) <= 1e-9, f"{l2:.10f}"),
    })


def test_07_transplant(pair, L_inf):
    u = pair.uhat
    mid = (u.nodes >= 0.1) & (u.nodes <= 0.9)

    def uT(ls):
        p = GS.schedule_from_sigma(ls)
        h, _ = PT.solve_horn(p)
        ss = TR.s_star_schedule(p.T, p.alpha, p.tau)
        tv = TR.transplant_vhat(pair.vhat, ss, pair.C0_v, p.T, p.alpha, p.tau, L_inf, u)
        return TR.uhat_T(h, tv)

    sups = [TR.eta_weighted_sup(uT(ls)) for ls in (-75.0, -150.0, -300.0, -600.0)]
    spread = max(sups) / min(sups)
    # monotone convergence is measured once the cutoffs leave [0.1, 0.9] (|T| >= 400)
    conv = [float(np.max(np.abs(uT(ls).values - u.values)[mid]))
            for ls in (-600.0, -1200.0, -2400.0, -4800.0)]
    mono = all(conv[i + 1] < conv[i] for i in range(3))

    def sup(v, s):
        return float(np.max(np.abs(TR.uhat_T(L_inf, TR.transplant_vhat(v, s)).values)))
    growth = min(sup(pair.dirichlet_v, s0 / 4) / sup(pair.dirichlet_v, s0) for s0 in (0.2, 0.08))
    verdict(7, "transplant", {
        "eta^3 bound spread": (spread <= 2.0, f"{spread:.3f}"),
        "convergence": (mono, "/".join(f"{c:.1e}" for c in conv)),
        "negative control growth": (growth >= 4.0, f"{growth:.2f}"),
    })


def test_08_glued_defect():
    grid = [GS.schedule_from_sigma(ls) for ls in (-75.0, -150.0, -300.0)]
    rows, summ = GS.region_error_report(grid)
    r4 = max(r.sup_defect for r in rows if r.region == "R4")
    tip2 = GS.tip_defect(GS.schedule_from_sigma(-150.0, n=2))
    p3 = GS.schedule_from_sigma(-150.0, n=3)
    tip3 = GS.tip_defect(p3)
    want3 = (1 - 3 / 2) * math.log(abs(p3.b))
    verdict(8, "glued defect", {
        "R4": (r4 <= 1e-10, f"{r4:.1e}"),
        "R3 spread": (summ["R3_spread"] <= 3.0, f"{summ['R3_spread']:.4f}"),
        "R5-R7 slope": (abs(summ["R57_slope"] - summ["R57_target"]) <= 0.1,
                        f"{summ['R57_slope']:.4f} vs {summ['R57_target']:.4f}"),
        "tip n=2": (abs(tip2) <= 1e-8, f"{tip2:.1e}"),
        "tip n=3": (tip3 != 0 and rel(tip3, want3) <= 0.01, f"{tip3:.5f}"),
    })


def test_09_toy_solver(pair):
    parts = {}
    factors = []
    for ls in (-75.0, -150.0, -300.0):
        p = GS.schedule_from_sigma(ls, alpha=0.05, a_bold=0.15, delta=0.01)
        g, prob = GS.glued_defect_problem(p, pair)
        us, fm = GS.manufactured(prob)
        merr = float(np.max(np.abs(GS.toy_solve(prob.with_(f=fm)).u - us)))
        factors.append(GS.contraction_factor(GS.toy_solve(prob)))
        A = GS.shift_bound(p.b, p.a_bold)
        sw = GS.shift_sweep(prob, A, tol=1e-10)
        lam = abs(GS.toy_solve(prob.with_(s_const=sw.s_sigma)).lam)
        tag = f"|T|={abs(p.T):g}"
        parts[f"manufactured {tag}"] = (merr <= 1e-8, f"{merr:.1e}")
        parts[f"sweep {tag}"] = (sw.lam_lo * sw.lam_hi < 0 and lam <= 1e-10, f"{lam:.1e}")
    dec = all(k < 1 for k in factors) and all(factors[i + 1] < factors[i] for i in range(2))
    parts["contraction"] = (dec, "/".join(f"{k:.1e}" for k in factors))
    budget = (GS.budget_check(0.05, 0.15, 0.01) == (True, True)
              and GS.budget_check(0.15, 0.15, 0.01)[0] is False
              and GS.budget_check(0.05, 0.2, 0.0)[1] is False)
    parts["budget"] = (budget, budget)
    verdict(9, "toy obstructed solver", parts)


def test_10_cone_maps():
    worst = max(CM.solve_nu(CM.sample_cone_point(sd, 50.0)).residual for sd in range(8))
    slopes = [CM.decay_slope(sd).exponent for sd in range(3)]
    sb = CM.check_scaled_bound(range(8))
    verdict(10, "cone maps", {
        "residual": (worst <= 1e-10, f"{worst:.1e}"),
        "decay": (all(abs(x + 4) <= 0.1 for x in slopes), "/".join(f"{x:.4f}" for x in slopes)),
        "scaled bound spread": (sb.passed, f"{sb.spread:.4f}"),
    })


def test_11_full_run(tmp_path):
    out = tmp_path / "full"
    cmd = [sys.executable, "-m", "neckforge.cli", "run", "--suite", "all", "--sigma-exp", "-150",
           "--seed", "0", "--out", str(out)]
    t0 = time.perf_counter()
    first = subprocess.run(cmd, capture_output=True, text=True)
    dt = time.perf_counter() - t0
    snap = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    second = subprocess.run(cmd, capture_output=True, text=True)
    same = snap == {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    verdict(11, "full run", {
        "exit": (first.returncode == 0 and second.returncode == 0,
                 f"{first.returncode},{second.returncode}"),
        "runtime": (dt < 600.0, f"{dt:.1f}s"),
        "byte-identical": (same, f"{len(snap)} files"),
    })
