import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neckforge import gluesim as GS
from neckforge import limitode as LO
from neckforge import potentials as PT
from neckforge import transplant as TR
from neckforge.errors import CutoffOutsideNeck, DomainError


def test_smoothstep_derivatives():
    x = np.linspace(0.05, 0.95, 19)
    h = 1e-6
    for k in (1, 2, 3):
        fd = (TR.smoothstep(x + h, k - 1) - TR.smoothstep(x - h, k - 1)) / (2 * h)
        assert np.allclose(fd, TR.smoothstep(x, k), rtol=1e-7, atol=1e-7)
    with pytest.raises(DomainError):
        TR.smoothstep(x, 4)


@pytest.mark.parametrize("s_star", [0.01, 0.05, 0.2])
def test_cutoff_shape_and_constant(s_star):
    chi = TR.make_cutoff(s_star)
    s = np.linspace(0, 1, 4001)
    v = chi(s)
    assert np.all(np.diff(v) >= 0) and v.min() == 0.0 and v.max() == 1.0
    assert np.all(v[s <= s_star] == 0) and np.all(v[s >= 2 * s_star] == 1)
    assert 0 < chi(1.5 * s_star) < 1
    assert chi.derivative_bound == pytest.approx(TR.C_CHI, rel=1e-6)


def test_right_cutoff_is_reflection():
    s = np.linspace(0, 1, 101)
    right = TR.make_cutoff(0.1, "right")
    assert np.array_equal(right(s), TR.make_cutoff(0.1)(1 - s))


def test_cutoff_errors():
    for bad in (0.0, -0.1, 0.3):
        with pytest.raises(DomainError):
            TR.make_cutoff(bad)
    with pytest.raises(DomainError):
        TR.make_cutoff(0.1, "middle")
    assert TR.make_cutoff(0.5, "radial_t").s_star == 0.5


def test_s_star_schedule():
    assert TR.s_star_schedule(-100.0, 0.05, -3.4) == pytest.approx(0.102)
    with pytest.raises(CutoffOutsideNeck):
        TR.check_s_star(0.05, -100.0, 0.05, -3.4)


def test_transplant_plateaus(pair):
    v = pair.vhat
    tv = TR.transplant_vhat(v, 0.1, pair.C0_v)
    g = tv.vhat_T
    assert np.all(g.values[g.nodes < 0.1] == pair.C0_v)
    assert np.all(g.values[g.eta < 0.1] == 0.0)
    core = (g.nodes >= 0.2) & (g.eta >= 0.2)
    assert np.allclose(g.values[core], v.values[core], rtol=0, atol=1e-16)
    i = np.argmin(np.abs(v.nodes - 0.5))
    assert g.values[i] == pytest.approx(v.values[i], abs=1e-16)
    with pytest.raises(CutoffOutsideNeck):
        TR.transplant_vhat(v, 0.3)


def test_transplant_converges_as_s_star_shrinks(pair):
    v = pair.vhat
    mid = (v.nodes >= 0.1) & (v.nodes <= 0.9)
    gaps = [np.max(np.abs(TR.transplant_vhat(v, s).vhat_T.values - v.values)[mid])
            for s in (0.2, 0.08, 0.04)]
    assert gaps[0] > 0.01 and gaps[2] <= 1e-16


def test_uhat_T_plateaus(pair, horn):
    tv = TR.transplant_vhat(pair.vhat, 0.1, pair.C0_v)
    u = TR.uhat_T(horn, tv)
    assert np.all(u.values[u.nodes <= 0.1] == -pair.C0_v)
    assert np.all(u.values[u.eta <= 0.1] == 0.0)
    assert np.all(np.isfinite(u.values))


def test_limit_op_route_matches_differences(pair, L_inf):
    a = TR.transplant_vhat(pair.vhat, 0.1, pair.C0_v)
    b = TR.transplant_vhat(pair.vhat, 0.1, pair.C0_v, limit_op=L_inf, uhat=pair.uhat)
    mid = (pair.vhat.nodes > 0.3) & (pair.vhat.nodes < 0.7)
    assert np.max(np.abs(a.d2 - b.d2)[mid]) <= 1e-3
    with pytest.raises(DomainError):
        TR.transplant_vhat(pair.vhat, 0.1, limit_op=L_inf, uhat=pair.uhat.restrict(pair.uhat.nodes > 0.5))


def _uT(pair, L_inf, log_sigma):
    p = GS.schedule_from_sigma(log_sigma)
    h, _ = PT.solve_horn(p)
    ss = TR.s_star_schedule(p.T, p.alpha, p.tau)
    tv = TR.transplant_vhat(pair.vhat, ss, pair.C0_v, p.T, p.alpha, p.tau, L_inf, pair.uhat)
    return h, tv, TR.uhat_T(h, tv)


def test_uhat_T_uniform_eta_bound(pair, L_inf):
    sups = [TR.eta_weighted_sup(_uT(pair, L_inf, ls)[2]) for ls in (-75.0, -150.0, -300.0, -600.0)]
    assert max(sups) / min(sups) <= 2.0


def test_uhat_T_converges(pair, L_inf):
    mid = (pair.uhat.nodes >= 0.1) & (pair.uhat.nodes <= 0.9)
    errs = [np.max(np.abs(_uT(pair, L_inf, ls)[2].values - pair.uhat.values)[mid])
            for ls in (-600.0, -1200.0, -2400.0, -4800.0)]
    assert all(errs[i + 1] < errs[i] for i in range(3))
    assert errs[-1] <= 1e-9


def test_pairing_scalings(pair, L_inf):
    mu = LO.densities(PT.limit_profile(2)).mu_inf
    lim = LO.pairing(pair.vhat, pair.vhat.values, mu)
    rows = []
    for ls in (-75.0, -150.0, -300.0, -600.0):
        h, tv, _ = _uT(pair, L_inf, ls)
        rows.append(TR.pairing_row(h, tv))
    checks = TR.pairing_scalings(rows, lim)
    assert [c.name for c in checks] == ["vv_lower", "one_v_sign", "abs_v_upper"]
    assert all(c.passed for c in checks)


def test_negative_control_growth(pair, L_inf):
    """Without the Neumann correction the cutoff error blows up as s_star shrinks."""
    def sup(v, s):
        return np.max(np.abs(TR.uhat_T(L_inf, TR.transplant_vhat(v, s)).values))
    for s0 in (0.2, 0.08):
        assert sup(pair.dirichlet_v, s0 / 4) / sup(pair.dirichlet_v, s0) >= 4.0
    # the corrected companion levels off
    tail = [sup(pair.vhat, s) for s in (0.0125, 0.00625, 0.003)]
    assert tail[1] / tail[0] < 1.1 and tail[2] / tail[1] < 1.1


@settings(max_examples=25, deadline=None)
@given(s_star=st.floats(0.005, 0.2))
def test_property_cutoff_bounds(s_star):
    chi = TR.make_cutoff(s_star)
    s = s_star * (1 + np.linspace(0, 1, 501))
    d = chi.derivs(s)
    assert np.all((d[0] >= 0) & (d[0] <= 1))
    assert s_star * np.max(np.abs(d[1])) + s_star ** 2 * np.max(np.abs(d[2])) <= TR.C_CHI * (1 + 1e-9)
