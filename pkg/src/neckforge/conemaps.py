"""Normal projection onto the smoothed cubic cone.

For ``z`` on ``z1^3 + z2^3 + z3^3 = 0`` find the small complex ``nu`` with
``sum_i (z_i + nu conj(z_i)^2)^3 = 1``.  Expanding in ``nu`` gives the cubic
``F(nu) = S1 3 nu + S2 3 nu^2 + S3 nu^3 - 1`` with ``S_k = sum z_i^(3-k) w_i^k``,
``w_i = conj(z_i)^2`` (``S0 = 0`` on the cone).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .asymptotics import PowerFit, ScalingCheck, bounded_check, fit_power
from .errors import DegeneratePoint, DomainError, NewtonDiverged

R_MIN = 10.0
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class ConePoint:
    z: tuple

    @property
    def norm(self):
        return math.sqrt(sum(abs(c) ** 2 for c in self.z))

    def cone_defect(self):
        return abs(sum(c ** 3 for c in self.z)) / self.norm ** 3

    def scaled(self, factor):
        return ConePoint(tuple(complex(factor * c) for c in self.z))

    def P(self):
        """``3 sum |z_i|^4 / |z|^4``."""
        return 3 * sum(abs(c) ** 4 for c in self.z) / self.norm ** 4


@dataclass(frozen=True)
class NuSample:
    point: ConePoint
    nu: complex
    residual: float


def _principal_cbrt(w):
    if w == 0:
        return 0j
    return abs(w) ** (1.0 / 3.0) * np.exp(1j * np.angle(w) / 3.0)


def sample_cone_point(seed, radius=R_MIN) -> ConePoint:
    """Deterministic cone point of norm ``radius`` from ``seed``."""
    if radius < R_MIN:
        raise DomainError(f"radius must be >= {R_MIN}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(4)
    z1, z2 = complex(v[0], v[1]), complex(v[2], v[3])
    w = -(z1 ** 3 + z2 ** 3)
    if abs(w) <= 1e-12 * (abs(z1) + abs(z2)) ** 3:
        raise DegeneratePoint("z1^3 + z2^3 = 0; resample")
    z3 = complex(_principal_cbrt(w))
    p = ConePoint((z1, z2, z3))
    return p.scaled(radius / p.norm)


def cubic_coefficients(point: ConePoint):
    """``(S3, 3 S2, 3 S1, S0 - 1)``, highest degree first."""
    z = np.array(point.z, complex)
    w = np.conj(z) ** 2
    S = [np.sum(z ** (3 - k) * w ** k) for k in range(4)]
    return np.array([S[3], 3 * S[2], 3 * S[1], S[0] - 1.0])


def residual(point: ConePoint, nu, dps=40):
    """``|sum (z_i + nu conj(z_i)^2)^3 - 1|`` in extended precision, ``z3`` snapped
    onto the cone as in the solver."""
    with mpmath.workdps(dps):
        m = mpmath.mpc(nu.real, nu.imag)
        total = sum((c + m * mpmath.conj(c) ** 2) ** 3 for c in _mp_point(point))
        return float(abs(total - 1))


def _mp_point(point: ConePoint, scale=1):
    """Coordinates in working precision, ``z3`` snapped onto the cone."""
    z1, z2, z3 = (mpmath.mpc(c.real, c.imag) for c in point.z)
    w = -(z1 ** 3 + z2 ** 3)
    roots = [mpmath.cbrt(w) * mpmath.exp(2j * mpmath.pi * k / 3) for k in range(3)]
    z3 = min(roots, key=lambda r: abs(r - z3))
    return [scale * z1, scale * z2, scale * z3]


def _newton(point: ConePoint, target=1.0, max_iter=60, dps=40, scale=1):
    """Newton from ``nu = 0`` on ``sum (z_i + nu conj(z_i)^2)^3 = target``."""
    with mpmath.workdps(dps):
        zs = _mp_point(point, scale)
        ws = [mpmath.conj(c) ** 2 for c in zs]
        tgt = mpmath.mpf(target)

        def F(nu):
            return sum((zi + nu * wi) ** 3 for zi, wi in zip(zs, ws)) - tgt

        def dF(nu):
            return sum(3 * wi * (zi + nu * wi) ** 2 for zi, wi in zip(zs, ws))

        nu = mpmath.mpc(0)
        tol = mpmath.mpf(10) ** -25
        for _ in range(max_iter):
            d = dF(nu)
            if d == 0:
                raise NewtonDiverged("vanishing derivative")
            step = F(nu) / d
            nu -= step
            if abs(step) <= tol * max(abs(nu), mpmath.mpf(10) ** -300):
                break
        else:
            raise NewtonDiverged("Newton did not converge from nu = 0")
        nu_c = complex(nu)
        res = float(abs(F(mpmath.mpc(nu_c.real, nu_c.imag))))
    return nu_c, res


def solve_nu(point: ConePoint, max_iter=60, dps=40) -> NuSample:
    """Newton from ``nu = 0`` on the cubic, in extended precision."""
    if point.norm < R_MIN * (1 - 1e-12):
        raise DomainError(f"|z| must be >= {R_MIN}")
    nu, res = _newton(point, 1.0, max_iter, dps)
    if not res <= RESIDUAL_TOL:
        raise NewtonDiverged(f"residual {res:.3g} above {RESIDUAL_TOL:g}")
    return NuSample(point, nu, res)


def all_roots(point: ConePoint):
    """The three roots of the cubic, sorted by modulus."""
    r = np.roots(cubic_coefficients(point))
    return r[np.argsort(np.abs(r))]


def nu_sigma(point: ConePoint, sigma):
    """``sigma^(-1/3) nu(sigma^(-1/3) z)`` for real positive ``sigma``."""
    with mpmath.workdps(40):
        f = mpmath.mpf(sigma) ** (-mpmath.mpf(1) / 3)
        nu, res = _newton(point, 1.0, scale=f)
        if not res <= RESIDUAL_TOL:
            raise NewtonDiverged(f"residual {res:.3g} above {RESIDUAL_TOL:g}")
        return complex(f * mpmath.mpc(nu.real, nu.imag))


def nu_sigma_direct(point: ConePoint, sigma):
    """Newton on ``sum (z_i + nu conj(z_i)^2)^3 = sigma`` without rescaling."""
    return _newton(point, sigma)[0]


def ray_samples(seed, radii):
    base = sample_cone_point(seed, R_MIN)
    return [solve_nu(base.scaled(r / R_MIN)) for r in radii]


def decay_slope(seed, radii=None) -> PowerFit:
    """Fitted exponent of ``|nu|`` against ``|z|`` along one ray."""
    if radii is None:
        radii = np.geomspace(R_MIN, 100 * R_MIN, 20)
    radii = np.asarray(radii, float)
    if len(radii) < 20:
        raise DomainError("need >= 20 radii")
    samples = ray_samples(seed, radii)
    return fit_power(radii, [abs(s.nu) for s in samples], trim=0.0)


def ray_difference_slope(seed, radii=None):
    """Exponent of the divided difference of ``nu`` along a ray (k = 1)."""
    if radii is None:
        radii = np.geomspace(R_MIN, 100 * R_MIN, 21)
    samples = ray_samples(seed, radii)
    nus = np.array([s.nu for s in samples])
    dn = np.abs(np.diff(nus) / np.diff(radii))
    mid = np.sqrt(radii[1:] * radii[:-1])
    return fit_power(mid, dn, trim=0.0)


def leading_law(seed, radius):
    """``nu |z|^4 P`` at the sample; tends to 1."""
    base = sample_cone_point(seed, R_MIN).scaled(radius / R_MIN)
    s = solve_nu(base)
    return s.nu * base.norm ** 4 * base.P()


def scaled_bound(seeds, sigmas=(1e-3, 1e-6), radius=R_MIN):
    """``sup |nu_sigma| |z|^4 / sigma`` per sigma over the sample directions."""
    out = []
    for sg in sigmas:
        vals = []
        for sd in seeds:
            p = sample_cone_point(sd, radius)
            vals.append(abs(nu_sigma(p, sg)) * p.norm ** 4 / sg)
        out.append(max(vals))
    return np.array(out)


def check_scaled_bound(seeds, sigmas=(1e-3, 1e-6), radius=R_MIN, factor=2.0) -> ScalingCheck:
    v = scaled_bound(seeds, sigmas, radius)
    return bounded_check("nu_sigma_bound", v, factor, {"sigma": list(sigmas), "sup": v.tolist()})
