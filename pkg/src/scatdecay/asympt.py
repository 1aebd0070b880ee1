"""Closed-form asymptotic laws for the correction functions: far-field
forms (oscillatory, algebraically damped), the near-surface divergence, the
high-order Hankel asymptote and the special domain radii where the leading
transverse far field vanishes.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _scaled as sc
from .intrep import F_cold_int, F_hot_int
from .mie import build_multipole_table


@dataclass(frozen=True)
class AsymptoteReport:
    """Comparison of an exact value against its asymptotic form."""
    zeta: float
    exact: float
    asymptotic: float
    ratio: float
    regime: str


def _rho_mods(rho):
    s2, c2 = math.sin(2 * rho), math.cos(2 * rho)
    big_s = (-0.5 * rho ** 2 + 0.375) * s2 - 0.75 * rho * c2
    small_t = 0.25 * s2 - 0.5 * rho * c2
    u = 0.5 * s2 - rho * c2
    return big_s, small_t, u


def far_F_cold(spec, zeta, lmax, table=None):
    """Leading far-field form of (F_c_par, F_c_perp): damped oscillation
    e^{2i zeta} with 1/zeta^4 (parallel) and 1/zeta^2 (transverse) envelopes
    and a domain-radius modulation common to all multipoles transversely."""
    if zeta <= 3.0 * spec.rho:
        raise ValueError("far-field form needs zeta > 3 rho")
    rho, q = spec.rho, spec.sphere.q
    if table is None or table.l_max < lmax:
        table = build_multipole_table(spec.sphere, lmax)
    big_s, small_t, u = _rho_mods(rho)
    phase = cmath.exp(2j * zeta)
    par = perp = 0.0
    for l in range(1, lmax + 1):
        sgn = (-1) ** l
        je_par = sgn * phase / zeta ** 4 * (big_s - 2 * l * (l + 1) * small_t)
        jm_par = -sgn * phase / zeta ** 4 * big_s
        je_perp = sgn * phase / zeta ** 2 * u
        rot = (-1j) ** (l + 1)
        be, bm = complex(table.Be[l]), complex(table.Bm[l])
        par += l * (l + 1) * (rot * (be * je_par + bm * jm_par)).real
        perp += l * (l + 1) * (rot * (be - bm) * je_perp).real
    return (-9.0 / (8 * q ** 3) * par, -9.0 / (16 * q ** 3) * perp)


def far_F_hot(spec, zeta, lmax, table=None):
    """Leading far-field form of (F_d_par, F_d_perp): monotone 1/zeta^4 and
    1/zeta^2 decay without oscillation."""
    if zeta <= 3.0 * spec.rho:
        raise ValueError("far-field form needs zeta > 3 rho")
    rho, q = spec.rho, spec.sphere.q
    if table is None or table.l_max < lmax:
        table = build_multipole_table(spec.sphere, lmax)
    par = perp = 0.0
    for l in range(1, lmax + 1):
        ce, cm = float(table.Ce[l]), float(table.Cm[l])
        par += l * (l + 1) * (
            ce * (4.0 / 15.0 * rho ** 5 + 4.0 / 3.0 * l * (l + 1) * rho ** 3)
            + cm * 4.0 / 15.0 * rho ** 5) / zeta ** 4
        perp += l * (l + 1) * (ce + cm) * 4.0 / 3.0 * rho ** 3 / zeta ** 2
    return (9.0 / (8 * q ** 3) * par, 9.0 / (16 * q ** 3) * perp)


def near_F_par(spec, zeta):
    """Near-surface divergence of the parallel cold correction function:
    (9/(16 q^2)) [Im eps/|1+eps|^2] rho / ((rho+q)(zeta-rho-q))."""
    rho, q, eps = spec.rho, spec.sphere.q, complex(spec.sphere.eps)
    if zeta <= rho + q:
        raise ValueError("need zeta > rho + q")
    return (9.0 / (16.0 * q ** 2) * eps.imag / abs(1.0 + eps) ** 2
            * rho / ((rho + q) * (zeta - rho - q)))


def near_equivalences(spec, zeta, lmax=340, table=None):
    """Near-surface structure ratios (F_d_par/F_c_par, F_d_perp/F_c_perp,
    F_c_par/F_c_perp); they tend to (1, 1, 2) as zeta drops to rho + q."""
    fc = F_cold_int(spec, zeta, lmax, method="closed", table=table)
    fd = F_hot_int(spec, zeta, lmax, method="closed", table=table)
    return fd[0] / fc[0], fd[1] / fc[1], fc[0] / fc[1]


def special_radii(n):
    """n-th positive root of tan(2 rho) = 2 rho; at these domain radii the
    leading transverse far-field modulation vanishes and the decay steepens
    from 1/r^2 to 1/r^3."""
    if n < 1:
        raise ValueError("n must be >= 1")
    # roots of g(y) = sin y - y cos y in ((2n-1) pi/2, (2n+1) pi/2), y = 2 rho
    lo, hi = (2 * n - 1) * math.pi / 2, (2 * n + 1) * math.pi / 2
    g = lambda y: math.sin(y) - y * math.cos(y)
    a, b = lo + 1e-12, hi - 1e-12
    fa = g(a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        fm = g(mid)
        if fa * fm <= 0:
            b = mid
        else:
            a, fa = mid, fm
        if b - a < 1e-12:
            break
    y = 0.5 * (a + b)
    for _ in range(8):  # Newton polish: g'(y) = y sin y
        dg = y * math.sin(y)
        if dg == 0:
            break
        y -= g(y) / dg
    return 0.5 * y


def large_l_hankel(l, t, scaled=False):
    """High-order asymptote h_l(t) ~ -i 2^{l+1/2} l^l / (e^l t^{l+1}),
    evaluated in log space.  With scaled=True returns a (mantissa, exponent)
    pair that never overflows for l <= 500, t >= 0.1."""
    if l < 10:
        raise ValueError("asymptote is meant for l >= 10")
    log2_abs = ((l + 0.5) + (l * math.log(l) - l - (l + 1) * math.log(t))
                / math.log(2.0))
    e = int(math.floor(log2_abs))
    mant = -1j * 2.0 ** (log2_abs - e)
    if scaled:
        return sc.snorm(mant, e)
    return complex(sc.sto((mant, e)))


def envelope_slope(zetas, values, window=4):
    """Log-log slope of the oscillation envelope of |values| over zetas.

    Takes sliding-window maxima of |F| (window of 4 samples spaced ~pi/2 to
    straddle at least one full oscillation), then fits a line in log-log.
    """
    mag = np.abs(np.asarray(values, dtype=float))
    z = np.asarray(zetas, dtype=float)
    n = len(mag) - window + 1
    if n < 2:
        raise ValueError("need more samples than the window size")
    env = np.array([mag[i:i + window].max() for i in range(n)])
    zc = np.array([z[i:i + window].mean() for i in range(n)])
    keep = env > 0
    slope = np.polyfit(np.log(zc[keep]), np.log(env[keep]), 1)[0]
    return float(slope)
