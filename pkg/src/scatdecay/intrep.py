"""Integral representation of the decay-rate correction functions.

Each multipole order l contributes four integrals over the chord coordinate
t in [zeta - rho, zeta + rho] with geometric weights g1, g2; summed against
the sphere amplitudes they reproduce the same four correction functions as
the triple-sum route, which is the central consistency check of the package.

Two evaluation paths per integral:

* ``closed``: expansion of the weights into powers of t and lookup of the
  antiderivative tables (scaled arithmetic; mandatory near the domain
  surface at high order, where integrands leave the float64 range).  The
  t-power basis cancels strongly at large zeta/rho, so the path degrades in
  the far field.
* ``quadrature``: adaptive Gauss pair (15/30 nodes) on the stable form of
  the integrand; machine-accurate whenever the integrand fits in float64,
  which fails near the surface once l is large.

``method='auto'`` picks quadrature when representable, else closed.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln, spherical_jn, spherical_yn

from . import _scaled as sc
from .aggregate import AggregateSpec
from .errors import ConvergenceError, ConvergenceWarning, HalfspaceDivergenceError
from .hankint import DiagTables
from .mie import build_multipole_table

_POWERS = (-2, 0, 1, 2, 4)


@dataclass(frozen=True)
class JIntegralSet:
    """The four chord integrals for one multipole order."""
    l: int
    zeta: float
    rho: float
    Je_par: complex
    Jm_par: complex
    Je_perp: complex
    Jm_perp: complex
    kind: str  # 'cold' or 'hot'


def g1(t, zeta, rho):
    """First geometric weight (rho^2 - (zeta - t)^2) / (2 zeta); vanishes at
    both endpoints t = zeta -+ rho."""
    return (rho ** 2 - (zeta - t) ** 2) / (2.0 * zeta)


def g2(t, zeta, rho):
    """Second geometric weight; algebraically equal to
    g1 - g1^2/t + g1^3/(3 t^2), and zero at both endpoints."""
    return ((rho ** 2 - zeta ** 2 - t ** 2) / (2.0 * zeta)) ** 3 / (3.0 * t ** 2) \
        + t / 3.0


def _weight_coeffs(zeta, rho):
    """Coefficients of g1-g2, g1+g2 and g2 over the powers t^P, P in
    (-2, 0, 1, 2, 4) (each weight is t^-2 times a quartic in t)."""
    a = (rho ** 2 - zeta ** 2) / (2.0 * zeta)
    gm = (-a ** 3 / 3.0, a + a ** 2 / (2 * zeta), 2.0 / 3.0,
          -(1.0 / (2 * zeta) + a / (4 * zeta ** 2)), 1.0 / (24 * zeta ** 3))
    gp = (a ** 3 / 3.0, a - a ** 2 / (2 * zeta), 4.0 / 3.0,
          -1.0 / (2 * zeta) + a / (4 * zeta ** 2), -1.0 / (24 * zeta ** 3))
    g2c = (a ** 3 / 3.0, -a ** 2 / (2 * zeta), 1.0 / 3.0,
           a / (4 * zeta ** 2), -1.0 / (24 * zeta ** 3))
    return gm, gp, g2c


# ---------------------------------------------------------------------------
# closed path: antiderivative tables at the two endpoints
# ---------------------------------------------------------------------------

def _closed_J_all(zeta, rho, lmax, hot):
    """Scaled (Je_par, Jm_par, Je_perp, Jm_perp) for l = 1..lmax."""
    lo = DiagTables(zeta - rho, lmax + 1, conjugated=hot)
    hi = DiagTables(zeta + rho, lmax + 1, conjugated=hot)
    gm, gp, g2c = _weight_coeffs(zeta, rho)

    def d_diag(l, n):
        return sc.ssub(hi.diag(l, n), lo.diag(l, n))

    def d_off(l, n):
        return sc.ssub(hi.offdiag(l, n), lo.offdiag(l, n))

    out = []
    zero = sc.sfrom(0.0)
    for l in range(1, lmax + 1):
        def comb(coeffs, pieces):
            acc = zero
            for c, piece in zip(coeffs, pieces):
                acc = sc.sadd(acc, sc.sscale(piece, c))
            return acc

        dD_l = {n: d_diag(l, n) for n in (3, 1, 0, -1, -2, -3, -5)}
        dD_l1 = {n: d_diag(l + 1, n) for n in (1, -1, -2, -3, -5)}
        dO = {n: d_off(l, n) for n in (2, 0, -1, -2, -4)}

        jm_par = comb(gm, [dD_l[-(p + 1)] for p in _POWERS])
        jm_perp = comb(gp, [dD_l[-(p + 1)] for p in _POWERS])

        def hbar_part(coeffs):
            acc = zero
            for c, p in zip(coeffs, _POWERS):
                piece = sc.sscale(dD_l[1 - p], float((l + 1) ** 2))
                piece = sc.sadd(piece, sc.sscale(dO[-p], -2.0 * (l + 1)))
                piece = sc.sadd(piece, dD_l1[-(p + 1)])
                acc = sc.sadd(acc, sc.sscale(piece, c))
            return acc

        je_par = sc.sadd(hbar_part(gm),
                         sc.sscale(comb(g2c, [dD_l[1 - p] for p in _POWERS]),
                                   2.0 * l * (l + 1)))
        je_perp = sc.sadd(hbar_part(gp),
                          sc.sscale(comb(gm, [dD_l[1 - p] for p in _POWERS]),
                                    2.0 * l * (l + 1)))
        out.append((je_par, jm_par, je_perp, jm_perp))
    return out


# ---------------------------------------------------------------------------
# quadrature path
# ---------------------------------------------------------------------------

_GL15 = leggauss(15)
_GL30 = leggauss(30)


def _adaptive_quad_vec(f, a, b, epsabs=0.0, epsrel=1e-11, max_intervals=2000):
    """Adaptive bisection with an embedded 15/30-node Gauss pair on a
    vector-valued integrand f(x) -> (ncomp, nx).

    For oscillatory integrands the value can sit far below int |f|; the
    stopping rule therefore also accepts the float64 floor ~eps * int |f|.
    """

    def eval_segment(lo_, hi_):
        mid, half = 0.5 * (lo_ + hi_), 0.5 * (hi_ - lo_)
        fx = f(mid + half * _GL30[0])
        f30 = fx @ _GL30[1] * half
        f15 = f(mid + half * _GL15[0]) @ _GL15[1] * half
        mag = np.abs(fx) @ _GL30[1] * half
        return f30, np.abs(f30 - f15), mag

    segs = []
    val, err, mag = eval_segment(a, b)
    segs.append([float(np.max(err)), a, b, val, err, mag])
    total_err = err
    for _ in range(max_intervals):
        total = np.sum([s[3] for s in segs], axis=0)
        total_err = np.sum([s[4] for s in segs], axis=0)
        total_mag = np.sum([s[5] for s in segs], axis=0)
        bound = np.maximum(np.maximum(epsabs, epsrel * np.abs(total)),
                           100 * np.finfo(float).eps * total_mag)
        if np.all(total_err <= bound):
            return total
        segs.sort(key=lambda s: s[0])
        worst = segs.pop()
        mid = 0.5 * (worst[1] + worst[2])
        for lo_, hi_ in ((worst[1], mid), (mid, worst[2])):
            v, e, m = eval_segment(lo_, hi_)
            segs.append([float(np.max(e)), lo_, hi_, v, e, m])
    raise ConvergenceError(
        f"quadrature did not converge within {max_intervals} intervals "
        f"(err {float(np.max(total_err)):.2e})")


def _kernel(x, l, zeta, rho, hot):
    """Integrands of the four chord integrals at t = zeta + x (stable form)."""
    t = zeta + x
    h = spherical_jn(l, t) + 1j * spherical_yn(l, t)
    h1 = spherical_jn(l + 1, t) + 1j * spherical_yn(l + 1, t)
    dth = (l + 1) * h - t * h1
    if hot:
        H = (h * h.conjugate()).real
        Hb = (dth * dth.conjugate()).real
    else:
        H = h * h
        Hb = dth * dth
    s = (rho - x) * (rho + x) / (2.0 * zeta)
    gm = s ** 2 / t - s ** 3 / (3.0 * t ** 2)
    gp = 2.0 * s - gm
    g2v = s - gm
    w = l * (l + 1)
    return np.stack([
        (gm * Hb + 2.0 * w * g2v * H) / t,
        t * gm * H,
        (gp * Hb + 2.0 * w * gm * H) / t,
        t * gp * H,
    ])


def _quad_J(l, zeta, rho, hot, epsabs=1e-11, epsrel=1e-11):
    vals = _adaptive_quad_vec(lambda x: _kernel(x, l, zeta, rho, hot),
                              -rho, rho, epsabs, epsrel)
    return tuple(vals)


def _log2_h_abs(l, x):
    """Estimate of log2 |h_l(x)| (decaying-regime double-factorial form)."""
    if l <= x:
        return -math.log2(max(x, 1e-12))
    log_fact = (gammaln(2 * l + 1) - l * math.log(2.0) - gammaln(l + 1))
    return (log_fact - (l + 1) * math.log(x)) / math.log(2.0)


def quadrature_feasible(lmax, zeta, rho):
    """True if the largest integrand value fits comfortably in float64."""
    return 2.0 * _log2_h_abs(lmax + 1, zeta - rho) < 950


def _resolve_method(method, lmax, zeta, rho):
    if method == "auto":
        return "quadrature" if quadrature_feasible(lmax, zeta, rho) else "closed"
    if method not in ("closed", "quadrature"):
        raise ValueError("method must be 'closed', 'quadrature' or 'auto'")
    return method


def J_cold(l, zeta, rho, method="auto"):
    """Cold chord integrals for one order; closed-form or quadrature path."""
    return _J_one(l, zeta, rho, hot=False, method=method)


def J_hot(l, zeta, rho, method="auto"):
    """Thermal chord integrals (modulus-squared kernels; real values)."""
    return _J_one(l, zeta, rho, hot=True, method=method)


def _J_one(l, zeta, rho, hot, method):
    if zeta <= rho:
        raise ValueError("need zeta > rho")
    method = _resolve_method(method, l, zeta, rho)
    if method == "quadrature":
        je_par, jm_par, je_perp, jm_perp = _quad_J(l, zeta, rho, hot)
    else:
        vals = _closed_J_all(zeta, rho, l, hot)[l - 1]
        je_par, jm_par, je_perp, jm_perp = (sc.sto(v) for v in vals)
    if hot:
        je_par, jm_par, je_perp, jm_perp = (
            v.real if isinstance(v, complex) else float(v)
            for v in (je_par, jm_par, je_perp, jm_perp))
    return JIntegralSet(l, zeta, rho, je_par, jm_par, je_perp, jm_perp,
                        "hot" if hot else "cold")


# ---------------------------------------------------------------------------
# correction functions
# ---------------------------------------------------------------------------

def F_cold_int(spec, zeta, lmax, method="auto", table=None):
    """Cold correction functions (F_c_par, F_c_perp) via the chord integrals."""
    return _F_int(spec, zeta, lmax, hot=False, method=method, table=table)


def F_hot_int(spec, zeta, lmax, method="auto", table=None):
    """Thermal correction functions (F_d_par, F_d_perp)."""
    return _F_int(spec, zeta, lmax, hot=True, method=method, table=table)


def _F_int(spec, zeta, lmax, hot, method, table):
    q, rho = spec.sphere.q, spec.rho
    if zeta <= rho + q:
        raise ValueError("need zeta > rho + q (atom outside the aggregate)")
    if table is None or table.l_max < lmax:
        table = build_multipole_table(spec.sphere, lmax)
    method = _resolve_method(method, lmax, zeta, rho)

    if method == "closed":
        js = _closed_J_all(zeta, rho, lmax, hot)
    else:
        js = [tuple(sc.sfrom(v) for v in _quad_J(l, zeta, rho, hot))
              for l in range(1, lmax + 1)]

    par_terms, perp_terms = [], []
    for l in range(1, lmax + 1):
        je_par, jm_par, je_perp, jm_perp = js[l - 1]
        w = float(l * (l + 1))
        if hot:
            ce = (float(table.scaled_Ce[0][l]), int(table.scaled_Ce[1][l]))
            cm = (float(table.scaled_Cm[0][l]), int(table.scaled_Cm[1][l]))
            par = sc.sadd(sc.smul(ce, sc.sreal(je_par)),
                          sc.smul(cm, sc.sreal(jm_par)))
            perp = sc.sadd(sc.smul(ce, sc.sreal(je_perp)),
                           sc.smul(cm, sc.sreal(jm_perp)))
            par_terms.append(w * sc.sto(par))
            perp_terms.append(w * sc.sto(perp))
        else:
            rot = (-1j) ** (l + 1)
            be = (complex(table.scaled_Be[0][l]) * rot, int(table.scaled_Be[1][l]))
            bm = (complex(table.scaled_Bm[0][l]) * rot, int(table.scaled_Bm[1][l]))
            par = sc.sadd(sc.smul(be, je_par), sc.smul(bm, jm_par))
            perp = sc.sadd(sc.smul(be, je_perp), sc.smul(bm, jm_perp))
            par_terms.append(w * sc.sto(par).real)
            perp_terms.append(w * sc.sto(perp).real)
    sign = 1.0 if hot else -1.0
    f_par = sign * 9.0 / (8.0 * q ** 3) * math.fsum(par_terms)
    f_perp = sign * 9.0 / (16.0 * q ** 3) * math.fsum(perp_terms)
    return f_par, f_perp


# ---------------------------------------------------------------------------
# halfspace limit
# ---------------------------------------------------------------------------

def halfspace_J(l, zeta_prime, kind="cold"):
    """Chord integrals in the infinite-domain limit, as a function of the
    scaled surface distance zeta_prime.

    The limit weights are g1 -> t - zeta', g2 -> t/3 - zeta'^3/(3 t^2) and
    the upper limit is improper.  For cold scatterers the oscillatory tail
    is Abel-summable and every antiderivative vanishes there, so the value
    is minus the antiderivative combination at zeta'.  For hot scatterers
    the integrands tend to a positive constant (each shell of thermal
    emitters contributes undamped in the single-scattering model), so the
    limit diverges and HalfspaceDivergenceError is raised.
    """
    zp = float(zeta_prime)
    if zp <= 0:
        raise ValueError("zeta_prime must be positive")
    if kind == "hot":
        raise HalfspaceDivergenceError(
            "thermal halfspace integrals diverge linearly in the domain "
            "radius: the integrand tends to a positive constant")
    if kind != "cold":
        raise ValueError("kind must be 'cold' or 'hot'")
    tab = DiagTables(zp, l + 1, conjugated=False)
    # (1/t)(g1-g2) = 2/3 - zp/t + zp^3/(3t^3); (1/t)(g1+g2) = 4/3 - zp/t
    # - zp^3/(3t^3); (1/t) g2 = 1/3 - zp^3/(3t^3); powers P = (0, -1, -3)
    powers = (0, -1, -3)
    gm = (2.0 / 3.0, -zp, zp ** 3 / 3.0)
    gp = (4.0 / 3.0, -zp, -zp ** 3 / 3.0)
    g2c = (1.0 / 3.0, 0.0, -zp ** 3 / 3.0)

    def comb_e(coeffs):
        acc = sc.sfrom(0.0)
        for c, p in zip(coeffs, powers):
            piece = sc.sscale(tab.diag(l, -p), float((l + 1) ** 2))
            piece = sc.sadd(piece, sc.sscale(tab.offdiag(l, -(p + 1)), -2.0 * (l + 1)))
            piece = sc.sadd(piece, tab.diag(l + 1, -(p + 2)))
            acc = sc.sadd(acc, sc.sscale(piece, c))
        return acc

    def comb_m(coeffs):
        acc = sc.sfrom(0.0)
        for c, p in zip(coeffs, powers):
            acc = sc.sadd(acc, sc.sscale(tab.diag(l, -(p + 2)), c))
        return acc

    def comb_h(coeffs):
        acc = sc.sfrom(0.0)
        for c, p in zip(coeffs, powers):
            acc = sc.sadd(acc, sc.sscale(tab.diag(l, -p), c))
        return acc

    je_par = -(sc.sto(comb_e(gm)) + 2.0 * l * (l + 1) * sc.sto(comb_h(g2c)))
    jm_par = -sc.sto(comb_m(gm))
    je_perp = -(sc.sto(comb_e(gp)) + 2.0 * l * (l + 1) * sc.sto(comb_h(gm)))
    jm_perp = -sc.sto(comb_m(gp))
    return JIntegralSet(l, math.inf, math.inf, je_par, jm_par, je_perp,
                        jm_perp, "cold")
