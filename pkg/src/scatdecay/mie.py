"""Multipole amplitudes of a single absorptive dielectric sphere.

The electric/magnetic scattering amplitudes B^p_l, the transmission-type
amplitudes A^p_l sharing their denominators, the non-negative absorption
coefficients C^p_l, the internal radial integrals over |j_l|^2 and the
Wronskian identities tying them together.

All lengths are in units with wavenumber k = 1: a sphere enters through its
dimensionless radius q = ka only, and radial integrals are returned with the
a^3 volume scale factored out (integration variable runs over [0, 1]).
Amplitudes at high order l underflow float64 (|B_l| ~ q^{2l+1} / l^{2l+2});
the table construction therefore also keeps scaled (mantissa, exponent)
copies used by the correction-function assemblies.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _scaled as sc
from .errors import DegenerateDenominatorError, OrderOverflowError
from . import specfun
from .specfun import sph_jn_scaled, sph_h1n_scaled


@dataclass(frozen=True)
class SphereSpec:
    """One scatterer: dimensionless radius q = ka, complex dielectric eps."""
    q: float
    eps: complex

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("sphere radius q must be positive")
        if self.eps.imag < 0:
            raise ValueError("passivity requires Im eps >= 0")

    @property
    def sqrt_eps(self):
        """Principal branch; Im sqrt(eps) >= 0 for passive media (decaying
        wave inside the absorber)."""
        return cmath.sqrt(complex(self.eps))


@dataclass
class MultipoleTable:
    """Amplitudes B^p_l and absorption coefficients C^p_l for l = 1..l_max.

    Index 0 of every array is unused padding.  Plain-float entries underflow
    to zero at high order; the scaled arrays keep full range and are what the
    correction-function sums consume.  Immutable after construction.
    """
    spec: SphereSpec
    l_max: int
    Be: np.ndarray
    Bm: np.ndarray
    Ce: np.ndarray
    Cm: np.ndarray
    scaled_Be: tuple = field(repr=False, default=None)
    scaled_Bm: tuple = field(repr=False, default=None)
    scaled_Ce: tuple = field(repr=False, default=None)
    scaled_Cm: tuple = field(repr=False, default=None)


def _scaled_amplitude_parts(spec, l_max):
    """Scaled N, D building blocks for all orders 1..l_max."""
    q = spec.q
    qp = spec.sqrt_eps * q
    jq = sph_jn_scaled(l_max + 1, q)
    jqp = sph_jn_scaled(l_max + 1, qp)
    hq = sph_h1n_scaled(l_max + 1, q)
    hq = (hq[0][:, 0], hq[1][:, 0])
    jq = (jq[0], jq[1])

    def riccati(fm, fe, arg):
        # (l+1) f_l(arg) - arg * f_{l+1}(arg), orders 0..l_max
        ls = np.arange(l_max + 1)
        em = np.maximum(fe[:-1], fe[1:])
        m = ((ls + 1) * sc.ldexp_c(fm[:-1], fe[:-1] - em)
             - arg * sc.ldexp_c(fm[1:], fe[1:] - em))
        return sc.normalize(m, em)

    f_q = riccati(jq[0], jq[1], q)
    f_qp = riccati(jqp[0], jqp[1], qp)
    fh_q = riccati(hq[0], hq[1], q)
    jq_l = (jq[0][:-1], jq[1][:-1])
    jqp_l = (jqp[0][:-1], jqp[1][:-1])
    hq_l = (hq[0][:-1], hq[1][:-1])
    return jq_l, jqp_l, hq_l, f_q, f_qp, fh_q


def build_multipole_table(spec, l_max):
    """Compute all amplitudes and absorption coefficients up to l_max."""
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    if l_max > specfun.MAX_ORDER:
        raise OrderOverflowError(
            f"l_max {l_max} exceeds maximum {specfun.MAX_ORDER}")
    eps = complex(spec.eps)
    jq, jqp, hq, f_q, f_qp, fh_q = _scaled_amplitude_parts(spec, l_max)

    Ne = sc.add(sc.scale(sc.mul(f_q, jqp), eps), sc.scale(sc.mul(jq, f_qp), -1.0))
    Nm = sc.add(sc.mul(f_q, jqp), sc.scale(sc.mul(jq, f_qp), -1.0))
    De = sc.add(sc.scale(sc.mul(fh_q, jqp), eps), sc.scale(sc.mul(hq, f_qp), -1.0))
    Dm = sc.add(sc.mul(fh_q, jqp), sc.scale(sc.mul(hq, f_qp), -1.0))

    ls = np.arange(l_max + 1, dtype=float)
    ls[0] = 1.0  # padding slot, never read
    pref = (1j ** (np.arange(l_max + 1) + 1)) * (2 * ls + 1) / (ls * (ls + 1))
    sBe = sc.scale(sc.div(Ne, De), pref)
    sBm = sc.scale(sc.div(Nm, Dm), pref)

    def coeff(sB):
        phase = (-1j) ** (np.arange(l_max + 1) + 1)
        rot = sc.real(sc.scale(sB, phase))
        b2 = sc.scale(sc.abs2(sB), ls * (ls + 1) / (2 * ls + 1))
        return sc.add(rot, sc.scale(b2, -1.0))

    sCe, sCm = coeff(sBe), coeff(sBm)

    def plain(a):
        out = sc.to_float(a[0], a[1])
        out[0] = 0.0
        return out

    table = MultipoleTable(
        spec=spec, l_max=l_max,
        Be=plain(sBe), Bm=plain(sBm), Ce=plain(sCe).real, Cm=plain(sCm).real,
        scaled_Be=sBe, scaled_Bm=sBm, scaled_Ce=sCe, scaled_Cm=sCm)
    return table


def amplitude_B(spec, l, p):
    """Scattering amplitude B^p_l of the sphere, p in {'electric','magnetic'}.

    Vanishes identically for eps = 1 (vacuum sphere).  Raises
    DegenerateDenominatorError if the resonance denominator underflows.
    """
    _check_lp(l, p)
    jq, jqp, hq, f_q, f_qp, fh_q = _scaled_amplitude_parts(spec, l)
    eps = complex(spec.eps) if p == "electric" else 1.0
    num = sc.add(sc.scale(sc.mul(f_q, jqp), eps),
                 sc.scale(sc.mul(jq, f_qp), -1.0))
    den = sc.add(sc.scale(sc.mul(fh_q, jqp), eps),
                 sc.scale(sc.mul(hq, f_qp), -1.0))
    if den[0][l] == 0:
        raise DegenerateDenominatorError(
            f"D^{p[0]}_{l} underflowed: resonance pole hit exactly")
    pref = (1j ** (l + 1)) * (2 * l + 1) / (l * (l + 1))
    val = sc.div((num[0][l], num[1][l]), (den[0][l], den[1][l]))
    return complex(sc.to_float(val[0] * pref, val[1]))


def amplitude_A(spec, l, p):
    """Transmission-type amplitude A^p_l with numerator sqrt(eps) (electric)
    or 1 (magnetic) over the same denominator as B^p_l."""
    _check_lp(l, p)
    _, jqp, hq, _, f_qp, fh_q = _scaled_amplitude_parts(spec, l)
    eps = complex(spec.eps) if p == "electric" else 1.0
    den = sc.add(sc.scale(sc.mul(fh_q, jqp), eps),
                 sc.scale(sc.mul(hq, f_qp), -1.0))
    if den[0][l] == 0:
        raise DegenerateDenominatorError(
            f"D^{p[0]}_{l} underflowed: resonance pole hit exactly")
    c_p = spec.sqrt_eps if p == "electric" else 1.0
    pref = (1j ** (l + 1)) * (2 * l + 1) / (l * (l + 1)) * c_p
    val = sc.snorm(pref / complex(den[0][l]), -int(den[1][l]))
    return complex(sc.sto(val))


def coeff_C(spec, l, p):
    """Absorption coefficient C^p_l = Re[(-i)^{l+1} B^p_l]
    - l(l+1)/(2l+1) |B^p_l|^2; non-negative for passive spheres."""
    b = amplitude_B(spec, l, p)
    rot = ((-1j) ** (l + 1)) * b
    return rot.real - l * (l + 1) / (2 * l + 1) * abs(b) ** 2


def _check_lp(l, p):
    if l < 1:
        raise ValueError("multipole order l must be >= 1")
    if l > specfun.MAX_ORDER:
        raise OrderOverflowError(f"order {l} exceeds maximum {specfun.MAX_ORDER}")
    if p not in ("electric", "magnetic"):
        raise ValueError("polarization must be 'electric' or 'magnetic'")


def radial_integral_Ieps(spec, l):
    """Radial integral of r^2 |j_l(sqrt(eps) q r)|^2 over the unit ball,
    i.e. the internal-field normalization integral per unit sphere volume.

    Uses the closed form 2 Re[k'/(k'^2 - k'*^2) j_{l+1}(k') j_l(k'*)] with
    k' = sqrt(eps) q; for (near-)lossless spheres that form is 0/0 and a
    quadrature fallback is used instead.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    qp = spec.sqrt_eps * spec.q
    if spec.eps.imag >= 1e-14:
        m, e = sph_jn_scaled(l + 1, qp)
        j_l_conj = complex(sc.to_float(m[l], e[l])).conjugate()
        j_lp1 = complex(sc.to_float(m[l + 1], e[l + 1]))
        denom = qp * qp - (qp.conjugate()) ** 2
        return 2.0 * (qp / denom * j_lp1 * j_l_conj).real
    # lossless: plain quadrature of the non-negative integrand
    from numpy.polynomial.legendre import leggauss
    x, w = leggauss(80)
    r = 0.5 * (x + 1.0)
    m, e = sph_jn_scaled(l, qp * r)
    jl = sc.to_float(m[l], e[l])
    return float(0.5 * np.sum(w * r ** 2 * np.abs(jl) ** 2))


def verify_wronskian_identities(spec, l):
    """Both sides of the two amplitude/absorption identities, dimensionless.

    Returns (lhs_m, rhs_m, lhs_e, rhs_e):
        lhs_m = Im(eps) q I_l |A^m_l|^2,
        rhs_m = (2l+1)/(l(l+1)) C^m_l,
        lhs_e = Im(eps) q [(l+1) I_{l-1} + l I_{l+1}] |A^e_l|^2,
        rhs_e = (2l+1)^2/(l(l+1)) C^e_l.
    """
    if spec.eps.imag <= 0:
        raise ValueError("identities require Im eps > 0")
    q, im_eps = spec.q, spec.eps.imag
    i_m1 = radial_integral_Ieps(spec, l - 1)
    i_0 = radial_integral_Ieps(spec, l)
    i_p1 = radial_integral_Ieps(spec, l + 1)
    am = amplitude_A(spec, l, "magnetic")
    ae = amplitude_A(spec, l, "electric")
    lhs_m = im_eps * q * i_0 * abs(am) ** 2
    rhs_m = (2 * l + 1) / (l * (l + 1)) * coeff_C(spec, l, "magnetic")
    lhs_e = im_eps * q * ((l + 1) * i_m1 + l * i_p1) * abs(ae) ** 2
    rhs_e = (2 * l + 1) ** 2 / (l * (l + 1)) * coeff_C(spec, l, "electric")
    return lhs_m, rhs_m, lhs_e, rhs_e


def large_l_amplitude_asymptote(spec, l):
    """High-order asymptote of Re[(-i)^{l+1} B^e_l]:
    [Im eps/|1+eps|^2] e^{2l} q^{2l+1} / (2^{2l} l^{2l+2})."""
    if l < 1:
        raise ValueError("l must be >= 1")
    pref = spec.eps.imag / abs(1.0 + spec.eps) ** 2
    if pref == 0.0:
        return 0.0
    log_val = (math.log(pref) + 2.0 * l + (2 * l + 1) * math.log(spec.q)
               - 2.0 * l * math.log(2.0) - (2 * l + 2) * math.log(l))
    return math.exp(log_val) if log_val > -745 else 0.0


def auto_lmax(spec, zeta_max, tol):
    """Smallest safe multipole cutoff for sums evaluated out to zeta_max.

    Combines the Hankel turning-point floor zeta + 8 zeta^(1/3) + 10 with the
    order at which the estimated amplitude tail (high-order amplitude
    asymptote times a Hankel growth bound) drops below tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    base = math.floor(zeta_max + 8.0 * zeta_max ** (1.0 / 3.0) + 10.0)
    eps = complex(spec.eps)
    pref = (abs(eps.imag) + abs(eps - 1.0)) / abs(1.0 + eps) ** 2
    x = max(zeta_max, 2.0 * spec.q)
    log_tol = math.log(tol)
    l_tail = 2
    while l_tail < specfun.MAX_ORDER:
        log_term = (math.log(2.0 * pref * (1.0 + 1.0 / l_tail))
                    + (2 * l_tail + 1) * (math.log(spec.q) - math.log(x)))
        if log_term < log_tol:
            break
        l_tail += 1
    result = max(base, l_tail)
    if result > specfun.MAX_ORDER:
        raise OrderOverflowError(
            f"required l_max {result} exceeds cap {specfun.MAX_ORDER}")
    return result
