"""Special functions: spherical Bessel/Hankel functions, sine/cosine and
exponential integrals, Pochhammer symbols and the Wigner 3j family with lower
row (1, -1, 0).

Spherical Bessel functions j_l are computed by downward (Miller) recurrence
normalized against the closed-form j_0 (or j_1 where j_0 is near a zero),
since upward recurrence is unstable for j once l exceeds |z|.  Spherical
Neumann functions y_l use stable upward recurrence.  Both are available in a
scaled (mantissa, exponent) representation, because orders up to several
hundred at small arguments leave the float64 range by wide margins.

All functions are pure; the log-factorial cache is filled on first use and
only ever grows.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import sici

from . import _scaled as sc
from .errors import OrderOverflowError, PochhammerPoleError

#: Hard cap on multipole orders accepted by the public operations.
MAX_ORDER = 500

#: Internal recurrence cap (observation-index sums legitimately exceed the
#: public order cap near the domain surface).
_RECURRENCE_MAX = 4096


# ---------------------------------------------------------------------------
# spherical Bessel / Hankel functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HankelPair:
    """Outgoing spherical Hankel functions h_l and h_{l+1} at a real argument.

    Carrying the pair makes the Riccati derivative d[x h_l(x)]/dx
    = (l+1) h_l(x) - x h_{l+1}(x) available without recomputation.
    """
    h_l: complex
    h_lplus1: complex
    order: int
    argument: float


def _check_order(l, cap=MAX_ORDER):
    if l > cap:
        raise OrderOverflowError(f"order {l} exceeds maximum {cap}")
    if l < 0:
        raise ValueError(f"order must be non-negative, got {l}")


def _miller_start(lmax, absz):
    # Start order: requested offset plus a turning-point margin.  The
    # |z| + 8|z|^(1/3) floor keeps the seed deep in the decaying regime even
    # for lmax << |z|, where the plain offset would start at the turning
    # point and lose all accuracy.
    base = lmax + max(20, math.ceil(absz))
    floor = math.ceil(absz + 8.0 * absz ** (1.0 / 3.0) + 12.0)
    return max(base, floor)


def sph_jn_scaled(lmax, z):
    """All orders j_0..j_lmax at argument z (real or complex), scaled.

    Returns (mant, expo) arrays of shape (lmax+1,) + shape(z).
    """
    _check_order(lmax, cap=_RECURRENCE_MAX)
    z = np.asarray(z, dtype=complex)
    scalar_in = z.ndim == 0
    z = np.atleast_1d(z)
    absz = float(np.max(np.abs(z)))
    if absz == 0.0:
        m = np.zeros((lmax + 1,) + z.shape, dtype=complex)
        m[0] = 1.0
        return m, np.zeros(m.shape, dtype=np.int64)

    nstart = _miller_start(lmax, absz)
    m = np.zeros((nstart + 2,) + z.shape, dtype=complex)
    e = np.zeros((nstart + 2,) + z.shape, dtype=np.int64)
    m[nstart] = 1.0
    inv_z = 1.0 / z
    for k in range(nstart, 0, -1):
        raw = (2 * k + 1) * inv_z * m[k] - sc.ldexp_c(m[k + 1], e[k + 1] - e[k])
        m[k - 1], e[k - 1] = sc.normalize(raw, e[k])

    # normalize against whichever of j_0, j_1 is better conditioned
    with np.errstate(invalid="ignore"):
        j0 = np.where(z == 0, 1.0, np.sin(z) / np.where(z == 0, 1.0, z))
        j1 = np.where(z == 0, 0.0, j0 / np.where(z == 0, 1.0, z)
                      - np.cos(z) / np.where(z == 0, 1.0, z))
    use0 = np.abs(j0) >= np.abs(j1)
    ref = sc.from_float(np.where(use0, j0, j1))
    got = sc.normalize(np.where(use0, m[0], m[1]), np.where(use0, e[0], e[1]))
    ratio = sc.div(ref, got)
    m, e = sc.normalize(m[: lmax + 1] * ratio[0], e[: lmax + 1] + ratio[1])
    if scalar_in:
        m, e = m[:, 0], e[:, 0]
    return m, e


def sph_yn_scaled(lmax, x):
    """All orders y_0..y_lmax at real argument x > 0, scaled (upward)."""
    _check_order(lmax, cap=_RECURRENCE_MAX)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("spherical y_l requires a positive real argument")
    m = np.zeros((max(lmax, 1) + 1,) + x.shape)
    e = np.zeros(m.shape, dtype=np.int64)
    cosx, sinx = np.cos(x), np.sin(x)
    m[0], e[0] = sc.normalize(-cosx / x, e[0])
    m[1], e[1] = sc.normalize(-cosx / x ** 2 - sinx / x, e[1])
    inv_x = 1.0 / x
    for k in range(1, lmax):
        raw = (2 * k + 1) * inv_x * m[k] - sc.ldexp_c(m[k - 1], e[k - 1] - e[k])
        m[k + 1], e[k + 1] = sc.normalize(raw, e[k])
    return m[: lmax + 1], e[: lmax + 1]


def sph_h1n_scaled(lmax, x):
    """All orders h_0..h_lmax of the outgoing Hankel function, scaled."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    jm, je = sph_jn_scaled(lmax, x)
    ym, ye = sph_yn_scaled(lmax, x)
    jm = jm.real  # real argument
    ee = np.maximum(je, ye)
    m = sc.ldexp_c(jm, je - ee) + 1j * sc.ldexp_c(ym, ye - ee)
    return sc.normalize(m, ee)


def sph_jn(lmax, z):
    """Plain-float j_0..j_lmax; tiny orders underflow to 0."""
    m, e = sph_jn_scaled(lmax, z)
    out = sc.to_float(m, e)
    return out.real if not np.iscomplexobj(np.asarray(z)) else out


def sph_h1n(lmax, x):
    """Plain-complex h_0..h_lmax; raises OverflowError if out of range."""
    m, e = sph_h1n_scaled(lmax, x)
    out = sc.to_float(m, e)
    if not np.all(np.isfinite(out)):
        raise OverflowError(
            f"h_l overflows float64 for lmax={lmax}; use sph_h1n_scaled")
    return out


def sph_bessel_j(l, z):
    """Spherical Bessel function j_l(z) for real or complex z."""
    _check_order(l)
    z = complex(z)
    if z == 0:
        return 1.0 + 0.0j if l == 0 else 0.0 + 0.0j
    m, e = sph_jn_scaled(l, z)
    return complex(sc.to_float(m[-1], e[-1]))


def sph_hankel1(l, x):
    """Outgoing spherical Hankel function pair (h_l, h_{l+1}) at real x > 0."""
    _check_order(l)
    x = float(x)
    if x <= 0:
        raise ValueError("sph_hankel1 requires x > 0")
    m, e = sph_h1n_scaled(l + 1, x)
    vals = sc.to_float(m, e)
    return HankelPair(complex(vals[l, 0]), complex(vals[l + 1, 0]), l, x)


def riccati_h_derivative(l, x):
    """d[t h_l(t)]/dt at t = x, via (l+1) h_l(x) - x h_{l+1}(x)."""
    pair = sph_hankel1(l, x)
    return (l + 1) * pair.h_l - x * pair.h_lplus1


# ---------------------------------------------------------------------------
# sine, cosine and exponential integrals
# ---------------------------------------------------------------------------

def sin_cos_integrals(x):
    """Sine and cosine integrals (Si(x), Ci(x)) for x > 0."""
    x = float(x)
    if x <= 0:
        raise ValueError("sin_cos_integrals requires x > 0")
    si, ci = sici(x)
    return float(si), float(ci)


def exp_integral_E1_neg2iz(z):
    """E_1(-2iz) for real z > 0, via -Ci(2z) - i Si(2z) + i pi/2."""
    z = float(z)
    if z <= 0:
        raise ValueError("exp_integral_E1_neg2iz requires z > 0")
    si, ci = sici(2.0 * z)
    return complex(-ci, math.pi / 2.0 - si)


# ---------------------------------------------------------------------------
# Pochhammer symbols and Wigner 3j coefficients
# ---------------------------------------------------------------------------

def pochhammer(a, n):
    """Rising factorial (a)_n = a(a+1)...(a+n-1), with (a)_0 = 1.

    Negative n follows the reflection (a)_{-m} = 1 / [(a-1)(a-2)...(a-m)],
    so that e.g. (k+3/2)_{-1} = 1/(k+1/2).  Raises PochhammerPoleError when
    the extended form divides by zero.
    """
    a = float(a)
    n = int(n)
    if n >= 0:
        out = 1.0
        for i in range(n):
            out *= a + i
        return out
    out = 1.0
    for i in range(1, -n + 1):
        factor = a - i
        if factor == 0.0:
            raise PochhammerPoleError(f"({a})_{n} hits a pole at factor a-{i}")
        out /= factor
    return out


_logfact = np.zeros(1)


def _log_factorials(nmax):
    """Cached log-factorials up to nmax (grow-only)."""
    global _logfact
    if _logfact.size <= nmax:
        grown = np.zeros(max(nmax + 1, 2 * _logfact.size))
        grown[1:] = np.cumsum(np.log(np.arange(1, grown.size)))
        _logfact = grown
    return _logfact


def wigner3j_110(l, lp, lpp):
    """Wigner 3j symbol with upper row (l, lp, lpp) and lower row (1, -1, 0).

    Zero outside the triangle |lp - lpp| <= l <= lp + lpp or for l, lp < 1.
    Uses the Racah single-sum formula with log-factorials.
    """
    row = wigner3j_110_sq_row(l, lp, int(lpp), signed=True)
    return float(row[-1])


def wigner3j_110_sq_row(l, lp, lpp_max, signed=False):
    """Vector of 3j values over lpp = 0..lpp_max for fixed (l, lp).

    Returns the squared symbols unless ``signed`` is set.  The squared form
    is what enters the aggregate coefficients.
    """
    l, lp = int(l), int(lp)
    out = np.zeros(lpp_max + 1)
    if l < 1 or lp < 1:
        return out
    lo, hi = abs(l - lp), min(l + lp, lpp_max)
    if hi < lo:
        return out
    lf = _log_factorials(l + lp + hi + 2)
    for lpp in range(lo, hi + 1):
        log_delta = (lf[l + lp - lpp] + lf[l - lp + lpp] + lf[-l + lp + lpp]
                     - lf[l + lp + lpp + 1])
        log_sqrt = (lf[l + 1] + lf[l - 1] + lf[lp + 1] + lf[lp - 1]
                    + 2.0 * lf[lpp])
        t_lo = max(0, lp - lpp - 1, l - lpp - 1)
        t_hi = min(l + lp - lpp, l - 1, lp - 1)
        t = np.arange(t_lo, t_hi + 1)
        log_terms = -(lf[t] + lf[lpp - lp + t + 1] + lf[lpp - l + t + 1]
                      + lf[l + lp - lpp - t] + lf[l - t - 1] + lf[lp - t - 1])
        peak = np.max(log_terms)
        ssum = np.sum(np.where(t % 2 == 0, 1.0, -1.0) * np.exp(log_terms - peak))
        sign = 1.0 if (l - lp) % 2 == 0 else -1.0
        val = sign * ssum * math.exp(peak + 0.5 * (log_delta + log_sqrt))
        out[lpp] = val if signed else val * val
    return out


def parity_delta(kind, n):
    """1 if n has the requested parity ('even' or 'odd'), else 0."""
    if kind not in ("even", "odd"):
        raise ValueError("kind must be 'even' or 'odd'")
    even = (int(n) % 2) == 0
    return int(even if kind == "even" else not even)
