"""Scaled floating-point arithmetic for values far outside the float64 range.

A value is carried as a pair ``(m, e)`` meaning ``m * 2**e`` with an integer
exponent and a float or complex mantissa normalized so that the largest
component magnitude lies in ``[0.5, 1)``.  Spherical Bessel/Hankel functions
of order l at argument x grow like ``(2l-1)!!/x**(l+1)`` once ``l >> x``; near
the surface of the scattering domain (``x ~ 0.5``, ``l ~ 300``) squares of
such values reach ~1e1500, while the multipole amplitudes they multiply are
comparably tiny.  Both factors are kept in scaled form and only their product
is converted back to a plain float.

Two parallel APIs are provided: array functions operating on numpy arrays
(used for node batches and whole-order tables) and scalar helpers on plain
Python numbers (used in sequential recurrences, where they are faster).
"""

import math

import numpy as np

_EXP_CLIP = 3000  # beyond this, ldexp saturates to 0/inf anyway


# ---------------------------------------------------------------------------
# array API: a scaled array is a tuple (m, e) of equal-shape arrays
# ---------------------------------------------------------------------------

def ldexp_c(m, e):
    """ldexp for real or complex mantissas (numpy ldexp is real-only)."""
    e = np.clip(e, -_EXP_CLIP, _EXP_CLIP).astype(np.int64)
    with np.errstate(over="ignore", under="ignore"):
        if np.iscomplexobj(m):
            return np.ldexp(m.real, e) + 1j * np.ldexp(m.imag, e)
        return np.ldexp(m, e)


def normalize(m, e):
    """Renormalize mantissas into [0.5, 1); zero entries get exponent 0."""
    m = np.asarray(m)
    if np.iscomplexobj(m):
        a = np.maximum(np.abs(m.real), np.abs(m.imag))
    else:
        a = np.abs(m)
    e = np.asarray(e, dtype=np.int64)
    nonzero = (a > 0) & np.isfinite(a)
    _, k = np.frexp(np.where(nonzero, a, 1.0))
    m = ldexp_c(m, np.where(nonzero, -k, 0))
    e = np.where(nonzero, e + k, 0)
    return m, e


def from_float(x):
    x = np.asarray(x, dtype=complex if np.iscomplexobj(np.asarray(x)) else float)
    return normalize(x, np.zeros(x.shape, dtype=np.int64))


def to_float(m, e):
    """Collapse to plain floats; underflows to 0, overflows to inf."""
    return ldexp_c(m, e)


def mul(a, b):
    return normalize(a[0] * b[0], a[1] + b[1])


def div(a, b):
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.where(b[0] != 0, a[0] / np.where(b[0] != 0, b[0], 1.0), np.inf)
    return normalize(np.where(a[0] == 0, 0.0, m), a[1] - b[1])


def scale(a, c):
    """Multiply a scaled array by a plain float/complex array."""
    return normalize(a[0] * c, a[1])


def add(a, b):
    """Add two scaled arrays, aligning exponents to the larger one."""
    e = np.maximum(a[1], b[1])
    m = ldexp_c(a[0], a[1] - e) + ldexp_c(b[0], b[1] - e)
    return normalize(m, e)


def sum_along(a, axis=0):
    """Sum a scaled array along an axis (exponent-aligned to the max).

    Zero entries (whose exponent slot is meaningless) are excluded from the
    alignment so they cannot mask genuinely tiny terms.
    """
    m, e = a
    e_eff = np.where(m == 0, np.int64(-(2 ** 62)), e)
    emax = np.max(e_eff, axis=axis, keepdims=True)
    all_zero = emax == -(2 ** 62)
    emax = np.where(all_zero, 0, emax)
    total = np.sum(ldexp_c(m, e_eff - emax), axis=axis)
    return normalize(total, np.squeeze(emax, axis=axis))


def abs2(a):
    """|value|^2 as a scaled real array."""
    m, e = a
    return normalize((m * np.conj(m)).real, 2 * e)


def real(a):
    return normalize(np.real(a[0]), a[1])


def conj(a):
    return np.conj(a[0]), a[1]


# ---------------------------------------------------------------------------
# scalar API: (m, e) with m a python float/complex, e a python int
# ---------------------------------------------------------------------------

def snorm(m, e):
    a = max(abs(m.real), abs(m.imag)) if isinstance(m, complex) else abs(m)
    if a == 0.0 or not math.isfinite(a):
        return m, 0
    k = math.frexp(a)[1]
    if isinstance(m, complex):
        m = complex(math.ldexp(m.real, -k), math.ldexp(m.imag, -k))
    else:
        m = math.ldexp(m, -k)
    return m, e + k


def sfrom(x):
    return snorm(x, 0)


def sto(a):
    m, e = a
    e = max(-_EXP_CLIP, min(_EXP_CLIP, e))
    if isinstance(m, complex):
        return complex(math.ldexp(m.real, e), math.ldexp(m.imag, e))
    return math.ldexp(m, e)


def smul(a, b):
    return snorm(a[0] * b[0], a[1] + b[1])


def sdiv(a, b):
    if b[0] == 0:
        raise ZeroDivisionError("scaled division by zero")
    return snorm(a[0] / b[0], a[1] - b[1])


def sscale(a, c):
    return snorm(a[0] * c, a[1])


def sadd(a, b):
    if a[0] == 0:
        return b
    if b[0] == 0:
        return a
    if a[1] >= b[1]:
        hi, lo = a, b
    else:
        hi, lo = b, a
    shift = lo[1] - hi[1]
    if shift < -1074:
        return hi
    if isinstance(lo[0], complex):
        lom = complex(math.ldexp(lo[0].real, shift), math.ldexp(lo[0].imag, shift))
    else:
        lom = math.ldexp(lo[0], shift)
    return snorm(hi[0] + lom, hi[1])


def ssub(a, b):
    return sadd(a, (-b[0], b[1]))


def sabs2(a):
    m = a[0]
    return snorm((m * m.conjugate()).real if isinstance(m, complex) else m * m, 2 * a[1])


def sreal(a):
    return snorm(a[0].real if isinstance(a[0], complex) else a[0], a[1])
