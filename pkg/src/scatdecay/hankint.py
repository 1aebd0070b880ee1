"""Indefinite integrals of products of spherical Hankel functions, and the
sum-rule hierarchy used to put them in closed form.

Two families are covered, both with an algebraic prefactor u**(-n):

* the plain family  int^z du u^(-n) h_l1(u) h_l2(u)          ("cold"),
* the conjugated family with h_l2 replaced by its complex conjugate ("hot"),

for the diagonal case l1 = l2 and the off-diagonal case l2 = l1 + 1.  Both
satisfy the same three-term recursion in l,

    (2l+n+3) I_{l+1,l+1,n} = (2l-n+1) I_{l,l,n} - z^(1-n) [S_l + S_{l+1}],

with S_l the (conjugated) square of h_l, which is iterated upward from
closed-form initial conditions.  The plain family's anchors involve the
exponential integral E_1(-2iz) and e^{2iz}; the conjugated anchors are
elementary (rational plus log) because |h_l|^2 is a rational function.

Additive constants are fixed by the anchor antiderivatives, so that only
``definite`` differences are convention-free.  All table evaluation runs in
scaled (mantissa, exponent) arithmetic: h_l(z)^2 near the domain surface at
l ~ 300 is ~1e1500.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _scaled as sc
from .errors import RecursionTerminationError, UnsupportedExponentError
from .specfun import (exp_integral_E1_neg2iz, pochhammer, sin_cos_integrals,
                      sph_h1n_scaled, sph_jn)

DIAG_N = (3, 1, 0, -1, -2, -3, -5)
OFFDIAG_N = (-4, -2, -1, 0, 2)


@dataclass(frozen=True)
class AntiderivativeValue:
    """One antiderivative evaluation, tagged with its integrand indices."""
    l1: int
    l2: int
    n: int
    z: float
    value: complex
    conjugated: bool


def _check_z(z):
    z = float(z)
    if z <= 0:
        raise ValueError("argument z must be positive")
    return z


def _hrows_scaled(z, l_top):
    m, e = sph_h1n_scaled(l_top, z)
    return [(complex(m[k, 0]), int(e[k, 0])) for k in range(l_top + 1)]


def _hrows(z, l_top):
    rows = _hrows_scaled(z, l_top)
    out = [sc.sto(r) for r in rows]
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in out):
        raise OverflowError(
            f"h_l({z}) leaves float64 range at l <= {l_top}; "
            "use the scaled tables")
    return out


def _csum(terms):
    """Compensated complex sum."""
    return complex(math.fsum(t.real for t in terms),
                   math.fsum(t.imag for t in terms))


# ---------------------------------------------------------------------------
# scaled antiderivative tables (both families), iterated over l
# ---------------------------------------------------------------------------

class DiagTables:
    """All diagonal antiderivatives I_{l,l,n}(z) for l = 0..l_top and the
    supported n, in scaled arithmetic, plus off-diagonal access.

    conjugated=False gives the plain family, True the |h|^2 family (whose
    diagonal values are real).
    """

    def __init__(self, z, l_top, conjugated):
        self.z = _check_z(z)
        self.l_top = l_top = max(int(l_top), 2)
        self.conjugated = conjugated
        self.h = _hrows_scaled(z, l_top + 1)
        if conjugated:
            self.S = [sc.sabs2(hk) for hk in self.h]
            self.X = [sc.sreal(sc.smul(self.h[k], (self.h[k + 1][0].conjugate(),
                                                   self.h[k + 1][1])))
                      for k in range(l_top)]
        else:
            self.S = [sc.smul(hk, hk) for hk in self.h]
            self.X = [sc.smul(self.h[k], self.h[k + 1])
                      for k in range(l_top)]
        self._diag = {n: self._build(n) for n in DIAG_N}

    # -- initial conditions ------------------------------------------------

    def _anchors(self, n):
        """(l0, values for l = 0..l0) where iteration starts at l0."""
        z = self.z
        if self.conjugated:
            logz = math.log(z)
            table = {
                0: (0, [-1.0 / z]),
                1: (0, [-0.5 / z ** 2]),
                3: (0, [-0.25 / z ** 4]),
                -1: (0, [logz]),
                -2: (0, [z]),
                -3: (1, [0.5 * z ** 2, 0.5 * z ** 2 + logz]),
                -5: (2, [0.25 * z ** 4, 0.25 * z ** 4 + 0.5 * z ** 2,
                         0.25 * z ** 4 + 1.5 * z ** 2 + 9.0 * logz]),
            }
            l0, vals = table[n]
            return l0, [sc.sfrom(v) for v in vals]
        e1 = exp_integral_E1_neg2iz(z)
        e2 = cmath.exp(2j * z)
        h0sq = sc.sto(self.S[0])
        h1sq = sc.sto(self.S[1])
        h2sq = sc.sto(self.S[2])
        x01 = sc.sto(self.X[0])
        table = {
            0: (0, [2j * e1 + e2 / z]),
            1: (0, [e2 / (2 * z ** 2) + 1j * e2 / z - 2.0 * e1]),
            3: (0, [e2 / (4 * z ** 4) + 1j * e2 / (6 * z ** 3)
                    - e2 / (6 * z ** 2) - 1j * e2 / (3 * z) + (2.0 / 3.0) * e1]),
            -1: (0, [e1]),
            -2: (0, [0.5j * e2]),
            -3: (1, [0.25 * z ** 4 * (h0sq + h1sq),
                     e1 + (-0.5j * z + 1.25) * e2]),
            -5: (2, [(z ** 6 / 8) * h0sq + (z ** 2 - 3.0) / 8 * z ** 4 * h1sq
                     + (z ** 5 / 4) * x01,
                     (z ** 6 / 8) * (h1sq + h2sq),
                     9.0 * e1 + (0.5j * z ** 3 - 3.75 * z ** 2
                                 - 11.25j * z + 14.625) * e2]),
        }
        l0, vals = table[n]
        return l0, [sc.sfrom(v) for v in vals]

    def _build(self, n):
        z = self.z
        l0, anchors = self._anchors(n)
        vals = list(anchors) + [None] * (self.l_top + 1 - len(anchors))
        zpow = sc.sfrom(z ** (1 - n)) if 1 - n >= 0 else sc.sfrom(z ** (1.0 - n))
        for l in range(l0, self.l_top):
            drive = sc.smul(zpow, sc.sadd(self.S[l], self.S[l + 1]))
            num = sc.sadd(sc.sscale(vals[l], float(2 * l - n + 1)),
                          sc.sscale(drive, -1.0))
            vals[l + 1] = sc.sscale(num, 1.0 / (2 * l + n + 3))
        return vals

    # -- access --------------------------------------------------------------

    def diag(self, l, n):
        if n not in DIAG_N:
            raise UnsupportedExponentError(f"diagonal exponent n={n}")
        return self._diag[n][l]

    def offdiag(self, l, n):
        """I_{l,l+1,n} via the order-shift relation
        I_{l,l+1,n} = (2l-n)/2 I_{l,l,n+1} - z^(-n) S_l / 2.

        For the conjugated family this is the real part; the exact imaginary
        part i * int u^(-n-2) du is added by the public wrapper.
        """
        if n not in OFFDIAG_N:
            raise UnsupportedExponentError(f"off-diagonal exponent n={n}")
        first = sc.sscale(self.diag(l, n + 1), 0.5 * (2 * l - n))
        second = sc.sscale(self.S[l], -0.5 * self.z ** (-float(n)))
        return sc.sadd(first, second)


# ---------------------------------------------------------------------------
# public closed forms (plain family, printed expressions)
# ---------------------------------------------------------------------------

def _core_sum(h, l):
    """sum_{k=1}^{l} (2k+1)/(k(k+1)) h_k(z)^2, compensated."""
    return _csum([(2 * k + 1) / (k * (k + 1)) * h[k] ** 2
                  for k in range(1, l + 1)])


def I_diag(l, n, z):
    """Antiderivative of u**(-n) h_l(u)^2, evaluated from its closed form.

    Supported n: 3, 1, 0, -1, -2, -3, -5.  For n = 3 the generic closed form
    degenerates at l = 0, 1; those orders use exponential-integral anchors
    plus one recursion step.
    """
    z = _check_z(z)
    if n not in DIAG_N:
        raise UnsupportedExponentError(f"diagonal exponent n={n}")
    if l < 0:
        raise ValueError("order l must be >= 0")
    h = _hrows(z, max(l + 1, 2))
    e1 = exp_integral_E1_neg2iz(z)
    e2 = cmath.exp(2j * z)

    if n == 0:
        total = _csum([h[k] ** 2 for k in range(l + 1)])
        return (-2 * z * total + z * h[l] ** 2 + 2j * e1) / (2 * l + 1)
    if n == -2:
        return (0.5 * z ** 3 * (h[l] ** 2 + h[l + 1] ** 2)
                - 0.5 * (2 * l + 1) * z ** 2 * h[l] * h[l + 1])
    if n == 1:
        if l == 0:
            return e2 / (2 * z ** 2) + 1j * e2 / z - 2.0 * e1
        return ((z ** 2 / (2 * l * (l + 1)) + 1 / (2 * l)) * h[l] ** 2
                + z ** 2 / (2 * l * (l + 1)) * h[l + 1] ** 2
                - z / l * h[l] * h[l + 1])
    if n == 3:
        i003 = (e2 / (4 * z ** 4) + 1j * e2 / (6 * z ** 3) - e2 / (6 * z ** 2)
                - 1j * e2 / (3 * z) + (2.0 / 3.0) * e1)
        if l == 0:
            return i003
        if l == 1:
            return (-2.0 * i003 - (h[0] ** 2 + h[1] ** 2) / z ** 2) / 6.0
        p4 = (l - 1) * l * (l + 1) * (l + 2)
        return ((z ** 2 / (3 * p4) + 1 / (6 * (l - 1) * l)
                 + 1 / (2 * (l - 1) * z ** 2)) * h[l] ** 2
                + (z ** 2 / (3 * p4) + 1 / (6 * (l - 1) * (l + 2))) * h[l + 1] ** 2
                - (2 * z / (3 * (l - 1) * l * (l + 2))
                   + 1 / (3 * (l - 1) * z)) * h[l] * h[l + 1])
    core = _core_sum(h, l)
    if n == -1:
        return (-0.5 * z ** 2 * core + z ** 2 / (2 * (l + 1)) * h[l] ** 2
                + e1 + 0.5 * e2)
    if n == -3:
        return (-0.25 * l * (l + 1) * z ** 2 * core
                + 0.25 * z ** 4 * (h[l] ** 2 + h[l + 1] ** 2)
                - 0.5 * l * z ** 3 * h[l] * h[l + 1]
                + 0.5 * l * (l + 1) * e1 + 0.25 * l * (l + 1) * e2)
    # n == -5
    p4 = (l - 1) * l * (l + 1) * (l + 2)
    return (-(3.0 / 16.0) * p4 * z ** 2 * core
            + ((3.0 / 16.0) * l * (l - 1) + z ** 2 / 8) * z ** 4 * h[l] ** 2
            + ((3.0 / 16.0) * (l - 1) * (l + 2) + z ** 2 / 8) * z ** 4 * h[l + 1] ** 2
            - ((3.0 / 8.0) * l * (l + 2) + z ** 2 / 4) * (l - 1) * z ** 3
            * h[l] * h[l + 1]
            + (3.0 / 8.0) * p4 * e1 + (3.0 / 16.0) * p4 * e2)


def I_offdiag(l, n, z):
    """Antiderivative of u**(-n) h_l(u) h_{l+1}(u); supported n:
    -4, -2, -1, 0, 2."""
    z = _check_z(z)
    if n not in OFFDIAG_N:
        raise UnsupportedExponentError(f"off-diagonal exponent n={n}")
    h = _hrows(z, max(l, 1))
    return 0.5 * (2 * l - n) * I_diag(l, n + 1, z) - 0.5 * z ** (-n) * h[l] ** 2


def recursion_B2_step(l, n, z, I_ll):
    """One upward step of the diagonal recursion: I_{l+1,l+1,n} from I_{l,l,n}.

    Raises RecursionTerminationError at 2l+n+3 = 0, where the recursion
    terminates (this is what fixes the anchor order for odd n <= -3).
    """
    if 2 * l + n + 3 == 0:
        raise RecursionTerminationError(
            f"recursion terminates at l={l} for n={n}")
    z = _check_z(z)
    h = _hrows(z, l + 1)
    return ((2 * l - n + 1) * I_ll
            - z ** (1 - n) * (h[l] ** 2 + h[l + 1] ** 2)) / (2 * l + n + 3)


def Iprime_diag(l, n, z):
    """Antiderivative of u**(-n) |h_l(u)|^2 (real-valued).

    Same recursion structure as the plain family; anchors are elementary
    because |h_l|^2 is rational, so no exponential integral appears.
    """
    z = _check_z(z)
    if n not in DIAG_N:
        raise UnsupportedExponentError(f"diagonal exponent n={n}")
    tab = DiagTables(z, max(l, 2), conjugated=True)
    return float(sc.sto(tab.diag(l, n)).real)


def _offdiag_phase(n, z):
    """Exact imaginary part of the conjugated off-diagonal antiderivative:
    Im[h_l h*_{l+1}] = 1/u^2, so int u^(-n-2) du."""
    if n == -1:
        return math.log(z)
    return -z ** (-(n + 1.0)) / (n + 1.0)


def Iprime_offdiag(l, n, z):
    """Antiderivative of u**(-n) h_l(u) h_{l+1}(u)* (complex in general)."""
    z = _check_z(z)
    if n not in OFFDIAG_N:
        raise UnsupportedExponentError(f"off-diagonal exponent n={n}")
    tab = DiagTables(z, max(l, 2), conjugated=True)
    return complex(sc.sto(tab.offdiag(l, n))) + 1j * _offdiag_phase(n, z)


def definite(l1, l2, n, lower, upper, conjugated=False):
    """Definite integral over [lower, upper]; additive constants cancel."""
    lower, upper = _check_z(lower), _check_z(upper)
    if lower > upper:
        raise ValueError("need 0 < lower <= upper")
    if l2 - l1 == 0:
        f = Iprime_diag if conjugated else I_diag
        return f(l1, n, upper) - f(l1, n, lower)
    if l2 - l1 == 1:
        f = Iprime_offdiag if conjugated else I_offdiag
        return f(l1, n, upper) - f(l1, n, lower)
    raise ValueError("only l2 - l1 in {0, 1} is supported")


# ---------------------------------------------------------------------------
# sum rules for squares of spherical Hankel / Bessel functions
# ---------------------------------------------------------------------------

def _c2_brackets(l, p, z):
    a = math.fsum(
        pochhammer(p - k + 1, k)
        / (pochhammer(p - k + 0.5, k + 1) * pochhammer(l - p + k + 1.5, 2 * p - 2 * k + 1))
        * z ** (-2 * k) for k in range(p + 1))
    b = math.fsum(
        pochhammer(p - k + 1, k)
        / (pochhammer(p - k + 0.5, k + 1) * pochhammer(l - p + k + 0.5, 2 * p - 2 * k + 1))
        * z ** (-2 * k) for k in range(p + 1))
    c = math.fsum(
        pochhammer(p - k + 1, k)
        / (pochhammer(p - k + 0.5, k + 1) * pochhammer(l - p + k + 1.5, 2 * p - 2 * k))
        * z ** (-2 * k - 1) for k in range(p + 1))
    return a, b, c


def _c2_sides(l, p, z, h):
    lhs = _csum([(2 * k + 1) / pochhammer(k - p - 0.5, 2 * p + 3) * h[k] ** 2
                 for k in range(l + 1)])
    a, b, c = _c2_brackets(l, p, z)
    rhs_core = -0.5 * a * h[l] ** 2 - 0.5 * b * h[l + 1] ** 2 + c * h[l] * h[l + 1]
    return lhs, rhs_core


def _c4_rhs(l, p, z, h):
    a = math.fsum(pochhammer(p - k + 1, k) * pochhammer(l - p + k + 2, 2 * p - 2 * k)
                  / pochhammer(p - k + 0.5, k + 1) * z ** (2 * k + 2)
                  for k in range(p + 1))
    b = math.fsum(pochhammer(p - k + 1, k) * pochhammer(l - p + k + 1, 2 * p - 2 * k)
                  / pochhammer(p - k + 0.5, k + 1) * z ** (2 * k + 2)
                  for k in range(p + 1))
    c = math.fsum(pochhammer(p - k + 1, k) * pochhammer(l - p + k + 1, 2 * p - 2 * k + 1)
                  / pochhammer(p - k + 0.5, k + 1) * z ** (2 * k + 1)
                  for k in range(p + 1))
    return -0.5 * a * h[l] ** 2 - 0.5 * b * h[l + 1] ** 2 + c * h[l] * h[l + 1]


def _c5_sides(l, p, z, h):
    lhs = z ** 2 * _csum([(2 * k + 1) / pochhammer(k - p, 2 * p + 2) * h[k] ** 2
                          for k in range(p + 1, l + 1)])
    rhs_core = (
        (2 * p - 1) / (2 * p)
        * _csum([(2 * k + 1) / pochhammer(k - p + 1, 2 * p) * h[k] ** 2
                 for k in range(p, l + 1)])
        - z ** 2 * h[l] ** 2 / (2 * p * pochhammer(l - p + 2, 2 * p))
        - z ** 2 * h[l + 1] ** 2 / (2 * p * pochhammer(l - p + 1, 2 * p))
        + z * h[l] * h[l + 1] / (p * pochhammer(l - p + 2, 2 * p - 1)))
    return lhs, rhs_core


def _c6_sides(l, p, z, h):
    lhs = _csum([(2 * k + 1) * pochhammer(k - p + 0.5, 2 * p + 1) * h[k] ** 2
                 for k in range(l + 1)])
    rhs_core = (
        (2 * p + 1) / (2 * (p + 1)) * z ** 2
        * _csum([(2 * k + 1) * pochhammer(k - p + 1.5, 2 * p - 1) * h[k] ** 2
                 for k in range(l + 1)])
        - pochhammer(l - p + 1.5, 2 * p + 1) / (2 * (p + 1)) * z ** 2 * h[l] ** 2
        - pochhammer(l - p + 0.5, 2 * p + 1) / (2 * (p + 1)) * z ** 2 * h[l + 1] ** 2
        + pochhammer(l - p + 0.5, 2 * p + 2) / (p + 1) * z * h[l] * h[l + 1])
    return lhs, rhs_core


def sumrule_check(rule, l, p, z):
    """Evaluate both sides of one sum rule; returns (lhs, rhs).

    Rules 'C1'..'C6' are finite identities for squares of outgoing Hankel
    functions (remainder functions materialized numerically from their
    anchor order); 'C7'..'C10' are infinite Bessel-square sums, truncated at
    k = z + 60.
    """
    z = _check_z(z)
    l, p = int(l), int(p)
    if rule in ("C1", "C2", "C3", "C4", "C5", "C6"):
        h = _hrows(z, max(l, p, 1) + 1)
    if rule == "C1":
        lhs = _csum([h[k] ** 2 / ((2 * k - 1) * (2 * k + 3))
                     for k in range(l + 1)])
        rhs = (-h[l] ** 2 / (4 * (2 * l + 3)) - h[l + 1] ** 2 / (4 * (2 * l + 1))
               + h[l] * h[l + 1] / (4 * z)
               + (0.5 / z ** 2 + 0.25j / z ** 3) * cmath.exp(2j * z))
        return lhs, rhs
    if rule == "C2":
        lhs, rhs_core = _c2_sides(l, p, z, h)
        lhs0, rhs0 = _c2_sides(0, p, z, h)
        return lhs, rhs_core + (lhs0 - rhs0)
    if rule == "C3":
        lhs = _csum([(2 * k + 1) * h[k] ** 2 for k in range(l + 1)])
        rhs = (-z ** 2 * (h[l] ** 2 + h[l + 1] ** 2)
               + 2 * (l + 1) * z * h[l] * h[l + 1])
        return lhs, rhs
    if rule == "C4":
        if l < p:
            raise ValueError("C4 requires l >= p")
        lhs = _csum([(2 * k + 1) * pochhammer(k - p + 1, 2 * p) * h[k] ** 2
                     for k in range(p, l + 1)])
        return lhs, _c4_rhs(l, p, z, h)
    if rule == "C5":
        if p < 1 or l < p:
            raise ValueError("C5 requires p >= 1 and l >= p")
        lhs, rhs_core = _c5_sides(l, p, z, h)
        lhs_a, rhs_a = _c5_sides(p, p, z, h)
        return lhs, rhs_core + (lhs_a - rhs_a)
    if rule == "C6":
        lhs, rhs_core = _c6_sides(l, p, z, h)
        lhs0, rhs0 = _c6_sides(0, p, z, h)
        return lhs, rhs_core + (lhs0 - rhs0)

    kmax = int(z + 60)
    j = sph_jn(max(kmax + 1, p + 1), z)
    if rule == "C7":
        lhs = math.fsum((2 * k + 1) * pochhammer(k - p + 1, 2 * p) * j[k] ** 2
                        for k in range(p, kmax + 1))
        rhs = math.factorial(p) / pochhammer(1.5, p) * z ** (2 * p)
        return lhs, rhs
    if rule == "C8":
        lhs = math.fsum(j[k] ** 2 for k in range(kmax + 1))
        return lhs, sin_cos_integrals(2 * z)[0] / (2 * z)
    if rule == "C9":
        lhs = math.fsum((2 * k + 1) ** 2 * j[k] ** 2 for k in range(kmax + 1))
        si = sin_cos_integrals(2 * z)[0]
        return lhs, z * si + math.sin(2 * z) / (4 * z) + 0.5 * math.cos(2 * z)
    if rule == "C10":
        lhs = math.fsum((-1) ** k * (2 * k + 1) * pochhammer(k - p + 1, 2 * p)
                        * j[k] ** 2 for k in range(p, kmax + 1))
        j2 = sph_jn(p, 2 * z)
        rhs = (-1) ** p * math.factorial(p) * z ** p * j2[p]
        return lhs, rhs
    raise ValueError(f"unknown sum rule {rule!r}")
