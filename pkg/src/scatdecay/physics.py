"""Measurable rates assembled from the correction functions: the thermal
combination of radiative and dielectric parts, the emission and absorption
rates relative to the vacuum rate, and the equilibrium population ratio.

Only the orientation split of the atomic dipole matters for the ratios, so
the dipole matrix elements are abstracted into (w_par, w_perp) weights; the
unpolarized default is (1/3, 2/3).
"""

import math
from dataclasses import dataclass

from .errors import ColdInputError
from .intrep import F_cold_int, F_hot_int
from .aggregate import F_cold_sum, F_hot_sum
from .mie import auto_lmax, build_multipole_table


@dataclass(frozen=True)
class DipoleWeights:
    """Orientation weights of the atomic dipole; must sum to one."""
    w_par: float = 1.0 / 3.0
    w_perp: float = 2.0 / 3.0

    def __post_init__(self):
        if not (0 <= self.w_par <= 1 and 0 <= self.w_perp <= 1):
            raise ValueError("weights must lie in [0, 1]")
        if abs(self.w_par + self.w_perp - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")


ISOTROPIC = DipoleWeights()


@dataclass(frozen=True)
class RateResult:
    """Rates and correction functions at one observation point."""
    zeta: float
    gamma_over_gamma0: float
    gamma_abs_over_gamma0: float
    F_total_par: float
    F_total_perp: float
    F_r_par: float
    F_r_perp: float


def bose_factor(beta_hw):
    """Thermal photon occupation 1/(e^x - 1); zero in the cold limit."""
    if beta_hw < 0:
        raise ValueError("beta_hw must be >= 0")
    if math.isinf(beta_hw):
        return 0.0
    if beta_hw == 0:
        raise ZeroDivisionError("Bose factor diverges at beta_hw = 0")
    return 1.0 / math.expm1(beta_hw)


def F_total(F_c, F_d, beta_hw):
    """Total thermal correction functions per polarization:
    F = (F_c - F_d) + [e^x/(e^x - 1)] F_d, reducing to F_c when cold."""
    if math.isinf(beta_hw):
        return tuple(F_c)
    stim = 1.0 + bose_factor(beta_hw)
    return tuple((fc - fd) + stim * fd for fc, fd in zip(F_c, F_d))


def _correction_values(spec, zeta, lmax, representation, table):
    if lmax <= 0:
        lmax = auto_lmax(spec.sphere, zeta, 1e-9)
    if table is None or table.l_max < lmax:
        table = build_multipole_table(spec.sphere, lmax)
    if representation == "sum":
        fc = F_cold_sum(spec, zeta, lmax, table=table)
        fd = F_hot_sum(spec, zeta, lmax, table=table)
    else:
        fc = F_cold_int(spec, zeta, lmax, table=table)
        fd = F_hot_int(spec, zeta, lmax, table=table)
    return fc, fd


def emission_rate(spec, weights, zeta, lmax=0, representation="integral",
                  table=None):
    """Average emission rate over the vacuum rate,
    1 + f [F_par w_par + F_perp w_perp] with the thermal F of F_total."""
    fc, fd = _correction_values(spec, zeta, lmax, representation, table)
    ft = F_total(fc, fd, spec.beta_hw)
    return 1.0 + spec.f * (ft[0] * weights.w_par + ft[1] * weights.w_perp)


def absorption_rate(spec, weights, zeta, lmax=0, representation="integral",
                    table=None):
    """Average absorption rate of a ground-state atom over the vacuum
    emission rate: f/(e^x - 1) [F_d_par w_par + F_d_perp w_perp]."""
    if math.isinf(spec.beta_hw):
        raise ColdInputError("absorption rate vanishes identically at T = 0; "
                             "beta_hw must be finite")
    _, fd = _correction_values(spec, zeta, lmax, representation, table)
    return spec.f * bose_factor(spec.beta_hw) * (
        fd[0] * weights.w_par + fd[1] * weights.w_perp)


def population_ratio(spec, weights, zeta, lmax=0, representation="integral",
                     table=None):
    """Equilibrium excited/ground population ratio n_e/n_g, fixed by
    balancing emission against absorption.  Tends to the Boltzmann factor
    e^{-beta_hw} at the domain surface and to 0 far away."""
    if math.isinf(spec.beta_hw):
        raise ColdInputError("population ratio requires finite beta_hw")
    fc, fd = _correction_values(spec, zeta, lmax, representation, table)
    ft = F_total(fc, fd, spec.beta_hw)
    gamma = 1.0 + spec.f * (ft[0] * weights.w_par + ft[1] * weights.w_perp)
    gamma_abs = spec.f * bose_factor(spec.beta_hw) * (
        fd[0] * weights.w_par + fd[1] * weights.w_perp)
    return gamma_abs / gamma


def rate_result(spec, weights, zeta, lmax=0, representation="integral",
                table=None):
    """All rate-level quantities at one observation point."""
    fc, fd = _correction_values(spec, zeta, lmax, representation, table)
    ft = F_total(fc, fd, spec.beta_hw)
    gamma = 1.0 + spec.f * (ft[0] * weights.w_par + ft[1] * weights.w_perp)
    if math.isinf(spec.beta_hw):
        gabs = 0.0
    else:
        gabs = spec.f * bose_factor(spec.beta_hw) * (
            fd[0] * weights.w_par + fd[1] * weights.w_perp)
    return RateResult(zeta, gamma, gabs, ft[0], ft[1],
                      fc[0] - fd[0], fc[1] - fd[1])
