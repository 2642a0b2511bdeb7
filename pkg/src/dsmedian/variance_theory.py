"""Closed-form first-order variances, optimum derivatives, minimum variances.

All formulas are expressed through three finite-population factors

    theta_mN = 1/m - 1/N,   theta_mn = 1/m - 1/n,   theta_nN = 1/n - 1/N

and four variance building blocks

    V0 = 1 / (4 f_y(M_y)^2)          sample-median variance scale
    V1 = V0 * rho_xy^2               gain available from x
    V2 = V0 * rho_yz^2               gain available from z
    V3 = V0 * D^2 / (1 - rho_xz^2)   extra gain from the x-z association

with rho_ab = 4*P11(a, b) - 1 the median-concordance coefficients and
D = rho_yz - rho_xy * rho_xz.  The minimum variances then read

    var(median)  = theta_mN*V0
    min var (H)  = theta_mN*V0 - theta_mn*V1          (one auxiliary)
    min var (g)  = min var (H) - theta_nN*V2          (two auxiliaries)
    min var (F)  = min var (g) - theta_mn*V3          (generalized class)

so the efficiency ordering F <= g <= H <= median holds identically, with
the g-vs-H gap exactly theta_nN*V2 and the F-vs-g gap exactly theta_mn*V3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .population import PopulationSummary

__all__ = [
    "DesignSizes",
    "AssociationSet",
    "VarianceComponents",
    "OptimumGDerivatives",
    "OptimumFDerivatives",
    "var_sample_median",
    "var_class_g",
    "optimum_g_derivatives",
    "min_var_g",
    "min_var_H",
    "var_class_F",
    "optimum_F_derivatives",
    "min_var_F",
    "variance_components",
]


@dataclass(frozen=True)
class DesignSizes:
    """Second-phase, first-phase, and population sizes with 2 <= m < n <= N."""

    m: int
    n: int
    N: int

    def __post_init__(self) -> None:
        if not 2 <= self.m < self.n <= self.N:
            raise ValueError(f"require 2 <= m < n <= N, got m={self.m}, n={self.n}, N={self.N}")

    @property
    def theta_mN(self) -> float:
        return 1.0 / self.m - 1.0 / self.N

    @property
    def theta_mn(self) -> float:
        return 1.0 / self.m - 1.0 / self.n

    @property
    def theta_nN(self) -> float:
        return 1.0 / self.n - 1.0 / self.N


@dataclass(frozen=True)
class AssociationSet:
    """Median-concordance coefficients and median-density scale products.

    rho_ab = 4*P11(a, b) - 1 in [-1, 1]; scale_a = M_a * f_a(M_a).
    """

    rho_xy: float
    rho_yz: float
    rho_xz: float
    scale_x: float
    scale_y: float
    scale_z: float

    def __post_init__(self) -> None:
        for name in ("rho_xy", "rho_yz", "rho_xz"):
            r = getattr(self, name)
            if not (math.isfinite(r) and -1.0 <= r <= 1.0):
                raise ValueError(f"{name}={r!r} outside [-1, 1]")
        for name in ("scale_x", "scale_y", "scale_z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.scale_y == 0.0:
            raise ValueError("scale_y must be nonzero")

    @classmethod
    def from_summary(cls, summary: PopulationSummary) -> "AssociationSet":
        """Derive the association set from a population summary.

        Census concordances of a finite set can overshoot 1 by up to 4/N
        (ties, odd counts); they are clamped into [-1, 1] here since the
        variance algebra holds on the continuous-limit range.
        """

        def clamp(r: float) -> float:
            return min(1.0, max(-1.0, r))

        return cls(
            rho_xy=clamp(summary.pm_xy.concordance),
            rho_yz=clamp(summary.pm_yz.concordance),
            rho_xz=clamp(summary.pm_xz.concordance),
            scale_x=summary.median_x * summary.density_x,
            scale_y=summary.median_y * summary.density_y,
            scale_z=summary.median_z * summary.density_z,
        )


@dataclass(frozen=True)
class VarianceComponents:
    """V0 with the three nested gain terms V1, V2, V3 (squared y-units)."""

    V0: float
    V1: float
    V2: float
    V3: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.V0) and self.V0 > 0.0):
            raise ValueError(f"V0 must be positive, got {self.V0!r}")
        for name in ("V1", "V2", "V3"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be nonnegative, got {v!r}")
        for name in ("V1", "V2"):
            if getattr(self, name) > self.V0 * (1.0 + 1e-12):
                raise ValueError(f"{name} cannot exceed V0")

    @classmethod
    def from_concordances(
        cls, V0: float, rho_xy: float, rho_yz: float, rho_xz: float
    ) -> "VarianceComponents":
        if rho_xz * rho_xz >= 1.0:
            raise ValueError("auxiliary collinearity: |rho_xz| = 1 leaves V3 undefined")
        d = rho_yz - rho_xy * rho_xz
        return cls(
            V0=V0,
            V1=V0 * rho_xy * rho_xy,
            V2=V0 * rho_yz * rho_yz,
            V3=V0 * d * d / (1.0 - rho_xz * rho_xz),
        )


def variance_components(summary: PopulationSummary) -> VarianceComponents:
    """V0..V3 of a population summary."""
    assoc = AssociationSet.from_summary(summary)
    v0 = 1.0 / (4.0 * summary.density_y**2)
    return VarianceComponents.from_concordances(v0, assoc.rho_xy, assoc.rho_yz, assoc.rho_xz)


def var_sample_median(sizes: DesignSizes, summary: PopulationSummary) -> float:
    """First-order variance of the plain sample median: theta_mN / (4 f_y^2)."""
    return sizes.theta_mN / (4.0 * summary.density_y**2)


# ---------------------------------------------------------------------------
# Two-ratio class: variance at arbitrary derivatives, optimum, minimum
# ---------------------------------------------------------------------------


def var_class_g(
    sizes: DesignSizes, summary: PopulationSummary, g1_deriv: float, g2_deriv: float
) -> float:
    """First-order variance of the two-ratio class at derivatives
    (g1, g2) = (dg/du, dg/dv) at (1, 1)."""
    assoc = AssociationSet.from_summary(summary)
    rx = assoc.scale_y / assoc.scale_x
    rz = assoc.scale_y / assoc.scale_z
    a_term = rx * g1_deriv * (rx * g1_deriv + 2.0 * assoc.rho_xy)
    b_term = rz * g2_deriv * (rz * g2_deriv + 2.0 * assoc.rho_yz)
    v0 = 1.0 / (4.0 * summary.density_y**2)
    return v0 * (sizes.theta_mN + sizes.theta_mn * a_term + sizes.theta_nN * b_term)


@dataclass(frozen=True)
class OptimumGDerivatives:
    """Variance-minimizing derivatives of the two-ratio class, with the
    optimum parameters in their three published normalizations."""

    g1: float
    g2: float
    alpha1: float
    alpha2: float
    alpha1_star: float
    alpha2_star: float


def optimum_g_derivatives(summary: PopulationSummary) -> OptimumGDerivatives:
    """g1 = -(scale_x/scale_y) rho_xy and g2 = -(scale_z/scale_y) rho_yz,
    together with alpha1/alpha2 (their negatives) and the starred variants
    that keep the M_y factor out."""
    assoc = AssociationSet.from_summary(summary)
    alpha1 = (assoc.scale_x / assoc.scale_y) * assoc.rho_xy
    alpha2 = (assoc.scale_z / assoc.scale_y) * assoc.rho_yz
    return OptimumGDerivatives(
        g1=-alpha1,
        g2=-alpha2,
        alpha1=alpha1,
        alpha2=alpha2,
        alpha1_star=assoc.scale_x * assoc.rho_xy / summary.density_y,
        alpha2_star=assoc.scale_z * assoc.rho_yz / summary.density_y,
    )


def min_var_g(sizes: DesignSizes, comps: VarianceComponents) -> float:
    """Minimum variance of the two-ratio (and wider) class:
    theta_mN*V0 - theta_mn*V1 - theta_nN*V2."""
    return sizes.theta_mN * comps.V0 - sizes.theta_mn * comps.V1 - sizes.theta_nN * comps.V2


def min_var_H(sizes: DesignSizes, comps: VarianceComponents) -> float:
    """Minimum variance of the single-auxiliary class:
    theta_mN*V0 - theta_mn*V1."""
    return sizes.theta_mN * comps.V0 - sizes.theta_mn * comps.V1


# ---------------------------------------------------------------------------
# Generalized three-ratio class
# ---------------------------------------------------------------------------


def var_class_F(
    sizes: DesignSizes,
    summary: PopulationSummary,
    f2_deriv: float,
    f3_deriv: float,
    f4_deriv: float,
) -> float:
    """First-order variance of the generalized class at derivatives
    (F2, F3, F4) with respect to (u, v, w) at the expansion point."""
    assoc = AssociationSet.from_summary(summary)
    cx = summary.density_y / assoc.scale_x
    cz = summary.density_y / assoc.scale_z
    a1_term = 1.0 + (cz * f4_deriv) ** 2 + 2.0 * assoc.rho_yz * cz * f4_deriv
    a2_term = cx * (
        cx * f2_deriv**2
        + 2.0 * assoc.rho_xy * f2_deriv
        + 2.0 * assoc.rho_xz * cz * f2_deriv * f4_deriv
    )
    a3_term = cz * (
        cz * f3_deriv**2 + 2.0 * assoc.rho_yz * f3_deriv + 2.0 * cz * f3_deriv * f4_deriv
    )
    v0 = 1.0 / (4.0 * summary.density_y**2)
    return v0 * (
        sizes.theta_mN * a1_term + sizes.theta_mn * a2_term + sizes.theta_nN * a3_term
    )


@dataclass(frozen=True)
class OptimumFDerivatives:
    """Variance-minimizing derivatives of the generalized class.

    (F2, F3, F4) = (-a1, -a2, -a3); D = rho_yz - rho_xy*rho_xz is the
    composite association driving the extra V3 gain.
    """

    F2: float
    F3: float
    F4: float
    D: float
    a1: float
    a2: float
    a3: float


def optimum_F_derivatives(summary: PopulationSummary) -> OptimumFDerivatives:
    """Closed-form optimum derivatives of the generalized class."""
    assoc = AssociationSet.from_summary(summary)
    s = assoc.rho_xz * assoc.rho_xz
    if s >= 1.0:
        raise ValueError("auxiliary collinearity: |rho_xz| = 1")
    denom = 1.0 - s
    fy = summary.density_y
    d_comp = assoc.rho_yz - assoc.rho_xy * assoc.rho_xz
    a1 = (assoc.rho_xy - assoc.rho_xz * assoc.rho_yz) * assoc.scale_x / (denom * fy)
    a2 = assoc.rho_xz * (assoc.rho_xy - assoc.rho_yz * assoc.rho_xz) * assoc.scale_z / (denom * fy)
    a3 = d_comp * assoc.scale_z / (denom * fy)
    return OptimumFDerivatives(F2=-a1, F3=-a2, F4=-a3, D=d_comp, a1=a1, a2=a2, a3=a3)


def min_var_F(sizes: DesignSizes, comps: VarianceComponents) -> float:
    """Minimum variance of the generalized class: min_var_g - theta_mn*V3."""
    return min_var_g(sizes, comps) - sizes.theta_mn * comps.V3
