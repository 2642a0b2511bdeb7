"""Point estimators of the study-variate median from a two-phase sample.

The catalog covers the known-auxiliary-median baselines (ratio, position,
stratification), the double-sampling ratio, the linear regression
representatives of the ratio-function classes (one and two auxiliaries,
and the generalized three-ratio class), and seven concrete parametric
ratio forms.  Plug-in coefficients estimate the optimum parameters from
second-phase data only, so each class can be run at its estimated optimum
without outside information.

Conventions shared by all estimators: every median is the left-continuous
inverse ECDF at 0.5; ``u = mx / mx1`` (second-phase over first-phase
auxiliary median), ``v = mz1 / Mz`` and ``w = mz / Mz`` where ``Mz`` is
the known population median of z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_stats import (
    _quantile_sorted,
    kde_at,
    median,
    proportion_matrix,
    silverman_bandwidth,
)
from .population import Population, PopulationSummary
from .sampling import TwoPhaseSample

__all__ = [
    "EstimatorError",
    "SampleView",
    "SampleMedians",
    "PluginCoefficients",
    "GForm",
    "sample_medians",
    "ratio_known",
    "position_estimator",
    "position_probability",
    "stratification_estimator",
    "ratio_double",
    "plugin_coefficients",
    "true_coefficients",
    "regression_two_aux",
    "regression_single_aux",
    "class_g_estimate",
    "class_F_estimate",
    "gform_estimated_optimum",
    "ESTIMATOR_IDS",
    "G_FORM_IDS",
    "evaluate_estimator",
]


class EstimatorError(ValueError):
    """An estimator's domain requirements are not met by the sample at hand."""


def _frozen(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel().copy()
    if arr.size == 0:
        raise EstimatorError(f"empty sample: {name}")
    if not np.all(np.isfinite(arr)):
        raise EstimatorError(f"invalid datum in {name}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SampleView:
    """The data an estimator sees: second-phase (x, y, z) triples,
    first-phase (x, z) pairs, and the known population medians.

    ``known_mz`` (the population median of z) is always available in the
    designs covered here; ``known_mx`` is optional and only consumed by
    the single-phase baselines (ratio-known, position, stratified).
    """

    y_m: np.ndarray
    x_m: np.ndarray
    z_m: np.ndarray
    x_n: np.ndarray
    z_n: np.ndarray
    known_mz: float
    known_mx: float | None = None

    def __post_init__(self) -> None:
        for name in ("y_m", "x_m", "z_m", "x_n", "z_n"):
            object.__setattr__(self, name, _frozen(getattr(self, name), name))
        if not (self.y_m.size == self.x_m.size == self.z_m.size):
            raise EstimatorError("second-phase variables must have equal length")
        if self.x_n.size != self.z_n.size:
            raise EstimatorError("first-phase variables must have equal length")
        if self.x_n.size < self.y_m.size:
            raise EstimatorError("first phase cannot be smaller than second phase")
        if not math.isfinite(self.known_mz):
            raise EstimatorError("known_mz must be finite")
        if self.known_mx is not None and not math.isfinite(self.known_mx):
            raise EstimatorError("known_mx must be finite when given")

    @property
    def m(self) -> int:
        return self.y_m.size

    @property
    def n(self) -> int:
        return self.x_n.size

    @classmethod
    def from_population(cls, pop: Population, sample: TwoPhaseSample) -> "SampleView":
        """Materialise the view for a drawn sample; the known medians are
        the census medians of the population (knowable from the frame)."""
        sm, sn = sample.second_phase, sample.first_phase
        return cls(
            y_m=pop.y[sm],
            x_m=pop.x[sm],
            z_m=pop.z[sm],
            x_n=pop.x[sn],
            z_n=pop.z[sn],
            known_mz=median(pop.z),
            known_mx=median(pop.x),
        )


@dataclass(frozen=True)
class SampleMedians:
    """Phase-wise sample medians: my, mx, mz over S_m; mx1, mz1 over S_n."""

    my: float
    mx: float
    mx1: float
    mz: float
    mz1: float


def sample_medians(view: SampleView) -> SampleMedians:
    """All five phase-correct sample medians used by the catalog."""
    return SampleMedians(
        my=median(view.y_m),
        mx=median(view.x_m),
        mx1=median(view.x_n),
        mz=median(view.z_m),
        mz1=median(view.z_n),
    )


# ---------------------------------------------------------------------------
# Known-auxiliary-median baselines
# ---------------------------------------------------------------------------


def _require_known_mx(view: SampleView) -> float:
    if view.known_mx is None:
        raise EstimatorError("known population median of x required")
    return view.known_mx


def ratio_known(view: SampleView) -> float:
    """Ratio estimator with known auxiliary median: my * Mx / mx."""
    mx_known = _require_known_mx(view)
    meds = sample_medians(view)
    if meds.mx == 0.0:
        raise EstimatorError("ratio undefined: second-phase median of x is zero")
    return meds.my * (mx_known / meds.mx)


def position_probability(view: SampleView, exact: bool = False) -> tuple[float, float, bool]:
    """The re-estimated proportion below the median used by the position
    estimator.

    Returns (raw, clamped, clamp_fired).  The default is the two-term
    approximation 2*(m_x*p11 + (m - m_x)*p12)/m with quadrant proportions
    taken about the second-phase sample medians and m_x counted against
    the known median of x; ``exact=True`` uses the conditional form with
    the row-marginal denominators instead.
    """
    mx_known = _require_known_mx(view)
    m = view.m
    if m < 2:
        raise EstimatorError("position estimator needs m >= 2")
    meds = sample_medians(view)
    pm = proportion_matrix(np.column_stack((view.x_m, view.y_m)), meds.mx, meds.my)
    m_x = int(np.count_nonzero(view.x_m <= mx_known))
    if exact:
        low_total = pm.rowA_low
        high_total = 1.0 - low_total
        low_term = m_x * pm.p11 / low_total if m_x else 0.0
        if m_x < m and high_total == 0.0:
            raise EstimatorError("position undefined: empty high-x conditional")
        high_term = (m - m_x) * pm.p12 / high_total if m_x < m else 0.0
        raw = (low_term + high_term) / m
    else:
        raw = 2.0 * (m_x * pm.p11 + (m - m_x) * pm.p12) / m
    clamped = min(max(raw, 1.0 / m), 1.0)
    return raw, clamped, clamped != raw


def position_estimator(view: SampleView, exact: bool = False) -> float:
    """Position estimator: invert the second-phase ECDF of y at the
    auxiliary-stratified proportion estimate."""
    _, p_hat, _ = position_probability(view, exact=exact)
    return _quantile_sorted(np.sort(view.y_m), p_hat)


def stratification_estimator(view: SampleView, fallback_to_median: bool = False) -> float:
    """Smallest y where the average of the two within-stratum ECDFs
    (strata split at the known median of x) reaches 0.5."""
    mx_known = _require_known_mx(view)
    low = view.x_m <= mx_known
    y_low = np.sort(view.y_m[low])
    y_high = np.sort(view.y_m[~low])
    if y_low.size == 0 or y_high.size == 0:
        if fallback_to_median:
            return median(view.y_m)
        raise EstimatorError("stratification undefined: one stratum is empty")
    ys = np.sort(view.y_m)
    f_low = np.searchsorted(y_low, ys, side="right") / y_low.size
    f_high = np.searchsorted(y_high, ys, side="right") / y_high.size
    f_avg = 0.5 * (f_low + f_high)
    return float(ys[int(np.argmax(f_avg >= 0.5))])


# ---------------------------------------------------------------------------
# Double-sampling estimators
# ---------------------------------------------------------------------------


def ratio_double(view: SampleView) -> float:
    """Double-sampling ratio estimator: my * mx1 / mx."""
    meds = sample_medians(view)
    if meds.mx == 0.0:
        raise EstimatorError("ratio undefined: second-phase median of x is zero")
    return meds.my * (meds.mx1 / meds.mx)


@dataclass(frozen=True)
class PluginCoefficients:
    """Regression and optimum-parameter coefficients.

    Normally these are the second-phase sample plug-ins (hats); the same
    container carries the population-true values when the optimum is
    computed from a :class:`PopulationSummary` instead (they are the
    estimands of the hats).
    """

    d1_hat: float
    d2_hat: float
    alpha1_hat: float
    alpha2_hat: float
    alpha1_star_hat: float
    alpha2_star_hat: float
    a1_hat: float
    a2_hat: float
    a3_hat: float

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:
            if not math.isfinite(getattr(self, name)):
                raise EstimatorError(f"non-finite coefficient {name}")


def _coefficients(
    mx: float,
    my: float,
    mz: float,
    fx: float,
    fy: float,
    fz: float,
    rho_xy: float,
    rho_yz: float,
    rho_xz: float,
) -> PluginCoefficients:
    if fy <= 0.0:
        raise EstimatorError("zero density: f_y at its median vanished")
    denom = 1.0 - rho_xz * rho_xz
    if denom <= 0.0:
        raise EstimatorError("collinear auxiliaries: (4 p11(x,z) - 1)^2 reached 1")
    if my == 0.0:
        raise EstimatorError("median of y is zero: alpha coefficients undefined")
    d1 = (fx / fy) * rho_xy
    d2 = (fz / fy) * rho_yz
    alpha1_star = mx * fx * rho_xy / fy
    alpha2_star = mz * fz * rho_yz / fy
    return PluginCoefficients(
        d1_hat=d1,
        d2_hat=d2,
        alpha1_hat=alpha1_star / my,
        alpha2_hat=alpha2_star / my,
        alpha1_star_hat=alpha1_star,
        alpha2_star_hat=alpha2_star,
        a1_hat=(rho_xy - rho_xz * rho_yz) * mx * fx / (denom * fy),
        a2_hat=rho_xz * (rho_xy - rho_yz * rho_xz) * mz * fz / (denom * fy),
        a3_hat=(rho_yz - rho_xy * rho_xz) * mz * fz / (denom * fy),
    )


def plugin_coefficients(view: SampleView) -> PluginCoefficients:
    """Sample analogues of every optimum coefficient, from S_m only.

    Quadrant proportions are taken about the second-phase sample medians;
    densities are Gaussian KDEs with Silverman bandwidths at those medians.
    """
    if view.m < 4:
        raise EstimatorError("plug-in coefficients need m >= 4")
    meds = sample_medians(view)
    dens = {}
    for name, values, at in (
        ("x", view.x_m, meds.mx),
        ("y", view.y_m, meds.my),
        ("z", view.z_m, meds.mz),
    ):
        try:
            h = silverman_bandwidth(values)
        except ValueError as exc:
            raise EstimatorError(f"degenerate second-phase {name} sample") from exc
        dens[name] = kde_at(values, at, h).value
    pm_xy = proportion_matrix(np.column_stack((view.x_m, view.y_m)), meds.mx, meds.my)
    pm_xz = proportion_matrix(np.column_stack((view.x_m, view.z_m)), meds.mx, meds.mz)
    pm_yz = proportion_matrix(np.column_stack((view.y_m, view.z_m)), meds.my, meds.mz)
    return _coefficients(
        meds.mx,
        meds.my,
        meds.mz,
        dens["x"],
        dens["y"],
        dens["z"],
        pm_xy.concordance,
        pm_yz.concordance,
        pm_xz.concordance,
    )


def true_coefficients(summary: PopulationSummary) -> PluginCoefficients:
    """Population-true optimum coefficients from a summary (no hats)."""
    return _coefficients(
        summary.median_x,
        summary.median_y,
        summary.median_z,
        summary.density_x,
        summary.density_y,
        summary.density_z,
        summary.pm_xy.concordance,
        summary.pm_yz.concordance,
        summary.pm_xz.concordance,
    )


def regression_two_aux(view: SampleView, coeffs: PluginCoefficients | None = None) -> float:
    """Linear regression estimator with both auxiliaries:
    my + d1*(mx1 - mx) + d2*(Mz - mz1).  Attains the class minimum
    variance to first order."""
    if coeffs is None:
        coeffs = plugin_coefficients(view)
    meds = sample_medians(view)
    return (
        meds.my
        + coeffs.d1_hat * (meds.mx1 - meds.mx)
        + coeffs.d2_hat * (view.known_mz - meds.mz1)
    )


def regression_single_aux(view: SampleView, coeffs: PluginCoefficients | None = None) -> float:
    """Single-auxiliary regression estimator: my + d1*(mx1 - mx)."""
    if coeffs is None:
        coeffs = plugin_coefficients(view)
    meds = sample_medians(view)
    return meds.my + coeffs.d1_hat * (meds.mx1 - meds.mx)


# ---------------------------------------------------------------------------
# Parametric ratio-function classes
# ---------------------------------------------------------------------------

G_FORM_IDS = ("g1", "g2", "g3", "g4", "g5", "g6", "g7")


@dataclass(frozen=True)
class GForm:
    """A concrete member of the two-ratio estimator class, g(1, 1) = 1.

    form g1: u**alpha * v**beta
    form g2: (1 + alpha*(u-1)) / (1 - beta*(v-1))
    form g3: 1 + alpha*(u-1) + beta*(v-1)
    form g4: 1 / (1 - alpha*(u-1) - beta*(v-1))
    form g5: w1*u**alpha + w2*v**beta, w1 + w2 = 1
    form g6: alpha*u + (1-alpha)*v**beta
    form g7: exp(alpha*(u-1) + beta*(v-1))
    """

    form: str
    alpha: float
    beta: float
    w1: float | None = None
    w2: float | None = None

    def __post_init__(self) -> None:
        if self.form not in G_FORM_IDS:
            raise EstimatorError(f"unknown g-form {self.form!r}")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise EstimatorError("g-form parameters must be finite")
        if self.form == "g5":
            if self.w1 is None or self.w2 is None:
                raise EstimatorError("g5 needs weights w1, w2")
            if abs(self.w1 + self.w2 - 1.0) > 1e-12:
                raise EstimatorError("g5 weights must sum to 1")
        elif self.w1 is not None or self.w2 is not None:
            raise EstimatorError(f"weights only apply to g5, not {self.form}")

    def __call__(self, u: float, v: float) -> float:
        a, b = self.alpha, self.beta
        if self.form == "g1":
            _require_positive_ratios(u, v)
            return u**a * v**b
        if self.form == "g2":
            denom = 1.0 - b * (v - 1.0)
            if denom == 0.0:
                raise EstimatorError("g2 denominator vanished")
            return (1.0 + a * (u - 1.0)) / denom
        if self.form == "g3":
            return 1.0 + a * (u - 1.0) + b * (v - 1.0)
        if self.form == "g4":
            denom = 1.0 - a * (u - 1.0) - b * (v - 1.0)
            if denom <= 0.0:
                raise EstimatorError("g4 denominator not positive")
            return 1.0 / denom
        if self.form == "g5":
            _require_positive_ratios(u, v)
            return self.w1 * u**a + self.w2 * v**b
        if self.form == "g6":
            if v <= 0.0:
                raise EstimatorError("invalid ratio for power form: requires v > 0")
            return a * u + (1.0 - a) * v**b
        # g7
        return math.exp(a * (u - 1.0) + b * (v - 1.0))


def _require_positive_ratios(u: float, v: float) -> None:
    if u <= 0.0 or v <= 0.0:
        raise EstimatorError("invalid ratio for power form: requires u > 0 and v > 0")


def gform_estimated_optimum(form: str, alpha1: float, alpha2: float) -> GForm:
    """Parameterize a g-form so its (u, v) gradient at (1, 1) equals
    (-alpha1, -alpha2), the optimum of the class.

    g5 uses equal weights; g6 solves (1 - alpha)*beta = -alpha2 and needs
    1 + alpha1 != 0.
    """
    if form == "g5":
        return GForm(form="g5", alpha=-2.0 * alpha1, beta=-2.0 * alpha2, w1=0.5, w2=0.5)
    if form == "g6":
        if 1.0 + alpha1 == 0.0:
            raise EstimatorError("g6 optimum undefined: 1 + alpha1 = 0")
        return GForm(form="g6", alpha=-alpha1, beta=-alpha2 / (1.0 + alpha1))
    if form in G_FORM_IDS:
        return GForm(form=form, alpha=-alpha1, beta=-alpha2)
    raise EstimatorError(f"unknown g-form {form!r}")


def _ratios(view: SampleView, meds: SampleMedians) -> tuple[float, float, float]:
    if meds.mx1 == 0.0:
        raise EstimatorError("first-phase median of x is zero: u undefined")
    if view.known_mz == 0.0:
        raise EstimatorError("known median of z is zero: v, w undefined")
    u = meds.mx / meds.mx1
    v = meds.mz1 / view.known_mz
    w = meds.mz / view.known_mz
    return u, v, w


def class_g_estimate(view: SampleView, form: GForm) -> float:
    """my * g(u, v) for a concrete parametric form."""
    meds = sample_medians(view)
    u, v, _ = _ratios(view, meds)
    return meds.my * form(u, v)


def class_F_estimate(view: SampleView, coeffs: PluginCoefficients | None = None) -> float:
    """Linear representative of the generalized three-ratio class:
    my - a1*(u-1) - a2*(v-1) - a3*(w-1), at the (estimated) optimum."""
    if coeffs is None:
        coeffs = plugin_coefficients(view)
    meds = sample_medians(view)
    u, v, w = _ratios(view, meds)
    return (
        meds.my
        - coeffs.a1_hat * (u - 1.0)
        - coeffs.a2_hat * (v - 1.0)
        - coeffs.a3_hat * (w - 1.0)
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

ESTIMATOR_IDS = (
    "median",
    "ratio-known",
    "position",
    "stratified",
    "ratio-double",
    "reg-x",
    "reg-xz",
    *G_FORM_IDS,
    "f-linear",
)

#: Estimator ids that consume plug-in (or true) optimum coefficients.
COEFFICIENT_IDS = frozenset(("reg-x", "reg-xz", "f-linear", *G_FORM_IDS))


def evaluate_estimator(
    est_id: str, view: SampleView, coeffs: PluginCoefficients | None = None
) -> float:
    """Evaluate one catalog estimator by its stable id.

    ``coeffs`` feeds the regression estimators, the g-forms (run at the
    optimum parameters implied by alpha1/alpha2) and the generalized-class
    representative; when omitted it is computed from the view.
    """
    if est_id == "median":
        return median(view.y_m)
    if est_id == "ratio-known":
        return ratio_known(view)
    if est_id == "position":
        return position_estimator(view)
    if est_id == "stratified":
        return stratification_estimator(view)
    if est_id == "ratio-double":
        return ratio_double(view)
    if est_id in COEFFICIENT_IDS:
        if coeffs is None:
            coeffs = plugin_coefficients(view)
        if est_id == "reg-x":
            return regression_single_aux(view, coeffs)
        if est_id == "reg-xz":
            return regression_two_aux(view, coeffs)
        if est_id == "f-linear":
            return class_F_estimate(view, coeffs)
        form = gform_estimated_optimum(est_id, coeffs.alpha1_hat, coeffs.alpha2_hat)
        return class_g_estimate(view, form)
    raise EstimatorError(f"unknown estimator id {est_id!r}")
