"""One two-phase draw and the full estimator catalog.

The first phase observes the cheap auxiliaries (x, z) on n units; the
nested second phase observes the study variate y on m of them.  The
population median of z is treated as known; x's is not (the first phase
estimates it), though the known-median baselines also get the true M_x
here for comparison.

Run:  python3 demos/02_estimator_catalog.py
"""

from dsmedian import (
    ESTIMATOR_IDS,
    SampleView,
    SeedSpec,
    draw_two_phase,
    evaluate_estimator,
    median,
    plugin_coefficients,
)
from dsmedian.estimators import EstimatorError
from dsmedian.montecarlo import POPULATION_STREAM, GeneratorSpec, MarginalSpec, generate_population

marg = MarginalSpec("normal", 10.0, 2.0)
gen = GeneratorSpec(r_xy=0.8, r_yz=0.6, r_xz=0.7,
                    marginal_x=marg, marginal_y=marg, marginal_z=marg)
pop = generate_population(gen, 5000, SeedSpec(42, POPULATION_STREAM))
target = median(pop.y)
print(f"population median of y (the estimand): {target:.4f}")

sample = draw_two_phase(N=pop.N, n=600, m=150, seed=SeedSpec(42, 0))
view = SampleView.from_population(pop, sample)
print(f"two-phase draw: n = {sample.n} first-phase units, m = {sample.m} second-phase units")

coeffs = plugin_coefficients(view)
print("\nplug-in optimum coefficients (second-phase sample analogues):")
print(f"  d1 = {coeffs.d1_hat:+.4f}   d2 = {coeffs.d2_hat:+.4f}")
print(f"  alpha1 = {coeffs.alpha1_hat:+.4f}   alpha2 = {coeffs.alpha2_hat:+.4f}")
print(f"  a1 = {coeffs.a1_hat:+.4f}   a2 = {coeffs.a2_hat:+.4f}   a3 = {coeffs.a3_hat:+.4f}")

print(f"\n{'estimator':>12s}  {'estimate':>9s}  {'error':>8s}")
for est in ESTIMATOR_IDS:
    try:
        value = evaluate_estimator(est, view, coeffs)
        print(f"{est:>12s}  {value:9.4f}  {value - target:+8.4f}")
    except EstimatorError as exc:
        print(f"{est:>12s}  failed: {exc}")
