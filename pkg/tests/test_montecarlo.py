"""Monte Carlo harness: generator analytics, determinism, aggregation."""

import math

import numpy as np
import pytest

from conftest import write_population_csv
from dsmedian.core_stats import median
from dsmedian.montecarlo import (
    POPULATION_STREAM,
    GeneratorSpec,
    MarginalSpec,
    SimConfig,
    generate_population,
    load_sim_config,
    run_simulation,
)
from dsmedian.population import population_summary
from dsmedian.sampling import SeedSpec

NORMAL = MarginalSpec("normal", 10.0, 2.0)
GEN = GeneratorSpec(r_xy=0.8, r_yz=0.6, r_xz=0.7,
                    marginal_x=NORMAL, marginal_y=NORMAL, marginal_z=NORMAL)


def quick_config(**kw):
    base = dict(m=40, n=160, N=1000, replicates=30, master_seed=11,
                estimators=("median", "reg-xz"), generator=GEN)
    base.update(kw)
    return SimConfig(**base)


class TestMarginalSpec:
    def test_normal_analytics(self):
        assert NORMAL.true_median == 10.0
        assert NORMAL.density_at_median == pytest.approx(1 / (2 * math.sqrt(2 * math.pi)),
                                                         rel=1e-15)

    def test_lognormal_analytics(self):
        ln = MarginalSpec("lognormal", 1.0, 0.5)
        assert ln.true_median == pytest.approx(math.e, rel=1e-15)
        assert ln.density_at_median == pytest.approx(
            1 / (math.e * 0.5 * math.sqrt(2 * math.pi)), rel=1e-15
        )

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="marginal kind"):
            MarginalSpec("cauchy", 0.0, 1.0)


class TestGeneratorSpec:
    def test_concordances_are_arcsin(self):
        rho = GEN.concordances()
        assert rho[0] == pytest.approx(2 * math.asin(0.8) / math.pi, rel=1e-15)

    def test_invalid_correlation_matrix(self):
        with pytest.raises(ValueError, match="positive definite"):
            GeneratorSpec(r_xy=0.9, r_yz=0.9, r_xz=-0.9,
                          marginal_x=NORMAL, marginal_y=NORMAL, marginal_z=NORMAL)

    def test_true_summary_matches_marginals(self):
        s = GEN.true_summary(5000)
        assert s.median_y == 10.0
        assert s.density_y == NORMAL.density_at_median
        assert s.pm_xy.concordance == pytest.approx(2 * math.asin(0.8) / math.pi, rel=1e-12)


class TestGeneratePopulation:
    def test_determinism(self):
        p1 = generate_population(GEN, 500, SeedSpec(3, POPULATION_STREAM))
        p2 = generate_population(GEN, 500, SeedSpec(3, POPULATION_STREAM))
        assert np.array_equal(p1.x, p2.x) and np.array_equal(p1.z, p2.z)

    def test_independent_copula_quadrants(self):
        gen0 = GeneratorSpec(r_xy=0.0, r_yz=0.0, r_xz=0.0,
                             marginal_x=NORMAL, marginal_y=NORMAL, marginal_z=NORMAL)
        pop = generate_population(gen0, 20_000, SeedSpec(5, POPULATION_STREAM))
        s = population_summary(pop)
        band = 3 * math.sqrt(0.25 * 0.75 / 20_000)
        for pm in (s.pm_xy, s.pm_xz, s.pm_yz):
            assert abs(pm.p11 - 0.25) <= band

    def test_near_perfect_dependence(self):
        gen1 = GeneratorSpec(r_xy=0.999, r_yz=0.0, r_xz=0.0,
                             marginal_x=NORMAL, marginal_y=NORMAL, marginal_z=NORMAL)
        pop = generate_population(gen1, 20_000, SeedSpec(6, POPULATION_STREAM))
        s = population_summary(pop)
        p_true = 0.25 + math.asin(0.999) / (2 * math.pi)
        band = 3 * math.sqrt(p_true * (1 - p_true) / 20_000)
        assert abs(s.pm_xy.p11 - p_true) <= band
        assert s.pm_xy.p11 > 0.47

    def test_lognormal_stays_positive(self):
        ln = MarginalSpec("lognormal", 0.0, 0.8)
        gen = GeneratorSpec(r_xy=0.5, r_yz=0.3, r_xz=0.4,
                            marginal_x=ln, marginal_y=ln, marginal_z=ln)
        pop = generate_population(gen, 500, SeedSpec(7, POPULATION_STREAM))
        assert np.all(pop.x > 0) and np.all(pop.y > 0)


class TestSimConfig:
    def test_validation(self):
        with pytest.raises(ValueError, match="m < n"):
            quick_config(m=160, n=40)
        with pytest.raises(ValueError, match="unknown estimator"):
            quick_config(estimators=("median", "bogus"))
        with pytest.raises(ValueError, match="population source"):
            SimConfig(m=4, n=8, N=100, replicates=1, master_seed=0,
                      estimators=("median",), generator=None, csv_path=None)

    def test_digest_changes_with_config(self):
        a = quick_config().digest()
        b = quick_config(master_seed=12).digest()
        assert a != b and len(a) == 64


class TestRunSimulation:
    def test_bit_identical_reruns(self):
        cfg = quick_config()
        r1 = run_simulation(cfg)
        r2 = run_simulation(cfg)
        assert r1.to_json_dict() == r2.to_json_dict()

    def test_threads_do_not_change_results(self):
        cfg = quick_config(replicates=40)
        serial = run_simulation(cfg)
        threaded = run_simulation(cfg, threads=4)
        assert serial.to_json_dict() == threaded.to_json_dict()

    def test_census_like_config(self):
        # m = n - 1 = N - 1: every double-sampling estimate hugs the sample median
        cfg = quick_config(N=12, n=12, m=11, replicates=1,
                           estimators=("median", "ratio-double", "reg-xz", "f-linear", "g1"))
        rep = run_simulation(cfg, keep_estimates=True)
        med = rep.estimates[0, 0]
        for j in range(1, 5):
            assert abs(rep.estimates[0, j] - med) <= 1.0

    def test_failures_counted_not_imputed(self, tmp_path):
        # z identical to x forces collinear plug-in coefficients in every replicate
        rng = np.random.default_rng(0)
        x = rng.normal(10, 2, size=60)
        from dsmedian.population import Population

        pop = Population(x=x, y=rng.normal(10, 2, size=60), z=x)
        path = write_population_csv(tmp_path / "collinear.csv", pop)
        cfg = SimConfig(m=10, n=30, N=60, replicates=20, master_seed=3,
                        estimators=("median", "reg-xz"), csv_path=path)
        rep = run_simulation(cfg)
        med_row, reg_row = rep.rows
        assert med_row.failures == 0
        assert reg_row.failures == 20
        assert not rep.valid

    def test_csv_population_round_trip(self, tmp_path, rng):
        pop = generate_population(GEN, 400, SeedSpec(9, POPULATION_STREAM))
        path = write_population_csv(tmp_path / "pop.csv", pop)
        cfg = SimConfig(m=30, n=120, N=400, replicates=25, master_seed=5,
                        estimators=("median", "reg-x"), csv_path=path)
        rep = run_simulation(cfg)
        assert rep.summary_source == "census"
        assert rep.estimand == median(pop.y)
        assert all(r.failures == 0 for r in rep.rows)

    def test_wrong_census_size_rejected(self, tmp_path):
        pop = generate_population(GEN, 100, SeedSpec(9, POPULATION_STREAM))
        path = write_population_csv(tmp_path / "pop.csv", pop)
        cfg = SimConfig(m=10, n=40, N=200, replicates=2, master_seed=5,
                        estimators=("median",), csv_path=path)
        with pytest.raises(ValueError, match="N=100"):
            run_simulation(cfg)

    def test_theory_attachment(self):
        cfg = quick_config(estimators=("median", "reg-x", "reg-xz", "f-linear",
                                       "ratio-double", "position", "g3"))
        rep = run_simulation(cfg)
        theory = {r.est_id: r.theory_variance for r in rep.rows}
        assert theory["position"] is None
        assert theory["median"] > theory["reg-x"] > theory["reg-xz"] > theory["f-linear"]
        assert theory["ratio-double"] is not None
        assert theory["g3"] == theory["reg-xz"]

    def test_mse_exceeds_squared_bias(self):
        rep = run_simulation(quick_config(replicates=50))
        for r in rep.rows:
            assert r.mse >= r.bias**2 - 1e-15

    def test_lognormal_marginals_track_theory(self):
        # exercises the analytic-density branch for skewed marginals
        ln = MarginalSpec("lognormal", 2.0, 0.4)
        gen = GeneratorSpec(r_xy=0.7, r_yz=0.5, r_xz=0.6,
                            marginal_x=ln, marginal_y=ln, marginal_z=ln)
        cfg = SimConfig(m=100, n=400, N=4000, replicates=400, master_seed=13,
                        estimators=("median", "reg-xz", "f-linear"), generator=gen)
        rep = run_simulation(cfg)
        for row in rep.rows:
            assert 0.6 <= row.mse_theory_ratio <= 1.6, (row.est_id, row.mse_theory_ratio)

    def test_median_mse_tracks_inverse_m(self):
        # log-log slope of the median MSE against m stays near -1
        mses = []
        ms = (150, 300, 600)
        for m in ms:
            cfg = SimConfig(m=m, n=4 * m, N=20_000, replicates=1200, master_seed=99,
                            estimators=("median",), generator=GEN)
            mses.append(run_simulation(cfg).rows[0].mse)
        slope = np.polyfit(np.log(ms), np.log(mses), 1)[0]
        assert -1.15 <= slope <= -0.85, (slope, mses)


class TestConfigFile:
    INI = """
[population]
source = synthetic
units = 800
r_xy = 0.8
r_yz = 0.6
r_xz = 0.7
marginal_x = normal
mu_x = 10.0
sigma_x = 2.0
marginal_y = normal
mu_y = 10.0
sigma_y = 2.0
marginal_z = lognormal
mu_z = 1.0
sigma_z = 0.4

[design]
m = 30
n = 120

[run]
replicates = 10
master_seed = 42
estimators = median, reg-xz
"""

    def test_parse(self, tmp_path):
        p = tmp_path / "sim.ini"
        p.write_text(self.INI)
        cfg = load_sim_config(p)
        assert cfg.m == 30 and cfg.n == 120 and cfg.N == 800
        assert cfg.generator.marginal_z.kind == "lognormal"
        assert cfg.estimators == ("median", "reg-xz")

    def test_overrides_take_precedence(self, tmp_path):
        p = tmp_path / "sim.ini"
        p.write_text(self.INI)
        cfg = load_sim_config(p, {"replicates": "3", "master_seed": None})
        assert cfg.replicates == 3
        assert cfg.master_seed == 42  # None overrides are ignored

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "sim.ini"
        p.write_text("[design]\nm = 3\nwhatever = 1\n")
        with pytest.raises(ValueError, match="unknown config key"):
            load_sim_config(p)

    def test_csv_source(self, tmp_path):
        pop = generate_population(GEN, 200, SeedSpec(1, POPULATION_STREAM))
        csv_path = write_population_csv(tmp_path / "pop.csv", pop)
        p = tmp_path / "sim.ini"
        p.write_text(
            "[population]\nsource = csv\ncsv_path = {}\nunits = 200\n"
            "[design]\nm = 20\nn = 80\n"
            "[run]\nreplicates = 5\nmaster_seed = 2\nestimators = median\n".format(csv_path)
        )
        cfg = load_sim_config(p)
        assert cfg.csv_path == csv_path and cfg.generator is None
        rep = run_simulation(cfg)
        assert rep.summary_source == "census"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError, match="cannot read"):
            load_sim_config(tmp_path / "nope.ini")
