"""Replayable SRSWOR and the nested two-phase scheme."""

import math

import numpy as np
import pytest

from dsmedian.sampling import SeedSpec, TwoPhaseSample, draw_two_phase, srswor


class TestSeedSpec:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            SeedSpec(-1, 0)

    def test_rejects_too_wide(self):
        with pytest.raises(ValueError):
            SeedSpec(2**64, 0)


class TestSrswor:
    def test_census(self):
        assert np.array_equal(srswor(5, 5, SeedSpec(0, 0)), np.arange(5))

    def test_determinism(self):
        a = srswor(100, 17, SeedSpec(42, 3))
        b = srswor(100, 17, SeedSpec(42, 3))
        assert np.array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = srswor(100, 17, SeedSpec(42, 3))
        b = srswor(100, 17, SeedSpec(42, 4))
        assert not np.array_equal(a, b)

    def test_k_distinct_sorted_in_range(self, rng):
        for _ in range(100):
            N = int(rng.integers(1, 60))
            k = int(rng.integers(1, N + 1))
            idx = srswor(N, k, SeedSpec(int(rng.integers(2**32)), 0))
            assert idx.size == k
            assert np.unique(idx).size == k
            assert idx[0] >= 0 and idx[-1] < N
            assert np.all(np.diff(idx) > 0)

    def test_k_larger_than_N(self):
        with pytest.raises(ValueError):
            srswor(4, 5, SeedSpec(0, 0))

    def test_single_draw_uniform(self):
        # 60,000 draws of one index from six: each count within 3 sigma of 10,000
        counts = np.zeros(6, dtype=int)
        for r in range(60_000):
            counts[srswor(6, 1, SeedSpec(1234, r))[0]] += 1
        sigma = math.sqrt(60_000 * (1 / 6) * (5 / 6))
        assert np.all(np.abs(counts - 10_000) <= 3 * sigma), counts

    def test_every_subset_equally_probable(self):
        # all 10 two-subsets of five units within 3 sigma of uniform
        from collections import Counter

        R = 30_000
        counts = Counter(tuple(srswor(5, 2, SeedSpec(88, r))) for r in range(R))
        assert len(counts) == 10
        sigma = math.sqrt(R * 0.1 * 0.9)
        for subset, c in counts.items():
            assert abs(c - R / 10) <= 3 * sigma, (subset, c)


class TestDrawTwoPhase:
    def test_nested_and_sized(self):
        s = draw_two_phase(4, 3, 2, SeedSpec(9, 0))
        assert s.n == 3 and s.m == 2
        assert set(s.second_phase) <= set(s.first_phase)

    def test_census_first_phase(self):
        s = draw_two_phase(8, 8, 3, SeedSpec(9, 0))
        assert np.array_equal(s.first_phase, np.arange(8))

    def test_determinism(self):
        a = draw_two_phase(50, 20, 7, SeedSpec(5, 11))
        b = draw_two_phase(50, 20, 7, SeedSpec(5, 11))
        assert np.array_equal(a.first_phase, b.first_phase)
        assert np.array_equal(a.second_phase, b.second_phase)

    def test_size_ordering_enforced(self):
        with pytest.raises(ValueError, match="m < n"):
            draw_two_phase(10, 5, 5, SeedSpec(0, 0))
        with pytest.raises(ValueError, match="m < n"):
            draw_two_phase(10, 11, 5, SeedSpec(0, 0))

    def test_nestedness_many_draws(self, rng):
        for r in range(200):
            N = int(rng.integers(4, 40))
            n = int(rng.integers(2, N + 1))
            m = int(rng.integers(1, n))
            s = draw_two_phase(N, n, m, SeedSpec(77, r))
            assert set(s.second_phase) <= set(s.first_phase)

    def test_second_phase_marginal_law(self):
        # over 50,000 replicates each unit lands in S_m with frequency m/N
        R = 50_000
        freq = np.zeros(8)
        for r in range(R):
            s = draw_two_phase(8, 5, 2, SeedSpec(77, r))
            freq[s.second_phase] += 1
        freq /= R
        band = 3 * math.sqrt(0.25 * 0.75 / R)
        assert np.all(np.abs(freq - 2 / 8) <= band), freq

    def test_first_phase_inclusion_probability(self):
        R = 20_000
        freq = np.zeros(8)
        for r in range(R):
            s = draw_two_phase(8, 5, 2, SeedSpec(78, r))
            freq[s.first_phase] += 1
        freq /= R
        band = 3 * math.sqrt(0.625 * 0.375 / R)
        assert np.all(np.abs(freq - 5 / 8) <= band), freq

    def test_second_phase_set_law_uniform(self):
        # the second phase of a (6, 4, 2) scheme is a SRSWOR pair from the
        # population: all 15 pairs within 3 sigma of uniform
        from collections import Counter

        R = 30_000
        counts = Counter(tuple(draw_two_phase(6, 4, 2, SeedSpec(89, r)).second_phase)
                         for r in range(R))
        assert len(counts) == 15
        p = 1 / 15
        sigma = math.sqrt(R * p * (1 - p))
        for pair, c in counts.items():
            assert abs(c - R * p) <= 3 * sigma, (pair, c)


class TestTwoPhaseSample:
    def test_rejects_non_subset(self):
        with pytest.raises(ValueError, match="subset"):
            TwoPhaseSample(first_phase=[0, 1, 2], second_phase=[3])

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicates"):
            TwoPhaseSample(first_phase=[0, 1, 1], second_phase=[0])

    def test_rejects_equal_sizes(self):
        with pytest.raises(ValueError, match="m < n"):
            TwoPhaseSample(first_phase=[0, 1], second_phase=[0, 1])
