import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frarir import (SimulationConfig, derive_seed, max_reflections,
                    reflection_coefficient, rescale_ratios, rng_from_seed,
                    sample_direct_distance, sample_distance_ratios,
                    sample_reflection_counts, sample_room, sample_scene)
from frarir.sampling import perturbed_reflection_counts, quadratic_inverse_cdf

from oracles import ks_distance, quadratic_cdf

# frozen against a 50-digit mpmath evaluation of the closed forms
REFL_R02_T05 = 0.9980764599552557
REFL_R12_T01 = 0.5212679952918752
CBRT_HALFWAY = 0.7958114415792784   # ((0.5*(1-0.2^3)+0.2^3))^(1/3)
RRMAX_EXAMPLE = 16.818035018797406  # c0=340, t60=0.5, d0=1, r=0.9
COUNT_EXAMPLE = 3.432080273120736   # d=10, ct=170, rr=16.82, p=1.5, tau=0.2


class TestReflectionCoefficient:
    def test_frozen_values(self):
        assert reflection_coefficient(0.2, 0.5) == pytest.approx(REFL_R02_T05, rel=1e-14)
        assert reflection_coefficient(1.2, 0.1) == pytest.approx(REFL_R12_T01, rel=1e-14)

    def test_limit_small_room_stat(self):
        # exponent -> 0 forces the inner term to 0 and r -> 1
        assert reflection_coefficient(1e-12, 0.5) == pytest.approx(1.0, abs=1e-9)
        assert reflection_coefficient(1e-6, 0.5) < 1.0

    @pytest.mark.parametrize("room_stat,t60", [(0.0, 0.5), (-1.0, 0.5), (0.5, 0.0), (0.5, -2.0)])
    def test_nonpositive_inputs_rejected(self, room_stat, t60):
        with pytest.raises(ValueError):
            reflection_coefficient(room_stat, t60)

    def test_monotone_in_t60_and_room_stat(self):
        t60s = np.linspace(0.05, 2.0, 40)
        values = [reflection_coefficient(0.6, t) for t in t60s]
        assert all(a < b for a, b in zip(values, values[1:]))
        stats = np.linspace(0.05, 2.0, 40)
        values = [reflection_coefficient(r, 0.4) for r in stats]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_result_in_open_unit_interval(self):
        for room_stat in (0.1, 0.7, 1.2):
            for t60 in (0.1, 0.45, 0.8):
                assert 0.0 < reflection_coefficient(room_stat, t60) < 1.0


class TestSampleRoom:
    def test_degenerate_ranges_are_exact(self):
        cfg = SimulationConfig(t60_range=(0.5, 0.5), room_stat_range=(0.6, 0.6))
        t60, room_stat, refl = sample_room(rng_from_seed(3), cfg)
        assert t60 == 0.5 and room_stat == 0.6
        assert refl == reflection_coefficient(0.6, 0.5)

    def test_mean_of_default_t60(self, config):
        rng = rng_from_seed(11)
        draws = np.array([sample_room(rng, config)[0] for _ in range(100_000)])
        assert abs(draws.mean() - 0.45) < 0.01

    def test_draws_stay_in_ranges(self, config):
        rng = rng_from_seed(12)
        for _ in range(2000):
            t60, room_stat, _ = sample_room(rng, config)
            assert 0.1 <= t60 <= 0.8
            assert 0.1 <= room_stat <= 1.2


class TestSampleDirectDistance:
    def test_default_range(self, config):
        rng = rng_from_seed(13)
        draws = [sample_direct_distance(rng, config, 0.8) for _ in range(2000)]
        assert all(0.2 <= d <= 12.0 for d in draws)

    def test_short_t60_needs_no_rejection(self, config):
        # c0 * 0.1 = 34 m > 12 m, so the first draw always wins
        r1 = rng_from_seed(14)
        r2 = rng_from_seed(14)
        assert sample_direct_distance(r1, config, 0.1) == r2.uniform(0.2, 12.0)

    def test_impossible_range_is_domain_error(self):
        cfg = SimulationConfig(direct_range=(40.0, 50.0))
        with pytest.raises(ValueError, match="cannot satisfy"):
            sample_direct_distance(rng_from_seed(1), cfg, 0.1)

    def test_rejection_enforces_horizon(self):
        cfg = SimulationConfig(direct_range=(0.2, 12.0))
        rng = rng_from_seed(15)
        horizon = 340.0 * 0.03
        for _ in range(500):
            assert sample_direct_distance(rng, cfg, 0.03) < horizon


class TestDistanceRatios:
    def test_cdf_endpoints(self):
        alpha, beta = 0.2, 1.0
        lo = quadratic_inverse_cdf(np.array([0.0]), alpha, beta)[0]
        hi = quadratic_inverse_cdf(np.array([1.0]), alpha, beta)[0]
        assert lo == pytest.approx(alpha, abs=4 * math.ulp(alpha))
        assert hi == pytest.approx(beta, abs=4 * math.ulp(beta))

    def test_halfway_frozen_value(self):
        got = quadratic_inverse_cdf(np.array([0.5]), 0.2, 1.0)[0]
        assert got == pytest.approx(CBRT_HALFWAY, rel=1e-15)

    def test_ks_distance_default(self):
        draws = sample_distance_ratios(rng_from_seed(16), 100_000, 0.2, 1.0)
        d = ks_distance(draws, lambda x: quadratic_cdf(x, 0.2, 1.0))
        assert d < 0.01

    @settings(max_examples=20, deadline=None)
    @given(st.tuples(st.floats(0.0, 0.99), st.floats(0.01, 1.0)).filter(lambda ab: ab[0] < ab[1]),
           st.integers(0, 2 ** 63))
    def test_ks_distance_property(self, bounds, seed):
        alpha, beta = bounds
        draws = sample_distance_ratios(rng_from_seed(seed), 20_000, alpha, beta)
        assert np.all((draws >= alpha) & (draws <= beta * (1 + 1e-12)))
        assert ks_distance(draws, lambda x: quadratic_cdf(x, alpha, beta)) < 0.025

    def test_degenerate_bounds_constant(self):
        draws = sample_distance_ratios(rng_from_seed(17), 64, 0.5, 0.5)
        assert np.all(draws == 0.5)

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ValueError):
            sample_distance_ratios(rng_from_seed(1), 8, 0.9, 0.5)


class TestRescaleRatios:
    def test_spec_worked_example(self):
        got = rescale_ratios(np.array([0.6]), 0.2, 1.0, 340.0, 0.5, 1.0)[0]
        assert got == pytest.approx(85.5, rel=1e-12)

    def test_endpoints_exact_within_4_ulps(self):
        target = 340.0 * 0.5 / 2.0
        lo = rescale_ratios(np.array([0.2]), 0.2, 1.0, 340.0, 0.5, 2.0)[0]
        hi = rescale_ratios(np.array([1.0]), 0.2, 1.0, 340.0, 0.5, 2.0)[0]
        assert lo == 1.0
        assert abs(hi - target) <= 4 * math.ulp(target)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.0, 0.9), st.floats(0.01, 1.0), st.floats(1.5, 500.0))
    def test_affine_and_monotone(self, alpha, width, target):
        beta = min(alpha + width, 1.0)
        if beta <= alpha:
            return
        ratios = np.linspace(alpha, beta, 17)
        d0 = 1.0
        t60 = target * d0 / 340.0
        out = rescale_ratios(ratios, alpha, beta, 340.0, t60, d0)
        assert np.all(np.diff(out) > 0)
        # affine: second differences vanish
        assert np.allclose(np.diff(out, 2), 0.0, atol=1e-9 * target)

    def test_beyond_horizon_is_domain_error(self):
        with pytest.raises(ValueError, match="horizon"):
            rescale_ratios(np.array([0.5]), 0.2, 1.0, 340.0, 0.01, 12.0)


class TestMaxReflections:
    def test_frozen_example(self):
        assert max_reflections(340.0, 0.5, 1.0, 0.9) == pytest.approx(RRMAX_EXAMPLE, rel=1e-14)

    def test_ratio_1000_clamps_to_one(self):
        # numerator vanishes when c0*t60/d0 == 1000
        assert max_reflections(1000.0, 1.0, 1.0, 0.9) == 1.0
        assert max_reflections(2000.0, 1.0, 1.0, 0.9) == 1.0  # negative raw

    def test_grows_unbounded_as_r_approaches_one(self):
        values = [max_reflections(340.0, 0.5, 1.0, r) for r in (0.9, 0.99, 0.999999)]
        assert values[0] < values[1] < values[2]
        assert values[2] > 1e5

    def test_unit_coefficient_is_domain_error(self):
        with pytest.raises(ValueError):
            max_reflections(340.0, 0.5, 1.0, 1.0)

    def test_nonpositive_inputs_rejected(self):
        with pytest.raises(ValueError):
            max_reflections(340.0, -0.5, 1.0, 0.9)


class TestReflectionCounts:
    def test_distance_at_horizon_gives_rr_max(self):
        ct = 170.0
        got = perturbed_reflection_counts(np.array([ct]), ct, 16.82,
                                          np.array([0.0]), 0.2)[0]
        assert got == pytest.approx(16.82, rel=1e-12)

    def test_distance_near_zero_gives_one(self):
        got = perturbed_reflection_counts(np.array([1e-9]), 170.0, 16.82,
                                          np.array([0.0]), 0.2)[0]
        assert got == pytest.approx(1.0, abs=1e-6)

    def test_frozen_example(self):
        got = perturbed_reflection_counts(np.array([10.0]), 170.0, 16.82,
                                          np.array([1.5]), 0.2)[0]
        assert got == pytest.approx(COUNT_EXAMPLE, rel=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(1.0, 60.0), st.integers(0, 2 ** 63))
    def test_clamped_into_range(self, rr_max, seed):
        rng = rng_from_seed(seed)
        dists = rng.uniform(0.2, 170.0, 256)
        got = sample_reflection_counts(rng, dists, 340.0, 0.5, rr_max, (-2.0, 2.0), 0.2)
        assert np.all(got >= 1.0)
        assert np.all(got <= rr_max)


class TestSampleScene:
    def test_bit_identical_determinism(self, config):
        a = sample_scene(config, 987654321)
        b = sample_scene(config, 987654321)
        assert a.t60 == b.t60 and a.room_stat == b.room_stat
        assert a.direct_dist == b.direct_dist
        assert np.array_equal(a.image_dists, b.image_dists)
        assert np.array_equal(a.reflection_counts, b.reflection_counts)

    def test_invariants_over_many_draws(self, config):
        for seed in range(1000):
            scene = sample_scene(config, seed)
            horizon = config.sound_velocity * scene.t60
            assert scene.direct_dist < horizon
            assert np.all(scene.image_dists >= scene.direct_dist)
            assert np.all(scene.image_dists <= horizon)
            rr = max_reflections(config.sound_velocity, scene.t60,
                                 scene.direct_dist, scene.reflection_coeff)
            assert np.all(scene.reflection_counts >= 1.0)
            assert np.all(scene.reflection_counts <= max(rr, 1.0))
            assert scene.reflection_coeff == reflection_coefficient(
                scene.room_stat, scene.t60)

    def test_domain_error_propagates(self):
        cfg = SimulationConfig(direct_range=(40.0, 50.0), t60_range=(0.1, 0.1))
        with pytest.raises(ValueError):
            sample_scene(cfg, 1)

    def test_seed_out_of_range_rejected(self, config):
        with pytest.raises(ValueError):
            sample_scene(config, -1)
        with pytest.raises(ValueError):
            sample_scene(config, 1 << 64)

    def test_different_seeds_differ(self, config):
        a = sample_scene(config, 1)
        b = sample_scene(config, 2)
        assert a.t60 != b.t60


class TestDeriveSeed:
    def test_unique_within_run(self):
        seeds = {derive_seed(123, i) for i in range(10_000)}
        assert len(seeds) == 10_000

    def test_64_bit_range(self):
        for i in range(100):
            s = derive_seed(2 ** 64 - 1, i)
            assert 0 <= s < 2 ** 64

    def test_deterministic(self):
        assert derive_seed(42, 7) == derive_seed(42, 7)
        assert derive_seed(42, 7) != derive_seed(43, 7)
