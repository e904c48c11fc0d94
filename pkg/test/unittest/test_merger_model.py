#!/usr/bin/env python3
"""
Test the merged company valuation and the exchange-ratio intervals
"""
import math
import os
import sys
import unittest

import numpy as np
from hypothesis import given, settings, strategies as st

# Add the parent directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.errors import DomainError, ValidationError
from src.merger_model import (MergerInputs, MergerValuation, acceptance_at, blended_discount_rate,
                              combined_interval, cv_mixture_check, diversification_check, evaluate_point,
                              mean_interval, merged_dps, merged_price, merged_price_stddev, merged_valuation,
                              merger_discount_rate, no_synergy_growth, no_synergy_interval,
                              pre_merger_valuations, r_star, raw_bounds, variance_interval)
from src.sddm_core import CompanyParams, GrowthModel, Valuation
from instances import random_merger, example_companies, example_merger


def near(x, bounds, rtol=1e-9):
    return any(math.isfinite(b) and abs(x - b) <= rtol * max(1.0, abs(b)) for b in bounds)


def slack(v):
    return 1e-12 * max(1.0, abs(v))


class TestExampleMerger(unittest.TestCase):
    """The numerical example, with the rounded discount rate 0.0573"""

    @classmethod
    def setUpClass(cls):
        cls.m = example_merger(g=0.03, sigma=0.01, override=0.0573)
        cls.point = evaluate_point(cls.m)

    def test_blended_discount_rate(self):
        """k_M from the pre-merger equity weights"""
        a, b = pre_merger_valuations(example_merger())
        k_m = blended_discount_rate(a, b)
        self.assertAlmostEqual(k_m, 0.0573352, delta=1e-7)
        self.assertAlmostEqual(k_m, 0.0573, delta=2e-4)
        self.assertEqual(merger_discount_rate(self.m), 0.0573)

    def test_merged_valuation(self):
        """W_M and f_M at g=3%, sigma=1%"""
        mv = self.point.merged
        self.assertAlmostEqual(mv.equity_mean, 1390.5 / 0.0273, places=6)
        self.assertAlmostEqual(mv.cv, 0.043039, delta=2e-6)
        self.assertAlmostEqual(mv.expected_synergy, mv.equity_mean - 35650, places=6)

    def test_mean_interval(self):
        """Expected-wealth interval endpoints"""
        interval = self.point.mean
        self.assertAlmostEqual(interval.lower, 0.174163, delta=1e-6)
        self.assertAlmostEqual(interval.upper, 0.608596, delta=1e-6)

    def test_variance_interval_unbounded(self):
        """W_M f_M <= W_B f_B leaves B's variance condition vacuous"""
        interval = self.point.variance
        self.assertAlmostEqual(interval.lower, 0.12103, delta=1e-5)
        self.assertEqual(interval.upper, math.inf)

    def test_combined_interval(self):
        """Intersection equals the mean interval here"""
        combined = combined_interval(self.m)
        self.assertEqual(combined.lower, self.point.mean.lower)
        self.assertEqual(combined.upper, self.point.mean.upper)

    def test_no_synergy_growth(self):
        """Threshold growth with the override and with the computed k_M"""
        self.assertAlmostEqual(no_synergy_growth(self.m), 692.745 / 37000, places=9)
        g_star = no_synergy_growth(example_merger())
        self.assertAlmostEqual(g_star, 0.0188, delta=2e-4)
        self.assertAlmostEqual(g_star, 0.018757, delta=1e-6)

    def test_r_star(self):
        """r* = P_B / P_A"""
        a, b = pre_merger_valuations(self.m)
        self.assertAlmostEqual(r_star(a, b), 0.3059, delta=5e-4)
        self.assertAlmostEqual(r_star(a, b), 6.18 / 20.2, places=12)

    def test_mean_bounds_collapse_at_no_synergy(self):
        """Both mean endpoints meet at r* when W_M = W_A + W_B"""
        m = example_merger()
        g_star = no_synergy_growth(m)
        raw = evaluate_point(m.with_merged_growth(GrowthModel.from_moments(g_star, 0.01))).raw
        a, b = pre_merger_valuations(m)
        self.assertAlmostEqual(raw.mean_lo, r_star(a, b), delta=1e-6)
        self.assertAlmostEqual(raw.mean_hi, r_star(a, b), delta=1e-6)

    def test_merged_per_share_quantities(self):
        """Price and stddev per merged share as functions of r"""
        mv = merged_valuation(self.m)
        self.assertAlmostEqual(merged_price(self.m, 0.0), mv.equity_mean / 1000, places=9)
        self.assertAlmostEqual(merged_price(self.m, 0.4), mv.equity_mean / 2000, places=9)
        self.assertAlmostEqual(merged_price_stddev(self.m, 0.4), mv.cv * mv.equity_mean / 2000, places=9)
        self.assertAlmostEqual(merged_dps(self.m, 0.4), 1350 / 2000, places=12)
        with self.assertRaises(ValidationError):
            merged_dps(self.m, -0.1)

    def test_cv_mixture_check(self):
        """f_M against the equity-weighted f of the pair"""
        a, b = pre_merger_valuations(self.m)
        weighted = (a.equity_mean * a.cv + b.equity_mean * b.cv) / (a.equity_mean + b.equity_mean)
        self.assertAlmostEqual(weighted, 0.1783, delta=1e-3)
        self.assertTrue(cv_mixture_check(a, b, 0.043))
        self.assertTrue(cv_mixture_check(a, b, weighted * (1 - 1e-12)))
        self.assertFalse(cv_mixture_check(a, b, weighted * 1.01))

    def test_diversification_check(self):
        """f_M <= min(f_A, f_B)"""
        self.assertTrue(diversification_check(self.m))
        self.assertFalse(diversification_check(example_merger(g=0.03, sigma=0.03, override=0.0573)))

    def test_merged_domain_errors(self):
        """k_M <= g_M and delta_M <= 0 are reported for the merged company"""
        with self.assertRaises(DomainError) as ctx:
            mean_interval(example_merger(g=0.06, sigma=0.01))
        self.assertEqual(ctx.exception.condition, "k > g_mean")
        with self.assertRaises(DomainError) as ctx:
            variance_interval(example_merger(g=0.05, sigma=0.2))
        self.assertEqual(ctx.exception.condition, "delta > 0")


class TestExactNoSynergy(unittest.TestCase):
    """Identical deterministic companies where W_M = W_A + W_B holds exactly"""

    @classmethod
    def setUpClass(cls):
        twin = CompanyParams(1.0, 0.25, 1, GrowthModel.from_moments(0.0, 0.0), name="twin")
        cls.m = MergerInputs(twin, twin, GrowthModel.from_moments(0.0, 0.0), discount_override=0.25)

    def test_mean_interval_is_r_star(self):
        """The mean interval is the single point {r*}"""
        interval = mean_interval(self.m)
        self.assertTrue(interval.degenerate)
        self.assertEqual(interval.lower, 1.0)
        a, b = pre_merger_valuations(self.m)
        self.assertEqual(r_star(a, b), 1.0)

    def test_combined_interval_is_r_star(self):
        """Deterministic growth makes the variance interval [0, +inf)"""
        variance = variance_interval(self.m)
        self.assertEqual((variance.lower, variance.upper), (0.0, math.inf))
        combined = combined_interval(self.m)
        self.assertEqual((combined.lower, combined.upper), (1.0, 1.0))

    def test_no_synergy_point(self):
        """Zero synergy at zero merged growth"""
        self.assertEqual(no_synergy_growth(self.m), 0.0)
        self.assertEqual(merged_valuation(self.m).expected_synergy, 0.0)
        interval = no_synergy_interval(self.m)
        self.assertEqual((interval.lower, interval.upper), (0.0, math.inf))


class TestNoSynergyLimits(unittest.TestCase):
    """Zero coefficients of variation in the no-synergy interval"""

    def test_riskless_acquirer(self):
        """f_A = 0 with f_M > 0: A can never give up variance"""
        a, b = example_companies()
        a = CompanyParams(a.dps0, a.discount_rate, a.shares, GrowthModel.from_moments(0.01, 0.0), name="A")
        m = MergerInputs(a, b, GrowthModel.from_moments(0.03, 0.01))
        self.assertTrue(no_synergy_interval(m).empty)

    def test_riskless_target(self):
        """f_B = 0 with f_M > 0 pins the upper bound at 0"""
        a, b = example_companies()
        b = CompanyParams(b.dps0, b.discount_rate, b.shares, GrowthModel.from_moments(0.03, 0.0), name="B")
        interval = no_synergy_interval(MergerInputs(a, b, GrowthModel.from_moments(0.03, 0.0001)))
        self.assertEqual((interval.lower, interval.upper), (0.0, 0.0))

    def test_riskless_target_variance_bound(self):
        """f_B = 0: the variance upper bound is 0 while f_M > 0, unbounded once f_M = 0"""
        a, b = example_companies()
        b = CompanyParams(b.dps0, b.discount_rate, b.shares, GrowthModel.from_moments(0.03, 0.0), name="B")
        risky = evaluate_point(MergerInputs(a, b, GrowthModel.from_moments(0.03, 0.01)))
        self.assertEqual(risky.raw.var_hi, 0.0)
        riskless = evaluate_point(MergerInputs(a, b, GrowthModel.from_moments(0.03, 0.0)))
        self.assertEqual(riskless.raw.var_hi, math.inf)

    def test_riskless_merger(self):
        """f_M = 0 accepts every r"""
        interval = no_synergy_interval(example_merger(sigma=0.0))
        self.assertEqual((interval.lower, interval.upper), (0.0, math.inf))


class TestSufficiency(unittest.TestCase):
    """When synergy and diversification make the combined interval nonempty"""

    def test_synergy_and_diversification_are_not_enough(self):
        """W_A = W_B = 1, f_A = f_B = 1, f_M = 0.9, W_M = 3 gives an empty combined interval"""
        params = CompanyParams(1.0, 0.1, 1, GrowthModel.from_moments(0.0, 0.0))
        pre = Valuation(params, mean_price=1.0, stddev_price=1.0, delta=1.0, h_factor=1.0, cv=1.0, equity_mean=1.0)
        mv = MergerValuation(pre, pre, k_m=0.1, g_mean=0.0, total_dividends=2.0, equity_mean=3.0,
                             delta=1.0, h_factor=1.0, cv=0.9, weights=(0.5, 0.5))
        raw = raw_bounds(mv)
        self.assertEqual((raw.mean_lo, raw.mean_hi), (0.5, 2.0))
        self.assertGreater(raw.var_lo, raw.var_hi)
        self.assertGreater(max(raw.mean_lo, raw.var_lo), min(raw.mean_hi, raw.var_hi))

    def test_mixture_condition_does_not_place_r_star(self):
        """f_M between f_A and the weighted mean: nonempty, but r* is excluded"""
        m = example_merger(sigma=0.0)
        a, b = pre_merger_valuations(m)
        g_star = no_synergy_growth(m)
        k_m = merger_discount_rate(m)
        # merged stddev giving f_M = 0.1 at the no-synergy growth
        target_f = 0.1
        h = target_f * (1 + g_star) / (1 + k_m)
        sigma = h * math.sqrt(((1 + k_m) ** 2 - (1 + g_star) ** 2) / (1 + h * h))
        m = m.with_merged_growth(GrowthModel.from_moments(0.03, sigma))
        f_m = evaluate_point(m.with_merged_growth(GrowthModel.from_moments(g_star, sigma))).merged.cv
        self.assertAlmostEqual(f_m, target_f, places=9)
        self.assertTrue(cv_mixture_check(a, b, f_m))
        interval = no_synergy_interval(m)
        self.assertFalse(interval.empty)
        self.assertFalse(interval.contains(r_star(a, b)))

    def test_randomized_characterisation(self):
        """Combined nonempty iff synergy, condition (6), f_M <= f_A and f_M <= f_B"""
        rng = np.random.default_rng(8)
        checked = claim_cases = 0
        for _ in range(1000):
            m = random_merger(rng)
            point = evaluate_point(m)
            mv = point.merged
            a, b = mv.acquirer, mv.target
            spread_m, spread_a, spread_b = mv.equity_mean * mv.cv, a.equity_mean * a.cv, b.equity_mean * b.cv
            margins = [mv.expected_synergy / mv.equity_mean, (spread_a + spread_b - spread_m) / spread_m,
                       (a.cv - mv.cv) / mv.cv, (b.cv - mv.cv) / mv.cv]
            if any(abs(x) < 1e-9 for x in margins):
                continue
            synergy, condition6, below_a, below_b = (x > 0 for x in margins)
            self.assertEqual(not point.variance.empty, condition6)
            self.assertEqual(not point.mean.empty, synergy)
            self.assertEqual(not point.combined.empty, synergy and condition6 and below_a and below_b)
            if synergy and below_a and below_b and condition6:
                claim_cases += 1
            checked += 1
        self.assertGreater(checked, 950)
        self.assertGreater(claim_cases, 0)

    def test_randomized_no_synergy_claims(self):
        """At the no-synergy growth: (7) iff nonempty, r* inside iff f_M <= min(f_A, f_B)"""
        rng = np.random.default_rng(9)
        checked = 0
        for _ in range(1000):
            m = random_merger(rng)
            a, b = pre_merger_valuations(m)
            g_star = no_synergy_growth(m)
            try:
                f_m = merged_valuation(m.with_merged_growth(
                    GrowthModel.from_moments(g_star, m.merged_growth.stddev))).cv
            except DomainError:
                continue
            weighted = (a.equity_mean * a.cv + b.equity_mean * b.cv) / (a.equity_mean + b.equity_mean)
            if near(f_m, [a.cv, b.cv, weighted]):
                continue
            interval = no_synergy_interval(m)
            self.assertEqual(not interval.empty, cv_mixture_check(a, b, f_m))
            self.assertEqual(interval.contains(r_star(a, b)), f_m <= min(a.cv, b.cv))
            checked += 1
        self.assertGreater(checked, 950)


class TestIntervalOracle(unittest.TestCase):
    """Interval membership against direct evaluation of both groups' conditions"""

    def test_randomized_membership(self):
        """1000 instances, 200 exchange ratios each, zero mismatches"""
        rng = np.random.default_rng(5)
        mismatches = compared = 0
        for _ in range(1000):
            m = random_merger(rng)
            point = evaluate_point(m)
            finite = [b for b in point.raw if math.isfinite(b) and b > 0]
            r_max = 2.0 * max(finite + [1.0])
            for r in np.linspace(0.0, r_max, 200):
                r = float(r)
                if near(r, point.raw):
                    continue
                acc = acceptance_at(m, r)
                compared += 1
                if (point.mean.contains(r) != acc.mean or point.variance.contains(r) != acc.variance
                        or point.combined.contains(r) != acc.all):
                    mismatches += 1
        self.assertEqual(mismatches, 0)
        self.assertGreater(compared, 190000)


class TestMonotonicity(unittest.TestCase):
    """Mean bounds widen and variance bounds tighten as g_M and sigma_M grow"""

    def assertMonotone(self, values, increasing):
        for prev, nxt in zip(values, values[1:]):
            if increasing:
                self.assertGreaterEqual(nxt, prev - slack(prev))
            else:
                self.assertLessEqual(nxt, prev + slack(prev))

    def test_in_growth(self):
        """50 instances over 100-point growth grids"""
        rng = np.random.default_rng(13)
        for _ in range(50):
            m = random_merger(rng)
            k_m = merger_discount_rate(m)
            sigma = m.merged_growth.stddev
            bounds = []
            for g in np.linspace(k_m - 0.06, k_m - 0.002, 100):
                try:
                    bounds.append(raw_bounds(merged_valuation(
                        m.with_merged_growth(GrowthModel.from_moments(float(g), sigma)))))
                except DomainError:
                    continue
            self.assertMonotone([b.mean_lo for b in bounds], increasing=False)
            self.assertMonotone([b.mean_hi for b in bounds], increasing=True)
            self.assertMonotone([b.var_lo for b in bounds], increasing=True)
            self.assertMonotone([b.var_hi for b in bounds], increasing=False)

    def test_in_growth_stddev(self):
        """50 instances over 100-point stddev grids"""
        rng = np.random.default_rng(17)
        for _ in range(50):
            m = random_merger(rng)
            g = m.merged_growth.mean
            bounds = []
            for sigma in np.linspace(0.001, 0.05, 100):
                try:
                    bounds.append(raw_bounds(merged_valuation(
                        m.with_merged_growth(GrowthModel.from_moments(g, float(sigma))))))
                except DomainError:
                    continue
            self.assertMonotone([b.var_lo for b in bounds], increasing=True)
            self.assertMonotone([b.var_hi for b in bounds], increasing=False)
            self.assertEqual(len({b.mean_lo for b in bounds}), 1)

    @given(g=st.floats(min_value=-0.02, max_value=0.055), sigma=st.floats(min_value=0.0, max_value=0.05))
    @settings(max_examples=200, deadline=None)
    def test_mean_interval_nonempty_iff_synergy(self, g, sigma):
        """Example companies: the mean interval exists exactly when W_M >= W_A + W_B"""
        point = evaluate_point(example_merger(g=g, sigma=sigma))
        synergy = point.merged.expected_synergy
        if abs(synergy) < 1e-6:
            return
        self.assertEqual(not point.mean.empty, synergy > 0)


if __name__ == '__main__':
    unittest.main()
