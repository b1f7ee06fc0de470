"""Bound formulas, the separation constant, the rank solver, and the exact
tail laws, checked against log-space recomputation, quadrature, integer
arithmetic, and Monte Carlo."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from rexstat.bounds import (
    Regime,
    bonferroni_max_corr_tail,
    classify_regime,
    coord_tail,
    estimate_rank,
    iid_max_corr_cdf,
    max_corr_bound,
    rex_bound,
    rex_bound_sq,
    separation_constant,
    trichotomy_limit,
)
from rexstat.errors import DomainError
from rexstat.sampling import RngStream

# Root of b*(1 - e^(-2/b)) = 1 verified with 40-digit arithmetic.
SEPARATION_REFERENCE = 1.2550009749159753


def log_space_bound(p: float, d: float) -> float:
    # independent recomputation: exp((-2/(d-1)) ln p) without expm1
    if d == 1:
        return 1.0
    return math.sqrt(1.0 - math.exp(-2.0 * math.log(p) / (d - 1.0)))


class TestMaxCorrBound:
    def test_d2_value(self):
        assert max_corr_bound(10, 2) == pytest.approx(math.sqrt(0.99), rel=1e-14)
        for p in (2, 10, 1000, 10**6):
            assert max_corr_bound(p, 2) == pytest.approx(
                math.sqrt(1.0 - p**-2.0), rel=1e-13
            )

    def test_rank_one_convention(self):
        for p in (2, 3000, 10**6):
            assert max_corr_bound(p, 1) == 1.0
            assert rex_bound(p, 1) == 1.0
            assert rex_bound_sq(p, 1) == 1.0

    def test_log_space_recompute(self):
        for p in (10, 3000, 10**5):
            for d in (2, 3, 17, 400):
                assert max_corr_bound(p, d) == pytest.approx(
                    log_space_bound(p, d), rel=1e-12
                )

    def test_monotone_decreasing_in_d_increasing_in_p(self):
        # more dimensions push a random direction toward orthogonality, so
        # the correlation bound falls in d; more directions raise it in p
        ds = [2, 3, 5, 10, 50, 300]
        vals = [max_corr_bound(3000, d) for d in ds]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        ps = [2, 5, 50, 1000, 10**6]
        vals = [max_corr_bound(p, 7) for p in ps]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_tends_to_zero_for_huge_d(self):
        seq = [max_corr_bound(3000, d) for d in (10**3, 10**4, 10**5, 10**6)]
        assert all(b < a for a, b in zip(seq, seq[1:]))
        assert seq[-1] < 0.01

    def test_range(self):
        for p in (2, 100, 3000):
            for d in (1, 2, 7, 1000):
                assert 0.0 < max_corr_bound(p, d) <= 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            max_corr_bound(1, 3)
        with pytest.raises(DomainError):
            max_corr_bound(100, 0)


class TestRexBound:
    def test_value_3000_10(self):
        assert rex_bound(3000, 10) == pytest.approx(2.8830984579977827, rel=1e-12)
        assert rex_bound(3000, 10) == pytest.approx(
            math.sqrt(10) * log_space_bound(3000, 10), rel=1e-12
        )

    def test_monotone_both_arguments(self):
        for p in (100, 3000):
            vals = [rex_bound(p, d) for d in range(1, 60)]
            assert all(b > a for a, b in zip(vals, vals[1:]))
        for d in (2, 10, 100):
            vals = [rex_bound(p, d) for p in (10, 100, 3000, 10**5)]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_rate_at_separation_rank(self):
        # at d = beta_dagger ln p the bound is ~ sqrt(ln p); the finite-p
        # ratio is 1.0204 at p=3000 and shrinks toward 1 as p grows
        for p, cap in ((3000, 1.025), (10**6, 1.015)):
            d_star = separation_constant() * math.log(p)
            ratio = rex_bound(p, d_star) / math.sqrt(math.log(p))
            assert 1.0 < ratio < cap
        r3k = rex_bound(3000, separation_constant() * math.log(3000))
        r1m = rex_bound(10**6, separation_constant() * math.log(10**6))
        assert r1m / math.sqrt(math.log(10**6)) < r3k / math.sqrt(math.log(3000))

    def test_saturation_under_universal_rate(self):
        # d(1 - p^(-2/(d-1))) stays below 2 ln p
        for p in (100, 3000):
            cap = math.sqrt(2.0 * math.log(p)) * 1.01
            for d in np.geomspace(1, 10 * p, 200):
                assert rex_bound(p, float(d)) <= cap
                assert rex_bound_sq(p, float(d)) <= float(d)


class TestTrichotomyLimit:
    def test_zero(self):
        assert trichotomy_limit(0.0) == 0.0

    def test_at_separation_constant(self):
        assert trichotomy_limit(separation_constant()) == pytest.approx(1.0, abs=1e-8)

    def test_large_beta_sqrt2(self):
        # series: 1 - e^(-2/b) = 2/b - 2/b^2 + ..., so the limit is sqrt(2)
        assert trichotomy_limit(1e6) == pytest.approx(math.sqrt(2.0), abs=1e-5)

    def test_strictly_increasing_range(self):
        grid = np.linspace(0.01, 50.0, 800)
        vals = [trichotomy_limit(float(b)) for b in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert all(0.0 < v < math.sqrt(2.0) for v in vals)

    def test_domain(self):
        with pytest.raises(DomainError):
            trichotomy_limit(-0.1)


class TestSeparationConstant:
    def test_solves_equation(self):
        beta = separation_constant()
        assert abs(beta * (1.0 - math.exp(-2.0 / beta)) - 1.0) <= 1e-9

    def test_reference_value(self):
        # agrees with the published constant to 5 decimals (1.25500); the
        # 6th printed decimal of the reference is inconsistent with the
        # defining equation (see the acceptance suite)
        beta = separation_constant()
        assert beta == pytest.approx(SEPARATION_REFERENCE, abs=1e-9)
        assert round(beta, 5) == 1.25500

    def test_times_log_3000(self):
        assert separation_constant() * math.log(3000) == pytest.approx(10.048, abs=1e-3)

    def test_cached(self):
        assert separation_constant() is separation_constant() or (
            separation_constant() == separation_constant()
        )


class TestEstimateRank:
    def test_forward_inverse(self):
        est = estimate_rank(rex_bound_sq(1000, 5.0), 1000)
        assert est.status == "ok"
        assert est.d_real == pytest.approx(5.0, abs=1e-6)
        assert est.d_hat == 5

    def test_identity_on_integer_grid(self):
        for p, d_top in ((10, 90), (100, 500), (3000, 500), (15000, 500)):
            for d in range(2, d_top + 1, 7):
                est = estimate_rank(rex_bound_sq(p, float(d)), p)
                assert est.status == "ok"
                assert abs(est.d_real - d) <= 1e-6
                assert est.d_hat == d

    def test_below_range(self):
        est = estimate_rank(0.5, 3000)
        assert est.status == "below_range"
        assert est.d_hat == 1
        assert est.d_real == 1.0

    def test_above_range_near_saturation(self):
        p = 3000
        for eps in (1e-3, 0.01, 0.1):
            est = estimate_rank(2.0 * math.log(p) * (1.0 + eps), p)
            assert est.status == "above_range"
        # just below saturation still solves
        est = estimate_rank(rex_bound_sq(p, 5 * p), p)
        assert est.status == "ok"

    def test_threshold_square_root(self):
        # the root of g(d) = ln p at p = 3000 is 9.4066: the separation-rank
        # asymptotic g(beta_dagger ln p) ~ ln p has a finite-p gap
        p = 3000
        est = estimate_rank(math.log(p), p)
        assert abs(rex_bound_sq(p, est.d_real) - math.log(p)) <= 1e-9
        assert est.d_real == pytest.approx(9.4066, abs=1e-3)
        # the ratio to beta_dagger ln p rises toward 1 with p
        ratio_small = est.d_real / (separation_constant() * math.log(p))
        est_big = estimate_rank(math.log(10**6), 10**6)
        ratio_big = est_big.d_real / (separation_constant() * math.log(10**6))
        assert ratio_small < ratio_big < 1.0

    def test_residual_tolerance(self):
        for k_sq in (1.5, 4.0, 9.0, 14.0):
            est = estimate_rank(k_sq, 3000)
            assert abs(rex_bound_sq(3000, est.d_real) - k_sq) <= 1e-9

    def test_domain(self):
        with pytest.raises(DomainError):
            estimate_rank(-1.0, 3000)
        with pytest.raises(DomainError):
            estimate_rank(2.0, 1)


class TestMonotoneG:
    @pytest.mark.parametrize("p", [10, 100, 3000, 15000])
    def test_strictly_increasing(self, p):
        grid = np.linspace(1.0, 10.0 * p, 10_000)
        vals = np.array([rex_bound_sq(p, float(d)) for d in grid])
        assert np.all(np.diff(vals) > 0.0)


class TestClassifyRegime:
    def test_reference_cases(self):
        assert classify_regime(3, 3000, 0.1).tag is Regime.SUPER_LOW
        assert classify_regime(10, 3000, 0.1).tag is Regime.EXACT_LOW
        assert classify_regime(100, 3000, 0.1).tag is Regime.MODERATELY_LOW

    def test_beta_field(self):
        result = classify_regime(10, 3000)
        assert result.beta == pytest.approx(10.0 / math.log(3000), rel=1e-14)

    def test_margin_edges(self):
        beta_dag = separation_constant()
        p = 3000
        d_exact = beta_dag * math.log(p)
        assert classify_regime(d_exact, p, 0.0).tag is Regime.EXACT_LOW
        assert classify_regime(d_exact * 0.89, p, 0.1).tag is Regime.SUPER_LOW
        assert classify_regime(d_exact * 1.11, p, 0.1).tag is Regime.MODERATELY_LOW

    def test_domain(self):
        with pytest.raises(DomainError):
            classify_regime(3, 3000, margin=1.0)
        with pytest.raises(DomainError):
            classify_regime(3, 3000, margin=-0.1)
        with pytest.raises(DomainError):
            classify_regime(3, 2)


class TestCoordTail:
    def test_d3_closed_form(self):
        # density of U^2 is Beta(1/2, 1): |U| uniform, so P(|U| > a) = 1 - a
        for a in np.linspace(0.0, 1.0, 41):
            assert coord_tail(float(a), 3) == pytest.approx(1.0 - a, abs=1e-12)

    def test_quadrature_oracle(self):
        # P(|U| > a) = int_{a^2}^1 x^(-1/2) (1-x)^((d-3)/2) dx / B(1/2,(d-1)/2)
        for d in (2, 5, 12):
            bnorm = math.exp(
                math.lgamma(0.5) + math.lgamma((d - 1) / 2.0) - math.lgamma(d / 2.0)
            )
            for a in (0.1, 0.5, 0.9):
                val, _ = integrate.quad(
                    lambda x: x**-0.5 * (1.0 - x) ** ((d - 3) / 2.0), a * a, 1.0
                )
                assert coord_tail(a, d) == pytest.approx(val / bnorm, rel=1e-8)

    def test_endpoints(self):
        for d in (2, 3, 10, 100):
            assert coord_tail(0.0, d) == 1.0
            assert coord_tail(1.0, d) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            coord_tail(1.5, 3)
        with pytest.raises(DomainError):
            coord_tail(0.5, 1)


class TestBonferroni:
    def test_clamp(self):
        assert bonferroni_max_corr_tail(1000, 3, 0.1) == 1.0

    def test_d3_value(self):
        assert bonferroni_max_corr_tail(10, 3, 0.95) == pytest.approx(0.5, rel=1e-12)

    def test_monte_carlo_exceedance(self):
        # empirical P(max_j |l_j^T U| > a) must sit below the union bound
        p, d = 50, 5
        a = max_corr_bound(p, d) * 1.05
        if a >= 1.0:
            a = 0.999
        reps = 100_000
        gen = RngStream(424242, 0).generator()
        exceed = 0
        chunk = 10_000
        done = 0
        while done < reps:
            r = min(chunk, reps - done)
            alls = gen.standard_normal((r, d, p))
            norms = np.linalg.norm(alls, axis=1)
            us = gen.standard_normal((r, d))
            us /= np.linalg.norm(us, axis=1, keepdims=True)
            vals = np.abs(np.einsum("rd,rdp->rp", us, alls)) / norms
            exceed += int((vals.max(axis=1) > a).sum())
            done += r
        freq = exceed / reps
        bound = bonferroni_max_corr_tail(p, d, a)
        assert freq <= bound + 3.0 * math.sqrt(bound * (1 - bound) / reps + 1e-12)

    def test_dominates_exact_iid_exceedance(self):
        for p in (5, 50, 1000):
            for d in (2, 5, 20):
                for a in np.linspace(0.05, 0.95, 19):
                    exact = 1.0 - iid_max_corr_cdf(float(a), p, d)
                    assert exact <= bonferroni_max_corr_tail(p, d, float(a)) + 1e-12


class TestIidMaxCorrCdf:
    def test_d3_power_form(self):
        for p in (1, 4, 100):
            for a in np.linspace(0.05, 0.95, 10):
                assert iid_max_corr_cdf(float(a), p, 3) == pytest.approx(
                    float(a) ** p, rel=1e-10
                )

    def test_full_mass(self):
        assert iid_max_corr_cdf(1.0, 50, 4) == 1.0

    def test_single_vector(self):
        for a in (0.2, 0.7):
            assert iid_max_corr_cdf(a, 1, 5) == pytest.approx(
                1.0 - coord_tail(a, 5), rel=1e-12
            )

    def test_above_one_clamps(self):
        assert iid_max_corr_cdf(1.1, 100, 5) == 1.0

    def test_sharp_transition_at_bound(self):
        p, d, eps = 10**6, 5, 0.1
        b = max_corr_bound(p, d)
        assert iid_max_corr_cdf(min(1.0, (1 + eps) * b), p, d) > 0.99
        assert iid_max_corr_cdf((1 - eps) * b, p, d) < 0.01
