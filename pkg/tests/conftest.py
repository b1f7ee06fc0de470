"""Shared fixtures: the heavy seeded Monte Carlo runs used by both the
module tests and the acceptance suite are computed once per session."""

from __future__ import annotations

import pytest

import rexstat as rx

# Master seed for the acceptance-scale runs. Fixed so results are exactly
# reproducible; chosen once and not tuned (the asserted quantities sit well
# inside their tolerance bands in expectation).
ACCEPT_SEED = 20260808


@pytest.fixture(scope="session")
def tri5000() -> rx.TrichotomyResult:
    """Single-observation extreme study: p=3000, five ranks, 5000 reps."""
    config = rx.TrichotomyConfig(
        p=3000,
        ranks=(3, 10, 100, 300, 3000),
        reps=5000,
        n_for_means=30,
        seed=ACCEPT_SEED,
    )
    return rx.run_trichotomy(config)


@pytest.fixture(scope="session")
def sep2000() -> rx.MeanSeparationResult:
    """Mean-extreme separation study: p=3000, n=30, 2000 reps."""
    config = rx.TrichotomyConfig(
        p=3000,
        ranks=(3, 100, 300, 3000),
        reps=2000,
        n_for_means=30,
        seed=ACCEPT_SEED + 1,
    )
    return rx.run_mean_separation(config)


@pytest.fixture(scope="session")
def table1() -> tuple:
    """Coverage grids: p=3000 at d=5..12 and p=15000 spot cells, 1000 reps."""
    cfg_a = rx.CoverageConfig(
        p_values=(3000,),
        d_values=tuple(range(5, 13)),
        alpha=0.05,
        reps=1000,
        seed=ACCEPT_SEED + 2,
    )
    cfg_b = rx.CoverageConfig(
        p_values=(15000,),
        d_values=(5, 11),
        alpha=0.05,
        reps=1000,
        seed=ACCEPT_SEED + 3,
    )
    return rx.run_coverage(cfg_a), rx.run_coverage(cfg_b)
