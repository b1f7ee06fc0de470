"""Statistical procedures built on the rank-extreme bounds.

Rank confidence intervals from per-observation extremes, a fixed-rank test,
data-driven regime classification, the overall-significance test for
regressions, simultaneous-inference (PoSI) bound calculators, and the noise
admissibility diagnostic. All asymptotics are in the dimension p, not the
sample size n, so every procedure here is valid with n < d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import bounds, special
from .bounds import Regime
from .errors import (
    DimensionMismatchError,
    DomainError,
    EmptyInputError,
    ZeroNormColumnError,
)

__all__ = [
    "RankInterval",
    "RankTest",
    "RankClassification",
    "SignificanceResult",
    "CountMode",
    "PosiBound",
    "NoiseAdmissibility",
    "rex_confidence_interval",
    "rank_test",
    "classify_from_extremes",
    "overall_significance_test",
    "universal_threshold_limit",
    "posi_bound",
    "noise_admissibility",
    "make_report",
]


def _clean_extremes(extremes) -> np.ndarray:
    arr = np.asarray(extremes, dtype=float).ravel()
    if arr.size < 1:
        raise EmptyInputError("need at least one extreme value")
    if not np.all(arr >= 0.0):
        raise DomainError("extremes must be nonnegative")
    return arr


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"requires alpha in (0, 1), got {alpha}")


@dataclass(frozen=True)
class RankInterval:
    """Confidence interval for the rank at level 1 - alpha.

    Real endpoints come from solving the squared-bound equation at the
    square-root-transformed targets sqrt(mean K^2) -/+ z_{1-alpha/2}/sqrt(2n);
    integer endpoints widen conservatively (floor below, ceil above).
    above_range is set when the upper target exceeds the bound's saturation
    at the search cap d = 10p.
    """

    d_l: float
    d_u: float
    d_l_int: int
    d_u_int: int
    alpha: float
    n: int
    p: int
    mean_k_sq: float
    above_range: bool = False

    def covers(self, d: float) -> bool:
        return self.d_l <= d <= self.d_u

    def to_dict(self) -> dict:
        return {
            "d_l": self.d_l,
            "d_u": self.d_u,
            "d_l_int": self.d_l_int,
            "d_u_int": self.d_u_int,
            "alpha": self.alpha,
            "n": self.n,
            "p": self.p,
            "mean_k_sq": self.mean_k_sq,
            "above_range": self.above_range,
        }


def rex_confidence_interval(extremes, p: int, alpha: float = 0.05) -> RankInterval:
    """Rank CI from per-observation extremes K_i.

    Matches the mean of K^2 at d(1 - p^(-2/(d-1))) and stabilizes variance
    with the square-root transform; the asymptotic variance of K^2 is bounded
    by 2d, which makes the interval slightly conservative. Endpoints solve

        sqrt(d (1 - p^(-2/(d-1)))) = sqrt(mean K^2) -/+ z_{1-alpha/2}/sqrt(2n)

    for real d, clamped at d = 1 below.
    """
    arr = _clean_extremes(extremes)
    _check_alpha(alpha)
    n = arr.size
    mean_k_sq = float(np.mean(arr * arr))
    z = special.normal_quantile(1.0 - 0.5 * alpha)
    half = z / math.sqrt(2.0 * n)
    t_low = max(math.sqrt(mean_k_sq) - half, 0.0)
    t_high = math.sqrt(mean_k_sq) + half
    est_low = bounds.estimate_rank(t_low * t_low, p)
    est_high = bounds.estimate_rank(t_high * t_high, p)
    return RankInterval(
        d_l=est_low.d_real,
        d_u=est_high.d_real,
        d_l_int=int(math.floor(est_low.d_real)),
        d_u_int=int(math.ceil(est_high.d_real)),
        alpha=alpha,
        n=n,
        p=p,
        mean_k_sq=mean_k_sq,
        above_range=est_high.status == "above_range",
    )


@dataclass(frozen=True)
class RankTest:
    """Two-sided test of H0: rank = d0 from the chi-square aggregate."""

    statistic: float
    df: int
    lower_critical: float
    upper_critical: float
    reject: bool
    d0: int
    p: int
    n: int
    alpha: float

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "df": self.df,
            "lower_critical": self.lower_critical,
            "upper_critical": self.upper_critical,
            "reject": self.reject,
            "d0": self.d0,
            "p": self.p,
            "n": self.n,
            "alpha": self.alpha,
        }


def rank_test(extremes, p: int, d0: int, alpha: float = 0.05) -> RankTest:
    """Under H0: rank = d0, each K_i / sqrt(1 - p^(-2/(d0-1))) is
    asymptotically chi_{d0} (asymptotics in p), and the rows are independent,
    so T = sum_i K_i^2 / (1 - p^(-2/(d0-1))) is asymptotically chi-square
    with n*d0 degrees of freedom. Rejects when T leaves the central
    equal-tail (1 - alpha) band.
    """
    arr = _clean_extremes(extremes)
    _check_alpha(alpha)
    if d0 < 1:
        raise DomainError(f"requires d0 >= 1, got {d0}")
    n = arr.size
    denom = bounds.max_corr_bound(p, d0) ** 2
    statistic = float(np.sum(arr * arr)) / denom
    df = n * d0
    lower = special.chi_sq_quantile(0.5 * alpha, df)
    upper = special.chi_sq_quantile(1.0 - 0.5 * alpha, df)
    return RankTest(
        statistic=statistic,
        df=df,
        lower_critical=lower,
        upper_critical=upper,
        reject=bool(statistic < lower or statistic > upper),
        d0=d0,
        p=p,
        n=n,
        alpha=alpha,
    )


@dataclass(frozen=True)
class RankClassification:
    """Regime read off the mean extreme against the sqrt(log p) threshold."""

    tag: Regime
    mean_extreme: float
    threshold: float
    band_halfwidth: float
    n: int
    p: int

    def to_dict(self) -> dict:
        return {
            "regime": self.tag.value,
            "mean_extreme": self.mean_extreme,
            "threshold": self.threshold,
            "band_halfwidth": self.band_halfwidth,
            "n": self.n,
            "p": self.p,
        }


def classify_from_extremes(extremes, p: int) -> RankClassification:
    """Compare the mean extreme K-bar with sqrt(ln p).

    Below: SUPER_LOW; above: MODERATELY_LOW; EXACT_LOW inside a band of
    half-width z_{0.975} * s / sqrt(n) around the threshold, where s is the
    sample standard deviation of the K_i (the band is empty at n = 1).
    """
    arr = _clean_extremes(extremes)
    if p < 3:
        raise DomainError(f"requires p >= 3, got {p}")
    n = arr.size
    kbar = float(arr.mean())
    threshold = math.sqrt(math.log(p))
    band = 0.0
    if n >= 2:
        s = float(arr.std(ddof=1))
        band = special.normal_quantile(0.975) * s / math.sqrt(n)
    if abs(kbar - threshold) <= band:
        tag = Regime.EXACT_LOW
    elif kbar < threshold:
        tag = Regime.SUPER_LOW
    else:
        tag = Regime.MODERATELY_LOW
    return RankClassification(
        tag=tag,
        mean_extreme=kbar,
        threshold=threshold,
        band_halfwidth=band,
        n=n,
        p=p,
    )


@dataclass(frozen=True)
class SignificanceResult:
    """Outcome of the overall-significance test in a regression."""

    max_abs_corr: float
    threshold: float
    reject: bool
    p_value_bound: float
    argmax_index: int
    p: int
    n: int
    alpha: float

    def to_dict(self) -> dict:
        return {
            "max_abs_corr": self.max_abs_corr,
            "threshold": self.threshold,
            "reject": self.reject,
            "p_value_bound": self.p_value_bound,
            "argmax_index": self.argmax_index,
            "p": self.p,
            "n": self.n,
            "alpha": self.alpha,
        }


def overall_significance_test(
    design, response, alpha: float = 0.05, center: bool = False
) -> SignificanceResult:
    """Test whether any explanatory variable correlates with the response.

    Each design column and the response are standardized to unit Euclidean
    norm (length only — no centering by default, so the geometry is p + 1
    directions in R^n); the statistic is max_j |l_j^T u|. Under a
    spherically symmetric null the response direction is uniform on S^(n-1),
    so the statistic is below sqrt(1 - p^(-2/(n-1))) with probability
    tending to one: reject exactly when it exceeds that threshold.
    p_value_bound is the union bound with the exact coordinate tail, valid
    under the same null; alpha is recorded for reporting but the decision
    rule is the threshold comparison.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float).ravel()
    if X.ndim != 2:
        raise DimensionMismatchError(f"design must be 2-D, got shape {X.shape}")
    n, p = X.shape
    if n < 2:
        raise DomainError(f"requires n >= 2 observations, got {n}")
    if y.shape != (n,):
        raise DimensionMismatchError(
            f"response has shape {y.shape}, expected ({n},) to match the design"
        )
    _check_alpha(alpha)
    if center:
        X = X - X.mean(axis=0)
        y = y - y.mean()
    col_norms = np.linalg.norm(X, axis=0)
    zero = np.flatnonzero(col_norms == 0.0)
    if zero.size:
        raise ZeroNormColumnError(int(zero[0]))
    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0:
        raise ZeroNormColumnError(None)
    corr = (X.T @ y) / (col_norms * y_norm)
    abs_corr = np.abs(corr)
    argmax = int(np.argmax(abs_corr))
    stat = min(float(abs_corr[argmax]), 1.0)
    threshold = bounds.max_corr_bound(p, n)
    if stat <= 0.0:
        p_value = 1.0
    elif stat >= 1.0:
        p_value = 0.0
    else:
        p_value = bounds.bonferroni_max_corr_tail(p, n, stat)
    return SignificanceResult(
        max_abs_corr=stat,
        threshold=threshold,
        reject=bool(stat > threshold),
        p_value_bound=p_value,
        argmax_index=argmax,
        p=p,
        n=n,
        alpha=alpha,
    )


def universal_threshold_limit(p: float, n: int) -> float:
    """sqrt(2 ln p / n), the n / log p -> infinity limit of the regression
    significance threshold sqrt(1 - p^(-2/(n-1))); p may be real."""
    if p < 2:
        raise DomainError(f"requires p >= 2, got {p}")
    if n < 2:
        raise DomainError(f"requires n >= 2, got {n}")
    return math.sqrt(2.0 * math.log(p) / n)


class CountMode(Enum):
    """How to count the simultaneous t-statistics in the PoSI bound."""

    PAPER_RATE = "paper"
    EXACT_COUNT = "exact"


@dataclass(frozen=True)
class PosiBound:
    """Bound on the maximal t-statistic over submodels of size <= m.

    log_count is the natural log of the number of (variable, submodel)
    t-statistics counted; the bound applies the rank-extreme formula with
    effective rank p (the correlation matrix of the t-statistics has rank
    at most p).
    """

    p: int
    m: int
    log_count: float
    bound: float
    mode: CountMode

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "log_count": self.log_count,
            "bound": self.bound,
            "mode": self.mode.value,
        }


def _log_binomial(p: int, k: int) -> float:
    return (
        special.log_gamma(p + 1.0)
        - special.log_gamma(k + 1.0)
        - special.log_gamma(p - k + 1.0)
    )


def posi_bound(p: int, m: int, count_mode: CountMode = CountMode.EXACT_COUNT) -> PosiBound:
    """Simultaneous-inference bound at size cap m.

    EXACT_COUNT uses ln(sum_{k=1}^{m} k * C(p, k)), evaluated by log-sum-exp
    over log-binomials; at m = p that sum is p * 2^(p-1) exactly, so the
    full-model bound grows like sqrt(3/4) * sqrt(p) = 0.866 sqrt(p).
    PAPER_RATE uses the order envelope m * ln(6p / m).
    """
    if p < 2:
        raise DomainError(f"requires p >= 2, got {p}")
    if not 1 <= m <= p:
        raise DomainError(f"requires 1 <= m <= p, got m={m}")
    mode = CountMode(count_mode)
    if mode is CountMode.PAPER_RATE:
        log_count = m * math.log(6.0 * p / m)
    elif m == p:
        log_count = math.log(p) + (p - 1.0) * math.log(2.0)
    else:
        terms = [math.log(k) + _log_binomial(p, k) for k in range(1, m + 1)]
        peak = max(terms)
        log_count = peak + math.log(math.fsum(math.exp(t - peak) for t in terms))
    bound = math.sqrt(p * (-math.expm1(-2.0 * log_count / (p - 1.0))))
    return PosiBound(p=p, m=m, log_count=log_count, bound=bound, mode=mode)


@dataclass(frozen=True)
class NoiseAdmissibility:
    """Diagnostic ratio for measurement noise; advisory, not a test."""

    ratio: float
    flagged: bool
    p: int
    d: int
    sigma_max: float

    def to_dict(self) -> dict:
        return {
            "ratio": self.ratio,
            "flagged": self.flagged,
            "p": self.p,
            "d": self.d,
            "sigma_max": self.sigma_max,
        }


def noise_admissibility(p: int, d: int, sigma_max: float) -> NoiseAdmissibility:
    """rho = sigma_max * sqrt(ln p) / rex_bound(p, d).

    The noisy-observation conclusions need sigma_max small against
    sqrt(d (1 - p^(-2/(d-1))) / log p); the advisory flag fires at
    rho >= 0.1, a calibration of that smallness condition.
    """
    if p < 3:
        raise DomainError(f"requires p >= 3, got {p}")
    if d < 1:
        raise DomainError(f"requires d >= 1, got {d}")
    if sigma_max < 0:
        raise DomainError(f"requires sigma_max >= 0, got {sigma_max}")
    ratio = sigma_max * math.sqrt(math.log(p)) / bounds.rex_bound(p, d)
    return NoiseAdmissibility(
        ratio=ratio, flagged=bool(ratio >= 0.1), p=p, d=d, sigma_max=sigma_max
    )


def make_report(procedure: str, inputs: dict, seed=None, **sections) -> dict:
    """JSON-ready report: {procedure, inputs, seed, <result sections>}."""
    report = {"procedure": procedure, "inputs": dict(inputs), "seed": seed}
    for key, value in sections.items():
        report[key] = value.to_dict() if hasattr(value, "to_dict") else value
    return report
