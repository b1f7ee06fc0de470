"""Deterministic rank-extreme mathematics.

Universal bound on the maximal correlation between p fixed directions and a
uniform direction in R^d, the derived bound on the sup-norm of a rank-d
Gaussian vector, the trichotomy limit in beta = d / log p, the separation
constant, the rank estimator inverting the bound, and the exact coordinate
tail laws for i.i.d. uniform unit vectors.

Natural logarithms throughout. The d = 1 convention: a rank-one vector has
|l_j^T U| = 1 for every j, so the correlation bound is exactly 1 and the
squared sup-norm bound is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from . import special
from .errors import DomainError

__all__ = [
    "Regime",
    "TrichotomyRegime",
    "RankEstimate",
    "D_MAX_FACTOR",
    "max_corr_bound",
    "rex_bound",
    "rex_bound_sq",
    "trichotomy_limit",
    "separation_constant",
    "estimate_rank",
    "classify_regime",
    "coord_tail",
    "bonferroni_max_corr_tail",
    "iid_max_corr_cdf",
]

# Cap for rank root searches: the bound saturates near 2 log p well before 10p.
D_MAX_FACTOR = 10


def _check_p(p: float, minimum: int = 2) -> None:
    if p < minimum:
        raise DomainError(f"requires p >= {minimum}, got {p}")


def max_corr_bound(p: float, d: float) -> float:
    """sqrt(1 - p^(-2/(d-1))): bound on max_j |l_j^T U| over p directions.

    d may be real-valued (the rank solvers relax integrality); d = 1 returns
    1 exactly under the rank-one convention.
    """
    _check_p(p)
    if d < 1:
        raise DomainError(f"requires d >= 1, got {d}")
    if d == 1:
        return 1.0
    return math.sqrt(-math.expm1(-2.0 * math.log(p) / (d - 1.0)))


def rex_bound_sq(p: float, d: float) -> float:
    """d * (1 - p^(-2/(d-1))), the squared sup-norm bound at real rank d.

    Continuous on [1, inf) with value 1 at d = 1; strictly increasing in d
    whenever log p > 1, saturating below 2 log p.
    """
    _check_p(p)
    if d < 1:
        raise DomainError(f"requires d >= 1, got {d}")
    if d == 1:
        return 1.0
    return d * (-math.expm1(-2.0 * math.log(p) / (d - 1.0)))


def rex_bound(p: float, d: float) -> float:
    """sqrt(d * (1 - p^(-2/(d-1)))): bound on the sup-norm of a rank-d
    p-variate standard Gaussian vector. Increasing in p, and in d whenever
    log p > 1.

    The bound is asymptotic in (p, d); sharp when the correlation matrix is
    generated by i.i.d. uniform unit vectors, but not for every matrix (an
    equicorrelation matrix with rho near 1 has full rank yet O(1) extremes).
    """
    return math.sqrt(rex_bound_sq(p, d))


def trichotomy_limit(beta: float) -> float:
    """sqrt(beta * (1 - e^(-2/beta))), the sup-norm rate in units of
    sqrt(log p) when d / log p -> beta. Zero at beta = 0 by continuity,
    strictly increasing, supremum sqrt(2) as beta -> infinity.
    """
    if beta < 0:
        raise DomainError(f"requires beta >= 0, got {beta}")
    if beta == 0:
        return 0.0
    return math.sqrt(beta * (-math.expm1(-2.0 / beta)))


@lru_cache(maxsize=1)
def separation_constant() -> float:
    """The unique root of beta * (1 - e^(-2/beta)) = 1, about 1.2550010.

    Ranks growing slower than this multiple of log p give extremes below
    sqrt(log p); faster growth puts them above. Bisection on [0.1, 10] to
    about 1e-12, cached after the first call (lru_cache is the once-only
    guard for concurrent first calls).
    """
    return _solve_separation_constant()


def _solve_separation_constant() -> float:
    lo, hi = 0.1, 10.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid * (-math.expm1(-2.0 / mid)) < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class Regime(Enum):
    """Trichotomy regime of d / log p relative to the separation constant."""

    SUPER_LOW = "super-low"
    EXACT_LOW = "exact-low"
    MODERATELY_LOW = "moderately-low"


@dataclass(frozen=True)
class TrichotomyRegime:
    tag: Regime
    beta: float


def classify_regime(d: float, p: float, margin: float = 0.10) -> TrichotomyRegime:
    """Classify the rank regime from beta = d / ln p.

    EXACT_LOW within a relative margin of the separation constant,
    SUPER_LOW below it, MODERATELY_LOW above. The margin is this package's
    device for a testable finite-p rule; the limiting statement is only
    about beta below / at / above the constant.
    """
    _check_p(p, minimum=3)
    if d < 1:
        raise DomainError(f"requires d >= 1, got {d}")
    if not 0.0 <= margin < 1.0:
        raise DomainError(f"requires margin in [0, 1), got {margin}")
    beta = d / math.log(p)
    crit = separation_constant()
    if abs(beta - crit) <= crit * margin:
        tag = Regime.EXACT_LOW
    elif beta < crit:
        tag = Regime.SUPER_LOW
    else:
        tag = Regime.MODERATELY_LOW
    return TrichotomyRegime(tag=tag, beta=beta)


@dataclass(frozen=True)
class RankEstimate:
    """Solution of d * (1 - p^(-2/(d-1))) = k_inf_sq, relaxed to real d.

    status is "ok", "below_range" (observed square below the d = 1 value 1;
    d_hat pinned to 1), or "above_range" (above the value at d = 10p, where
    the bound has saturated near 2 log p; d pinned to the cap).
    """

    d_real: float
    d_hat: int
    k_inf_sq: float
    status: str = "ok"

    def to_dict(self) -> dict:
        return {
            "d_real": self.d_real,
            "d_hat": self.d_hat,
            "k_inf_sq": self.k_inf_sq,
            "status": self.status,
        }


def estimate_rank(k_inf_sq: float, p: int) -> RankEstimate:
    """Invert the squared sup-norm bound to a rank estimate.

    The equation g(d) = d * (1 - p^(-2/(d-1))) = k_inf_sq has a unique real
    root by monotonicity of g; d_hat is that root rounded. Solved by
    bisection on [1, 10p].
    """
    _check_p(p)
    if not k_inf_sq >= 0.0:
        raise DomainError(f"requires k_inf_sq >= 0, got {k_inf_sq}")
    d_max = float(D_MAX_FACTOR * p)
    if k_inf_sq < 1.0:
        return RankEstimate(d_real=1.0, d_hat=1, k_inf_sq=k_inf_sq, status="below_range")
    if k_inf_sq > rex_bound_sq(p, d_max):
        return RankEstimate(
            d_real=d_max, d_hat=int(round(d_max)), k_inf_sq=k_inf_sq, status="above_range"
        )
    lo, hi = 1.0, d_max
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if rex_bound_sq(p, mid) < k_inf_sq:
            lo = mid
        else:
            hi = mid
    d_real = 0.5 * (lo + hi)
    return RankEstimate(d_real=d_real, d_hat=int(round(d_real)), k_inf_sq=k_inf_sq)


def coord_tail(a: float, d: int) -> float:
    """P(|U| > a) for one coordinate of a uniform unit vector on S^(d-1).

    U^2 ~ Beta(1/2, (d-1)/2), so the tail is 1 - I_{a^2}(1/2, (d-1)/2),
    evaluated as I_{1-a^2}((d-1)/2, 1/2) to avoid cancellation near a = 1.
    """
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"requires a in [0, 1], got {a}")
    if d < 2:
        raise DomainError(f"requires d >= 2, got {d}")
    if a == 0.0:
        return 1.0
    if a == 1.0:
        return 0.0
    x = (1.0 - a) * (1.0 + a)
    return special.reg_inc_beta(x, 0.5 * (d - 1.0), 0.5)


def bonferroni_max_corr_tail(p: int, d: int, a: float) -> float:
    """min(1, p * P(|U| > a)): union bound on P(max_j |l_j^T U| > a), valid
    for arbitrary unit vectors l_j. Computed in log space.
    """
    if p < 1:
        raise DomainError(f"requires p >= 1, got {p}")
    if not 0.0 < a < 1.0:
        raise DomainError(f"requires a in (0, 1), got {a}")
    tail = coord_tail(a, d)
    if tail <= 0.0:
        return 0.0
    log_val = math.log(p) + math.log(tail)
    return 1.0 if log_val >= 0.0 else math.exp(log_val)


def iid_max_corr_cdf(a: float, p: int, d: int) -> float:
    """P(max_j |l_j^T U| <= a) = (1 - P(|U| > a))^p, exact when the l_j are
    i.i.d. uniform on S^(d-1): conditioning on U and rotational symmetry make
    the p inner products i.i.d. coordinate draws. Log-space power.

    Correlations never exceed 1, so the CDF is 1 for any a >= 1.
    """
    if p < 1:
        raise DomainError(f"requires p >= 1, got {p}")
    if a < 0.0:
        raise DomainError(f"requires a >= 0, got {a}")
    if a >= 1.0:
        if d < 2:
            raise DomainError(f"requires d >= 2, got {d}")
        return 1.0
    tail = coord_tail(a, d)
    if tail >= 1.0:
        return 0.0
    return math.exp(p * math.log1p(-tail))
