"""Scalar special functions: log-gamma, regularized incomplete gamma and
beta, and the normal / chi CDFs and quantiles built from them.

Everything downstream (coordinate tail laws, test thresholds, confidence
solving) reduces to the four primitives in this module. All functions are
pure, operate on Python floats, and are safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "log_gamma",
    "reg_inc_gamma_p",
    "reg_inc_beta",
    "normal_cdf",
    "normal_quantile",
    "chi_cdf",
    "chi_quantile",
    "chi_sq_cdf",
    "chi_sq_quantile",
]


@dataclass(frozen=True)
class Tolerance:
    """Convergence policy for the iterative evaluations.

    rel_eps is the relative error target for series / continued fractions;
    max_iter caps the iteration count. rel_eps must lie in (0, 1e-6] and
    max_iter must be at least 100.
    """

    rel_eps: float = 1e-15
    max_iter: int = 500

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_eps <= 1e-6):
            raise DomainError(f"rel_eps must be in (0, 1e-6], got {self.rel_eps}")
        if self.max_iter < 100:
            raise DomainError(f"max_iter must be >= 100, got {self.max_iter}")


DEFAULT_TOL = Tolerance()

# Lanczos series, g = 671/128; relative error below 1e-14 on the positive axis.
_LANCZOS_G = 5.24218750000000000
_LANCZOS_COF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_SQRT_TWO_PI = 2.5066282746310005


def log_gamma(x: float) -> float:
    """Natural log of the gamma function, ln Gamma(x), for x > 0."""
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    tmp = x + _LANCZOS_G
    tmp = (x + 0.5) * math.log(tmp) - tmp
    ser = 0.999999999999997092
    y = x
    for c in _LANCZOS_COF:
        y += 1.0
        ser += c / y
    return tmp + math.log(_SQRT_TWO_PI * ser / x)


def reg_inc_gamma_p(a: float, x: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).

    Power series for x < a + 1, continued fraction for the upper tail
    otherwise; both are evaluated to tol.rel_eps.
    """
    if not a > 0.0:
        raise DomainError(f"reg_inc_gamma_p requires a > 0, got a={a}")
    if not x >= 0.0:
        raise DomainError(f"reg_inc_gamma_p requires x >= 0, got x={x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_p_series(a, x, tol)
    return 1.0 - _gamma_q_contfrac(a, x, tol)


def _gamma_norm(a: float, x: float) -> float:
    # x^a e^{-x} / Gamma(a), the prefactor shared by both expansions
    return math.exp(a * math.log(x) - x - log_gamma(a))


def _gamma_p_series(a: float, x: float, tol: Tolerance) -> float:
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(tol.max_iter):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * tol.rel_eps:
            return total * _gamma_norm(a, x)
    raise ConvergenceError(f"incomplete gamma series stalled at a={a}, x={x}")


def _gamma_q_contfrac(a: float, x: float, tol: Tolerance) -> float:
    # modified Lentz evaluation of the upper-tail continued fraction
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, tol.max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol.rel_eps:
            return h * _gamma_norm(a, x)
    raise ConvergenceError(f"incomplete gamma fraction stalled at a={a}, x={x}")


def reg_inc_beta(x: float, a: float, b: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Regularized incomplete beta I_x(a, b) for x in [0, 1], a, b > 0.

    Continued fraction in the rapidly converging region, with the symmetry
    I_x(a, b) = 1 - I_{1-x}(b, a) otherwise.
    """
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"reg_inc_beta requires a, b > 0, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"reg_inc_beta requires x in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        a * math.log(x)
        + b * math.log1p(-x)
        - (log_gamma(a) + log_gamma(b) - log_gamma(a + b))
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_contfrac(x, a, b, tol) / a
    return 1.0 - front * _beta_contfrac(1.0 - x, b, a, tol) / b


def _beta_contfrac(x: float, a: float, b: float, tol: Tolerance) -> float:
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, tol.max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol.rel_eps:
            return h
    raise ConvergenceError(f"incomplete beta fraction stalled at x={x}, a={a}, b={b}")


def normal_cdf(z: float) -> float:
    """Standard normal CDF Phi(z), via P(1/2, z^2/2) = erf(|z|/sqrt(2))."""
    if z == 0.0:
        return 0.5
    half_erf = 0.5 * reg_inc_gamma_p(0.5, 0.5 * z * z)
    return 0.5 + half_erf if z > 0.0 else 0.5 - half_erf


def normal_quantile(q: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Inverse standard normal CDF, |Phi(z) - q| driven below 1e-12."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"normal_quantile requires q in (0, 1), got {q}")
    if q == 0.5:
        return 0.0
    lo, hi = -1.0, 1.0
    while normal_cdf(lo) > q and lo > -40.0:
        lo *= 2.0
    while normal_cdf(hi) < q and hi < 40.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if normal_cdf(mid) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def chi_cdf(x: float, d: int) -> float:
    """CDF of the chi distribution with d degrees of freedom."""
    if d < 1:
        raise DomainError(f"chi_cdf requires d >= 1, got {d}")
    if not x >= 0.0:
        raise DomainError(f"chi_cdf requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return reg_inc_gamma_p(0.5 * d, 0.5 * x * x)


def _chi_log_pdf(x: float, d: int) -> float:
    return (
        (d - 1.0) * math.log(x)
        - 0.5 * x * x
        - (0.5 * d - 1.0) * math.log(2.0)
        - log_gamma(0.5 * d)
    )


def chi_quantile(q: float, d: int) -> float:
    """Inverse chi CDF: bracketed bisection refined by Newton steps."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"chi_quantile requires q in (0, 1), got {q}")
    if d < 1:
        raise DomainError(f"chi_quantile requires d >= 1, got {d}")
    lo = 0.0
    hi = math.sqrt(d) + 1.0
    while chi_cdf(hi, d) < q:
        hi *= 2.0
        if hi > 1e8:
            raise ConvergenceError(f"chi_quantile bracket blew up at q={q}, d={d}")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if chi_cdf(mid, d) < q:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(3):
        f = chi_cdf(x, d) - q
        step = f * math.exp(-_chi_log_pdf(x, d))
        x_new = x - step
        if not lo <= x_new <= hi:
            break
        x = x_new
    return x


def chi_sq_cdf(x: float, k: int) -> float:
    """CDF of the chi-square distribution with k degrees of freedom."""
    if k < 1:
        raise DomainError(f"chi_sq_cdf requires k >= 1, got {k}")
    if not x >= 0.0:
        raise DomainError(f"chi_sq_cdf requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return reg_inc_gamma_p(0.5 * k, 0.5 * x)


def chi_sq_quantile(q: float, k: int) -> float:
    """Inverse chi-square CDF, as the squared chi quantile."""
    return chi_quantile(q, k) ** 2
