"""Scalar special functions and asymptotic-expansion evaluators.

Provides log-Gamma, the log multivariate Gamma function, the standard
normal CDF and quantile, chi-square tail probabilities and quantiles, and
evaluators that compare the large-argument expansions of Gamma ratios used
by the normal-limit derivations against direct evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

from .errors import DomainError, NumericalFailure

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)

# B_{2k} / (2k (2k-1)) for k = 1..8, the Stirling series coefficients.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

_TERM_TOL = 1e-15
_BASE_ITER_CAP = 500
_STD_NORMAL = NormalDist()


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for positive real ``x``.

    Raises
    ------
    DomainError
        If ``x <= 0`` or ``x`` is not finite.
    """
    x = float(x)
    if not (x > 0.0) or math.isinf(x):
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    return math.lgamma(x)


def _stirling_tail(x: float) -> float:
    """``log_gamma(x) - [(x - 1/2) log x - x + log(2 pi)/2]`` for x >= 10."""
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * inv2 + c
    return acc * inv


def log_multivariate_gamma(p: int, a: float) -> float:
    """Log of the multivariate Gamma function ``Gamma_p(a)``.

    ``Gamma_p(a) = pi^{p(p-1)/4} prod_{i=1}^{p} Gamma(a - (i-1)/2)``, defined
    for ``a > (p-1)/2``.

    Raises
    ------
    DomainError
        If ``p < 1`` or ``a <= (p-1)/2``.
    """
    if int(p) != p or p < 1:
        raise DomainError(f"dimension p must be a positive integer, got {p!r}")
    p = int(p)
    a = float(a)
    if not a > 0.5 * (p - 1):
        raise DomainError(f"Gamma_p(a) needs a > (p-1)/2 = {0.5 * (p - 1)}, got a={a}")
    if p == 1:
        return log_gamma(a)
    total = 0.25 * p * (p - 1) * LOG_PI
    for i in range(p):
        total += math.lgamma(a - 0.5 * i)
    return total


def log_mvgamma_ratio(p: int, a: float, b: float) -> float:
    """``log Gamma_p(a) - log Gamma_p(b)`` summed term by term.

    Pairing the factors avoids cancelling two large sums.
    """
    lim = 0.5 * (p - 1)
    if not (a > lim and b > lim):
        raise DomainError(f"Gamma_p arguments must exceed (p-1)/2 = {lim}; got {a}, {b}")
    total = 0.0
    for i in range(int(p)):
        total += math.lgamma(a - 0.5 * i) - math.lgamma(b - 0.5 * i)
    return total


def normal_cdf(z: float) -> float:
    """Standard normal CDF, ``Phi(z)``."""
    z = float(z)
    if math.isnan(z):
        raise DomainError("normal_cdf of NaN")
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_ppf(q: float) -> float:
    """Standard normal quantile; ``-inf`` at 0 and ``+inf`` at 1."""
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"probability must lie in [0, 1], got {q}")
    if q == 0.0:
        return -math.inf
    if q == 1.0:
        return math.inf
    return _STD_NORMAL.inv_cdf(q)


def _log_gamma_density_prefactor(a: float, x: float) -> float:
    """``a log x - x - log_gamma(a)``, arranged to avoid cancellation at large a."""
    if a < 10.0 or x < 0.5 * a:
        return a * math.log(x) - x - math.lgamma(a)
    u = (x - a) / a
    return -a * (u - math.log1p(u)) + 0.5 * math.log(a / (2.0 * math.pi)) - _stirling_tail(a)


def _iteration_cap(a: float) -> int:
    # Both expansions need O(sqrt(a)) terms near x ~ a.
    return _BASE_ITER_CAP + int(20.0 * math.sqrt(a))


def _lower_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x)`` by its power series."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_iteration_cap(a)):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _TERM_TOL:
            return total * math.exp(_log_gamma_density_prefactor(a, x))
    raise NumericalFailure(f"incomplete gamma series did not converge (a={a}, x={x})")


def _upper_fraction(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x)`` by modified Lentz."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _iteration_cap(a) + 1):
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
        if abs(delta - 1.0) < _TERM_TOL:
            return h * math.exp(_log_gamma_density_prefactor(a, x))
    raise NumericalFailure(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def chi_square_sf(x: float, f: float) -> float:
    """Upper tail ``P(chi2_f > x)``.

    Evaluated as the regularized upper incomplete gamma ``Q(f/2, x/2)``:
    series for ``x/2 < f/2 + 1``, continued fraction otherwise.

    Raises
    ------
    DomainError
        If ``x < 0`` or ``f <= 0``.
    NumericalFailure
        If the expansion exceeds its iteration cap.
    """
    x = float(x)
    f = float(f)
    if not f > 0.0 or math.isinf(f):
        raise DomainError(f"degrees of freedom must be positive, got {f}")
    if math.isnan(x) or x < 0.0:
        raise DomainError(f"chi-square argument must be >= 0, got {x}")
    a = 0.5 * f
    h = 0.5 * x
    # subnormal x halves to zero
    if h == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if h < a + 1.0:
        return min(1.0, max(0.0, 1.0 - _lower_series(a, h)))
    return min(1.0, max(0.0, _upper_fraction(a, h)))


def chi_square_cdf(x: float, f: float) -> float:
    """Lower tail ``P(chi2_f <= x)``."""
    x = float(x)
    f = float(f)
    if not f > 0.0:
        raise DomainError(f"degrees of freedom must be positive, got {f}")
    if math.isnan(x) or x < 0.0:
        raise DomainError(f"chi-square argument must be >= 0, got {x}")
    a = 0.5 * f
    h = 0.5 * x
    if h == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if h < a + 1.0:
        return min(1.0, _lower_series(a, h))
    return min(1.0, max(0.0, 1.0 - _upper_fraction(a, h)))


def chi_square_isf(q: float, f: float) -> float:
    """Upper-tail quantile: the ``x`` with ``chi_square_sf(x, f) = q``.

    Bisection on a bracket grown from the Wilson-Hilferty guess.
    """
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"probability must lie in [0, 1], got {q}")
    if q == 1.0:
        return 0.0
    if q == 0.0:
        return math.inf
    z = normal_ppf(1.0 - q)
    c = 2.0 / (9.0 * f)
    guess = max(f * (1.0 - c + z * math.sqrt(c)) ** 3, 1e-8)
    lo, hi = 0.0, guess
    while chi_square_sf(hi, f) > q:
        lo, hi = hi, 2.0 * hi + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chi_square_sf(mid, f) > q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ExpansionResult:
    """Prediction of an asymptotic expansion next to the direct value."""

    value: float
    exact: float

    @property
    def abs_error(self) -> float:
        return abs(self.value - self.exact)


def gamma_ratio_expansion(x: float, b: float) -> ExpansionResult:
    """Two-term expansion of ``log Gamma(x+b)/Gamma(x)``.

    Prediction ``b log x + (b^2 - b)/(2x)``; the remainder is ``O(x^-2)``
    for bounded ``b`` and ``O(x^-1/2)`` for ``b = O(sqrt(x))``.
    """
    x = float(x)
    b = float(b)
    if not (x > 0.0 and x + b > 0.0):
        raise DomainError(f"need x > 0 and x + b > 0, got x={x}, b={b}")
    value = b * math.log(x) + (b * b - b) / (2.0 * x)
    exact = math.lgamma(x + b) - math.lgamma(x)
    return ExpansionResult(value, exact)


def mvgamma_ratio_expansion(n: float, p: int, t: float, s: float) -> ExpansionResult:
    """Expansion of ``log Gamma_p(n/2 + t)/Gamma_p(n/2 + s)`` for large n.

    Prediction::

        p (t - s)(log n - 1 - log 2)
            + r^2 [(t^2 - s^2) - (p - n + 1/2)(t - s)],   r^2 = -log(1 - p/n)
    """
    n = float(n)
    if int(p) != p or p < 1:
        raise DomainError(f"p must be a positive integer, got {p!r}")
    if not n > p:
        raise DomainError(f"need n > p, got n={n}, p={p}")
    r2 = -math.log1p(-p / n)
    d = t - s
    value = p * d * (math.log(n) - 1.0 - math.log(2.0)) + r2 * ((t * t - s * s) - (p - n + 0.5) * d)
    exact = log_mvgamma_ratio(p, 0.5 * n + t, 0.5 * n + s)
    return ExpansionResult(value, exact)


def gamma_product_expansion(n: int, p: int, t: float) -> ExpansionResult:
    """Expansion of ``log prod_{i=n-p}^{n-1} Gamma(i/2 - t)/Gamma(i/2)``.

    Prediction ``p t (1 + log 2 - log n) + r^2 (t^2 + (p - n + 1.5) t)`` with
    ``r^2 = -log(1 - p/n)``.
    """
    if not (int(n) == n and int(p) == p and 1 <= p < n):
        raise DomainError(f"need integers 1 <= p < n, got n={n}, p={p}")
    n = int(n)
    p = int(p)
    if not 0.5 * (n - p) - t > 0.0:
        raise DomainError(f"need (n-p)/2 - t > 0, got {(n - p) / 2 - t}")
    r2 = -math.log1p(-p / n)
    value = p * t * (1.0 + math.log(2.0) - math.log(n)) + r2 * (t * t + (p - n + 1.5) * t)
    exact = 0.0
    for i in range(n - p, n):
        exact += math.lgamma(0.5 * i - t) - math.lgamma(0.5 * i)
    return ExpansionResult(value, exact)
