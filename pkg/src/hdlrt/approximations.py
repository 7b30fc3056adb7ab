"""Classical chi-square and high-dimensional normal approximations.

For each statistic this module supplies

* the Bartlett-corrected chi-square limit: a multiplier applied to the log
  statistic and the degrees of freedom ``f``, valid for fixed ``p``;
* a normal limit ``(log T - center) / scale -> N(0, 1)`` valid when ``p``
  grows proportionally with ``n``.

Both tests reject for small likelihood ratios: the normal rule rejects when
``z <= -z_alpha`` and the chi-square rule when the (positive) chi-square
form exceeds its upper ``alpha`` quantile.

Throughout, ``r2(x) = -log(1 - p/x)`` and is evaluated with ``log1p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .design import Shape, TestKind, validate_partition
from .errors import DomainError, GroupTooSmall, TheoremDomainError
from .lrt import LogStatistic
from .special import chi_square_isf, chi_square_sf, normal_cdf, normal_ppf


@dataclass(frozen=True)
class CltParams:
    """Centering and scaling of a log statistic for its normal limit."""

    center: float
    scale: float
    theorem_domain_ok: bool = True
    warnings: tuple[str, ...] = ()

    def standardize(self, log_value: float) -> float:
        return (log_value - self.center) / self.scale


@dataclass(frozen=True)
class ChiSquareParams:
    """Bartlett correction for the classical chi-square limit.

    Attributes
    ----------
    rho : float
        Correction factor.
    f : int
        Degrees of freedom (integer for all six tests).
    multiplier : float
        Factor taking the reported log statistic to the chi-square form.
    multiplier_form : str
        Human-readable description of ``multiplier``.
    """

    rho: float
    f: int
    multiplier: float
    multiplier_form: str
    warnings: tuple[str, ...] = ()

    def statistic(self, log_value: float) -> float:
        return self.multiplier * log_value

    def p_value(self, log_value: float) -> float:
        if self.f <= 0:
            return math.nan
        return chi_square_sf(max(self.statistic(log_value), 0.0), self.f)


def _r2(p: float, x: float) -> float:
    return -math.log1p(-p / x)


def _check_np(n: int, p: int) -> None:
    if int(n) != n or int(p) != p or n < 2 or p < 1:
        raise DomainError(f"need integers n >= 2 and p >= 1, got n={n}, p={p}")


def _gate(ok: bool, condition: str, force: bool, feasible: bool = False) -> tuple[bool, tuple]:
    """Resolve a sample-size condition.

    Returns ``(theorem_domain_ok, warnings)``. Raises unless ``force`` is set
    and the formulas remain finite (``feasible``).
    """
    if ok:
        return True, ()
    if force and feasible:
        return False, (f"normal limit asserted only for {condition}; forced evaluation",)
    raise TheoremDomainError(f"normal approximation requires {condition}")


# ----------------------------------------------------------------------------
# normal limits


def clt_sphericity(n: int, p: int, force: bool = False) -> CltParams:
    """Center ``-p - (n-p-3/2) log(1-p/(n-1))`` and scale
    ``sqrt(-2[p/(n-1) + log(1-p/(n-1))])`` for ``log V``; needs ``n > p + 1``."""
    _check_np(n, p)
    ok, warn = _gate(n > p + 1, f"n > p + 1 (got n={n}, p={p})", force)
    y = p / (n - 1)
    lg = math.log1p(-y)
    center = -p - (n - p - 1.5) * lg
    var = -2.0 * (y + lg)
    return CltParams(center, math.sqrt(var), ok, warn)


def clt_block_independence(n_samples: int, partition, force: bool = False) -> CltParams:
    """Normal limit of ``log W`` for block independence.

    Center ``-r2(N-1)(p-N+3/2) + sum_i r2_i(N-1)(p_i-N+3/2)`` and variance
    ``2 r2(N-1) - 2 sum_i r2_i(N-1)``, where ``N`` is the number of
    observations and ``r2_i`` uses the block size ``p_i``.
    """
    part = validate_partition(partition)
    p = sum(part)
    big_n = int(n_samples)
    _check_np(big_n, p)
    ok, warn = _gate(big_n > p + 1, f"N > p + 1 (got N={big_n}, p={p})", force)
    m = big_n - 1
    center = -_r2(p, m) * (p - big_n + 1.5)
    var = 2.0 * _r2(p, m)
    for q in part:
        center += _r2(q, m) * (q - big_n + 1.5)
        var -= 2.0 * _r2(q, m)
    return CltParams(center, math.sqrt(var), ok, warn)


def _check_sizes(sizes, p: int) -> tuple[int, ...]:
    sz = tuple(int(s) for s in sizes)
    if len(sz) < 2:
        raise GroupTooSmall(f"need at least two groups, got {len(sz)}")
    if any(s < 2 for s in sz):
        raise GroupTooSmall(f"every group needs n_i >= 2, got {sz}")
    _check_np(sum(sz), p)
    return sz


def clt_equal_distributions(sizes, p: int, force: bool = False) -> CltParams:
    """Normal limit of ``log Lambda`` for equality of k distributions.

    The ratios ``y_i`` in the center are taken as ``p / n_i``; the scale is
    ``n * sigma``.
    """
    sz = _check_sizes(sizes, p)
    k = len(sz)
    n = sum(sz)
    ok, warn = _gate(min(sz) > p + 1, f"every n_i > p + 1 (got n_i={sz}, p={p})", force)
    r2n = _r2(p, n)
    center = -2.0 * k * p - sum(p / ni for ni in sz) + n * r2n * (2 * p - 2 * n + 3)
    var = -r2n
    for ni in sz:
        r2i = _r2(p, ni - 1)
        center -= ni * r2i * (2 * p - 2 * ni + 3)
        var += (ni / n) ** 2 * r2i
    return CltParams(0.25 * center, n * math.sqrt(0.5 * var), ok, warn)


def clt_equal_covariances(sizes, p: int, force: bool = False) -> CltParams:
    """Normal limit of ``log Lambda*`` for equality of k covariance matrices.

    The scale is ``(n - k) * sigma``.
    """
    sz = _check_sizes(sizes, p)
    k = len(sz)
    n = sum(sz)
    ok, warn = _gate(min(sz) > p + 1, f"every n_i > p + 1 (got n_i={sz}, p={p})", force)
    lg = math.log1p(-p / (n - k))
    center = (n - k) * (2 * n - 2 * p - 2 * k - 1) * lg
    var = lg
    for ni in sz:
        lgi = math.log1p(-p / (ni - 1))
        center -= (ni - 1) * (2 * ni - 2 * p - 3) * lgi
        var -= ((ni - 1) / (n - k)) ** 2 * lgi
    return CltParams(0.25 * center, (n - k) * math.sqrt(0.5 * var), ok, warn)


def clt_specified(n: int, p: int, force: bool = False) -> CltParams:
    """Normal limit of ``log Lambda`` for ``H0: mu = mu0, Sigma = Sigma0``.

    The scale is ``n * sigma``.
    """
    _check_np(n, p)
    ok, warn = _gate(n > p + 1, f"n > p + 1 (got n={n}, p={p})", force)
    y = p / (n - 1)
    lg = math.log1p(-y)
    center = -0.25 * (n * (2 * n - 2 * p - 3) * lg + 2 * (n + 1) * p)
    var = -0.5 * (y + lg)
    return CltParams(center, n * math.sqrt(var), ok, warn)


def clt_complete_independence(n: int, p: int, force: bool = False) -> CltParams:
    """Normal limit of ``log|R|``.

    The default gate is ``n >= p + 5``; ``force`` relaxes it to ``n >= p + 2``
    (where the variance is still positive) and records a warning.
    """
    _check_np(n, p)
    ok, warn = _gate(n >= p + 5, f"n >= p + 5 (got n={n}, p={p})", force,
                     feasible=n >= p + 2)
    y = p / (n - 1)
    lg = math.log1p(-y)
    center = (p - n + 1.5) * lg - (n - 2) / (n - 1) * p
    var = -2.0 * (y + lg)
    return CltParams(center, math.sqrt(var), ok, warn)


# ----------------------------------------------------------------------------
# chi-square limits


def chisq_sphericity(n: int, p: int) -> ChiSquareParams:
    """``-(n-1) rho log V ~ chi2_f`` with ``f = (p-1)(p+2)/2``."""
    _check_np(n, p)
    rho = 1 - Fraction(2 * p * p + p + 2, 6 * (n - 1) * p)
    f = (p - 1) * (p + 2) // 2
    warn = ("p = 1 gives f = 0: the sphericity hypothesis is vacuous",) if f == 0 else ()
    return ChiSquareParams(float(rho), f, float(-(n - 1) * rho), "-(n-1)*rho*log(V)", warn)


def chisq_block_independence(n_samples: int, partition) -> ChiSquareParams:
    """``-2 rho log Lambda ~ chi2_f`` with ``log Lambda = (N/2) log W``."""
    part = validate_partition(partition)
    p = sum(part)
    big_n = int(n_samples)
    _check_np(big_n, p)
    d2 = p * p - sum(q * q for q in part)
    d3 = p ** 3 - sum(q ** 3 for q in part)
    rho = 1 - Fraction(2 * d3 + 9 * d2, 6 * big_n * d2)
    return ChiSquareParams(float(rho), d2 // 2, float(-rho * big_n),
                           "-2*rho*log(Lambda), log(Lambda) = (N/2)*log(W)")


def chisq_equal_distributions(sizes, p: int) -> ChiSquareParams:
    """``-2 rho log Lambda ~ chi2_f`` with ``f = p(k-1)(p+3)/2``."""
    sz = _check_sizes(sizes, p)
    k = len(sz)
    n = sum(sz)
    spread = sum(Fraction(n, ni) for ni in sz) - 1
    rho = 1 - Fraction(2 * p * p + 9 * p + 11, 6 * (k - 1) * (p + 3) * n) * spread
    f = p * (k - 1) * (p + 3) // 2
    return ChiSquareParams(float(rho), f, float(-2 * rho), "-2*rho*log(Lambda)")


def chisq_equal_covariances(sizes, p: int) -> ChiSquareParams:
    """``-2 rho log Lambda* ~ chi2_f`` with ``f = p(p+1)(k-1)/2``."""
    sz = _check_sizes(sizes, p)
    k = len(sz)
    n = sum(sz)
    spread = sum(Fraction(n - k, ni - 1) for ni in sz) - 1
    rho = 1 - Fraction(2 * p * p + 3 * p - 1, 6 * (p + 1) * (k - 1) * (n - k)) * spread
    f = p * (p + 1) * (k - 1) // 2
    return ChiSquareParams(float(rho), f, float(-2 * rho), "-2*rho*log(Lambda*)")


def chisq_specified(n: int, p: int) -> ChiSquareParams:
    """``-2 rho log Lambda ~ chi2_f`` with ``f = p(p+3)/2``."""
    _check_np(n, p)
    rho = 1 - Fraction(2 * p * p + 9 * p + 11, 6 * n * (p + 3))
    return ChiSquareParams(float(rho), p * (p + 3) // 2, float(-2 * rho), "-2*rho*log(Lambda)")


def chisq_complete_independence(n: int, p: int) -> ChiSquareParams:
    """``-(n - 1 - (2p+5)/6) log|R| ~ chi2_f`` with ``f = p(p-1)/2``.

    Reported with ``rho = 1 - (2p+5)/(6(n-1))`` so the multiplier reads
    ``-(n-1) rho``.
    """
    _check_np(n, p)
    factor = (n - 1) - Fraction(2 * p + 5, 6)
    rho = factor / (n - 1)
    f = p * (p - 1) // 2
    warn = ("p = 1 gives f = 0: nothing to test",) if f == 0 else ()
    return ChiSquareParams(float(rho), f, float(-factor), "-(n-1-(2p+5)/6)*log|R|", warn)


# ----------------------------------------------------------------------------
# dispatch


def clt_params(kind, shape: Shape, force: bool = False) -> CltParams:
    """Normal-limit parameters for any kind and design."""
    kind = TestKind.parse(kind)
    if kind is TestKind.SPHERICITY:
        return clt_sphericity(shape.n, shape.p, force)
    if kind is TestKind.BLOCK_INDEPENDENCE:
        return clt_block_independence(shape.n, shape.partition, force)
    if kind is TestKind.EQUAL_DISTRIBUTIONS:
        return clt_equal_distributions(shape.sizes, shape.p, force)
    if kind is TestKind.EQUAL_COVARIANCES:
        return clt_equal_covariances(shape.sizes, shape.p, force)
    if kind is TestKind.SPECIFIED:
        return clt_specified(shape.n, shape.p, force)
    return clt_complete_independence(shape.n, shape.p, force)


def chisq_params(kind, shape: Shape) -> ChiSquareParams:
    """Chi-square parameters for any kind and design."""
    kind = TestKind.parse(kind)
    if kind is TestKind.SPHERICITY:
        return chisq_sphericity(shape.n, shape.p)
    if kind is TestKind.BLOCK_INDEPENDENCE:
        return chisq_block_independence(shape.n, shape.partition)
    if kind is TestKind.EQUAL_DISTRIBUTIONS:
        return chisq_equal_distributions(shape.sizes, shape.p)
    if kind is TestKind.EQUAL_COVARIANCES:
        return chisq_equal_covariances(shape.sizes, shape.p)
    if kind is TestKind.SPECIFIED:
        return chisq_specified(shape.n, shape.p)
    return chisq_complete_independence(shape.n, shape.p)


@dataclass(frozen=True)
class TestOutcome:
    """Both approximations applied to one observed statistic."""

    __test__ = False

    statistic: LogStatistic
    clt: CltParams | None
    z: float | None
    p_clt: float | None
    chisq: ChiSquareParams
    chisq_statistic: float
    p_chisq: float
    warnings: tuple[str, ...] = field(default=())

    def reject_clt(self, alpha: float = 0.05) -> bool | None:
        if self.p_clt is None:
            return None
        return self.p_clt <= alpha

    def reject_chisq(self, alpha: float = 0.05) -> bool | None:
        if math.isnan(self.p_chisq):
            return None
        return self.p_chisq <= alpha


def evaluate(statistic: LogStatistic, force_domain: bool = False) -> TestOutcome:
    """Attach normal and chi-square p-values to a log statistic.

    A violated sample-size condition for the normal limit is reported in
    ``warnings`` (with the normal fields left ``None``) rather than raised.
    """
    warnings: list[str] = []
    clt = z = p_clt = None
    try:
        clt = clt_params(statistic.kind, statistic.shape, force_domain)
        z = clt.standardize(statistic.value)
        p_clt = normal_cdf(z)
        warnings.extend(clt.warnings)
    except TheoremDomainError as exc:
        warnings.append(str(exc))
    chisq = chisq_params(statistic.kind, statistic.shape)
    warnings.extend(chisq.warnings)
    stat = chisq.statistic(statistic.value)
    return TestOutcome(statistic, clt, z, p_clt, chisq, stat, chisq.p_value(statistic.value),
                       tuple(warnings))


@dataclass(frozen=True)
class DecisionRule:
    """Precomputed critical values for repeated testing at one design."""

    clt: CltParams | None
    chisq: ChiSquareParams
    alpha: float
    z_crit: float
    chisq_crit: float

    @classmethod
    def build(cls, kind, shape: Shape, alpha: float = 0.05, force: bool = False) -> "DecisionRule":
        if not 0.0 < alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
        try:
            clt = clt_params(kind, shape, force)
        except TheoremDomainError:
            clt = None
        chisq = chisq_params(kind, shape)
        # z <= -z_alpha  <=>  Phi(z) <= alpha
        z_crit = -normal_ppf(1.0 - alpha)
        if chisq.f <= 0:
            crit = math.nan
        elif alpha >= 1.0:
            crit = -math.inf
        else:
            crit = chi_square_isf(alpha, chisq.f)
        return cls(clt, chisq, alpha, z_crit, crit)

    def decide(self, log_value: float) -> tuple[bool | None, bool | None]:
        """``(reject_clt, reject_chisq)``; ``None`` when a rule is unavailable."""
        r_clt = None if self.clt is None else self.clt.standardize(log_value) <= self.z_crit
        r_chi = None
        if self.chisq.f > 0:
            r_chi = self.chisq.statistic(log_value) >= self.chisq_crit
        return r_clt, r_chi
