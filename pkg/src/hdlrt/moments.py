"""Exact null moments of the six statistics, on the log scale.

Each ``log_moment_*`` returns ``log E[T^t]`` for the statistic ``T`` whose
log is computed by :mod:`hdlrt.lrt`, under the null hypothesis and normal
sampling. Together with :func:`mgf_convergence_check` they verify the
normal-limit centering and scaling without any sampling: since
``E exp{s (log T - c)/b} = E[T^{s/b}] exp(-s c / b)``, the log of the left
side must approach ``s^2/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .approximations import clt_params
from .design import Shape, TestKind, validate_partition
from .errors import DomainError, GroupTooSmall
from .special import log_mvgamma_ratio


def _require_integers(**values) -> None:
    for name, v in values.items():
        if int(v) != v:
            raise DomainError(f"{name} must be an integer, got {v!r}")


def log_moment_sphericity(n: int, p: int, h: float) -> float:
    """``log E[V^h]`` for ``h > -1/2`` and ``n > p``.

    ``E V^h = p^{ph} Gamma(mp/2) / Gamma(mp/2 + ph) * Gamma_p(m/2 + h) / Gamma_p(m/2)``
    with ``m = n - 1``.
    """
    _require_integers(n=n, p=p)
    if not (p >= 1 and n > p):
        raise DomainError(f"sphericity moments need n > p >= 1, got n={n}, p={p}")
    if not h > -0.5:
        raise DomainError(f"exponent h={h} outside the moment formula's domain h > -1/2")
    if h == 0:
        return 0.0
    m = n - 1
    half = 0.5 * m * p
    return (p * h * math.log(p) + math.lgamma(half) - math.lgamma(half + p * h)
            + log_mvgamma_ratio(p, 0.5 * m + h, 0.5 * m))


def log_moment_block_independence(n_samples: int, partition, t: float) -> float:
    """``log E[W^t]`` for ``t > -1/2`` where ``W = |A| / prod |A_ii|``.

    ``E W^t = Gamma_p(a + t)/Gamma_p(a) * prod_i Gamma_{p_i}(a)/Gamma_{p_i}(a + t)``
    with ``a = (N - 1)/2`` and ``N`` the number of observations.
    """
    part = validate_partition(partition)
    p = sum(part)
    _require_integers(N=n_samples)
    if not n_samples > p:
        raise DomainError(f"block-independence moments need N > p, got N={n_samples}, p={p}")
    if not t > -0.5:
        raise DomainError(f"exponent t={t} outside the moment formula's domain t > -1/2")
    if t == 0:
        return 0.0
    a = 0.5 * (n_samples - 1)
    out = log_mvgamma_ratio(p, a + t, a)
    for q in part:
        out -= log_mvgamma_ratio(q, a + t, a)
    return out


def _check_sizes(sizes, p: int) -> tuple[int, ...]:
    sz = tuple(int(s) for s in sizes)
    _require_integers(p=p)
    if len(sz) < 2:
        raise GroupTooSmall(f"need at least two groups, got {len(sz)}")
    if p < 1 or min(sz) <= p:
        raise DomainError(f"k-sample moments need every n_i > p >= 1, got n_i={sz}, p={p}")
    return sz


def log_moment_equal_distributions(sizes, p: int, t: float) -> float:
    """``log E[Lambda^t]`` for the k-sample equal-distributions statistic.

    Built from the moments of ``lambda = prod |B_i|^{n_i/2} / |A + B|^{n/2}``
    and ``log Lambda = log lambda + (pn/2) log n - sum_i (p n_i/2) log n_i``;
    valid for ``t > max_i p/n_i - 1``.
    """
    sz = _check_sizes(sizes, p)
    n = sum(sz)
    bound = max(p / ni for ni in sz) - 1.0
    if not t > bound:
        raise DomainError(f"exponent t={t} outside the moment formula's domain t > {bound}")
    if t == 0:
        return 0.0
    out = log_mvgamma_ratio(p, 0.5 * (n - 1), 0.5 * n * (1 + t) - 0.5)
    const = 0.5 * p * n * math.log(n)
    for ni in sz:
        out += log_mvgamma_ratio(p, 0.5 * ni * (1 + t) - 0.5, 0.5 * (ni - 1))
        const -= 0.5 * p * ni * math.log(ni)
    return out + t * const


def log_moment_equal_covariances(sizes, p: int, h: float) -> float:
    """``log E[(Lambda*)^h]`` for the modified k-sample covariance statistic.

    From the moments of ``W = prod |A_i|^{(n_i-1)/2} / |A|^{(n-k)/2}``,
    which equals ``Lambda*`` times ``prod (n_i-1)^{(n_i-1)p/2} / (n-k)^{(n-k)p/2}``;
    valid for ``h > max_i (p-1)/(n_i-1) - 1``.
    """
    sz = _check_sizes(sizes, p)
    k = len(sz)
    n = sum(sz)
    bound = max((p - 1) / (ni - 1) for ni in sz) - 1.0
    if not h > bound:
        raise DomainError(f"exponent h={h} outside the moment formula's domain h > {bound}")
    if h == 0:
        return 0.0
    out = log_mvgamma_ratio(p, 0.5 * (n - k), 0.5 * (n - k) * (1 + h))
    const = 0.5 * (n - k) * p * math.log(n - k)
    for ni in sz:
        out += log_mvgamma_ratio(p, 0.5 * (ni - 1) * (1 + h), 0.5 * (ni - 1))
        const -= 0.5 * (ni - 1) * p * math.log(ni - 1)
    return out + h * const


def log_moment_specified(n: int, p: int, t: float) -> float:
    """``log E[Lambda^t]`` for ``H0: mu = mu0, Sigma = Sigma0``, ``t > p/n - 1``.

    ``E Lambda^t = (2e/n)^{npt/2} (1+t)^{-np(1+t)/2}
    Gamma_p((n(1+t)-1)/2) / Gamma_p((n-1)/2)``.
    """
    _require_integers(n=n, p=p)
    if not (p >= 1 and n > p):
        raise DomainError(f"specified-parameter moments need n > p >= 1, got n={n}, p={p}")
    bound = p / n - 1.0
    if not t > bound:
        raise DomainError(f"exponent t={t} outside the moment formula's domain t > {bound}")
    if t == 0:
        return 0.0
    return (0.5 * n * p * t * (math.log(2.0) + 1.0 - math.log(n))
            - 0.5 * n * p * (1 + t) * math.log1p(t)
            + log_mvgamma_ratio(p, 0.5 * (n * (1 + t) - 1), 0.5 * (n - 1)))


def log_moment_complete_independence(n: int, p: int, t: float) -> float:
    """``log E[|R|^t]`` for ``n >= p + 5``, ``p >= 2``, ``t >= -1``.

    ``E |R|^t = [Gamma(a)/Gamma(a + t)]^p Gamma_p(a + t)/Gamma_p(a)`` with
    ``a = (n - 1)/2``.
    """
    _require_integers(n=n, p=p)
    if not (p >= 2 and n >= p + 5):
        raise DomainError(f"correlation moments need n - 5 >= p >= 2, got n={n}, p={p}")
    if not t >= -1.0:
        raise DomainError(f"exponent t={t} outside the moment formula's domain t >= -1")
    if t == 0:
        return 0.0
    a = 0.5 * (n - 1)
    return p * (math.lgamma(a) - math.lgamma(a + t)) + log_mvgamma_ratio(p, a + t, a)


@dataclass(frozen=True)
class MomentQuery:
    """One exponent ``t`` of one statistic at one design."""

    kind: TestKind
    shape: Shape
    t: float

    def log_moment(self) -> float:
        return log_moment(self.kind, self.shape, self.t)


def log_moment(kind, shape: Shape, t: float) -> float:
    """Dispatch to the ``log_moment_*`` function for ``kind``."""
    kind = TestKind.parse(kind)
    if kind is TestKind.SPHERICITY:
        return log_moment_sphericity(shape.n, shape.p, t)
    if kind is TestKind.BLOCK_INDEPENDENCE:
        return log_moment_block_independence(shape.n, shape.partition, t)
    if kind is TestKind.EQUAL_DISTRIBUTIONS:
        return log_moment_equal_distributions(shape.sizes, shape.p, t)
    if kind is TestKind.EQUAL_COVARIANCES:
        return log_moment_equal_covariances(shape.sizes, shape.p, t)
    if kind is TestKind.SPECIFIED:
        return log_moment_specified(shape.n, shape.p, t)
    return log_moment_complete_independence(shape.n, shape.p, t)


def mgf_deviation(kind, shape: Shape, s: float) -> float:
    """``|log E exp{s (log T - center)/scale} - s^2/2|`` from the exact moments."""
    clt = clt_params(kind, shape)
    t = s / clt.scale
    return abs(log_moment(kind, shape, t) - t * clt.center - 0.5 * s * s)


def mgf_convergence_check(kind, shapes, s: float) -> list[tuple[Shape, float]]:
    """Deviation of the standardized statistic's log-MGF from ``s^2/2``.

    Parameters
    ----------
    kind : TestKind or str
    shapes : iterable of Shape
        Designs, typically growing with ``p/n`` held fixed.
    s : float
        MGF argument.

    Returns
    -------
    list of (Shape, float)
        One deviation per design, in input order.

    Raises
    ------
    DomainError
        If ``s/scale`` leaves the exponent domain of the moment formula.
    """
    return [(shape, mgf_deviation(kind, shape, s)) for shape in shapes]


def doubling_shapes(kind, sizes=(50, 100, 200, 400), ratio: float | None = None) -> list[Shape]:
    """Default design sequence with ``p/n`` (or ``p/n_i``) held near ``ratio``.

    Block independence uses three blocks in proportion 2:2:1 and a default
    ratio of 0.8, which keeps ``|s|/scale`` inside its moment domain for
    ``|s| <= 0.3``; the other kinds default to 0.5. The k-sample tests use
    three equal groups.
    """
    kind = TestKind.parse(kind)
    if ratio is None:
        ratio = 0.8 if kind is TestKind.BLOCK_INDEPENDENCE else 0.5
    out = []
    for n in sizes:
        p = int(ratio * n)
        if kind is TestKind.BLOCK_INDEPENDENCE:
            unit = max(1, p // 5)
            out.append(Shape.blocks(n, (2 * unit, 2 * unit, unit)))
        elif kind.grouped:
            out.append(Shape.groups((n, n, n), p))
        else:
            out.append(Shape.single(n, p))
    return out
