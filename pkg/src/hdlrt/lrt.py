"""Log likelihood-ratio statistics for six normal-theory hypotheses.

Each ``stat_*`` function takes a single data set and returns a
:class:`LogStatistic`. The ``log_*`` kernels underneath accept stacks of
data sets with leading batch dimensions and return arrays; the Monte Carlo
moment checks drive them directly.

All statistics live on the natural-log scale because the raw ratios
underflow already at moderate ``n * p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .design import Shape, TestKind, validate_partition
from .errors import DimensionMismatch, GroupTooSmall, InvalidData, NotPositiveDefinite
from .linalg import as_data_matrix, cholesky_spd, logdet_spd, mean_and_scatter, sample_correlation


@dataclass(frozen=True)
class LogStatistic:
    """Natural log of a likelihood-ratio statistic plus its sample design.

    Attributes
    ----------
    value : float
        ``log V`` (sphericity), ``log W`` (block independence), ``log Lambda``
        (equal distributions, specified), ``log Lambda*`` (equal covariances)
        or ``log |R|`` (complete independence).
    kind : TestKind
    shape : Shape
    """

    value: float
    kind: TestKind
    shape: Shape

    @property
    def n(self) -> int:
        return self.shape.n

    @property
    def p(self) -> int:
        return self.shape.p


def _as_scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def _require_rank(n: int, p: int, what: str) -> None:
    if n < p + 1:
        raise NotPositiveDefinite(f"{what} needs n >= p + 1 for a nonsingular scatter "
                                  f"matrix, got n={n}, p={p}")


def _check_groups(groups: Sequence) -> list[np.ndarray]:
    if len(groups) < 2:
        raise GroupTooSmall(f"need at least two groups, got {len(groups)}")
    out = []
    for i, g in enumerate(groups):
        try:
            x = as_data_matrix(g)
        except InvalidData as exc:
            raise GroupTooSmall(f"group {i + 1}: {exc}") from exc
        out.append(x)
    p = out[0].shape[-1]
    for i, x in enumerate(out):
        if x.shape[-1] != p:
            raise DimensionMismatch(f"group {i + 1} has {x.shape[-1]} columns, group 1 has {p}")
        if x.shape[-2] <= p:
            raise GroupTooSmall(f"group {i + 1} has n_i={x.shape[-2]} <= p={p}; its "
                                "scatter matrix would be singular")
    return out


# ----------------------------------------------------------------------------
# batch kernels


def log_sphericity(data):
    """``log|A| - p log(tr(A)/p)`` for the scatter ``A`` of each data set."""
    x = as_data_matrix(data)
    n, p = x.shape[-2:]
    _require_rank(n, p, "sphericity statistic")
    _, a = mean_and_scatter(x)
    tr = np.trace(a, axis1=-2, axis2=-1)
    return _as_scalar(logdet_spd(a) - p * np.log(tr / p))


def log_block_independence(data, partition):
    """``log|A| - sum_i log|A_ii|`` over the diagonal blocks of the partition."""
    x = as_data_matrix(data)
    n, p = x.shape[-2:]
    part = validate_partition(partition, p)
    _require_rank(n, p, "block-independence statistic")
    _, a = mean_and_scatter(x)
    out = logdet_spd(a)
    start = 0
    for size in part:
        stop = start + size
        out = out - logdet_spd(a[..., start:stop, start:stop])
        start = stop
    return _as_scalar(out)


def log_equal_distributions(groups):
    """Log of the k-sample equal-mean-and-covariance ratio.

    ``sum_i (n_i/2) log|B_i| - (n/2) log|A + B| + (pn/2) log n
    - sum_i (p n_i / 2) log n_i`` with ``B_i`` the within-group scatters and
    ``A + B`` the scatter of the pooled sample about the grand mean.
    """
    xs = _check_groups(groups)
    p = xs[0].shape[-1]
    sizes = [x.shape[-2] for x in xs]
    n = sum(sizes)
    out = 0.0
    for x, ni in zip(xs, sizes):
        _, b = mean_and_scatter(x)
        out = out + 0.5 * ni * logdet_spd(b) - 0.5 * p * ni * math.log(ni)
    pooled = np.concatenate(xs, axis=-2)
    _, total = mean_and_scatter(pooled)
    out = out - 0.5 * n * logdet_spd(total) + 0.5 * p * n * math.log(n)
    return _as_scalar(out)


def log_equal_covariances(groups):
    """Log of the modified (unbiased-divisor) k-sample covariance ratio.

    ``sum_i ((n_i-1)/2) log|A_i| - ((n-k)/2) log|A| + ((n-k)p/2) log(n-k)
    - sum_i ((n_i-1)p/2) log(n_i-1)`` with ``A = sum_i A_i``.
    """
    xs = _check_groups(groups)
    p = xs[0].shape[-1]
    k = len(xs)
    n = sum(x.shape[-2] for x in xs)
    out = 0.0
    pooled = 0.0
    for x in xs:
        m = x.shape[-2] - 1
        _, a_i = mean_and_scatter(x)
        pooled = pooled + a_i
        out = out + 0.5 * m * logdet_spd(a_i) - 0.5 * m * p * math.log(m)
    out = out - 0.5 * (n - k) * logdet_spd(pooled) + 0.5 * (n - k) * p * math.log(n - k)
    return _as_scalar(out)


def log_specified_standardized(data):
    """Log ratio for ``mu = 0, Sigma = I`` on already standardized data.

    ``(np/2)(1 - log n) + (n/2) log|A| - tr(A)/2 - n xbar' xbar / 2``.
    """
    x = as_data_matrix(data)
    n, p = x.shape[-2:]
    _require_rank(n, p, "specified-parameters statistic")
    xbar, a = mean_and_scatter(x)
    tr = np.trace(a, axis1=-2, axis2=-1)
    quad = np.sum(xbar * xbar, axis=-1)
    out = 0.5 * n * p * (1.0 - math.log(n)) + 0.5 * n * logdet_spd(a) - 0.5 * tr - 0.5 * n * quad
    return _as_scalar(out)


def log_complete_independence(data):
    """``log|R|`` for the sample correlation matrix ``R``."""
    x = as_data_matrix(data)
    n, p = x.shape[-2:]
    _require_rank(n, p, "complete-independence statistic")
    return _as_scalar(logdet_spd(sample_correlation(x)))


def standardize(data, mu0, sigma0) -> np.ndarray:
    """Map rows ``x_i`` to ``L^{-1}(x_i - mu0)`` where ``sigma0 = L L^T``.

    Raises
    ------
    DimensionMismatch
        If ``mu0`` or ``sigma0`` does not match the data's column count.
    NotPositiveDefinite
        If ``sigma0`` is not symmetric positive definite.
    """
    x = as_data_matrix(data)
    p = x.shape[-1]
    mu = np.asarray(mu0, dtype=np.float64).reshape(-1)
    sig = np.asarray(sigma0, dtype=np.float64)
    if mu.shape != (p,):
        raise DimensionMismatch(f"mu0 has length {mu.size}, data has p={p}")
    if sig.shape != (p, p):
        raise DimensionMismatch(f"sigma0 has shape {sig.shape}, expected ({p}, {p})")
    chol = cholesky_spd(sig)
    centered = x - mu
    return np.swapaxes(np.linalg.solve(chol, np.swapaxes(centered, -1, -2)), -1, -2)


# ----------------------------------------------------------------------------
# single-sample API


def _single(data) -> np.ndarray:
    x = as_data_matrix(data)
    if x.ndim != 2:
        raise InvalidData(f"expected a 2-D data matrix, got shape {x.shape}")
    return x


def stat_sphericity(data) -> LogStatistic:
    """Sphericity statistic ``log V = log|A| - p log(tr A / p)``.

    Examples
    --------
    >>> import numpy as np
    >>> s = stat_sphericity(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]))
    >>> abs(s.value) < 1e-15
    True
    """
    x = _single(data)
    n, p = x.shape
    return LogStatistic(log_sphericity(x), TestKind.SPHERICITY, Shape.single(n, p))


def stat_block_independence(data, partition) -> LogStatistic:
    """Block-independence statistic ``log W = log|A| - sum_i log|A_ii|``."""
    x = _single(data)
    n, p = x.shape
    part = validate_partition(partition, p)
    value = log_block_independence(x, part)
    return LogStatistic(value, TestKind.BLOCK_INDEPENDENCE, Shape.blocks(n, part))


def stat_equal_distributions(groups: Sequence) -> LogStatistic:
    """Statistic for equality of k normal distributions (means and covariances)."""
    xs = [_single(g) for g in groups]
    value = log_equal_distributions(xs)
    shape = Shape.groups([x.shape[0] for x in xs], xs[0].shape[1])
    return LogStatistic(value, TestKind.EQUAL_DISTRIBUTIONS, shape)


def stat_equal_covariances(groups: Sequence) -> LogStatistic:
    """Modified statistic for equality of k covariance matrices."""
    xs = [_single(g) for g in groups]
    value = log_equal_covariances(xs)
    shape = Shape.groups([x.shape[0] for x in xs], xs[0].shape[1])
    return LogStatistic(value, TestKind.EQUAL_COVARIANCES, shape)


def stat_specified(data, mu0, sigma0) -> LogStatistic:
    """Statistic for ``H0: mu = mu0, Sigma = sigma0``.

    The data are whitened through the Cholesky factor of ``sigma0`` before the
    statistic is formed, which reduces the problem to ``mu = 0, Sigma = I``.
    """
    x = _single(data)
    n, p = x.shape
    z = standardize(x, mu0, sigma0)
    return LogStatistic(log_specified_standardized(z), TestKind.SPECIFIED, Shape.single(n, p))


def stat_complete_independence(data) -> LogStatistic:
    """Complete-independence statistic ``log|R|``."""
    x = _single(data)
    n, p = x.shape
    return LogStatistic(log_complete_independence(x), TestKind.COMPLETE_INDEPENDENCE,
                        Shape.single(n, p))
