"""Means, scatter matrices, correlation matrices and SPD log-determinants.

Every routine accepts a single matrix or a stack of matrices with leading
batch dimensions, following the numpy.linalg convention. The batched form
is what the Monte Carlo moment checks use; single-sample statistics call
the same code with a 2-D array.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateColumn, InvalidData, NotPositiveDefinite

#: Relative pivot tolerance for the Cholesky positive-definiteness decision.
PIVOT_TOL = 1e-13
#: Relative tolerance for the symmetry check in :func:`logdet_spd`.
SYMMETRY_TOL = 1e-12


def as_data_matrix(data, min_rows: int = 2) -> np.ndarray:
    """Validate an observation matrix (rows are samples, columns variates).

    Parameters
    ----------
    data : array_like
        Array of shape ``(..., n, p)``.
    min_rows : int
        Smallest admissible ``n``.

    Returns
    -------
    numpy.ndarray
        Float64 view of ``data``.

    Raises
    ------
    InvalidData
        If the array has fewer than two dimensions, too few rows, no
        columns, or non-finite entries.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim < 2:
        raise InvalidData(f"data must be an n x p matrix, got shape {x.shape}")
    n, p = x.shape[-2:]
    if n < min_rows:
        raise InvalidData(f"need at least {min_rows} observations, got n={n}")
    if p < 1:
        raise InvalidData("data has no columns")
    if not np.all(np.isfinite(x)):
        raise InvalidData("data contains NaN or infinite entries")
    return x


def mean_and_scatter(data) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean and scatter matrix ``sum_i (x_i - xbar)(x_i - xbar)^T``.

    Two-pass: the mean is subtracted before the cross products are summed.

    Parameters
    ----------
    data : array_like
        Observations of shape ``(..., n, p)``.

    Returns
    -------
    mean : numpy.ndarray
        Shape ``(..., p)``.
    scatter : numpy.ndarray
        Symmetric positive semidefinite, shape ``(..., p, p)``.
    """
    x = as_data_matrix(data)
    mean = x.mean(axis=-2)
    xc = x - mean[..., None, :]
    a = np.swapaxes(xc, -1, -2) @ xc
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    return mean, a


def sample_correlation(data) -> np.ndarray:
    """Pearson correlation matrix of the columns of ``data``.

    Raises
    ------
    DegenerateColumn
        If any column is constant.
    """
    x = as_data_matrix(data)
    const = np.all(x == x[..., :1, :], axis=-2)
    if np.any(const):
        cols = np.unique(np.nonzero(const)[-1]).tolist()
        raise DegenerateColumn(f"constant column(s) {cols}; correlation undefined")
    _, a = mean_and_scatter(x)
    d = np.sqrt(np.diagonal(a, axis1=-2, axis2=-1))
    r = a / (d[..., :, None] * d[..., None, :])
    r = np.clip(r, -1.0, 1.0)
    p = r.shape[-1]
    r[..., np.arange(p), np.arange(p)] = 1.0
    return r


def cholesky_spd(m) -> np.ndarray:
    """Lower Cholesky factor with a relative pivot test.

    A pivot ``L_jj**2`` at or below ``PIVOT_TOL * max(diag(m))`` is treated
    as a breakdown.

    Raises
    ------
    NotPositiveDefinite
        On breakdown, or if ``m`` is not symmetric.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise InvalidData(f"expected square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidData("matrix contains NaN or infinite entries")
    scale = np.max(np.abs(m), axis=(-2, -1), keepdims=True)
    asym = np.abs(m - np.swapaxes(m, -1, -2))
    if np.any(asym > SYMMETRY_TOL * np.maximum(scale, np.finfo(float).tiny)):
        raise NotPositiveDefinite("matrix is not symmetric")
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("Cholesky factorization failed; matrix is singular "
                                  "or indefinite") from exc
    pivots = np.diagonal(chol, axis1=-2, axis2=-1) ** 2
    dmax = np.max(np.diagonal(m, axis1=-2, axis2=-1), axis=-1, keepdims=True)
    if not np.all(pivots > PIVOT_TOL * dmax) or not np.all(np.isfinite(chol)):
        raise NotPositiveDefinite("Cholesky pivot below relative tolerance; "
                                  "matrix is numerically rank deficient")
    return chol


def logdet_spd(m):
    """Log-determinant of a symmetric positive-definite matrix.

    Computed as ``2 * sum(log(diag(L)))`` with ``L`` the Cholesky factor.

    Parameters
    ----------
    m : array_like
        Shape ``(..., p, p)``.

    Returns
    -------
    float or numpy.ndarray
        A float for a single matrix, else an array of shape ``(...)``.

    Examples
    --------
    >>> float(logdet_spd([[2.0, 1.0], [1.0, 2.0]]))  # doctest: +ELLIPSIS
    1.0986...
    """
    chol = cholesky_spd(m)
    out = 2.0 * np.sum(np.log(np.diagonal(chol, axis1=-2, axis2=-1)), axis=-1)
    return float(out) if np.ndim(out) == 0 else out
