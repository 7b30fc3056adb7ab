"""Likelihood-ratio tests for high-dimensional normal data.

Six classical hypotheses (sphericity, block independence, equality of k
normal laws, equality of k covariance matrices, specified mean and
covariance, complete independence) with both the Bartlett-corrected
chi-square approximation and a normal approximation that stays accurate
when the dimension grows with the sample size.
"""

from .approximations import (
    ChiSquareParams,
    CltParams,
    TestOutcome,
    chisq_params,
    clt_params,
    evaluate,
)
from .design import Shape, TestKind
from .lrt import (
    LogStatistic,
    stat_block_independence,
    stat_complete_independence,
    stat_equal_covariances,
    stat_equal_distributions,
    stat_specified,
    stat_sphericity,
)

__version__ = "0.1.0"

__all__ = [
    "ChiSquareParams",
    "CltParams",
    "LogStatistic",
    "Shape",
    "TestKind",
    "TestOutcome",
    "chisq_params",
    "clt_params",
    "evaluate",
    "stat_block_independence",
    "stat_complete_independence",
    "stat_equal_covariances",
    "stat_equal_distributions",
    "stat_specified",
    "stat_sphericity",
]
