import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdlrt.design import TestKind
from hdlrt.errors import (
    DegenerateColumn,
    DimensionMismatch,
    GroupTooSmall,
    NotPositiveDefinite,
    PartitionMismatch,
)
from hdlrt.lrt import (
    log_block_independence,
    log_complete_independence,
    log_equal_covariances,
    log_equal_distributions,
    log_specified_standardized,
    log_sphericity,
    stat_block_independence,
    stat_complete_independence,
    stat_equal_covariances,
    stat_equal_distributions,
    stat_specified,
    stat_sphericity,
)

from conftest import cofactor_logdet

seeds = st.integers(0, 2 ** 32 - 1)


def axis_design(p: int, scales) -> np.ndarray:
    """Rows +-s_j e_j: zero mean, scatter diag(2 s_j^2)."""
    rows = []
    for j, s in enumerate(scales):
        e = np.zeros(p)
        e[j] = s
        rows += [e, -e]
    return np.array(rows)


def np_cov(x):
    """Biased covariance via numpy, used as an independent S."""
    return np.cov(x, rowvar=False, bias=True)


def random_invertible(rng, q):
    m = rng.standard_normal((q, q))
    return m + q * np.eye(q)


class TestSphericity:
    def test_scalar_scatter(self):
        for c in (0.01, 1.0, 250.0):
            assert stat_sphericity(axis_design(4, [math.sqrt(c / 2)] * 4)).value == pytest.approx(0.0, abs=1e-14)

    def test_diag_1_3(self):
        x = axis_design(2, [math.sqrt(0.5), math.sqrt(1.5)])
        assert stat_sphericity(x).value == pytest.approx(math.log(3) - 2 * math.log(2), abs=1e-14)

    def test_random_against_covariance_oracle(self, rng):
        x = rng.standard_normal((10, 3))
        s = np_cov(x)
        expected = cofactor_logdet(s) - 3 * math.log(np.trace(s) / 3)
        assert stat_sphericity(x).value == pytest.approx(expected, abs=1e-10)

    def test_metadata(self, rng):
        st_ = stat_sphericity(rng.standard_normal((10, 3)))
        assert st_.kind is TestKind.SPHERICITY
        assert (st_.n, st_.p) == (10, 3)

    def test_rank_deficient(self, rng):
        with pytest.raises(NotPositiveDefinite):
            stat_sphericity(rng.standard_normal((5, 5)))

    @settings(max_examples=60, deadline=None)
    @given(c=st.floats(1e-3, 1e3), seed=seeds)
    def test_scale_invariance(self, c, seed):
        x = np.random.default_rng(seed).standard_normal((12, 4))
        assert abs(stat_sphericity(c * x).value - stat_sphericity(x).value) <= 1e-10

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds, p=st.integers(1, 6))
    def test_nonpositive(self, seed, p):
        x = np.random.default_rng(seed).standard_normal((p + 3, p)) * np.arange(1, p + 1)
        assert stat_sphericity(x).value <= 1e-12


class TestBlockIndependence:
    def test_block_diagonal_scatter(self, rng):
        x = rng.standard_normal((12, 3))
        x -= x.mean(axis=0)
        y, z = x[:, :2], x[:, 2:]
        # remove the part of z explained by y so the cross block vanishes
        z = z - y @ np.linalg.lstsq(y, z, rcond=None)[0]
        assert stat_block_independence(np.hstack([y, z]), (2, 1)).value == pytest.approx(0.0, abs=1e-12)

    def test_single_block_rejected(self, rng):
        with pytest.raises(PartitionMismatch):
            stat_block_independence(rng.standard_normal((10, 3)), (3,))

    def test_sum_mismatch(self, rng):
        with pytest.raises(PartitionMismatch):
            stat_block_independence(rng.standard_normal((10, 5)), (2, 2))

    def test_random_against_cofactor(self, rng):
        x = rng.standard_normal((12, 5))
        a = np_cov(x) * 12
        expected = (cofactor_logdet(a) - cofactor_logdet(a[:2, :2]) - cofactor_logdet(a[2:4, 2:4])
                    - cofactor_logdet(a[4:, 4:]))
        assert stat_block_independence(x, (2, 2, 1)).value == pytest.approx(expected, rel=1e-9, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds)
    def test_within_block_linear_invariance(self, seed):
        g = np.random.default_rng(seed)
        x = g.standard_normal((12, 5))
        y = x.copy()
        for lo, hi in [(0, 2), (2, 4), (4, 5)]:
            y[:, lo:hi] = x[:, lo:hi] @ random_invertible(g, hi - lo).T
        assert abs(stat_block_independence(y, (2, 2, 1)).value
                   - stat_block_independence(x, (2, 2, 1)).value) <= 1e-8

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds)
    def test_nonpositive(self, seed):
        g = np.random.default_rng(seed)
        x = g.standard_normal((9, 4)) @ random_invertible(g, 4)
        assert stat_block_independence(x, (1, 3)).value <= 1e-12


class TestEqualDistributions:
    def test_identical_groups(self, rng):
        x = rng.standard_normal((6, 2))
        lb = cofactor_logdet(np_cov(x) * 6)
        # both B_i equal B_1, the pooled scatter is 2 B_1, n = 12
        expected = 6 * lb - 6 * (2 * math.log(2) + lb) + 12 * math.log(12) - 12 * math.log(6)
        assert stat_equal_distributions([x, x.copy()]).value == pytest.approx(expected, abs=1e-10)

    def test_scalar_reduction(self, rng):
        g1 = list(rng.standard_normal(7))
        g2 = list(rng.standard_normal(5) + 0.4)
        def ss(v, m):
            return sum((t - m) ** 2 for t in v)
        pooled = g1 + g2
        n1, n2, n = len(g1), len(g2), len(pooled)
        expected = (0.5 * n1 * math.log(ss(g1, sum(g1) / n1)) + 0.5 * n2 * math.log(ss(g2, sum(g2) / n2))
                    - 0.5 * n * math.log(ss(pooled, sum(pooled) / n))
                    + 0.5 * n * math.log(n) - 0.5 * n1 * math.log(n1) - 0.5 * n2 * math.log(n2))
        got = stat_equal_distributions([np.array(g1)[:, None], np.array(g2)[:, None]]).value
        assert got == pytest.approx(expected, abs=1e-10)

    def test_piecewise_between_within(self, rng):
        groups = [rng.standard_normal((8, 2)) + rng.standard_normal(2) for _ in range(3)]
        grand = np.vstack(groups).mean(axis=0)
        within = sum(np_cov(g) * 8 for g in groups)
        between = sum(8 * np.outer(g.mean(axis=0) - grand, g.mean(axis=0) - grand) for g in groups)
        expected = (sum(4 * cofactor_logdet(np_cov(g) * 8) for g in groups)
                    - 12 * cofactor_logdet(within + between)
                    + 0.5 * 2 * 24 * math.log(24) - 3 * 0.5 * 2 * 8 * math.log(8))
        assert stat_equal_distributions(groups).value == pytest.approx(expected, rel=1e-9)

    def test_group_too_small(self, rng):
        with pytest.raises(GroupTooSmall):
            stat_equal_distributions([rng.standard_normal((3, 3)), rng.standard_normal((10, 3))])
        with pytest.raises(GroupTooSmall):
            stat_equal_distributions([rng.standard_normal((10, 3))])

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            stat_equal_distributions([rng.standard_normal((10, 3)), rng.standard_normal((10, 2))])

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds)
    def test_common_affine_invariance(self, seed):
        g = np.random.default_rng(seed)
        groups = [g.standard_normal((9, 3)) for _ in range(3)]
        m = random_invertible(g, 3)
        b = g.standard_normal(3) * 5
        moved = [x @ m.T + b for x in groups]
        assert abs(stat_equal_distributions(moved).value - stat_equal_distributions(groups).value) <= 1e-8


class TestEqualCovariances:
    def test_identity_scatters(self):
        x = axis_design(2, [math.sqrt(0.5)] * 2)  # n_i = 4, A_i = I
        k, p, n = 2, 2, 8
        expected = (-0.5 * (n - k) * p * math.log(2) + 0.5 * (n - k) * p * math.log(n - k)
                    - 2 * 0.5 * 3 * p * math.log(3))
        assert stat_equal_covariances([x, x.copy()]).value == pytest.approx(expected, abs=1e-12)

    def test_scalar_bartlett(self, rng):
        groups = [list(rng.standard_normal(m) * s) for m, s in [(6, 1.0), (9, 2.0), (5, 0.5)]]
        n = sum(len(g) for g in groups)
        k = len(groups)
        ss = [sum((t - sum(g) / len(g)) ** 2 for t in g) for g in groups]
        expected = sum(0.5 * (len(g) - 1) * (math.log(s) - math.log(len(g) - 1)) for g, s in zip(groups, ss))
        expected -= 0.5 * (n - k) * (math.log(sum(ss)) - math.log(n - k))
        got = stat_equal_covariances([np.array(g)[:, None] for g in groups]).value
        assert got == pytest.approx(expected, abs=1e-10)

    def test_piecewise(self, rng):
        groups = [rng.standard_normal((9, 2)) for _ in range(3)]
        scat = [np_cov(g) * 9 for g in groups]
        expected = (sum(4 * cofactor_logdet(a) for a in scat) - 12 * cofactor_logdet(sum(scat))
                    + 0.5 * 24 * 2 * math.log(24) - 3 * 0.5 * 8 * 2 * math.log(8))
        assert stat_equal_covariances(groups).value == pytest.approx(expected, rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds)
    def test_common_affine_invariance(self, seed):
        g = np.random.default_rng(seed)
        groups = [g.standard_normal((m, 3)) + g.standard_normal(3) for m in (7, 9, 11)]
        m = random_invertible(g, 3)
        b = g.standard_normal(3) * 5
        moved = [x @ m.T + b for x in groups]
        assert abs(stat_equal_covariances(moved).value - stat_equal_covariances(groups).value) <= 1e-8


class TestSpecified:
    def test_mle_configuration(self):
        p = 3
        x = axis_design(p, [math.sqrt(p)] * p)  # n = 2p, A = nI, mean 0
        assert stat_specified(x, np.zeros(p), np.eye(p)).value == pytest.approx(0.0, abs=1e-12)

    def test_shift_cancels(self, rng):
        x = rng.standard_normal((10, 3))
        sig = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 0.5]])
        mu = np.array([0.1, -0.2, 0.3])
        d = np.array([5.0, -7.0, 11.0])
        a = stat_specified(x, mu, sig).value
        b = stat_specified(x + d, mu + d, sig).value
        assert a == pytest.approx(b, abs=1e-10)

    def test_term_oracle(self, rng):
        x = rng.standard_normal((10, 3))
        n, p = x.shape
        xbar = x.mean(axis=0)
        a = np_cov(x) * n
        expected = (0.5 * n * p * (1 - math.log(n)) + 0.5 * n * cofactor_logdet(a)
                    - 0.5 * np.trace(a) - 0.5 * n * float(xbar @ xbar))
        assert stat_specified(x, np.zeros(3), np.eye(3)).value == pytest.approx(expected, abs=1e-10)

    def test_whitening_matches_inverse(self, rng):
        # x' Sigma^-1 x based evaluation, independent of the Cholesky route
        x = rng.standard_normal((15, 3))
        m = rng.standard_normal((3, 3))
        sig = m @ m.T + np.eye(3)
        mu = rng.standard_normal(3)
        n, p = x.shape
        inv = np.linalg.inv(sig)
        c = x - mu
        xbar = c.mean(axis=0)
        a = (c - xbar).T @ (c - xbar)
        expected = (0.5 * n * p * (1 - math.log(n)) + 0.5 * n * (cofactor_logdet(a) - cofactor_logdet(sig))
                    - 0.5 * np.trace(inv @ a) - 0.5 * n * float(xbar @ inv @ xbar))
        assert stat_specified(x, mu, sig).value == pytest.approx(expected, abs=1e-9)

    def test_errors(self, rng):
        x = rng.standard_normal((10, 3))
        with pytest.raises(DimensionMismatch):
            stat_specified(x, np.zeros(2), np.eye(3))
        with pytest.raises(DimensionMismatch):
            stat_specified(x, np.zeros(3), np.eye(2))
        with pytest.raises(NotPositiveDefinite):
            stat_specified(x, np.zeros(3), np.diag([1.0, -1.0, 1.0]))


class TestCompleteIndependence:
    def test_orthogonal_columns(self):
        x = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        assert stat_complete_independence(x).value == pytest.approx(0.0, abs=1e-15)

    def test_two_columns(self, rng):
        x = rng.standard_normal((20, 2))
        r = np.corrcoef(x, rowvar=False)[0, 1]
        assert stat_complete_independence(x).value == pytest.approx(math.log(1 - r * r), abs=1e-12)

    def test_random_against_cofactor(self, rng):
        x = rng.standard_normal((15, 4))
        expected = cofactor_logdet(np.corrcoef(x, rowvar=False))
        assert stat_complete_independence(x).value == pytest.approx(expected, rel=1e-9)

    def test_constant_column(self, rng):
        x = rng.standard_normal((15, 4))
        x[:, 2] = 1.0
        with pytest.raises(DegenerateColumn):
            stat_complete_independence(x)

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds)
    def test_column_affine_invariance(self, seed):
        g = np.random.default_rng(seed)
        x = g.standard_normal((15, 4))
        a = g.uniform(0.01, 100, 4)
        b = g.uniform(-100, 100, 4)
        assert abs(stat_complete_independence(a * x + b).value - stat_complete_independence(x).value) <= 1e-10

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds)
    def test_nonpositive(self, seed):
        x = np.random.default_rng(seed).standard_normal((8, 5))
        assert stat_complete_independence(x).value <= 1e-12


class TestBatchKernels:
    def test_batch_matches_single(self, rng):
        x = rng.standard_normal((4, 12, 5))
        ys = [rng.standard_normal((4, 8, 2)) for _ in range(3)]
        cases = [
            (log_sphericity, (x,), lambda i: (x[i],)),
            (log_block_independence, (x, (2, 3)), lambda i: (x[i], (2, 3))),
            (log_specified_standardized, (x,), lambda i: (x[i],)),
            (log_complete_independence, (x,), lambda i: (x[i],)),
            (log_equal_distributions, (ys,), lambda i: ([y[i] for y in ys],)),
            (log_equal_covariances, (ys,), lambda i: ([y[i] for y in ys],)),
        ]
        for fn, args, single in cases:
            batch = fn(*args)
            assert batch.shape == (4,)
            for i in range(4):
                assert batch[i] == pytest.approx(fn(*single(i)), abs=1e-12)
