"""Monte Carlo size/power engine and null-distribution sample export.

Every iteration draws from its own random stream, derived from
``(seed, branch, iteration index)`` through :class:`numpy.random.SeedSequence`
and fed to the counter-based Philox generator. Results therefore do not
depend on how iterations are split across worker processes.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .approximations import DecisionRule, clt_params, chisq_params
from .design import Shape, TestKind
from .errors import DomainError, NotPositiveDefinite
from .linalg import cholesky_spd
from . import lrt

NULL_BRANCH = 0
ALT_BRANCH = 1


# ----------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class GaussianLaw:
    """``N_p(mean, L L^T)`` with a cached Cholesky factor.

    ``chol is None`` marks the identity covariance, which skips the matrix
    product when sampling.
    """

    mean: np.ndarray
    chol: np.ndarray | None

    @classmethod
    def from_moments(cls, mean, cov) -> "GaussianLaw":
        mean = np.asarray(mean, dtype=np.float64)
        cov = np.asarray(cov, dtype=np.float64)
        if np.array_equal(cov, np.eye(cov.shape[0])):
            return cls(mean, None)
        return cls(mean, cholesky_spd(cov))

    @property
    def covariance(self) -> np.ndarray:
        if self.chol is None:
            return np.eye(self.mean.size)
        return self.chol @ self.chol.T

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal((n, self.mean.size))
        if self.chol is not None:
            z = z @ self.chol.T
        if np.any(self.mean):
            z = z + self.mean
        return z


def sample_mvn(n: int, mean, cov, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` rows from ``N_p(mean, cov)`` via the Cholesky factor.

    Raises
    ------
    NotPositiveDefinite
        If ``cov`` is not symmetric positive definite.
    """
    return GaussianLaw.from_moments(mean, cov).sample(int(n), rng)


def _count(count: int | None, p: int) -> int:
    """``None`` stands for the integer part of ``p/2``."""
    return p // 2 if count is None else int(count)


@dataclass(frozen=True)
class Identity:
    """``N_p(0, I)``."""

    def law(self, p: int) -> GaussianLaw:
        return GaussianLaw(np.zeros(p), None)


@dataclass(frozen=True)
class DiagSpike:
    """Zero mean, ``Sigma = diag(v, ..., v, 1, ..., 1)`` with ``count`` leading ``v``'s."""

    value: float
    count: int | None = None

    def law(self, p: int) -> GaussianLaw:
        d = np.ones(p)
        d[: _count(self.count, p)] = self.value
        if np.any(d <= 0):
            raise NotPositiveDefinite(f"diagonal spike value {self.value} is not positive")
        return GaussianLaw(np.zeros(p), np.diag(np.sqrt(d)))


@dataclass(frozen=True)
class Equicorrelated:
    """``Sigma = a J_p + b I_p`` with every mean entry equal to ``shift``."""

    a: float
    b: float
    shift: float = 0.0

    def law(self, p: int) -> GaussianLaw:
        cov = self.a * np.ones((p, p)) + self.b * np.eye(p)
        return GaussianLaw(np.full(p, float(self.shift)), cholesky_spd(cov))


@dataclass(frozen=True)
class ScaledIdentity:
    """Zero mean, ``Sigma = c I_p``."""

    c: float

    def law(self, p: int) -> GaussianLaw:
        if not self.c > 0:
            raise NotPositiveDefinite(f"scaled identity needs c > 0, got {self.c}")
        if self.c == 1.0:
            return GaussianLaw(np.zeros(p), None)
        return GaussianLaw(np.zeros(p), math.sqrt(self.c) * np.eye(p))


@dataclass(frozen=True)
class Banded:
    """Banded covariance with optional mean shift on the leading coordinates.

    ``Sigma_ii = diag``, ``Sigma_ij = off`` for ``0 < |i-j| <= bandwidth``;
    the first ``shift_count`` mean entries equal ``shift``.
    """

    diag: float = 1.0
    off: float = 0.1
    bandwidth: int = 3
    shift: float = 0.0
    shift_count: int | None = None

    def covariance(self, p: int) -> np.ndarray:
        idx = np.arange(p)
        gap = np.abs(idx[:, None] - idx[None, :])
        cov = np.where(gap == 0, self.diag, np.where(gap <= self.bandwidth, self.off, 0.0))
        return cov.astype(np.float64)

    def law(self, p: int) -> GaussianLaw:
        mean = np.zeros(p)
        if self.shift:
            mean[: _count(self.shift_count, p)] = self.shift
        return GaussianLaw(mean, cholesky_spd(self.covariance(p)))


AlternativeSpec = Identity | DiagSpike | Equicorrelated | ScaledIdentity | Banded


# ----------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class Scenario:
    """One row of a size/power study.

    Attributes
    ----------
    name : str
    kind : TestKind
    shape : Shape
    alternative : tuple of AlternativeSpec
        One entry for single-sample kinds, one per group for k-sample kinds.
    alpha : float
    iterations : int
    seed : int
    """

    name: str
    kind: TestKind
    shape: Shape
    alternative: tuple
    alpha: float = 0.05
    iterations: int = 10_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", TestKind.parse(self.kind))
        object.__setattr__(self, "alternative", tuple(self.alternative))
        if self.iterations < 1:
            raise DomainError(f"iterations must be >= 1, got {self.iterations}")
        if not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        expected = self.shape.k if self.kind.grouped else 1
        if len(self.alternative) != expected:
            raise DomainError(f"{self.kind.value} needs {expected} alternative law(s), "
                              f"got {len(self.alternative)}")
        if self.kind is TestKind.BLOCK_INDEPENDENCE and self.shape.partition is None:
            raise DomainError("block-independence scenario needs a partition")
        if self.kind.grouped and self.shape.sizes is None:
            raise DomainError(f"{self.kind.value} scenario needs group sizes")

    def group_sizes(self) -> tuple[int, ...]:
        return self.shape.sizes if self.kind.grouped else (self.shape.n,)

    def laws(self, branch: int) -> list[GaussianLaw]:
        p = self.shape.p
        if branch == NULL_BRANCH:
            return [Identity().law(p) for _ in self.group_sizes()]
        return [spec.law(p) for spec in self.alternative]


def iteration_rng(seed: int, branch: int, index: int) -> np.random.Generator:
    """Independent generator for one iteration of one branch."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(branch), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def draw(scenario: Scenario, laws: Sequence[GaussianLaw], rng: np.random.Generator):
    """Sample the data set(s) of one iteration."""
    return [law.sample(n, rng) for law, n in zip(laws, scenario.group_sizes())]


def log_statistic(scenario: Scenario, data: list[np.ndarray]) -> float:
    """Log statistic of ``scenario.kind``; null parameters are ``0`` and ``I``."""
    kind = scenario.kind
    if kind is TestKind.SPHERICITY:
        return lrt.log_sphericity(data[0])
    if kind is TestKind.BLOCK_INDEPENDENCE:
        return lrt.log_block_independence(data[0], scenario.shape.partition)
    if kind is TestKind.EQUAL_DISTRIBUTIONS:
        return lrt.log_equal_distributions(data)
    if kind is TestKind.EQUAL_COVARIANCES:
        return lrt.log_equal_covariances(data)
    if kind is TestKind.SPECIFIED:
        return lrt.log_specified_standardized(data[0])
    return lrt.log_complete_independence(data[0])


def _iterate(scenario: Scenario, branch: int, start: int, stop: int):
    """Yield the log statistic per iteration, or ``None`` when singular."""
    laws = scenario.laws(branch)
    for i in range(start, stop):
        rng = iteration_rng(scenario.seed, branch, i)
        try:
            yield log_statistic(scenario, draw(scenario, laws, rng))
        except NotPositiveDefinite:
            yield None


def _count_chunk(scenario: Scenario, rule: DecisionRule, branch: int, start: int, stop: int):
    rej_clt = rej_chi = excluded = 0
    for value in _iterate(scenario, branch, start, stop):
        if value is None:
            excluded += 1
            continue
        r_clt, r_chi = rule.decide(value)
        rej_clt += bool(r_clt)
        rej_chi += bool(r_chi)
    return rej_clt, rej_chi, excluded


def _values_chunk(scenario: Scenario, branch: int, start: int, stop: int):
    return [v for v in _iterate(scenario, branch, start, stop)]


def _chunks(total: int, workers: int) -> list[tuple[int, int]]:
    pieces = max(1, min(total, 4 * workers))
    edges = np.linspace(0, total, pieces + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _map(fn, jobs: list[tuple], workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        return [f.result() for f in futures]


@dataclass(frozen=True)
class SimulationReport:
    """Estimated rejection rates of one scenario."""

    scenario: Scenario
    size_clt: float
    size_chisq: float
    power_clt: float
    power_chisq: float
    excluded_null: int
    excluded_alt: int
    wall_time: float = field(compare=False, default=0.0)

    @property
    def iterations(self) -> int:
        return self.scenario.iterations

    @property
    def seed(self) -> int:
        return self.scenario.seed

    @property
    def excluded_count(self) -> int:
        return self.excluded_null + self.excluded_alt

    @property
    def mc_stderr(self) -> dict[str, float]:
        """``sqrt(q(1-q)/iterations)`` for each estimate."""
        out = {}
        for name in ("size_clt", "size_chisq", "power_clt", "power_chisq"):
            q = getattr(self, name)
            out[name] = math.sqrt(q * (1 - q) / self.iterations) if math.isfinite(q) else math.nan
        return out

    @property
    def max_stderr(self) -> float:
        vals = [v for v in self.mc_stderr.values() if math.isfinite(v)]
        return max(vals) if vals else math.nan


def _rate(hits: int, valid: int, available: bool) -> float:
    if not available or valid == 0:
        return math.nan
    return hits / valid


def run_scenario(scenario: Scenario, workers: int = 1, force_domain: bool = False) -> SimulationReport:
    """Estimate size (null branch) and power (alternative branch).

    Iterations whose scatter matrix is numerically singular are excluded
    from the denominators and counted in the report.
    """
    start = time.perf_counter()
    rule = DecisionRule.build(scenario.kind, scenario.shape, scenario.alpha, force_domain)
    chunks = _chunks(scenario.iterations, workers)
    jobs = [(scenario, rule, b, lo, hi) for b in (NULL_BRANCH, ALT_BRANCH) for lo, hi in chunks]
    results = _map(_count_chunk, jobs, workers)
    totals = {b: [0, 0, 0] for b in (NULL_BRANCH, ALT_BRANCH)}
    for job, res in zip(jobs, results):
        acc = totals[job[2]]
        for j in range(3):
            acc[j] += res[j]
    has_clt = rule.clt is not None
    has_chi = rule.chisq.f > 0
    null, alt = totals[NULL_BRANCH], totals[ALT_BRANCH]
    n_null = scenario.iterations - null[2]
    n_alt = scenario.iterations - alt[2]
    return SimulationReport(
        scenario,
        size_clt=_rate(null[0], n_null, has_clt),
        size_chisq=_rate(null[1], n_null, has_chi),
        power_clt=_rate(alt[0], n_alt, has_clt),
        power_chisq=_rate(alt[1], n_alt, has_chi),
        excluded_null=null[2],
        excluded_alt=alt[2],
        wall_time=time.perf_counter() - start,
    )


@dataclass(frozen=True)
class StandardizedSamples:
    """Null-branch draws of ``(log T - center)/scale`` and of the chi-square form."""

    z: np.ndarray
    chisq: np.ndarray
    f: int
    excluded: int = 0


def export_standardized_samples(scenario: Scenario, workers: int = 1,
                                iterations: int | None = None,
                                force_domain: bool = False) -> StandardizedSamples:
    """Null-branch samples for comparing against ``N(0,1)`` and ``chi2_f``.

    ``iterations`` overrides the scenario's count (``0`` yields empty arrays).
    The iteration streams are the same as in :func:`run_scenario`.
    """
    total = scenario.iterations if iterations is None else int(iterations)
    clt = clt_params(scenario.kind, scenario.shape, force_domain)
    chi = chisq_params(scenario.kind, scenario.shape)
    values: list = []
    if total > 0:
        jobs = [(scenario, NULL_BRANCH, lo, hi) for lo, hi in _chunks(total, workers)]
        for part in _map(_values_chunk, jobs, workers):
            values.extend(part)
    good = np.array([v for v in values if v is not None], dtype=np.float64)
    z = (good - clt.center) / clt.scale
    return StandardizedSamples(z, chi.multiplier * good, chi.f, len(values) - good.size)


# ----------------------------------------------------------------------------
# Monte Carlo moments


def _batched_statistic(kind: TestKind, shape: Shape, rng: np.random.Generator, batch: int):
    p = shape.p
    if kind.grouped:
        groups = [rng.standard_normal((batch, ni, p)) for ni in shape.sizes]
        if kind is TestKind.EQUAL_DISTRIBUTIONS:
            return lrt.log_equal_distributions(groups)
        return lrt.log_equal_covariances(groups)
    x = rng.standard_normal((batch, shape.n, p))
    if kind is TestKind.SPHERICITY:
        return lrt.log_sphericity(x)
    if kind is TestKind.BLOCK_INDEPENDENCE:
        return lrt.log_block_independence(x, shape.partition)
    if kind is TestKind.SPECIFIED:
        return lrt.log_specified_standardized(x)
    return lrt.log_complete_independence(x)


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo estimate of ``E[T^t]`` with its standard error."""

    t: float
    mean: float
    stderr: float
    draws: int


def monte_carlo_moments(kind, shape: Shape, exponents: Sequence[float], draws: int = 1_000_000,
                        seed: int = 0, batch: int = 20_000) -> list[MomentEstimate]:
    """Estimate ``E[T^t]`` under the null by direct simulation.

    The statistics come from the same :mod:`hdlrt.lrt` kernels used on real
    data, evaluated on stacked batches of standard normal samples.
    """
    kind = TestKind.parse(kind)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    exps = np.asarray(exponents, dtype=np.float64)
    total = np.zeros(exps.size)
    total_sq = np.zeros(exps.size)
    done = 0
    while done < draws:
        m = min(batch, draws - done)
        logs = np.asarray(_batched_statistic(kind, shape, rng, m))
        powers = np.exp(np.outer(exps, logs))
        total += powers.sum(axis=1)
        total_sq += (powers * powers).sum(axis=1)
        done += m
    mean = total / draws
    var = np.maximum(total_sq / draws - mean * mean, 0.0) * draws / max(draws - 1, 1)
    se = np.sqrt(var / draws)
    return [MomentEstimate(float(t), float(mu), float(s), draws) for t, mu, s in zip(exps, mean, se)]
