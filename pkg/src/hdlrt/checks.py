"""Verification suites comparing exact moments with simulation and limits."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .design import Shape, TestKind
from .moments import doubling_shapes, log_moment, mgf_convergence_check
from .sim import monte_carlo_moments

#: One small design and two exponents per kind.
DEFAULT_MC_SUITE: tuple[tuple[TestKind, Shape, tuple[float, ...]], ...] = (
    (TestKind.SPHERICITY, Shape.single(10, 3), (1.0, 2.0)),
    (TestKind.BLOCK_INDEPENDENCE, Shape.blocks(12, (2, 1)), (0.5, 1.0)),
    (TestKind.EQUAL_DISTRIBUTIONS, Shape.groups((10, 10, 10), 2), (0.5, 1.0)),
    (TestKind.EQUAL_COVARIANCES, Shape.groups((10, 10, 10), 2), (0.5, 1.0)),
    (TestKind.SPECIFIED, Shape.single(10, 3), (0.5, 1.0)),
    (TestKind.COMPLETE_INDEPENDENCE, Shape.single(10, 3), (1.0, -0.5)),
)

DEFAULT_MGF_S = (-0.3, -0.2, -0.1, 0.1, 0.2, 0.3)


@dataclass(frozen=True)
class MonteCarloCheck:
    kind: TestKind
    shape: Shape
    t: float
    formula: float
    estimate: float
    stderr: float
    tolerance: float = 3.0

    @property
    def z(self) -> float:
        return (self.estimate - self.formula) / self.stderr

    @property
    def passed(self) -> bool:
        return abs(self.z) <= self.tolerance


@dataclass(frozen=True)
class MgfCheck:
    kind: TestKind
    s: float
    deviations: tuple[tuple[Shape, float], ...]
    limit: float = 0.05

    @property
    def decreasing(self) -> bool:
        devs = [d for _, d in self.deviations]
        return all(b < a for a, b in zip(devs, devs[1:]))

    @property
    def passed(self) -> bool:
        return self.decreasing and self.deviations[-1][1] < self.limit


def monte_carlo_suite(queries=DEFAULT_MC_SUITE, draws: int = 1_000_000,
                      seed: int = 0) -> list[MonteCarloCheck]:
    """Simulated ``E[T^t]`` against the exact formula, per kind and exponent."""
    out = []
    for i, (kind, shape, exps) in enumerate(queries):
        formulas = [math.exp(log_moment(kind, shape, t)) for t in exps]
        est = monte_carlo_moments(kind, shape, exps, draws=draws, seed=seed + i)
        for t, f, e in zip(exps, formulas, est):
            out.append(MonteCarloCheck(TestKind.parse(kind), shape, t, f, e.mean, e.stderr))
    return out


def mgf_suite(kinds=tuple(TestKind), s_values=DEFAULT_MGF_S) -> list[MgfCheck]:
    """Log-MGF deviation along each kind's default doubling sequence."""
    out = []
    for kind in kinds:
        shapes = doubling_shapes(kind)
        for s in s_values:
            out.append(MgfCheck(TestKind.parse(kind), s, tuple(mgf_convergence_check(kind, shapes, s))))
    return out
