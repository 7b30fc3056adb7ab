"""Test identifiers and sample-design descriptors shared across modules."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, GroupTooSmall, PartitionMismatch


class TestKind(str, Enum):
    """The six hypotheses covered by the package."""

    __test__ = False  # keep pytest from collecting this as a test class

    SPHERICITY = "sphericity"
    BLOCK_INDEPENDENCE = "block-independence"
    EQUAL_DISTRIBUTIONS = "equal-distributions"
    EQUAL_COVARIANCES = "equal-covariances"
    SPECIFIED = "specified"
    COMPLETE_INDEPENDENCE = "complete-independence"

    @property
    def grouped(self) -> bool:
        return self in (TestKind.EQUAL_DISTRIBUTIONS, TestKind.EQUAL_COVARIANCES)

    @classmethod
    def parse(cls, name) -> "TestKind":
        if isinstance(name, TestKind):
            return name
        key = str(name).strip().lower().replace("_", "-")
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise DomainError(f"unknown test kind {name!r}; expected one of {valid}") from None


def validate_partition(partition, p: int | None = None) -> tuple[int, ...]:
    """Check a block partition ``(p_1, ..., p_k)`` with ``k >= 2``."""
    sizes = tuple(int(s) for s in partition)
    if any(s != t for s, t in zip(sizes, partition)):
        raise PartitionMismatch(f"block sizes must be integers, got {partition!r}")
    if len(sizes) < 2:
        raise PartitionMismatch(f"need at least two blocks, got {sizes}")
    if any(s < 1 for s in sizes):
        raise PartitionMismatch(f"block sizes must be positive, got {sizes}")
    if p is not None and sum(sizes) != p:
        raise PartitionMismatch(f"block sizes {sizes} sum to {sum(sizes)}, not p={p}")
    return sizes


@dataclass(frozen=True)
class Shape:
    """Sample design of one test instance.

    Attributes
    ----------
    p : int
        Dimension.
    n : int
        Total number of observations (sum of group sizes for k-sample tests).
    sizes : tuple of int, optional
        Group sizes ``(n_1, ..., n_k)`` for the k-sample tests.
    partition : tuple of int, optional
        Block sizes for the block-independence test.
    """

    p: int
    n: int
    sizes: tuple[int, ...] | None = None
    partition: tuple[int, ...] | None = None

    @classmethod
    def single(cls, n: int, p: int) -> "Shape":
        return cls(p=int(p), n=int(n))

    @classmethod
    def blocks(cls, n: int, partition) -> "Shape":
        part = validate_partition(partition)
        return cls(p=sum(part), n=int(n), partition=part)

    @classmethod
    def groups(cls, sizes, p: int) -> "Shape":
        sz = tuple(int(s) for s in sizes)
        if len(sz) < 2:
            raise GroupTooSmall(f"need at least two groups, got {len(sz)}")
        if any(s < 2 for s in sz):
            raise GroupTooSmall(f"every group needs at least 2 observations, got {sz}")
        return cls(p=int(p), n=sum(sz), sizes=sz)

    @property
    def k(self) -> int:
        if self.sizes is not None:
            return len(self.sizes)
        if self.partition is not None:
            return len(self.partition)
        return 1

    def describe(self) -> str:
        """Compact text form used in reports, e.g. ``n=100,p=30``."""
        if self.sizes is not None:
            return "n=" + ",".join(map(str, self.sizes)) + f";p={self.p}"
        if self.partition is not None:
            return f"n={self.n};blocks=" + ",".join(map(str, self.partition))
        return f"n={self.n};p={self.p}"
