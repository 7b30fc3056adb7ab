"""Exception hierarchy shared by every module."""


class HdlrtError(Exception):
    """Base class for all package errors."""


class InvalidData(HdlrtError, ValueError):
    """Input array is malformed or contains non-finite entries."""


class DegenerateColumn(HdlrtError, ValueError):
    """A variate is constant, so its correlation is undefined."""


class NotPositiveDefinite(HdlrtError, ValueError):
    """Cholesky factorization broke down (singular or indefinite matrix)."""


class DomainError(HdlrtError, ValueError):
    """Argument lies outside the domain of a function or moment formula."""


class NumericalFailure(HdlrtError, ArithmeticError):
    """An iterative evaluation failed to converge."""


class PartitionMismatch(HdlrtError, ValueError):
    """Block sizes do not form a valid partition of the variates."""


class GroupTooSmall(HdlrtError, ValueError):
    """A sample group has too few observations for the statistic."""


class DimensionMismatch(HdlrtError, ValueError):
    """Arrays have incompatible shapes."""


class TheoremDomainError(HdlrtError, ValueError):
    """Sample sizes fall outside the range where a normal limit is asserted."""


class ParseError(HdlrtError, ValueError):
    """Text input could not be parsed; message carries the location."""


class EmptyInput(HdlrtError, ValueError):
    """Input file holds no data rows."""


class ConfigError(HdlrtError, ValueError):
    """Scenario configuration is invalid; message carries the line number."""
