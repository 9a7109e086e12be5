"""Exception types shared across the package."""


class SchreierError(Exception):
    """Base class for all errors raised by :mod:`invschreier`."""


class PreconditionError(SchreierError, ValueError):
    """Input violates a documented precondition (degree, parity, connectivity)."""


class GraphFormatError(SchreierError, ValueError):
    """A graph or measure file could not be parsed.

    ``line`` is the 1-based line number of the offending line, if known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SizeLimitError(SchreierError):
    """A desk-scale cap (vertex count, group order, cycle count) was exceeded."""


class BudgetExhausted(SchreierError):
    """A bounded search ran out of nodes before finishing.

    Attributes:
        nodes: number of search nodes expanded.
        deepest: deepest radius at which a consistent structure was found.
    """

    def __init__(self, message: str, nodes: int = 0, deepest: int = 0):
        super().__init__(message)
        self.nodes = nodes
        self.deepest = deepest


class OutsideGraphError(SchreierError, LookupError):
    """A walk left a truncated graph through a missing edge slot."""


class InternalError(SchreierError, RuntimeError):
    """An algorithmic invariant failed; indicates a bug, not bad input."""
