"""Exception types shared across the package."""


class GraphParseError(ValueError):
    """Raised when an edge-list file cannot be parsed.

    ``lineno`` is the 1-based line of the offending input.
    """

    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class MalformedLineError(GraphParseError):
    pass


class VertexRangeError(GraphParseError):
    pass


class LoopEdgeError(GraphParseError):
    pass


class DuplicateEdgeError(GraphParseError):
    pass


class BudgetExceededError(RuntimeError):
    """An enumeration would exceed its configured work budget."""


class RootFindingError(RuntimeError):
    """Polynomial roots could not be computed to the residual contract."""


class ZeroFreeUnavailableError(ValueError):
    """The graph is too small for the zero-free guarantee (n < omega*m)."""
