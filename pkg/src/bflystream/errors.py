"""Exception types shared across the package."""


class BflyError(Exception):
    """Base class for all bflystream errors."""


class DuplicateEdgeError(BflyError):
    """The stream delivered an edge that is already stored; input was not deduplicated."""


class MissingEdgeError(BflyError):
    """A per-edge count was requested for an edge that is not in the graph."""


class GraphTooLargeError(BflyError):
    """Brute-force enumeration guard exceeded."""


class MalformedLineError(BflyError):
    """An edge-list line could not be parsed."""

    def __init__(self, path, lineno, reason):
        super().__init__(f"{path}:{lineno}: {reason}")
        self.path = path
        self.lineno = lineno
        self.reason = reason


class TimestampRegressionError(BflyError):
    """A timed edge arrived with a timestamp smaller than one already processed."""


class NoValidLevelError(BflyError):
    """Every level reservoir has discarded edges newer than the query window start."""


class ConfigError(BflyError):
    """Invalid experiment configuration."""
