"""Exception types shared by all chaindyn modules."""


class ChainDynError(Exception):
    """Base class for all chaindyn errors."""


class InvalidArgumentError(ChainDynError, ValueError):
    """Malformed or out-of-range argument."""


class MetricViolationError(ChainDynError, ValueError):
    """A construction would violate a metric axiom."""


class ResourceBudgetError(ChainDynError, RuntimeError):
    """Requested object exceeds the configured size budget."""


class UnsupportedMapError(ChainDynError, ValueError):
    """Map description outside the supported map language."""


class NotTransitiveError(ChainDynError, RuntimeError):
    """Operation requires a chain transitive (strongly connected) graph."""
