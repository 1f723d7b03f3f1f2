"""Exception hierarchy for pairweb.

Every error raised by the library derives from PairwebError so callers can
catch library failures without catching programming errors.
"""


class PairwebError(Exception):
    """Base class for all pairweb errors."""


class DomainError(PairwebError, ValueError):
    """An argument is outside the documented domain of an operation."""


class QueryBeyondHorizon(PairwebError):
    """A path was evaluated past its grid and it is not frozen."""


class GridMismatch(PairwebError):
    """Two paths do not share a compatible time grid."""


class CrossingPaths(PairwebError):
    """The sign of the difference of two paths changes: they cross."""


class NotCoalescing(PairwebError):
    """Paths touch and later separate; not a coalescing pair."""


class EmptySet(PairwebError):
    """A set operation received an empty collection."""


class BadDimensions(PairwebError, ValueError):
    """Lattice dimensions are invalid (width must be even and >= 4)."""


class ParityError(PairwebError):
    """A lattice site was used with the wrong parity."""


class OutOfField(PairwebError):
    """A lattice query lies outside the sampled field."""


class NoStartingSites(PairwebError):
    """No lattice starting sites fall inside the requested window."""


class AlphaTooSmall(PairwebError):
    """The segment length admits no valid starting row."""


class WidthTooSmall(PairwebError):
    """A walk wrapped the periodic lattice before the horizon."""


class PathsDidNotCoalesce(PairwebError):
    """Dual paths did not close their region inside the field."""


class SchemaError(PairwebError):
    """An input file does not conform to the documented schema."""


class UsageError(PairwebError):
    """Invalid command line or config file input."""
