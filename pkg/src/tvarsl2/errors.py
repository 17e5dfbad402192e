"""Exception hierarchy shared by every engine."""


class TvarError(Exception):
    """Base class for all library errors."""


class DomainError(TvarError):
    """Input is well formed but outside the domain of the operation."""


class DimensionError(DomainError):
    """Ranks or lattice sides do not match."""


class ParseError(TvarError):
    """Malformed serialized input."""


class InvariantBreach(TvarError):
    """An internal consistency check failed; this indicates a bug."""


class SearchBoundError(DomainError):
    """A bounded search hit its safety cap."""
