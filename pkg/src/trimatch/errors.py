"""Exception types shared across the package."""


class TrimatchError(Exception):
    """Base class for all errors raised by this package."""


class UnknownAgentError(TrimatchError):
    """An agent id does not belong to the instance."""


class IsolatedAgentError(TrimatchError):
    """Operation undefined for an agent with no outgoing edges."""


class ParseError(TrimatchError):
    """Malformed instance or matching text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidInstanceError(TrimatchError):
    """Instance fails validation where a valid one is required."""


class InvalidMatchingError(TrimatchError):
    """Matching is inconsistent with the instance it is applied to."""


class ConstructionError(TrimatchError):
    """Gadget attachment or instance composition cannot proceed."""


class ProjectionError(TrimatchError):
    """A matching of a composed instance fits neither gadget alternative."""

    def __init__(self, message: str, anchor=None):
        self.anchor = anchor
        super().__init__(message)


class CapacityError(TrimatchError):
    """Requested exhaustive computation exceeds the configured guard."""


class DecodeError(TrimatchError):
    """A propositional model does not decode to a valid matching."""
