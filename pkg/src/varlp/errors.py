"""Exception types shared across the package."""


class VarlpError(Exception):
    """Base class for all package errors."""


class SpecParseError(VarlpError):
    """Raised when a JSON exponent spec or CSV payload cannot be parsed."""


class DomainError(VarlpError):
    """Raised when a point or region falls outside the declared domain."""


class PreconditionError(VarlpError):
    """Raised when a documented precondition of an operation fails."""


class ConstructionError(VarlpError):
    """Raised when a worked construction cannot satisfy its own invariants."""
