"""Exception types shared across the package.

The CLI maps these onto exit codes: usage and input problems exit 2,
a decode that dies in the beam exits 1, exhausted capacity exits 3.
"""


class LatbeamError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LatbeamError):
    """Malformed text input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(LatbeamError):
    """Structurally well-formed input that violates a semantic constraint."""


class UsageError(LatbeamError):
    """API called with arguments outside its contract."""


class DecodeFailure(LatbeamError):
    """No token survived the beam, so no hypothesis exists."""


class CapacityError(LatbeamError):
    """A preallocated bound was exceeded; carries the bound's name."""

    def __init__(self, bound: str, message: str):
        super().__init__(message)
        self.bound = bound


class InternalInvariantError(LatbeamError):
    """A condition the engine guarantees by construction was observed broken."""
