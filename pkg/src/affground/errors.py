"""Exception hierarchy shared across the library.

Every error carries a human-readable message naming the offending
identifier, row, or field path so callers (CLI, service) can surface it
without extra bookkeeping.
"""


class AffgroundError(Exception):
    """Base class for all library errors."""


class NotFoundError(AffgroundError):
    """An identifier (verb, object, roi, scene) is unknown."""


class RangeError(AffgroundError):
    """A numeric value is outside its documented interval."""


class ShapeError(AffgroundError):
    """Vector dimensions disagree."""


class DegenerateInputError(AffgroundError):
    """Input is structurally valid but unusable (zero-norm vector, empty vocab)."""


class ResolutionError(AffgroundError):
    """A cross-file reference (embedding id) cannot be resolved."""

    def __init__(self, message: str, missing_ids: list[str] | None = None):
        super().__init__(message)
        self.missing_ids = missing_ids or []


class ParseError(AffgroundError):
    """A serialized document violates its schema; message carries the field path."""


class IngestError(AffgroundError):
    """Tabular KB input is malformed (duplicates, bad rows)."""


class ProtocolError(AffgroundError):
    """An evaluation episode violates the protocol for its mode."""


class ConfigurationError(AffgroundError):
    """Required configuration (tier inputs, flags) is missing or inconsistent."""
