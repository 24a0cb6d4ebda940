"""Exception types shared across the package."""


class PpgError(Exception):
    """Base class for all package errors."""


class MismatchedGroup(PpgError):
    """Operands belong to different group specs."""


class ZeroElement(PpgError):
    """Operation undefined on the zero element."""


class StabilizationFailure(PpgError):
    """A truncation-based computation failed its certification guard.

    This signals a bug in the height machinery, never an expected outcome.
    """


class SearchSpaceTooLarge(PpgError):
    """An enumeration would exceed the configured cap."""


class ScopeTooLarge(PpgError):
    """A verification scope exceeds the configured cap."""


class EmbeddingUnavailable(PpgError):
    """No embedding template exists for an atom (outside the catalog)."""


class NotAPureIso(PpgError):
    """The supplied assignment is not a partial pure isomorphism."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UlmMismatch(PpgError):
    """The two elements have different Ulm sequences."""


class ArityError(PpgError):
    """Formula arity does not match the supplied tuple."""


class ParseError(PpgError):
    """Input text failed to parse; carries the offending position."""

    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class MixedPrimeError(PpgError):
    """A single-prime group was required but atoms carry several primes."""
