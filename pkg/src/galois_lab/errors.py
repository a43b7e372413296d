"""Exception types shared by every module."""


class GaloisLabError(Exception):
    """Base class for library errors."""


class DomainError(GaloisLabError, ValueError):
    """An operation was called outside its mathematical domain.

    Examples: gcd of two zero polynomials, inverting zero, asking for the
    automorphism group of a non-Galois field.
    """


class ParseError(GaloisLabError, ValueError):
    """Malformed textual input."""


class StageFailure(GaloisLabError, RuntimeError):
    """A stage of the random-automorphism construction could not be completed."""

    def __init__(self, stage, message):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage
