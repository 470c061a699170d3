"""Exception types shared across the package."""


class OpspectraError(Exception):
    """Base class for all package errors."""

    code = "error"


class UndecidableMembership(OpspectraError):
    """Membership query hit a sequence family the rules cannot decide."""

    code = "undecidable-membership"

    def __init__(self, tag: str):
        super().__init__(f"undecidable-membership: {tag}")
        self.tag = tag


class DegenerateArrangement(OpspectraError):
    """Tangent/coincident circle geometry, or a comparison the exact
    witness machinery cannot certify."""

    code = "degenerate-arrangement"


class IncomparableSequences(OpspectraError):
    """Two distinct sequence families overlap in a way the canonical
    tests cannot decide."""

    code = "incomparable-sequences"


class UnsupportedAtom(OpspectraError):
    """Operator atom outside the certified library (e.g. a matrix whose
    characteristic polynomial does not split over the Gaussian rationals)."""

    code = "unsupported-atom"


class UnsupportedPair(OpspectraError):
    """Diagonal pair outside the certified families."""

    code = "unsupported-pair"


class IdentityViolated(OpspectraError):
    """An algebraic identity that must hold exactly failed; carries the
    offending residual for the failure dump."""

    code = "identity-violated"

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class ConstraintViolated(OpspectraError):
    """A constrained pair failed its defining equation."""

    code = "constraint-violated"


class IndexTooLarge(OpspectraError):
    """Group inverse requested for a matrix of index >= 2."""

    code = "index-too-large"


class UncomputableSpectrum(OpspectraError):
    """A theorem check could not obtain one of its spectra."""

    code = "uncomputable-spectrum"

    def __init__(self, spectrum: str, instance: str, cause: Exception):
        super().__init__(f"uncomputable-spectrum: {spectrum} for {instance}: {cause}")
        self.spectrum = spectrum
        self.instance = instance
        self.cause = cause


class DslSyntaxError(OpspectraError):
    """Parse error with source location and the expected-token set."""

    code = "syntax-error"

    def __init__(self, message: str, line: int, column: int, expected=()):
        loc = f"line {line}, column {column}"
        exp = f" (expected {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{message} at {loc}{exp}")
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
