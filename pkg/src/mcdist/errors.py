"""Exception hierarchy.

Validation failures (bad inputs, malformed documents) are kept separate from
numerical failures (non-convergence, unsupported spectra) so the CLI can map
them to distinct exit codes.
"""


class McdistError(Exception):
    """Base class for all library errors."""


# ---------------------------------------------------------------------------
# validation / input errors
# ---------------------------------------------------------------------------

class ValidationError(McdistError):
    """Input violates a documented precondition or invariant."""


class NegativeEntry(ValidationError):
    pass


class SumOutOfTolerance(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class NonPositiveAlpha(ValidationError):
    pass


class TooFewPoints(ValidationError):
    pass


class DegenerateInput(ValidationError):
    pass


class EnumerationTooLarge(ValidationError):
    pass


class ParseError(ValidationError):
    """Malformed chain or config document; carries a location hint."""


# ---------------------------------------------------------------------------
# numerical / structural errors
# ---------------------------------------------------------------------------

class NumericalError(McdistError):
    """Computation could not produce a trustworthy result."""


class NotConverged(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class NotDiagonalisable(NumericalError):
    pass


class UnsupportedSpectrum(NumericalError):
    pass


class NotIrreducible(NumericalError):
    pass


class NotErgodic(NumericalError):
    pass


class NotReversible(NumericalError):
    pass


class ZeroStationaryMass(NumericalError):
    pass


class DegenerateSpectrum(NumericalError):
    pass


class CapExceeded(NumericalError):
    pass


class InfiniteDistance(NumericalError):
    pass
