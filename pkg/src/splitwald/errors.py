"""Exception types shared across the package.

Every error raised by the library derives from :class:`SplitwaldError` so
callers (and the CLI) can catch one base class and map the concrete type to
a machine-readable code via ``type(exc).__name__``.
"""


class SplitwaldError(Exception):
    """Base class for all library errors."""


class NonFiniteInput(SplitwaldError):
    """Input arrays contain NaN or infinite entries."""


class SingularDesign(SplitwaldError):
    """The intercept-augmented design matrix is numerically rank-deficient."""


class SingularRestriction(SplitwaldError):
    """Restriction matrix is rank-deficient or induces a singular system."""


class InvalidP0(SplitwaldError):
    """Tuning probability outside the admissible set."""


class InvalidLength(SplitwaldError):
    """Requested sequence length is too short."""


class LengthMismatch(SplitwaldError):
    """Input sequences do not share a common length."""


class DegenerateVariance(SplitwaldError):
    """Contrast sequence has (numerically) zero sample variance."""

    def __init__(self, message, draw_index=None):
        super().__init__(message)
        self.draw_index = draw_index


class NonConvergence(SplitwaldError):
    """An iterative evaluation failed to reach tolerance within its cap."""


class InvalidProbability(SplitwaldError):
    """Probability argument outside (0, 1)."""


class InvalidDelta(SplitwaldError):
    """Growth exponent outside (0, 1)."""


class InvalidKurtosis(SplitwaldError):
    """Kurtosis must exceed 1."""


class NotPositiveDefinite(SplitwaldError):
    """Matrix is not symmetric positive definite."""


class NumericOverflow(SplitwaldError):
    """Simulated state exceeded the overflow guard (explosive parameters)."""


class UnknownPreset(SplitwaldError):
    """Requested scenario preset name does not exist."""


class PlanParseError(SplitwaldError):
    """Experiment plan file is malformed; message names the offending field."""


class EmptyReport(SplitwaldError):
    """Report contains no cells."""


class InvalidGrid(SplitwaldError):
    """Requested evaluation grid is empty or out of bounds."""


class ColumnMissing(SplitwaldError):
    """Named CSV column not present in the header."""


class TooFewRows(SplitwaldError):
    """CSV has too few usable rows after lagging."""
