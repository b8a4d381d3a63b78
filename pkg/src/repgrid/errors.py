"""Exception types shared across the package.

Every failure mode raised by the library derives from :class:`RepgridError`
so callers can catch one base class at pipeline boundaries.
"""

from __future__ import annotations


class RepgridError(Exception):
    """Base class for all library errors."""


# --- ingestion -------------------------------------------------------------

class MissingValueError(RepgridError):
    """A CSV cell is empty, non-numeric, or non-finite."""

    def __init__(self, row: int, col: str, detail: str = ""):
        self.row = row
        self.col = col
        msg = f"missing or invalid value at row {row}, column {col!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class DuplicateTimestampError(RepgridError):
    """Two rows share the same timestamp."""


class UnknownTargetError(RepgridError):
    """The requested target variable names no column."""


# --- transforms ------------------------------------------------------------

class SpanTooLargeError(RepgridError):
    """Smoothing span m exceeds the series length."""


class SeriesTooShortError(RepgridError):
    """Series too short for the requested operation."""


class TooFewWindowsError(RepgridError):
    """Not enough windows to split into train and test."""


class RepresentationBuildError(RepgridError):
    """A transform failed for one smoothing/skip combination.

    Wraps the underlying error and carries the representation id so a sweep
    can report which combination failed.
    """

    def __init__(self, representation_id: str, cause: Exception):
        self.representation_id = representation_id
        self.cause = cause
        super().__init__(f"representation {representation_id!r}: {cause}")


# --- statistics ------------------------------------------------------------

class ConstantSeriesError(RepgridError):
    """Operation undefined for a constant series (zero variance)."""


class LagOutOfRangeError(RepgridError):
    """Autocorrelation lag outside [0, n)."""


class SingularRegressionError(RepgridError):
    """Regression design matrix is rank deficient."""


class LengthMismatchError(RepgridError):
    """Paired sequences have different lengths."""


class ZeroVarianceError(RepgridError):
    """Correlation undefined because one input has zero variance."""


# --- forecaster ------------------------------------------------------------

class ShapeMismatchError(RepgridError):
    """Input shape incompatible with the model."""


class NonFiniteActivationError(RepgridError):
    """Forward pass produced NaN or infinity."""


class DivergedLossError(RepgridError):
    """Training loss became non-finite."""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"training loss became non-finite at epoch {epoch}")


# --- explainer -------------------------------------------------------------

class TooManyFeaturesError(RepgridError):
    """Exact attribution is limited to 12 features; group features coarser."""


class UnivariateError(RepgridError):
    """Operation requires a multivariate dataset (k > 1)."""


# --- visualization prep ----------------------------------------------------

class DegenerateRangeWarning(UserWarning):
    """All values equal; quantizer falls back to a single bin."""


# --- store / service -------------------------------------------------------

class StoreNotFoundError(RepgridError):
    """Run-store directory or manifest missing."""


class PortInUseError(RepgridError):
    """Requested TCP port already bound."""


class UnknownRepresentationError(RepgridError):
    """Representation id not present in the store."""


class MalformedPolygonError(RepgridError):
    """Lasso polygon has fewer than 3 vertices."""
