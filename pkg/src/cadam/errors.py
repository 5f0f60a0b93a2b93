"""Exception hierarchy shared across the library."""


class CadamError(Exception):
    """Base class for all library errors."""


class DimMismatch(CadamError):
    """Operands have different lengths."""


class NegativeElement(CadamError):
    """A value that must be nonnegative (e.g. a second-moment entry) is negative."""


class NonFiniteGradient(CadamError):
    """A gradient contains NaN or infinity."""


class NonFiniteState(CadamError):
    """An optimizer step produced a non-finite moment or parameter value."""


class ThresholdUnset(CadamError):
    """C-Adam_V2 requires a strictly positive floor epsilon0."""


class NegativeWeight(CadamError):
    """Projection weights must be nonnegative."""


class VariantMismatch(CadamError):
    """An operation was applied to an optimizer variant it does not support."""


class DeltaNotLessThanOne(CadamError):
    """beta1 / sqrt(beta2) must be < 1 for the moment-bound diagnostics."""


class UnboundedDomain(CadamError):
    """The regret bound needs a feasible set with finite diameter."""


class HistoryTooLarge(CadamError):
    """Retaining the full gradient/moment history would exceed the memory cap."""


class ConfigInvalid(CadamError):
    """A run configuration failed validation; the message names the field."""


class DatasetMissing(CadamError):
    """A dataset file referenced by a run manifest does not exist."""


class IncompatibleRuns(CadamError):
    """Runs being compared do not share an experiment/iteration layout."""


class LabelOutOfRange(CadamError):
    """A class label is outside [0, K)."""


class DegenerateBoundary(CadamError):
    """Both boundary weights are zero; no decision line exists."""


class BadMagic(CadamError):
    """An IDX file does not start with the expected magic number."""


class TruncatedFile(CadamError):
    """An IDX file is shorter than its header promises."""


class CountMismatch(CadamError):
    """Image and label files disagree on the number of records."""
