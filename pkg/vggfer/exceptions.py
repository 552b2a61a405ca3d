"""Structured errors raised by vggfer.

Every error carries an ``exit_code``: 1 for computational failures, 2 for usage or I/O problems.
"""


class VggferError(Exception):
    exit_code = 1


class ShapeMismatchError(VggferError, ValueError):
    pass


class OddExtentError(ShapeMismatchError):
    pass


class FeatureDimensionError(ShapeMismatchError):
    pass


class NonFiniteInputError(VggferError, ValueError):
    pass


class InsufficientSamplesError(VggferError, ValueError):
    pass


class InsufficientClassesError(InsufficientSamplesError):
    pass


class EmptyImageError(VggferError, ValueError):
    pass


class SplitError(VggferError, ValueError):
    pass


class SelectionError(VggferError, ValueError):
    pass


class MetricsError(VggferError, ValueError):
    pass


class OracleScopeError(VggferError, ValueError):
    pass


class BundleError(VggferError):
    exit_code = 2


class MissingManifestError(BundleError, FileNotFoundError):
    pass


class MissingEntryError(BundleError, KeyError):

    def __str__(self):
        return Exception.__str__(self)


class UnexpectedEntryError(BundleError):
    pass


class TruncatedBlobError(BundleError):
    pass


class UnsupportedVersionError(BundleError):
    pass


class BundleShapeError(BundleError, ShapeMismatchError):
    exit_code = 2


class ReportError(VggferError):
    exit_code = 2


class ConfigError(VggferError, ValueError):
    exit_code = 2


class CorpusError(VggferError):
    exit_code = 2


class EmptyCorpusError(CorpusError):
    pass


class UnknownLabelError(CorpusError):
    pass


class ImageDecodeError(CorpusError):
    pass


class InvalidPixelsError(ImageDecodeError, ValueError):
    pass


class ComponentClampWarning(UserWarning):
    pass


class DegenerateProblemWarning(UserWarning):
    pass


class StratificationWarning(UserWarning):
    pass


class ConvergenceWarning(UserWarning):
    pass


class SkippedImageWarning(UserWarning):
    pass
