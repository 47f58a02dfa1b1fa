"""Exception hierarchy.  Everything raised for bad data derives from SkinError."""


class SkinError(Exception):
    """Base class for data, format and evaluation errors."""


class InputError(SkinError):
    """A named input file or directory is missing or unreadable."""


class FormatError(SkinError):
    """A file could not be decoded or does not follow its expected format."""


class AnnotationError(FormatError):
    """A ground-truth mask contains a pixel that is neither white nor black."""


class LayoutError(SkinError):
    """A dataset root does not have the images/ + masks/ layout."""


class EmptyDatasetError(SkinError):
    """No image/mask pairs were found."""


class PairingError(SkinError):
    """An image and its mask have different dimensions."""


class EmptyInputError(SkinError):
    """Evaluation was asked to score an empty record list."""


class DegenerateClassError(SkinError):
    """A rate is undefined because one ground-truth class has no records."""


class ParameterError(SkinError, ValueError):
    """An invalid numeric parameter (bins, bounds, coverage)."""


class EmptyHistogramError(SkinError):
    """A histogram has no in-range mass to derive thresholds from."""


class DatasetWarning(UserWarning):
    """Non-fatal dataset issue: unmatched stems, non-canonical mask pixels."""
