"""Exception types shared across the package."""


class ToponavError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(ToponavError, ValueError):
    """Embedding dimensions are incompatible between two operands or stores."""


class EmptyStoreError(ToponavError, ValueError):
    """Operation requires at least one stored vector."""


class FormatError(ToponavError, ValueError):
    """Base class for embedding/map file format violations."""


class BadMagicError(FormatError):
    """File does not start with the expected magic bytes."""


class UnsupportedVersionError(FormatError):
    """File declares a format version this reader does not support."""


class CountMismatchError(FormatError):
    """Binary payload size disagrees with the declared dim/count."""


class SidecarMismatchError(FormatError):
    """Sidecar metadata rows do not align 1:1 with binary rows."""


class FilterDivergenceError(ToponavError, ArithmeticError):
    """Posterior collapsed to all-zero mass; the filter cannot continue."""
