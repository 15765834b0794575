"""Exception types shared across the package."""


class ShapeAlignError(Exception):
    """Base class for all domain errors (CLI exit code 2)."""


class UsageError(ShapeAlignError):
    """Bad configuration or arguments (CLI exit code 1)."""


class ImageError(ShapeAlignError):
    """Unreadable, unsupported, or empty raster input."""


class ContourError(ShapeAlignError):
    """Contour extraction or resampling failed."""


class EncodingError(ShapeAlignError):
    """Symbolic encoding could not be produced."""
