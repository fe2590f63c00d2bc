"""Render-side error types."""


class RenderError(Exception):
    """Base class for every error raised by the render component."""


class SpecSchemaError(RenderError):
    """A spec JSON file does not fit the documented schema."""


class UnsupportedChartTypeError(RenderError):
    """The spec names a chart type outside bar/scatter/line/dot."""


class TypesetError(RenderError):
    """The math renderer cannot typeset the expression."""


class ParamOutOfRangeError(RenderError):
    """An augmentation parameter falls outside its declared range."""


class UnreadableImageError(RenderError):
    """An input image could not be opened or decoded."""
