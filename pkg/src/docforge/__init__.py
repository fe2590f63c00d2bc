"""docforge: build, validate, package, and score markup-grounded document datasets."""

from .markup import (
    BBox,
    MarkupKind,
    TaggedMarkup,
    TextSpan,
    detect_kind,
    parse_tagged,
    wrap_tagged,
)

__all__ = [
    "BBox",
    "MarkupKind",
    "TaggedMarkup",
    "TextSpan",
    "detect_kind",
    "parse_tagged",
    "wrap_tagged",
]

__version__ = "0.1.0"
