"""Markup kinds, special-token framing, and tagged-payload parsing.

Answers in the dataset wire format are framed as ``<kind>`` + body +
``</kind>``; this module owns that grammar.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass

from .errors import (
    MismatchedTagError,
    MissingFrameError,
    TagInBodyError,
    TrailingContentError,
    UnknownTagError,
)


class MarkupKind(enum.Enum):
    """The seven markup representations a document can be parsed into."""

    TXT = "txt"
    TXT_GD = "txt_gd"
    MD = "md"
    LATEX = "latex"
    HTML = "html"
    JSON = "json"
    TIKZ = "tikz"

    @property
    def tag(self) -> str:
        return self.value

    @property
    def open_token(self) -> str:
        return f"<{self.value}>"

    @property
    def close_token(self) -> str:
        return f"</{self.value}>"


#: Every framing token, open and close, for all seven kinds.
FRAMING_TOKENS: tuple[str, ...] = tuple(
    tok for kind in MarkupKind for tok in (kind.open_token, kind.close_token)
)


@dataclass(frozen=True)
class TaggedMarkup:
    """A markup body paired with its kind; the body carries no framing tokens."""

    kind: MarkupKind
    body: str

    def __post_init__(self) -> None:
        if not isinstance(self.kind, MarkupKind):
            raise TypeError(f"kind must be a MarkupKind, got {type(self.kind).__name__}")
        for token in FRAMING_TOKENS:
            if token in self.body:
                raise TagInBodyError(f"body contains framing token {token!r}")


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box on a 0-1000 integer grid, origin top-left."""

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self) -> None:
        for name in ("x1", "y1", "x2", "y2"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"{name} must be an integer, got {v!r}")
            if not 0 <= v <= 1000:
                raise ValueError(f"{name}={v} outside the [0, 1000] grid")
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise ValueError(f"inverted box ({self.x1},{self.y1}),({self.x2},{self.y2})")

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1


@dataclass(frozen=True)
class TextSpan:
    """A text fragment with its bounding box; the atom of OCR ordering."""

    text: str
    box: BBox

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("span text must be non-empty")
        if "\n" in self.text:
            raise ValueError("span text must not contain newlines")


def wrap_tagged(m: TaggedMarkup) -> str:
    """Frame a payload as ``<kind>`` + body + ``</kind>``, nothing else."""
    return m.kind.open_token + m.body + m.kind.close_token


_OPEN_RE = re.compile(r"<([a-z0-9_]+)>")
_END_CLOSE_RE = re.compile(r"</([a-z0-9_]+)>\Z")
_TAG_VALUES = frozenset(kind.value for kind in MarkupKind)


def parse_tagged(s: str) -> TaggedMarkup:
    """Parse exactly one framed payload; the inverse of :func:`wrap_tagged`.

    Raises MissingFrameError when no leading tag is present, UnknownTagError
    for a leading tag outside the seven kinds, MismatchedTagError when the
    matching closing tag is absent (including closes of a different kind),
    and TrailingContentError for characters after the frame. Bodies never
    contain framing tokens, so the first occurrence of the matching close
    token is the frame's end; tag-shaped substrings of other names (say,
    ``</title>`` inside an HTML body) are plain body content.
    """
    m = _OPEN_RE.match(s)
    if m is None:
        raise MissingFrameError("no leading markup tag")
    name = m.group(1)
    if name not in _TAG_VALUES:
        raise UnknownTagError(f"unknown markup tag <{name}>")
    kind = MarkupKind(name)
    rest = s[m.end():]
    idx = rest.find(kind.close_token)
    if idx < 0:
        end_close = _END_CLOSE_RE.search(rest)
        if end_close is not None:
            raise MismatchedTagError(f"<{name}> closed by </{end_close.group(1)}>")
        raise MismatchedTagError(f"<{name}> has no closing tag")
    if idx + len(kind.close_token) != len(rest):
        raise TrailingContentError("content after the closing tag")
    return TaggedMarkup(kind, rest[:idx])


_HTML_TAG_NAMES = frozenset(
    "html head body div span p h1 h2 h3 h4 h5 h6 table thead tbody tfoot tr td th "
    "ul ol li a title nav footer header section article img br hr b i em strong "
    "form input button meta link style script blockquote pre code".split()
)
_HTML_LEAD_RE = re.compile(r"<!?([a-zA-Z][a-zA-Z0-9]*)")
_LATEX_CMD_RE = re.compile(r"\\[A-Za-z]+")
_INLINE_MATH_RE = re.compile(r"\$[^$]+\$")
_BOX_FRAGMENT_RE = re.compile(r"<box>\(\d+,\d+\),\(\d+,\d+\)</box>")
_MD_LINE_RES = (
    re.compile(r"^#{1,6} \S"),          # heading
    re.compile(r"^\|.*\|\s*$"),          # pipe-table row
    re.compile(r"^[-*] \S"),             # bullet item
    re.compile(r"^\d+\. \S"),            # numbered item
    re.compile(r"^```"),                 # fence
)


def detect_kind(body: str) -> MarkupKind:
    """Best-guess kind for an unframed body; deterministic and total.

    Rules fire in a fixed order: JSON document (object or array root),
    tikzpicture marker, leading HTML tag, LaTeX command density or inline
    math, Markdown structure markers, grounded-box syntax, plain text.
    """
    stripped = body.strip()
    if stripped.startswith(("{", "[")):
        try:
            json.loads(stripped)
            return MarkupKind.JSON
        except ValueError:
            pass
    if "\\begin{tikzpicture}" in body:
        return MarkupKind.TIKZ
    if stripped.startswith("<"):
        if stripped[:9].lower() == "<!doctype":
            return MarkupKind.HTML
        lead = _HTML_LEAD_RE.match(stripped)
        if lead is not None and lead.group(1).lower() in _HTML_TAG_NAMES:
            return MarkupKind.HTML
    commands = _LATEX_CMD_RE.findall(body)
    if (
        len(commands) >= 2
        or (commands and "{" in body)
        or _INLINE_MATH_RE.search(body)
    ):
        return MarkupKind.LATEX
    for line in body.splitlines():
        probe = line.strip()
        if any(pat.match(probe) for pat in _MD_LINE_RES):
            return MarkupKind.MD
    if _BOX_FRAGMENT_RE.search(body):
        return MarkupKind.TXT_GD
    return MarkupKind.TXT
