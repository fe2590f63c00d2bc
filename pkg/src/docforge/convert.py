"""Deterministic cross-format converters.

HTML tables to Markdown, a LaTeX subset to Markdown with unconvertible
filtering, OCR spans to reading-ordered text, KIE fields and chart metadata
to canonical JSON, and synthetic-page summarization.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass

from .dom import Element, parse_html
from .errors import (
    DuplicateKeyError,
    MalformedHtmlError,
    NoTableError,
    NotJsonError,
    SchemaMismatchError,
    UnbalancedBracesError,
    UnsupportedSpanError,
)
from .markup import MarkupKind, TaggedMarkup, TextSpan

# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KieField:
    """One key-value field extracted from a card, receipt, or form."""

    key: str
    value: str

    def __post_init__(self) -> None:
        if not self.key.strip():
            raise ValueError("field key must be non-empty")


def normalize_key(key: str) -> str:
    """Key identity used for uniqueness and matching: trimmed, case-folded."""
    return key.strip().casefold()


@dataclass(frozen=True)
class Series:
    name: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        for v in self.values:
            if not math.isfinite(v):
                raise ValueError(f"series {self.name!r} has non-finite value {v!r}")


@dataclass(frozen=True)
class ChartMeta:
    """Structured chart description shared by gold emission and rendering."""

    title: str
    source: str
    x_axis: tuple[str, ...]
    y_axis: str
    series: tuple[Series, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_axis", tuple(self.x_axis))
        object.__setattr__(self, "series", tuple(self.series))
        for label in self.x_axis:
            if not isinstance(label, str) or not label:
                raise ValueError(f"category labels must be non-empty strings, got {label!r}")
        if len(set(self.x_axis)) != len(self.x_axis):
            raise ValueError("category labels must be unique")
        names = [s.name for s in self.series]
        if len(set(names)) != len(names):
            raise ValueError("series names must be unique")
        for s in self.series:
            if len(s.values) != len(self.x_axis):
                raise ValueError(
                    f"series {s.name!r} has {len(s.values)} values for "
                    f"{len(self.x_axis)} categories"
                )


# ---------------------------------------------------------------------------
# OCR reading order
# ---------------------------------------------------------------------------


def _shares_line(a: TextSpan, b: TextSpan) -> bool:
    # Overlap may be negative; zero-height spans join a line they sit inside.
    overlap = min(a.box.y2, b.box.y2) - max(a.box.y1, b.box.y1)
    return overlap >= 0.5 * min(a.box.height, b.box.height)


def _span_key(s: TextSpan) -> tuple:
    return (s.box.y1, s.box.x1, s.box.y2, s.box.x2, s.text)


def _cluster_lines(spans: list[TextSpan]) -> list[list[TextSpan]]:
    """Group spans into lines via transitive vertical overlap.

    Canonical pre-sort plus union-find makes the result independent of the
    input ordering.
    """
    ordered = sorted(spans, key=_span_key)
    n = len(ordered)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if _shares_line(ordered[i], ordered[j]):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri

    groups: dict[int, list[TextSpan]] = {}
    for i, span in enumerate(ordered):
        groups.setdefault(find(i), []).append(span)
    lines = [sorted(members, key=lambda s: (s.box.x1, s.box.y1, s.box.x2, s.text))
             for members in groups.values()]
    lines.sort(key=lambda line: (min(s.box.y1 for s in line), min(s.box.x1 for s in line)))
    return lines


def order_text_spans(spans: list[TextSpan]) -> str:
    """Read spans left to right within a line, lines top to bottom."""
    lines = _cluster_lines(list(spans))
    return "\n".join(" ".join(s.text for s in line) for line in lines)


def _grounded_fragment(s: TextSpan) -> str:
    b = s.box
    return f"{s.text}<box>({b.x1},{b.y1}),({b.x2},{b.y2})</box>"


def spans_to_grounded_text(spans: list[TextSpan]) -> TaggedMarkup:
    """Reading-ordered text where every span carries its box coordinates."""
    lines = _cluster_lines(list(spans))
    body = "\n".join(" ".join(_grounded_fragment(s) for s in line) for line in lines)
    return TaggedMarkup(MarkupKind.TXT_GD, body)


# ---------------------------------------------------------------------------
# HTML table -> Markdown
# ---------------------------------------------------------------------------


def _cell_text(el: Element) -> str:
    text = el.text().replace("\n", " ").strip()
    return text.replace("|", "\\|")


def html_table_to_markdown(html: str) -> str:
    """Convert a single simple HTML table to a GitHub-style pipe table.

    Rows with rowspan/colspan are rejected (UnsupportedSpanError), matching
    the filtering of non-convertible structures; nested or multiple tables
    are malformed.
    """
    root = parse_html(html)
    tables = root.find_all("table")
    if not tables:
        raise NoTableError("no table element in input")
    if len(tables) > 1:
        raise MalformedHtmlError(f"expected exactly one table, found {len(tables)}")
    rows = tables[0].find_all("tr")
    if not rows:
        raise MalformedHtmlError("table has no rows")

    grid: list[list[str]] = []
    for tr in rows:
        cells = tr.find_all("td", "th")
        for cell in cells:
            for attr in ("rowspan", "colspan"):
                value = cell.attrs.get(attr)
                if value is not None and value != "1":
                    raise UnsupportedSpanError(f"{attr}={value!r} is not supported")
        grid.append([_cell_text(c) for c in cells])

    width = max(len(row) for row in grid)
    if width == 0:
        raise MalformedHtmlError("table has no cells")
    padded = [row + [""] * (width - len(row)) for row in grid]

    def fmt(row: list[str]) -> str:
        return "| " + " | ".join(row) + " |"

    lines = [fmt(padded[0]), fmt(["---"] * width)]
    lines.extend(fmt(row) for row in padded[1:])
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# LaTeX subset -> Markdown
# ---------------------------------------------------------------------------


class Unconvertible:
    """Sentinel for inputs outside the supported LaTeX subset (not an error)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNCONVERTIBLE"


UNCONVERTIBLE = Unconvertible()

_HEADING_COMMANDS = {"section": "#", "subsection": "##", "subsubsection": "###"}
_LIST_ENVS = {"itemize", "enumerate"}
_MATH_TOKEN_RE = re.compile(r"\x00math(\d+)\x00")


def check_brace_balance(text: str) -> None:
    """Raise UnbalancedBracesError unless unescaped braces nest properly."""
    depth = 0
    prev = ""
    for ch in text:
        if ch == "{" and prev != "\\":
            depth += 1
        elif ch == "}" and prev != "\\":
            depth -= 1
            if depth < 0:
                raise UnbalancedBracesError("closing brace without an opener")
        prev = "" if prev == "\\" and ch == "\\" else ch
    if depth != 0:
        raise UnbalancedBracesError(f"{depth} unclosed opening braces")


def _read_group(text: str, start: int) -> tuple[str, int] | None:
    """Read a balanced ``{...}`` group starting at index ``start``."""
    if start >= len(text) or text[start] != "{":
        return None
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "{" and (i == 0 or text[i - 1] != "\\"):
            depth += 1
        elif text[i] == "}" and text[i - 1] != "\\":
            depth -= 1
            if depth == 0:
                return text[start + 1: i], i + 1
    return None


def _convert_inline(text: str) -> str | None:
    """Convert bold/italic runs; None when an unsupported command appears."""
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        m = re.match(r"\\([A-Za-z]+)", text[i:])
        if m is None:
            return None  # lone backslash or escaped symbol: unsupported
        name = m.group(1)
        if name in ("textbf", "textit"):
            group = _read_group(text, i + m.end())
            if group is None:
                return None
            inner, nxt = group
            converted = _convert_inline(inner)
            if converted is None:
                return None
            marker = "**" if name == "textbf" else "*"
            out.append(f"{marker}{converted}{marker}")
            i = nxt
        else:
            return None
    return "".join(out)


def _convert_list_env(block: str) -> str | None:
    m = re.match(r"\\begin\{(\w+)\}", block)
    if m is None:
        return None
    env = m.group(1)
    if env not in _LIST_ENVS:
        return None
    end_marker = f"\\end{{{env}}}"
    if not block.endswith(end_marker):
        return None
    inner = block[m.end(): len(block) - len(end_marker)]
    if "\\begin{" in inner:
        return None  # nested environments are outside the subset
    chunks = re.split(r"\\item\b", inner)
    if chunks[0].strip():
        return None  # text before the first item
    items = []
    for chunk in chunks[1:]:
        converted = _convert_inline(" ".join(chunk.split()))
        if converted is None:
            return None
        items.append(converted.strip())
    if not items:
        return None
    if env == "itemize":
        return "\n".join(f"- {item}" for item in items)
    return "\n".join(f"{n}. {item}" for n, item in enumerate(items, start=1))


_HEADING_LINE_RE = re.compile(r"\\(section|subsection|subsubsection)\{")


def _convert_block(block: str) -> str | None:
    stripped = block.strip()
    if stripped.startswith("\\begin{"):
        return _convert_list_env(stripped)
    if "\\begin{" in stripped or "\\end{" in stripped:
        return None  # environments mixed into running text
    lines_out: list[str] = []
    for line in stripped.splitlines():
        line = line.strip()
        if not line:
            continue
        m = _HEADING_LINE_RE.match(line)
        if m is not None:
            group = _read_group(line, m.end() - 1)
            if group is None:
                return None
            inner, nxt = group
            if line[nxt:].strip():
                return None  # trailing content on a heading line
            converted = _convert_inline(inner)
            if converted is None:
                return None
            lines_out.append(f"{_HEADING_COMMANDS[m.group(1)]} {converted}")
            continue
        converted = _convert_inline(line)
        if converted is None:
            return None
        lines_out.append(converted)
    return "\n".join(lines_out)


def latex_to_markdown(latex: str) -> str | Unconvertible:
    """Convert the supported LaTeX subset to Markdown.

    Supported: section/subsection/subsubsection headings, textbf/textit,
    itemize/enumerate lists, verbatim inline ``$...$`` math, blank-line
    paragraphs. Anything else returns UNCONVERTIBLE, the filtering signal;
    structurally broken braces raise UnbalancedBracesError instead.
    """
    check_brace_balance(latex)
    if "$$" in latex:
        return UNCONVERTIBLE
    math_segments: list[str] = []

    def _stash(m: re.Match) -> str:
        math_segments.append(m.group(0))
        return f"\x00math{len(math_segments) - 1}\x00"

    text = re.sub(r"\$[^$]*\$", _stash, latex)
    if "$" in text:
        return UNCONVERTIBLE  # unterminated math
    blocks = re.split(r"\n\s*\n", text.strip())
    out_blocks: list[str] = []
    for block in blocks:
        if not block.strip():
            continue
        converted = _convert_block(block)
        if converted is None:
            return UNCONVERTIBLE
        out_blocks.append(converted)
    result = "\n\n".join(out_blocks)
    return _MATH_TOKEN_RE.sub(lambda m: math_segments[int(m.group(1))], result)


# ---------------------------------------------------------------------------
# KIE fields and chart metadata <-> JSON
# ---------------------------------------------------------------------------


def kie_fields_to_json(fields: list[KieField]) -> TaggedMarkup:
    """Serialize fields as a JSON object, keys in input order, byte-stable."""
    seen: set[str] = set()
    obj: dict[str, str] = {}
    for f in fields:
        norm = normalize_key(f.key)
        if norm in seen:
            raise DuplicateKeyError(f"duplicate key {f.key!r}")
        seen.add(norm)
        obj[f.key] = f.value
    return TaggedMarkup(MarkupKind.JSON, json.dumps(obj, ensure_ascii=False))


def format_chart_number(x: float) -> str:
    """Numbers in chart JSON: up to 6 significant digits, trailing zeros trimmed."""
    return format(float(x), ".6g")


CHART_JSON_KEYS = ("title", "source", "x-axis", "y-axis", "value")


def chart_meta_to_json(meta: ChartMeta) -> TaggedMarkup:
    """Emit the chart-JSON gold body with its fixed key order, byte-stable."""
    dumps = lambda s: json.dumps(s, ensure_ascii=False)  # noqa: E731
    x_axis = "[" + ", ".join(dumps(label) for label in meta.x_axis) + "]"
    entries = ", ".join(
        f"{dumps(s.name)}: [" + ", ".join(format_chart_number(v) for v in s.values) + "]"
        for s in meta.series
    )
    body = (
        f'{{"title": {dumps(meta.title)}, "source": {dumps(meta.source)}, '
        f'"x-axis": {x_axis}, "y-axis": {dumps(meta.y_axis)}, '
        f'"value": {{{entries}}}}}'
    )
    return TaggedMarkup(MarkupKind.JSON, body)


_CURRENCY_SYMBOLS = "$€£¥₹"
_THOUSANDS_RE = re.compile(r"^[+-]?\d{1,3}(,\d{3})+(\.\d+)?$")


def normalize_number(s: str) -> float:
    """Parse a formatted numeric string to a float.

    Strips one leading currency symbol, well-formed thousands separators, and
    a trailing percent sign (percent does not rescale). Raises ValueError for
    anything else.
    """
    t = s.strip()
    if t.endswith("%"):
        t = t[:-1].strip()
    if t[:1] in _CURRENCY_SYMBOLS:
        t = t[1:].strip()
    if "," in t:
        if not _THOUSANDS_RE.match(t):
            raise ValueError(f"malformed thousands separators in {s!r}")
        t = t.replace(",", "")
    return float(t)


def _coerce_value(raw: object, where: str) -> float:
    if isinstance(raw, bool):
        raise SchemaMismatchError(f"{where}: boolean is not a chart value")
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        try:
            return normalize_number(raw)
        except ValueError as exc:
            raise SchemaMismatchError(f"{where}: non-numeric value {raw!r}") from exc
    raise SchemaMismatchError(f"{where}: unsupported value type {type(raw).__name__}")


def json_to_chart_meta(body: str) -> ChartMeta:
    """Parse a chart-JSON body back into ChartMeta; inverse of the emitter.

    Tolerant of key order, whitespace, and formatted numeric strings
    ("1,234", "56%", "$12"); intolerant of missing keys or ragged value
    lists (SchemaMismatchError).
    """
    try:
        obj = json.loads(body)
    except ValueError as exc:
        raise NotJsonError(str(exc)) from exc
    if not isinstance(obj, dict):
        raise SchemaMismatchError("chart JSON root must be an object")
    for key in CHART_JSON_KEYS:
        if key not in obj:
            raise SchemaMismatchError(f"missing required key {key!r}")
    for key in ("title", "source", "y-axis"):
        if not isinstance(obj[key], str):
            raise SchemaMismatchError(f"{key!r} must be a string")
    x_axis = obj["x-axis"]
    if not isinstance(x_axis, list) or not all(isinstance(l, str) for l in x_axis):
        raise SchemaMismatchError('"x-axis" must be a list of strings')
    value = obj["value"]
    if not isinstance(value, dict):
        raise SchemaMismatchError('"value" must be an object')
    series = []
    for name, raw_values in value.items():
        if not isinstance(raw_values, list):
            raise SchemaMismatchError(f"series {name!r} values must be a list")
        if len(raw_values) != len(x_axis):
            raise SchemaMismatchError(
                f"series {name!r} has {len(raw_values)} values for {len(x_axis)} categories"
            )
        series.append(
            Series(name, tuple(_coerce_value(v, f"series {name!r}") for v in raw_values))
        )
    try:
        return ChartMeta(
            title=obj["title"],
            source=obj["source"],
            x_axis=tuple(x_axis),
            y_axis=obj["y-axis"],
            series=tuple(series),
        )
    except ValueError as exc:
        raise SchemaMismatchError(str(exc)) from exc


# ---------------------------------------------------------------------------
# synthetic-page summarization
# ---------------------------------------------------------------------------

_SKIPPED_SECTIONS = frozenset({"nav", "footer", "script", "style"})
_HEADING_TAGS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6"})


def _collapse_ws(text: str) -> str:
    return " ".join(text.split())


def html_summarize(html: str) -> str:
    """Extract the title plus headings and paragraphs in document order.

    Content inside nav/footer/script/style subtrees is skipped; whitespace is
    collapsed. This is the deterministic extraction rule standing in for
    webpage summarization gold.
    """
    root = parse_html(html)

    title = ""
    titles = root.find_all("title")
    if titles:
        title = _collapse_ws(titles[0].text())
    if not title:
        h1s = root.find_all("h1")
        if h1s:
            title = _collapse_ws(h1s[0].text())

    lines: list[str] = []

    def walk(el: Element) -> None:
        for child in el.children:
            if not isinstance(child, Element):
                continue
            if child.tag in _SKIPPED_SECTIONS:
                continue
            if child.tag in _HEADING_TAGS or child.tag == "p":
                text = _collapse_ws(child.text())
                if text:
                    lines.append(text)
                continue
            walk(child)

    walk(root)
    parts = ([title] if title else []) + lines
    return "\n".join(parts)
