"""Seeded synthesis of document specs with paired gold markup.

Every generator is a pure function of (seed, config): the same inputs
produce byte-identical records, so datasets are reproducible and can be
built by independent workers keyed on record index.
"""

from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Union

from .convert import (
    ChartMeta,
    Series,
    chart_meta_to_json,
    check_brace_balance,
    format_chart_number,
)
from .errors import EmptyCorpusError, InvalidConfigError, UnknownTaskError
from .markup import MarkupKind, TaggedMarkup
from .validate import check_env_balance


def derive_seed(master: int, label: str) -> int:
    """Per-record seed from a master seed and a record label.

    SHA-256 based so the mapping is stable across platforms and Python
    versions.
    """
    digest = hashlib.sha256(f"{master}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------------------
# configs
# ---------------------------------------------------------------------------


def _check_int_range(name: str, rng: tuple[int, int], minimum: int = 1) -> None:
    lo, hi = rng
    if lo > hi:
        raise InvalidConfigError(f"{name} range ({lo}, {hi}) is inverted")
    if lo < minimum:
        raise InvalidConfigError(f"{name} range must start at {minimum} or above")


@dataclass(frozen=True)
class ChartConfig:
    series_range: tuple[int, int] = (2, 5)
    category_range: tuple[int, int] = (3, 8)
    value_range: tuple[float, float] = (0.0, 1000.0)
    chart_types: tuple[str, ...] = ("bar", "scatter", "line", "dot")

    def __post_init__(self) -> None:
        _check_int_range("series", self.series_range)
        _check_int_range("category", self.category_range)
        lo, hi = self.value_range
        if not (lo <= hi and lo == lo and hi == hi and abs(lo) < 1e15 and abs(hi) < 1e15):
            raise InvalidConfigError(f"value range ({lo}, {hi}) is empty or not finite")
        if not self.chart_types:
            raise InvalidConfigError("chart_types must be non-empty")
        unknown = set(self.chart_types) - set(CHART_TYPES)
        if unknown:
            raise InvalidConfigError(f"unknown chart types: {sorted(unknown)}")


@dataclass(frozen=True)
class TableConfig:
    rows_range: tuple[int, int] = (2, 6)  # includes the header row
    cols_range: tuple[int, int] = (2, 5)

    def __post_init__(self) -> None:
        _check_int_range("rows", self.rows_range)
        _check_int_range("cols", self.cols_range)


@dataclass(frozen=True)
class ReceiptConfig:
    items_range: tuple[int, int] = (1, 6)
    qty_range: tuple[int, int] = (1, 5)
    price_cents_range: tuple[int, int] = (50, 2500)
    tax_rates: tuple[str, ...] = ("0", "0.05", "0.07", "0.1")

    def __post_init__(self) -> None:
        _check_int_range("items", self.items_range)
        _check_int_range("qty", self.qty_range)
        _check_int_range("price_cents", self.price_cents_range)
        if not self.tax_rates:
            raise InvalidConfigError("tax_rates must be non-empty")
        for rate in self.tax_rates:
            try:
                if Decimal(rate) < 0:
                    raise InvalidConfigError(f"negative tax rate {rate!r}")
            except ArithmeticError as exc:
                raise InvalidConfigError(f"bad tax rate {rate!r}") from exc


@dataclass(frozen=True)
class PageConfig:
    sections_range: tuple[int, int] = (1, 5)
    paragraphs_range: tuple[int, int] = (1, 3)
    nav_probability: float = 0.5
    footer_probability: float = 0.5

    def __post_init__(self) -> None:
        _check_int_range("sections", self.sections_range)
        _check_int_range("paragraphs", self.paragraphs_range)
        for name in ("nav_probability", "footer_probability"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InvalidConfigError(f"{name}={p} outside [0, 1]")


# ---------------------------------------------------------------------------
# vocabulary pools
# ---------------------------------------------------------------------------

CHART_TYPES = ("bar", "scatter", "line", "dot")

_FONTS = ("DejaVu Sans", "DejaVu Serif", "DejaVu Sans Mono")
_WIDTHS = (640, 800, 960)
_HEIGHTS = (480, 600, 720)

_TITLE_SUBJECTS = ("Revenue", "Rainfall", "Enrollment", "Energy Use", "Sales",
                   "Population", "Exports", "Web Traffic", "Output", "Attendance")
_TITLE_SCOPES = ("by Region", "by Quarter", "by Year", "by Product",
                 "by Department", "by Country")
_SOURCES = ("National Statistics Office", "Field Survey 2021", "Company Filings",
            "Open Data Portal", "Annual Report", "Market Research Panel")
_Y_LABELS = ("Value", "Count", "USD (millions)", "Percent", "Units", "Index")

_MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
           "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
_YEARS = tuple(str(y) for y in range(2010, 2026))
_REGIONS = ("North", "South", "East", "West", "Central", "Coast", "Inland", "Uplands")
_PRODUCTS_AXIS = ("Alpha", "Bravo", "Delta", "Echo", "Kilo", "Nova", "Orion", "Zephyr")
_ORDERED_POOLS = (_MONTHS, _YEARS)
_UNORDERED_POOLS = (_REGIONS, _PRODUCTS_AXIS)

_SERIES_NAMES = ("Store 1", "Store 2", "Store 3", "Branch A", "Branch B",
                 "Online", "Wholesale", "Retail", "Imports", "Domestic")

_TABLE_WORDS = ("apple", "harbor", "granite", "willow", "copper", "meadow",
                "summit", "lantern", "cedar", "ember", "falcon", "juniper",
                "marble", "quartz", "saffron", "timber", "velvet", "walnut",
                "amber", "birch", "cobalt", "drift", "fjord", "garnet")

_STORES = ("Corner Market", "Harbor Grocers", "City Pharmacy", "Trailside Cafe",
           "Union Hardware", "Maple Bakery")
_RECEIPT_ITEMS = ("Coffee", "Bread", "Milk", "Apples", "Soap", "Batteries",
                  "Notebook", "Tea", "Rice", "Cheese", "Eggs", "Pasta")

_PAGE_TITLES = ("Community Garden Notes", "Quarterly Bulletin", "Project Field Report",
                "Neighborhood Newsletter", "Research Update", "Operations Digest")
_PAGE_HEADINGS = ("Overview", "Background", "Methods", "Findings", "Discussion",
                  "Next Steps", "Schedule", "Resources", "Summary")
_PAGE_SENTENCES = (
    "The committee reviewed progress against the plan agreed last month.",
    "Attendance held steady across all three locations.",
    "Several volunteers proposed changes to the weekend schedule.",
    "Funding for the next phase remains under discussion.",
    "Equipment upgrades were completed ahead of schedule.",
    "Feedback collected at the open house was largely positive.",
    "A follow-up meeting is planned for the first week of the month.",
    "Two new partners joined the program this quarter.",
    "Maintenance work on the north site begins shortly.",
    "The survey results will be published in the next bulletin.",
)
_NAV_ITEMS = ("Home", "About", "Archive", "Contact", "Events")


# ---------------------------------------------------------------------------
# spec types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartStyle:
    font_name: str
    color_palette: tuple[tuple[int, int, int], ...]
    width_px: int
    height_px: int

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "color_palette", tuple(tuple(c) for c in self.color_palette)
        )
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("style dimensions must be positive")
        for rgb in self.color_palette:
            if len(rgb) != 3 or not all(0 <= c <= 255 for c in rgb):
                raise ValueError(f"bad RGB triple {rgb!r}")


@dataclass(frozen=True)
class ChartSpec:
    meta: ChartMeta
    chart_type: str
    style: ChartStyle
    seed: int

    def __post_init__(self) -> None:
        if self.chart_type not in CHART_TYPES:
            raise ValueError(f"chart_type must be one of {CHART_TYPES}")
        if len(self.style.color_palette) < len(self.meta.series):
            raise ValueError("palette must cover every series")


@dataclass(frozen=True)
class TableSpec:
    cells: tuple[tuple[str, ...], ...]  # row-major; first row is the header
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(tuple(row) for row in self.cells))
        if not self.cells or not self.cells[0]:
            raise ValueError("table must have at least one row and one column")
        width = len(self.cells[0])
        for row in self.cells:
            if len(row) != width:
                raise ValueError("table rows must have equal width")
            for cell in row:
                if "|" in cell or "\n" in cell:
                    raise ValueError(f"cell {cell!r} contains a pipe or newline")

    @property
    def html_twin(self) -> str:
        """The same table as simple HTML, for converter-equivalence checks."""
        parts = ["<table>"]
        for r, row in enumerate(self.cells):
            tag = "th" if r == 0 else "td"
            parts.append("<tr>" + "".join(f"<{tag}>{c}</{tag}>" for c in row) + "</tr>")
        parts.append("</table>")
        return "".join(parts)


#: Sampling bounds for formula augmentation parameters.
ROTATE_RANGE = (-5.0, 5.0)
SHEAR_RANGE = (-0.1, 0.1)
SIGMA_RANGE = (0.0, 8.0)


@dataclass(frozen=True)
class AugmentParams:
    rotate_deg: float
    shear: float
    noise_sigma: float

    def __post_init__(self) -> None:
        if not ROTATE_RANGE[0] <= self.rotate_deg <= ROTATE_RANGE[1]:
            raise ValueError(f"rotate_deg {self.rotate_deg} outside {ROTATE_RANGE}")
        if not SHEAR_RANGE[0] <= self.shear <= SHEAR_RANGE[1]:
            raise ValueError(f"shear {self.shear} outside {SHEAR_RANGE}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")


@dataclass(frozen=True)
class FormulaSpec:
    latex: str
    augment: AugmentParams
    seed: int

    def __post_init__(self) -> None:
        check_brace_balance(self.latex)
        problems = check_env_balance(self.latex)
        if problems:
            raise ValueError(f"unbalanced environments: {problems[0].message}")


@dataclass(frozen=True)
class ReceiptItem:
    name: str
    qty: int
    price: str  # exact two-decimal string

    def __post_init__(self) -> None:
        if self.qty < 1:
            raise ValueError("qty must be at least 1")
        Decimal(self.price)  # must parse


@dataclass(frozen=True)
class ReceiptSpec:
    store: str
    date: str
    items: tuple[ReceiptItem, ...]
    tax_rate: str
    subtotal: str
    tax: str
    total: str
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        cents = Decimal("0.01")
        subtotal = sum(
            (Decimal(i.price) * i.qty for i in self.items), Decimal("0")
        ).quantize(cents)
        tax = (subtotal * Decimal(self.tax_rate)).quantize(cents)
        total = subtotal + tax
        if (str(subtotal), str(tax), str(total)) != (self.subtotal, self.tax, self.total):
            raise ValueError("receipt arithmetic is inconsistent")


@dataclass(frozen=True)
class PageSection:
    heading: str
    paragraphs: tuple[str, ...]


@dataclass(frozen=True)
class PageSpec:
    title: str
    sections: tuple[PageSection, ...]
    nav_items: tuple[str, ...]
    footer: str
    gold_summary: str
    seed: int

    def __post_init__(self) -> None:
        expected = "\n".join(
            [self.title]
            + [part for s in self.sections for part in (s.heading, *s.paragraphs)]
        )
        if self.gold_summary != expected:
            raise ValueError("gold_summary does not match the page content")


SpecType = Union[ChartSpec, TableSpec, FormulaSpec, ReceiptSpec, PageSpec]

_CATEGORY_BY_TYPE = {
    ChartSpec: "chart",
    TableSpec: "table",
    FormulaSpec: "formula",
    ReceiptSpec: "receipt",
    PageSpec: "page",
}
_KIND_BY_CATEGORY = {
    "chart": MarkupKind.JSON,
    "table": MarkupKind.MD,
    "formula": MarkupKind.LATEX,
    "receipt": MarkupKind.JSON,
    "page": MarkupKind.HTML,
}


def category_of(spec: SpecType) -> str:
    return _CATEGORY_BY_TYPE[type(spec)]


@dataclass(frozen=True)
class SynthRecord:
    id: str
    spec: SpecType
    gold: TaggedMarkup
    qa: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self) -> None:
        expected = _KIND_BY_CATEGORY[category_of(self.spec)]
        if self.gold.kind is not expected:
            raise ValueError(
                f"{category_of(self.spec)} gold must be {expected.value}, "
                f"got {self.gold.kind.value}"
            )

    @property
    def category(self) -> str:
        return category_of(self.spec)


# ---------------------------------------------------------------------------
# gold emission (regenerable from the record spec alone)
# ---------------------------------------------------------------------------


def _markdown_from_cells(cells: tuple[tuple[str, ...], ...]) -> str:
    width = len(cells[0])

    def fmt(row: tuple[str, ...]) -> str:
        return "| " + " | ".join(row) + " |"

    lines = [fmt(cells[0]), fmt(("---",) * width)]
    lines.extend(fmt(row) for row in cells[1:])
    return "\n".join(lines)


def _receipt_json(spec: ReceiptSpec) -> str:
    import json

    obj = {
        "store": spec.store,
        "date": spec.date,
        "items": [
            {"name": i.name, "qty": i.qty, "price": i.price} for i in spec.items
        ],
        "subtotal": spec.subtotal,
        "tax": spec.tax,
        "total": spec.total,
    }
    return json.dumps(obj, ensure_ascii=False)


def _page_html(spec: PageSpec) -> str:
    # Rootless fragment: an <html> element would collide with the html
    # framing token, which bodies must never contain.
    lines = ["<head>", f"<title>{spec.title}</title>", "</head>", "<body>"]
    if spec.nav_items:
        items = "".join(f"<li>{item}</li>" for item in spec.nav_items)
        lines.append(f"<nav><ul>{items}</ul></nav>")
    for idx, section in enumerate(spec.sections):
        tag = "h1" if idx == 0 else "h2"
        lines.append(f"<{tag}>{section.heading}</{tag}>")
        for paragraph in section.paragraphs:
            lines.append(f"<p>{paragraph}</p>")
    if spec.footer:
        lines.append(f"<footer>{spec.footer}</footer>")
    lines.append("</body>")
    return "\n".join(lines)


def regenerate_gold(spec: SpecType) -> TaggedMarkup:
    """Rebuild the gold markup from a spec; byte-equal to the stored gold."""
    if isinstance(spec, ChartSpec):
        return chart_meta_to_json(spec.meta)
    if isinstance(spec, TableSpec):
        return TaggedMarkup(MarkupKind.MD, _markdown_from_cells(spec.cells))
    if isinstance(spec, FormulaSpec):
        return TaggedMarkup(MarkupKind.LATEX, spec.latex)
    if isinstance(spec, ReceiptSpec):
        return TaggedMarkup(MarkupKind.JSON, _receipt_json(spec))
    if isinstance(spec, PageSpec):
        return TaggedMarkup(MarkupKind.HTML, _page_html(spec))
    raise TypeError(f"unknown spec type {type(spec).__name__}")


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def _sample_categories(rng: random.Random, n: int) -> tuple[str, ...]:
    ordered = [p for p in _ORDERED_POOLS if len(p) >= n]
    unordered = [p for p in _UNORDERED_POOLS if len(p) >= n]
    eligible = ordered + unordered
    if not eligible:
        return tuple(f"Group {i + 1}" for i in range(n))
    pool = eligible[rng.randrange(len(eligible))]
    if pool in _ORDERED_POOLS:
        start = rng.randrange(len(pool) - n + 1)
        return tuple(pool[start: start + n])
    return tuple(rng.sample(pool, n))


def _sample_value(rng: random.Random, lo: float, hi: float) -> float:
    # One-decimal quantization keeps the 6-significant-digit JSON round trip exact.
    return round(rng.uniform(lo, hi), 1)


def synth_chart(seed: int, config: ChartConfig = ChartConfig()) -> SynthRecord:
    """Chart spec + chart-JSON gold + programmatic QA, deterministic in seed."""
    rng = random.Random(seed)
    n_series = rng.randint(*config.series_range)
    n_cats = rng.randint(*config.category_range)
    categories = _sample_categories(rng, n_cats)
    if n_series <= len(_SERIES_NAMES):
        names = rng.sample(_SERIES_NAMES, n_series)
    else:
        names = [f"Series {i + 1}" for i in range(n_series)]
    lo, hi = config.value_range
    series = tuple(
        Series(name, tuple(_sample_value(rng, lo, hi) for _ in categories))
        for name in names
    )
    meta = ChartMeta(
        title=f"{rng.choice(_TITLE_SUBJECTS)} {rng.choice(_TITLE_SCOPES)}",
        source=rng.choice(_SOURCES),
        x_axis=categories,
        y_axis=rng.choice(_Y_LABELS),
        series=series,
    )
    chart_type = rng.choice(config.chart_types)
    palette = tuple(
        (rng.randint(0, 255), rng.randint(0, 255), rng.randint(0, 255))
        for _ in range(n_series)
    )
    style = ChartStyle(
        font_name=rng.choice(_FONTS),
        color_palette=palette,
        width_px=rng.choice(_WIDTHS),
        height_px=rng.choice(_HEIGHTS),
    )
    spec = ChartSpec(meta=meta, chart_type=chart_type, style=style, seed=seed)

    lookup_series = series[rng.randrange(n_series)]
    lookup_cat_idx = rng.randrange(n_cats)
    lookup_q = (
        f"What is the value of {lookup_series.name} at {categories[lookup_cat_idx]}?"
    )
    lookup_a = format_chart_number(lookup_series.values[lookup_cat_idx])
    argmax_series = series[rng.randrange(n_series)]
    best_idx = max(range(n_cats), key=lambda i: (argmax_series.values[i], -i))
    argmax_q = f"Which category has the highest {argmax_series.name} value?"
    argmax_a = categories[best_idx]

    return SynthRecord(
        id=f"chart-{seed:016x}",
        spec=spec,
        gold=regenerate_gold(spec),
        qa=((lookup_q, lookup_a), (argmax_q, argmax_a)),
    )


def synth_table(seed: int, config: TableConfig = TableConfig()) -> SynthRecord:
    """Pipe-table gold with an HTML twin for converter oracle tests."""
    rng = random.Random(seed)
    n_rows = rng.randint(*config.rows_range)
    n_cols = rng.randint(*config.cols_range)
    if n_cols <= len(_TABLE_WORDS):
        header = tuple(w.capitalize() for w in rng.sample(_TABLE_WORDS, n_cols))
    else:
        header = tuple(f"Col {i + 1}" for i in range(n_cols))
    numeric_cols = {c for c in range(n_cols) if rng.random() < 0.4}
    rows = [header]
    for _ in range(n_rows - 1):
        row = tuple(
            str(rng.randint(0, 9999)) if c in numeric_cols else rng.choice(_TABLE_WORDS)
            for c in range(n_cols)
        )
        rows.append(row)
    spec = TableSpec(cells=tuple(rows), seed=seed)

    qa = None
    if n_rows > 1:
        r = rng.randrange(1, n_rows)
        c = rng.randrange(n_cols)
        qa = ((f"What is in row {r}, column {header[c]}?", spec.cells[r][c]),)
    return SynthRecord(
        id=f"table-{seed:016x}", spec=spec, gold=regenerate_gold(spec), qa=qa
    )


#: Math-expression templates; N, M, K are digit placeholders, VAR a symbol.
DEFAULT_FORMULA_CORPUS = (
    "x^{N} + y^{M}",
    "\\frac{N}{M x}",
    "\\sqrt{x^{N} + K}",
    "\\sum_{i=1}^{N} i^{M}",
    "\\int_{0}^{N} VAR^{M} \\, dVAR",
    "e^{N x} \\cos(M x)",
    "\\frac{a_{N} + b_{M}}{c_{K}}",
    "\\lim_{x \\to N} \\frac{x^{M} - K}{x - N}",
    "\\alpha^{N} + \\beta^{M} \\gamma",
    "\\left( VAR + N \\right)^{M}",
)

_PLACEHOLDER_RE = re.compile(r"\bVAR\b|\b[NMK]\b")
_SYMBOL_POOL = ("x", "y", "z", "u", "v", "w", "t")


def _instantiate_template(template: str, rng: random.Random) -> str:
    values: dict[str, str] = {}

    def sub(m: re.Match) -> str:
        name = m.group(0)
        if name not in values:
            if name == "VAR":
                values[name] = rng.choice(_SYMBOL_POOL)
            else:
                values[name] = str(rng.randint(2, 9))
        return values[name]

    return _PLACEHOLDER_RE.sub(sub, template)


def synth_formula(
    seed: int, corpus: tuple[str, ...] = DEFAULT_FORMULA_CORPUS
) -> SynthRecord:
    """Sample a template, fill its placeholders, sample augmentation params."""
    if not corpus:
        raise EmptyCorpusError("formula corpus is empty")
    rng = random.Random(seed)
    template = rng.choice(list(corpus))
    latex = _instantiate_template(template, rng)
    augment = AugmentParams(
        rotate_deg=rng.uniform(*ROTATE_RANGE),
        shear=rng.uniform(*SHEAR_RANGE),
        noise_sigma=rng.uniform(*SIGMA_RANGE),
    )
    spec = FormulaSpec(latex=latex, augment=augment, seed=seed)
    return SynthRecord(
        id=f"formula-{seed:016x}", spec=spec, gold=regenerate_gold(spec), qa=None
    )


def synth_receipt(seed: int, config: ReceiptConfig = ReceiptConfig()) -> SynthRecord:
    """Receipt gold with exact decimal arithmetic and a total-lookup question."""
    rng = random.Random(seed)
    n_items = rng.randint(*config.items_range)
    names = (
        rng.sample(_RECEIPT_ITEMS, n_items)
        if n_items <= len(_RECEIPT_ITEMS)
        else [f"Item {i + 1}" for i in range(n_items)]
    )
    cents = Decimal("0.01")
    items = tuple(
        ReceiptItem(
            name=name,
            qty=rng.randint(*config.qty_range),
            price=str((Decimal(rng.randint(*config.price_cents_range)) / 100).quantize(cents)),
        )
        for name in names
    )
    tax_rate = rng.choice(config.tax_rates)
    subtotal = sum((Decimal(i.price) * i.qty for i in items), Decimal("0")).quantize(cents)
    tax = (subtotal * Decimal(tax_rate)).quantize(cents)
    total = subtotal + tax
    date = f"{rng.randint(2018, 2025):04d}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
    spec = ReceiptSpec(
        store=rng.choice(_STORES),
        date=date,
        items=items,
        tax_rate=tax_rate,
        subtotal=str(subtotal),
        tax=str(tax),
        total=str(total),
        seed=seed,
    )
    qa = (
        ("What is the total?", spec.total),
        ("Which store issued this receipt?", spec.store),
    )
    return SynthRecord(
        id=f"receipt-{seed:016x}", spec=spec, gold=regenerate_gold(spec), qa=qa
    )


def synth_page(seed: int, config: PageConfig = PageConfig()) -> SynthRecord:
    """Synthetic webpage with nav/footer noise and a generator-held summary."""
    rng = random.Random(seed)
    title = rng.choice(_PAGE_TITLES)
    n_sections = rng.randint(*config.sections_range)
    headings = (
        rng.sample(_PAGE_HEADINGS, n_sections)
        if n_sections <= len(_PAGE_HEADINGS)
        else [f"Part {i + 1}" for i in range(n_sections)]
    )
    sections = []
    for heading in headings:
        n_paragraphs = rng.randint(*config.paragraphs_range)
        paragraphs = tuple(
            " ".join(rng.sample(_PAGE_SENTENCES, rng.randint(1, 3)))
            for _ in range(n_paragraphs)
        )
        sections.append(PageSection(heading=heading, paragraphs=paragraphs))
    nav_items = ()
    if rng.random() < config.nav_probability:
        nav_items = tuple(rng.sample(_NAV_ITEMS, rng.randint(2, 4)))
    footer = ""
    if rng.random() < config.footer_probability:
        footer = f"Published {rng.randint(2019, 2025)} - all rights reserved"
    gold_summary = "\n".join(
        [title] + [part for s in sections for part in (s.heading, *s.paragraphs)]
    )
    spec = PageSpec(
        title=title,
        sections=tuple(sections),
        nav_items=nav_items,
        footer=footer,
        gold_summary=gold_summary,
        seed=seed,
    )
    qa = (("What is the title of the page?", title),)
    return SynthRecord(
        id=f"page-{seed:016x}", spec=spec, gold=regenerate_gold(spec), qa=qa
    )


# ---------------------------------------------------------------------------
# prompt pools
# ---------------------------------------------------------------------------

PROMPT_POOLS: dict[str, tuple[str, ...]] = {
    "text_recognition": (
        "Kindly recognize the text from the image.",
        "How can I extract the text from the image?",
        "What text is in the image that can be extracted?",
    ),
    "text_grounding": (
        "Can you perform text extraction with grounding?",
        "Please detect the text with grounding from the image.",
        "Recognize the text with grounding from the image.",
    ),
    "markdown": (
        "Parse the image into a proper markup language format.",
        "How to convert text from the image to markdown format?",
        "How to extract text from the image and change it to markdown format?",
    ),
    "latex": (
        "Convert the image into a structured format.",
        "How to extract and translate text from the image to LaTeX format?",
        "How can I convert text from the image to LaTeX format efficiently?",
    ),
    "html": (
        "What is the HTML code corresponding to this image?",
        "Generate the HTML code.",
        "Parse the image into an appropriate markup language format.",
    ),
    "summary": (
        "What is the main idea of this webpage screenshot?",
        "What are the main information points of the webpage shown in the image?",
        "What is the key message conveyed by this webpage image?",
    ),
    "json": (
        "Extract text from the image in JSON format.",
        "Output the image text as JSON.",
        "Represent the image text in a structured format.",
    ),
    "tikz": (
        "I need to get the code for drawing this image.",
        "What is the TikZ code for this image?.",
        "Please show me the TikZ code for displaying this image.",
    ),
}

_TASK_BY_KIND = {
    MarkupKind.TXT: "text_recognition",
    MarkupKind.TXT_GD: "text_grounding",
    MarkupKind.MD: "markdown",
    MarkupKind.LATEX: "latex",
    MarkupKind.HTML: "html",
    MarkupKind.JSON: "json",
    MarkupKind.TIKZ: "tikz",
}


def sample_prompt(task: str | MarkupKind, seed: int) -> str:
    """Uniform seeded draw from the fixed per-task prompt pool."""
    key = _TASK_BY_KIND[task] if isinstance(task, MarkupKind) else task
    pool = PROMPT_POOLS.get(key)
    if pool is None:
        raise UnknownTaskError(f"no prompt pool for task {task!r}")
    return random.Random(seed).choice(pool)


# ---------------------------------------------------------------------------
# spec serialization (the schema consumed by the render component)
# ---------------------------------------------------------------------------


def spec_to_dict(spec: SpecType) -> dict:
    """Serializable spec with field names exactly as declared."""
    if isinstance(spec, ChartSpec):
        return {
            "category": "chart",
            "chart_type": spec.chart_type,
            "style": {
                "font_name": spec.style.font_name,
                "color_palette": [list(rgb) for rgb in spec.style.color_palette],
                "width_px": spec.style.width_px,
                "height_px": spec.style.height_px,
            },
            "meta": {
                "title": spec.meta.title,
                "source": spec.meta.source,
                "x_axis": list(spec.meta.x_axis),
                "y_axis": spec.meta.y_axis,
                "series": [
                    {"name": s.name, "values": list(s.values)} for s in spec.meta.series
                ],
            },
            "seed": spec.seed,
        }
    if isinstance(spec, TableSpec):
        return {
            "category": "table",
            "cells": [list(row) for row in spec.cells],
            "seed": spec.seed,
        }
    if isinstance(spec, FormulaSpec):
        return {
            "category": "formula",
            "latex": spec.latex,
            "augment": {
                "rotate_deg": spec.augment.rotate_deg,
                "shear": spec.augment.shear,
                "noise_sigma": spec.augment.noise_sigma,
            },
            "seed": spec.seed,
        }
    if isinstance(spec, ReceiptSpec):
        return {
            "category": "receipt",
            "store": spec.store,
            "date": spec.date,
            "items": [
                {"name": i.name, "qty": i.qty, "price": i.price} for i in spec.items
            ],
            "tax_rate": spec.tax_rate,
            "subtotal": spec.subtotal,
            "tax": spec.tax,
            "total": spec.total,
            "seed": spec.seed,
        }
    if isinstance(spec, PageSpec):
        return {
            "category": "page",
            "title": spec.title,
            "sections": [
                {"heading": s.heading, "paragraphs": list(s.paragraphs)}
                for s in spec.sections
            ],
            "nav_items": list(spec.nav_items),
            "footer": spec.footer,
            "gold_summary": spec.gold_summary,
            "seed": spec.seed,
        }
    raise TypeError(f"unknown spec type {type(spec).__name__}")


SYNTHESIZERS = {
    "chart": synth_chart,
    "table": synth_table,
    "formula": synth_formula,
    "receipt": synth_receipt,
    "page": synth_page,
}
