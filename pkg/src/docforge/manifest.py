"""The manifest: one human-editable JSON document driving every build.

All randomness flows from ``master_seed``; per-record seeds are derived, so
rerunning a manifest reproduces the dataset byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidConfigError, IoError
from .metrics import ApConfig
from .synth import (
    DEFAULT_FORMULA_CORPUS,
    ChartConfig,
    PageConfig,
    ReceiptConfig,
    TableConfig,
)

CATEGORIES = ("chart", "table", "formula", "receipt", "page")


def _pair(raw, name: str) -> tuple:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise InvalidConfigError(f"{name} must be a two-element range")
    return tuple(raw)


@dataclass
class Manifest:
    master_seed: int = 0
    counts: dict[str, int] = field(
        default_factory=lambda: {c: 0 for c in CATEGORIES}
    )
    chart: ChartConfig = field(default_factory=ChartConfig)
    table: TableConfig = field(default_factory=TableConfig)
    receipt: ReceiptConfig = field(default_factory=ReceiptConfig)
    page: PageConfig = field(default_factory=PageConfig)
    formula_corpus: tuple[str, ...] = DEFAULT_FORMULA_CORPUS
    ap: ApConfig = field(default_factory=ApConfig)
    annotator: str = "stub"
    cache_dir: str | None = None
    max_context_chars: int = 4096
    compiler_cmd: str | None = None
    compile_timeout_s: float = 20.0
    out_dir: str = "out"

    def __post_init__(self) -> None:
        for category in CATEGORIES:
            self.counts.setdefault(category, 0)
        unknown = set(self.counts) - set(CATEGORIES)
        if unknown:
            raise InvalidConfigError(f"unknown record categories: {sorted(unknown)}")
        for category, count in self.counts.items():
            if count < 0:
                raise InvalidConfigError(f"count for {category} must be non-negative")
        if self.annotator not in ("stub", "http"):
            raise InvalidConfigError("annotator must be 'stub' or 'http'")

    @classmethod
    def from_dict(cls, raw: dict) -> "Manifest":
        kwargs: dict = {}
        if "master_seed" in raw:
            kwargs["master_seed"] = int(raw["master_seed"])
        if "counts" in raw:
            kwargs["counts"] = {k: int(v) for k, v in raw["counts"].items()}
        if "chart" in raw:
            c = raw["chart"]
            kwargs["chart"] = ChartConfig(
                series_range=_pair(c.get("series_range", (2, 5)), "series_range"),
                category_range=_pair(c.get("category_range", (3, 8)), "category_range"),
                value_range=_pair(c.get("value_range", (0.0, 1000.0)), "value_range"),
                chart_types=tuple(c.get("chart_types", ("bar", "scatter", "line", "dot"))),
            )
        if "table" in raw:
            t = raw["table"]
            kwargs["table"] = TableConfig(
                rows_range=_pair(t.get("rows_range", (2, 6)), "rows_range"),
                cols_range=_pair(t.get("cols_range", (2, 5)), "cols_range"),
            )
        if "receipt" in raw:
            r = raw["receipt"]
            kwargs["receipt"] = ReceiptConfig(
                items_range=_pair(r.get("items_range", (1, 6)), "items_range"),
                qty_range=_pair(r.get("qty_range", (1, 5)), "qty_range"),
                price_cents_range=_pair(
                    r.get("price_cents_range", (50, 2500)), "price_cents_range"
                ),
                tax_rates=tuple(r.get("tax_rates", ("0", "0.05", "0.07", "0.1"))),
            )
        if "page" in raw:
            p = raw["page"]
            kwargs["page"] = PageConfig(
                sections_range=_pair(p.get("sections_range", (1, 5)), "sections_range"),
                paragraphs_range=_pair(
                    p.get("paragraphs_range", (1, 3)), "paragraphs_range"
                ),
                nav_probability=float(p.get("nav_probability", 0.5)),
                footer_probability=float(p.get("footer_probability", 0.5)),
            )
        if "formula_corpus" in raw:
            kwargs["formula_corpus"] = tuple(raw["formula_corpus"])
        if "ap" in raw:
            a = raw["ap"]
            try:
                kwargs["ap"] = ApConfig(
                    tol_strict=float(a.get("tol_strict", 0.0)),
                    tol_slight=float(a.get("tol_slight", 0.05)),
                    tol_high=float(a.get("tol_high", 0.10)),
                )
            except ValueError as exc:
                raise InvalidConfigError(str(exc)) from exc
        for key in ("annotator", "cache_dir", "compiler_cmd", "out_dir"):
            if key in raw:
                kwargs[key] = raw[key]
        if "max_context_chars" in raw:
            kwargs["max_context_chars"] = int(raw["max_context_chars"])
        if "compile_timeout_s" in raw:
            kwargs["compile_timeout_s"] = float(raw["compile_timeout_s"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "Manifest":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise IoError(f"failed to read manifest {path}: {exc}") from exc
        except ValueError as exc:
            raise InvalidConfigError(f"manifest is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise InvalidConfigError("manifest root must be a JSON object")
        return cls.from_dict(raw)
