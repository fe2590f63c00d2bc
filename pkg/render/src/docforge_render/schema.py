"""Loading and validation of the spec JSON contract.

The schema is the data boundary with the dataset builder: chart specs carry
``chart_type``, ``style``, ``meta``, ``seed``; formula specs carry ``latex``,
``augment``, ``seed``. Field names mirror the builder's declared types.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import SpecSchemaError, UnsupportedChartTypeError

CHART_TYPES = ("bar", "scatter", "line", "dot")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SpecSchemaError(message)


def load_spec_file(path: str | Path) -> dict:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecSchemaError(f"cannot read spec {path}: {exc}") from exc
    try:
        obj = json.loads(raw)
    except ValueError as exc:
        raise SpecSchemaError(f"spec {path} is not valid JSON: {exc}") from exc
    _require(isinstance(obj, dict), "spec root must be an object")
    return obj


def validate_chart_spec(spec: dict) -> dict:
    for key in ("chart_type", "style", "meta", "seed"):
        _require(key in spec, f"chart spec missing {key!r}")
    if spec["chart_type"] not in CHART_TYPES:
        raise UnsupportedChartTypeError(
            f"chart_type {spec['chart_type']!r} not in {CHART_TYPES}"
        )
    style = spec["style"]
    _require(isinstance(style, dict), "style must be an object")
    for key in ("font_name", "color_palette", "width_px", "height_px"):
        _require(key in style, f"style missing {key!r}")
    _require(
        isinstance(style["width_px"], int) and style["width_px"] > 0,
        "width_px must be a positive integer",
    )
    _require(
        isinstance(style["height_px"], int) and style["height_px"] > 0,
        "height_px must be a positive integer",
    )
    palette = style["color_palette"]
    _require(isinstance(palette, list) and palette, "color_palette must be non-empty")
    for rgb in palette:
        _require(
            isinstance(rgb, list) and len(rgb) == 3
            and all(isinstance(c, int) and 0 <= c <= 255 for c in rgb),
            f"bad RGB triple {rgb!r}",
        )
    meta = spec["meta"]
    _require(isinstance(meta, dict), "meta must be an object")
    for key in ("title", "source", "x_axis", "y_axis", "series"):
        _require(key in meta, f"meta missing {key!r}")
    x_axis = meta["x_axis"]
    _require(
        isinstance(x_axis, list) and all(isinstance(l, str) for l in x_axis),
        "x_axis must be a list of strings",
    )
    series = meta["series"]
    _require(isinstance(series, list) and series, "series must be non-empty")
    for entry in series:
        _require(
            isinstance(entry, dict) and "name" in entry and "values" in entry,
            "each series needs name and values",
        )
        values = entry["values"]
        _require(
            isinstance(values, list) and len(values) == len(x_axis),
            f"series {entry.get('name')!r} values must align with x_axis",
        )
        for v in values:
            _require(isinstance(v, (int, float)) and not isinstance(v, bool),
                     f"non-numeric value {v!r}")
    _require(len(palette) >= len(series), "palette must cover every series")
    return spec


def validate_formula_spec(spec: dict) -> dict:
    for key in ("latex", "augment", "seed"):
        _require(key in spec, f"formula spec missing {key!r}")
    _require(
        isinstance(spec["latex"], str) and spec["latex"].strip(),
        "latex must be a non-empty string",
    )
    augment = spec["augment"]
    _require(isinstance(augment, dict), "augment must be an object")
    for key in ("rotate_deg", "shear", "noise_sigma"):
        _require(key in augment, f"augment missing {key!r}")
        _require(
            isinstance(augment[key], (int, float)) and not isinstance(augment[key], bool),
            f"augment {key} must be a number",
        )
    return spec
