"""Chart and formula rendering with matplotlib's Agg backend.

Rendering is a pure function of (spec, dpi): no wall-clock, no global RNG,
so identical jobs produce pixel-identical rasters.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .errors import TypesetError  # noqa: E402
from .schema import validate_chart_spec, validate_formula_spec  # noqa: E402

_SCATTER_MARKERS = ("o", "s", "^", "D", "v", "P", "X", "*")


def render_chart(spec: dict, out_path: str | Path, dpi: int = 100) -> Path:
    """Render a validated chart spec to a raster of its declared size."""
    spec = validate_chart_spec(spec)
    style = spec["style"]
    meta = spec["meta"]
    colors = [tuple(c / 255 for c in rgb) for rgb in style["color_palette"]]
    positions = range(len(meta["x_axis"]))
    n_series = len(meta["series"])

    with plt.rc_context({"font.family": style["font_name"], "svg.hashsalt": "0"}):
        fig, ax = plt.subplots(
            figsize=(style["width_px"] / dpi, style["height_px"] / dpi), dpi=dpi
        )
        try:
            for idx, series in enumerate(meta["series"]):
                color = colors[idx]
                name = series["name"]
                values = series["values"]
                chart_type = spec["chart_type"]
                if chart_type == "bar":
                    width = 0.8 / n_series
                    offsets = [p - 0.4 + width * (idx + 0.5) for p in positions]
                    ax.bar(offsets, values, width=width, color=color, label=name)
                elif chart_type == "line":
                    ax.plot(positions, values, marker="o", color=color, label=name)
                elif chart_type == "scatter":
                    marker = _SCATTER_MARKERS[idx % len(_SCATTER_MARKERS)]
                    ax.scatter(positions, values, color=color, marker=marker, label=name)
                else:  # dot
                    ax.plot(
                        positions, values, linestyle="", marker="o",
                        markersize=6, color=color, label=name,
                    )
            ax.set_xticks(list(positions))
            rotation = 30 if any(len(l) > 6 for l in meta["x_axis"]) else 0
            ax.set_xticklabels(meta["x_axis"], rotation=rotation, ha="right" if rotation else "center")
            if meta["title"]:
                ax.set_title(meta["title"])
            if meta["y_axis"]:
                ax.set_ylabel(meta["y_axis"])
            if meta["source"]:
                fig.text(0.01, 0.01, meta["source"], fontsize=7, alpha=0.8)
            if n_series > 1:
                ax.legend(fontsize=8)
            fig.savefig(out_path, dpi=dpi)
        finally:
            plt.close(fig)
    return Path(out_path)


def render_formula(
    spec: dict,
    out_path: str | Path,
    dpi: int = 100,
    width_px: int = 640,
    height_px: int = 200,
) -> Path:
    """Typeset the expression with mathtext; TypesetError when it cannot.

    Failures are reported back so the dataset pipeline can filter the record,
    mirroring the exclusion of uncompilable formulas.
    """
    spec = validate_formula_spec(spec)
    fig = plt.figure(figsize=(width_px / dpi, height_px / dpi), dpi=dpi)
    try:
        fig.text(0.5, 0.5, f"${spec['latex']}$", ha="center", va="center", fontsize=22)
        try:
            fig.canvas.draw()
            fig.savefig(out_path, dpi=dpi)
        except (ValueError, RuntimeError) as exc:
            raise TypesetError(f"cannot typeset {spec['latex']!r}: {exc}") from exc
    finally:
        plt.close(fig)
    return Path(out_path)
