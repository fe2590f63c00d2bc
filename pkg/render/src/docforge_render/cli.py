"""Render CLI: chart | formula | augment | similarity.

Success writes a status JSON to stdout (and to --status when given); any
error exits nonzero with a machine-readable reason on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .augment import augment_image
from .charts import render_chart, render_formula
from .errors import RenderError
from .schema import load_spec_file, validate_chart_spec, validate_formula_spec
from .similarity import image_similarity


def _write_status(status: dict, path: Path | None) -> None:
    text = json.dumps(status, ensure_ascii=False)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
    print(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docforge-render",
        description="Render chart/formula specs, augment images, score similarity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_chart = sub.add_parser("chart", help="render a chart spec to an image")
    p_chart.add_argument("--spec", required=True, type=Path)
    p_chart.add_argument("--out", required=True, type=Path)
    p_chart.add_argument("--dpi", type=int, default=100)
    p_chart.add_argument("--status", type=Path, default=None)

    p_formula = sub.add_parser("formula", help="typeset a formula spec to an image")
    p_formula.add_argument("--spec", required=True, type=Path)
    p_formula.add_argument("--out", required=True, type=Path)
    p_formula.add_argument("--dpi", type=int, default=100)
    p_formula.add_argument("--status", type=Path, default=None)

    p_aug = sub.add_parser("augment", help="affine transform plus Gaussian noise")
    p_aug.add_argument("--in", dest="in_path", required=True, type=Path)
    p_aug.add_argument("--out", required=True, type=Path)
    p_aug.add_argument("--rotate-deg", type=float, default=0.0)
    p_aug.add_argument("--shear", type=float, default=0.0)
    p_aug.add_argument("--noise-sigma", type=float, default=0.0)
    p_aug.add_argument("--seed", type=int, default=0)
    p_aug.add_argument("--status", type=Path, default=None)

    p_sim = sub.add_parser("similarity", help="normalized cross-correlation score")
    p_sim.add_argument("--a", required=True, type=Path)
    p_sim.add_argument("--b", required=True, type=Path)
    p_sim.add_argument("--status", type=Path, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "chart":
            spec = validate_chart_spec(load_spec_file(args.spec))
            out = render_chart(spec, args.out, dpi=args.dpi)
            _write_status(
                {
                    "ok": True,
                    "command": "chart",
                    "out": str(out),
                    "width_px": spec["style"]["width_px"],
                    "height_px": spec["style"]["height_px"],
                },
                args.status,
            )
        elif args.command == "formula":
            spec = validate_formula_spec(load_spec_file(args.spec))
            out = render_formula(spec, args.out, dpi=args.dpi)
            _write_status(
                {"ok": True, "command": "formula", "out": str(out)}, args.status
            )
        elif args.command == "augment":
            out = augment_image(
                args.in_path, args.out,
                rotate_deg=args.rotate_deg, shear=args.shear,
                noise_sigma=args.noise_sigma, seed=args.seed,
            )
            _write_status(
                {"ok": True, "command": "augment", "out": str(out)}, args.status
            )
        else:
            score = image_similarity(args.a, args.b)
            _write_status(
                {"ok": True, "command": "similarity", "similarity": score},
                args.status,
            )
    except RenderError as exc:
        print(
            json.dumps(
                {"ok": False, "error": type(exc).__name__, "reason": str(exc)},
                ensure_ascii=False,
            ),
            file=sys.stderr,
        )
        return 1
    except OSError as exc:
        print(
            json.dumps({"ok": False, "error": "IoError", "reason": str(exc)}),
            file=sys.stderr,
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
