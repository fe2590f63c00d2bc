"""Render component: schema, charts, formulas, augmentation, similarity, CLI."""

import json
import random

import numpy as np
import pytest
from PIL import Image

from docforge_render.augment import augment_image
from docforge_render.charts import render_chart, render_formula
from docforge_render.cli import main
from docforge_render.errors import (
    ParamOutOfRangeError,
    SpecSchemaError,
    TypesetError,
    UnreadableImageError,
    UnsupportedChartTypeError,
)
from docforge_render.schema import validate_chart_spec, validate_formula_spec
from docforge_render.similarity import image_similarity


def make_chart_spec(rng: random.Random, chart_type: str,
                    width=320, height=240) -> dict:
    n_series = rng.randint(1, 3)
    n_cats = rng.randint(2, 6)
    return {
        "category": "chart",
        "chart_type": chart_type,
        "style": {
            "font_name": "DejaVu Sans",
            "color_palette": [
                [rng.randrange(256), rng.randrange(256), rng.randrange(256)]
                for _ in range(n_series)
            ],
            "width_px": width,
            "height_px": height,
        },
        "meta": {
            "title": f"Chart {rng.randrange(100)}",
            "source": "Survey",
            "x_axis": [f"c{i}" for i in range(n_cats)],
            "y_axis": "Value",
            "series": [
                {
                    "name": f"s{j}",
                    "values": [round(rng.uniform(1, 100), 1) for _ in range(n_cats)],
                }
                for j in range(n_series)
            ],
        },
        "seed": rng.randrange(2**32),
    }


def make_formula_spec(latex="x^{2} + 1", rotate=0.0, shear=0.0, sigma=0.0) -> dict:
    return {
        "category": "formula",
        "latex": latex,
        "augment": {"rotate_deg": rotate, "shear": shear, "noise_sigma": sigma},
        "seed": 7,
    }


def pixels(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


class TestSchema:
    def test_valid_chart_spec(self):
        spec = make_chart_spec(random.Random(0), "bar")
        assert validate_chart_spec(spec) is spec

    def test_unknown_chart_type(self):
        spec = make_chart_spec(random.Random(0), "bar")
        spec["chart_type"] = "pie"
        with pytest.raises(UnsupportedChartTypeError):
            validate_chart_spec(spec)

    def test_missing_keys(self):
        with pytest.raises(SpecSchemaError):
            validate_chart_spec({"chart_type": "bar"})

    def test_ragged_series(self):
        spec = make_chart_spec(random.Random(0), "bar")
        spec["meta"]["series"][0]["values"] = [1.0]
        spec["meta"]["x_axis"] = ["a", "b"]
        with pytest.raises(SpecSchemaError):
            validate_chart_spec(spec)

    def test_formula_spec(self):
        assert validate_formula_spec(make_formula_spec())
        with pytest.raises(SpecSchemaError):
            validate_formula_spec({"latex": ""})


class TestChartRendering:
    def test_declared_dimensions(self, tmp_path):
        spec = make_chart_spec(random.Random(1), "bar", width=640, height=480)
        out = render_chart(spec, tmp_path / "c.png")
        with Image.open(out) as img:
            assert img.size == (640, 480)

    def test_deterministic(self, tmp_path):
        spec = make_chart_spec(random.Random(2), "line")
        a = render_chart(spec, tmp_path / "a.png")
        b = render_chart(spec, tmp_path / "b.png")
        assert np.array_equal(pixels(a), pixels(b))

    @pytest.mark.parametrize("chart_type", ["bar", "scatter", "line", "dot"])
    def test_each_type_renders(self, tmp_path, chart_type):
        spec = make_chart_spec(random.Random(3), chart_type)
        out = render_chart(spec, tmp_path / f"{chart_type}.png")
        arr = pixels(out)
        assert arr.size > 0
        assert arr.min() < 250  # something was actually drawn


class TestFormulaRendering:
    def test_renders(self, tmp_path):
        out = render_formula(make_formula_spec(), tmp_path / "f.png")
        assert pixels(out).min() < 250

    def test_deterministic(self, tmp_path):
        spec = make_formula_spec("\\frac{a}{b} + \\sqrt{x}")
        a = render_formula(spec, tmp_path / "a.png")
        b = render_formula(spec, tmp_path / "b.png")
        assert np.array_equal(pixels(a), pixels(b))

    def test_typeset_error(self, tmp_path):
        with pytest.raises(TypesetError):
            render_formula(make_formula_spec("\\notacommand{x}"), tmp_path / "f.png")


@pytest.fixture
def base_image(tmp_path):
    rng = np.random.default_rng(11)
    arr = rng.integers(0, 256, size=(120, 160, 3), dtype=np.uint8)
    path = tmp_path / "base.png"
    Image.fromarray(arr).save(path)
    return path


class TestAugment:
    def test_identity_is_noop(self, tmp_path, base_image):
        out = augment_image(base_image, tmp_path / "id.png", 0.0, 0.0, 0.0, seed=5)
        assert out.read_bytes() == base_image.read_bytes()

    def test_seed_determinism(self, tmp_path, base_image):
        a = augment_image(base_image, tmp_path / "a.png", 2.0, 0.05, 4.0, seed=9)
        b = augment_image(base_image, tmp_path / "b.png", 2.0, 0.05, 4.0, seed=9)
        assert np.array_equal(pixels(a), pixels(b))
        c = augment_image(base_image, tmp_path / "c.png", 2.0, 0.05, 4.0, seed=10)
        assert not np.array_equal(pixels(a), pixels(c))

    def test_sigma_shifts_variance_not_mean(self, tmp_path):
        flat = tmp_path / "flat.png"
        Image.fromarray(np.full((128, 128, 3), 128, dtype=np.uint8)).save(flat)
        out = augment_image(flat, tmp_path / "noisy.png", 0.0, 0.0, 10.0, seed=3)
        arr = pixels(out).astype(np.float64)
        assert abs(arr.mean() - 128.0) < 1.0
        assert arr.var() > 25.0

    def test_param_ranges(self, tmp_path, base_image):
        with pytest.raises(ParamOutOfRangeError):
            augment_image(base_image, tmp_path / "x.png", 10.0, 0.0, 0.0)
        with pytest.raises(ParamOutOfRangeError):
            augment_image(base_image, tmp_path / "x.png", 0.0, 0.5, 0.0)
        with pytest.raises(ParamOutOfRangeError):
            augment_image(base_image, tmp_path / "x.png", 0.0, 0.0, -1.0)


class TestSimilarity:
    def test_self_similarity_is_exactly_one(self, tmp_path, base_image):
        assert image_similarity(base_image, base_image) == 1.0

    def test_inverse_is_exactly_zero(self, tmp_path):
        rng = np.random.default_rng(4)
        arr = rng.integers(0, 256, size=(256, 256), dtype=np.uint8)
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        Image.fromarray(arr, mode="L").save(a)
        Image.fromarray(255 - arr, mode="L").save(b)
        assert image_similarity(a, b) == 0.0

    def test_symmetric(self, tmp_path, base_image):
        other = tmp_path / "other.png"
        rng = np.random.default_rng(6)
        Image.fromarray(
            rng.integers(0, 256, size=(90, 90, 3), dtype=np.uint8)
        ).save(other)
        assert image_similarity(base_image, other) == pytest.approx(
            image_similarity(other, base_image)
        )

    def test_small_augmentation_stays_close(self, tmp_path):
        spec = make_chart_spec(random.Random(8), "bar")
        original = render_chart(spec, tmp_path / "orig.png")
        warped = augment_image(
            original, tmp_path / "warped.png", rotate_deg=1.0, shear=0.02,
            noise_sigma=2.0, seed=1,
        )
        assert image_similarity(original, warped) > 0.9

    def test_unreadable(self, tmp_path):
        bad = tmp_path / "bad.png"
        bad.write_text("not an image")
        with pytest.raises(UnreadableImageError):
            image_similarity(bad, bad)


class TestCli:
    def test_chart_end_to_end(self, tmp_path, capsys):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(make_chart_spec(random.Random(10), "dot")))
        status_path = tmp_path / "status.json"
        code = main([
            "chart", "--spec", str(spec_path), "--out", str(tmp_path / "c.png"),
            "--status", str(status_path),
        ])
        assert code == 0
        status = json.loads(capsys.readouterr().out)
        assert status["ok"] is True and status["width_px"] == 320
        assert json.loads(status_path.read_text()) == status
        assert (tmp_path / "c.png").exists()

    def test_formula_end_to_end(self, tmp_path, capsys):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(make_formula_spec()))
        assert main([
            "formula", "--spec", str(spec_path), "--out", str(tmp_path / "f.png"),
        ]) == 0
        assert json.loads(capsys.readouterr().out)["ok"] is True

    def test_augment_and_similarity_commands(self, tmp_path, base_image, capsys):
        out = tmp_path / "aug.png"
        assert main([
            "augment", "--in", str(base_image), "--out", str(out),
            "--rotate-deg", "1.5", "--seed", "2",
        ]) == 0
        capsys.readouterr()
        assert main(["similarity", "--a", str(base_image), "--b", str(out)]) == 0
        status = json.loads(capsys.readouterr().out)
        assert 0.0 <= status["similarity"] <= 1.0

    def test_bad_spec_exits_nonzero(self, tmp_path, capsys):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps({"chart_type": "pie"}))
        code = main(["chart", "--spec", str(spec_path), "--out", str(tmp_path / "x.png")])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["ok"] is False and err["error"] in (
            "SpecSchemaError", "UnsupportedChartTypeError",
        )

    def test_typeset_failure_reports_reason(self, tmp_path, capsys):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(make_formula_spec("\\nope{x}")))
        code = main([
            "formula", "--spec", str(spec_path), "--out", str(tmp_path / "f.png"),
        ])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "TypesetError"
