"""Optional end-to-end check against the dataset builder's spec files.

Runs only when the builder package is installed; the render component itself
never imports it — the boundary stays a file contract.
"""

import json

import pytest
from PIL import Image

from docforge_render.charts import render_chart, render_formula
from docforge_render.cli import main

docforge_cli = pytest.importorskip("docforge.cli")


@pytest.fixture
def dataset(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({
        "master_seed": 3,
        "counts": {"chart": 4, "formula": 2},
        "out_dir": str(tmp_path / "out"),
    }))
    assert docforge_cli.main(["synth", "--manifest", str(manifest)]) == 0
    return tmp_path / "out"


def test_builder_chart_specs_render(dataset, tmp_path):
    spec_files = sorted((dataset / "specs").glob("chart-*.json"))
    assert spec_files
    for spec_file in spec_files:
        spec = json.loads(spec_file.read_text())
        out = render_chart(spec, tmp_path / f"{spec_file.stem}.png")
        with Image.open(out) as img:
            assert img.size == (spec["style"]["width_px"], spec["style"]["height_px"])


def test_builder_formula_specs_render(dataset, tmp_path):
    spec_files = sorted((dataset / "specs").glob("formula-*.json"))
    assert spec_files
    for spec_file in spec_files:
        spec = json.loads(spec_file.read_text())
        render_formula(spec, tmp_path / f"{spec_file.stem}.png")


def test_cli_on_builder_spec(dataset, tmp_path, capsys):
    spec_file = sorted((dataset / "specs").glob("chart-*.json"))[0]
    out = tmp_path / "cli.png"
    assert main(["chart", "--spec", str(spec_file), "--out", str(out)]) == 0
    status = json.loads(capsys.readouterr().out)
    assert status["ok"] is True
    assert out.exists()
