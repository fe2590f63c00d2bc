"""Render acceptance: determinism, identity no-op, similarity poles, sweep."""

import random

import numpy as np
from PIL import Image

from docforge_render.augment import augment_image
from docforge_render.charts import render_chart
from docforge_render.similarity import image_similarity
from test_render import make_chart_spec, pixels

PASS = "ACCEPTANCE PASS:"


def test_render_determinism_and_identity(tmp_path):
    spec = make_chart_spec(random.Random(100), "bar")
    a = render_chart(spec, tmp_path / "a.png")
    b = render_chart(spec, tmp_path / "b.png")
    assert np.array_equal(pixels(a), pixels(b)), "identical jobs must be pixel-identical"

    identity = augment_image(a, tmp_path / "id.png", 0.0, 0.0, 0.0, seed=1)
    assert np.array_equal(pixels(a), pixels(identity)), "identity augment must be a no-op"
    print(f"{PASS} deterministic rendering and identity augmentation")


def test_similarity_poles(tmp_path):
    rng = np.random.default_rng(9)
    arr = rng.integers(0, 256, size=(256, 256), dtype=np.uint8)
    x = tmp_path / "x.png"
    inv = tmp_path / "inv.png"
    Image.fromarray(arr, mode="L").save(x)
    Image.fromarray(255 - arr, mode="L").save(inv)
    assert image_similarity(x, x) == 1.0
    assert image_similarity(x, inv) == 0.0
    print(f"{PASS} similarity(x, x) = 1.0 and inverse = 0.0")


def test_hundred_spec_sweep(tmp_path):
    rng = random.Random(2024)
    failures = []
    count = 0
    for chart_type in ("bar", "scatter", "line", "dot"):
        for i in range(25):
            spec = make_chart_spec(rng, chart_type)
            try:
                out = render_chart(spec, tmp_path / f"{chart_type}-{i}.png")
                with Image.open(out) as img:
                    assert img.size == (
                        spec["style"]["width_px"], spec["style"]["height_px"]
                    )
            except Exception as exc:  # count, do not abort the sweep
                failures.append((chart_type, i, exc))
            count += 1
    assert count == 100
    assert failures == [], f"sweep failures: {failures}"
    print(f"{PASS} 100-spec sweep across all four chart types, zero failures")
