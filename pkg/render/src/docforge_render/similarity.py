"""Grayscale normalized cross-correlation mapped to [0, 1]."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .augment import load_image

COMPARE_SIZE = 256


def _gray_array(img: Image.Image, size: int) -> np.ndarray:
    gray = img.convert("L")
    if gray.size != (size, size):
        gray = gray.resize((size, size), Image.BILINEAR)
    return np.asarray(gray, dtype=np.float64)


def image_similarity(a_path: str | Path, b_path: str | Path,
                     size: int = COMPARE_SIZE) -> float:
    """(ncc + 1) / 2 over grayscale pixels at a common resolution.

    Identical images score exactly 1.0; a perfectly anti-correlated pair
    (an image and its inverse) scores exactly 0.0. Zero-variance inputs have
    undefined correlation and are treated as ncc = 0 unless the arrays are
    identical.
    """
    a = _gray_array(load_image(a_path), size)
    b = _gray_array(load_image(b_path), size)
    if np.array_equal(a, b):
        return 1.0
    da = a - a.mean()
    db = b - b.mean()
    den = np.sqrt((da * da).sum() * (db * db).sum())
    if den == 0.0:
        return 0.5
    ncc = float((da * db).sum() / den)
    return min(1.0, max(0.0, (ncc + 1.0) / 2.0))
