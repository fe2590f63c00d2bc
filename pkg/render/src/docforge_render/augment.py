"""Affine and noise augmentation of rendered images.

Identity parameters are a byte-level copy; everything else is deterministic
in the seed.
"""

from __future__ import annotations

import math
import shutil
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ParamOutOfRangeError, UnreadableImageError

ROTATE_RANGE = (-5.0, 5.0)
SHEAR_RANGE = (-0.1, 0.1)


def _check_params(rotate_deg: float, shear: float, noise_sigma: float) -> None:
    if not ROTATE_RANGE[0] <= rotate_deg <= ROTATE_RANGE[1]:
        raise ParamOutOfRangeError(f"rotate_deg {rotate_deg} outside {ROTATE_RANGE}")
    if not SHEAR_RANGE[0] <= shear <= SHEAR_RANGE[1]:
        raise ParamOutOfRangeError(f"shear {shear} outside {SHEAR_RANGE}")
    if noise_sigma < 0:
        raise ParamOutOfRangeError("noise_sigma must be non-negative")


def load_image(path: str | Path) -> Image.Image:
    try:
        with Image.open(path) as img:
            return img.convert("RGB")
    except (OSError, ValueError) as exc:
        raise UnreadableImageError(f"cannot read image {path}: {exc}") from exc


def augment_image(
    in_path: str | Path,
    out_path: str | Path,
    rotate_deg: float = 0.0,
    shear: float = 0.0,
    noise_sigma: float = 0.0,
    seed: int = 0,
) -> Path:
    """Affine map (rotation then shear) followed by additive Gaussian noise."""
    _check_params(rotate_deg, shear, noise_sigma)
    if rotate_deg == 0.0 and shear == 0.0 and noise_sigma == 0.0:
        shutil.copyfile(in_path, out_path)  # identity is a pixel-level no-op
        return Path(out_path)

    img = load_image(in_path)
    if rotate_deg != 0.0 or shear != 0.0:
        theta = math.radians(rotate_deg)
        cos_t, sin_t = math.cos(theta), math.sin(theta)
        # Forward map = rotation @ x-shear; PIL wants the inverse map.
        forward = np.array(
            [[cos_t, -sin_t], [sin_t, cos_t]]
        ) @ np.array([[1.0, shear], [0.0, 1.0]])
        inverse = np.linalg.inv(forward)
        cx, cy = img.width / 2, img.height / 2
        a, b = inverse[0]
        d, e = inverse[1]
        coeffs = (
            a, b, cx - a * cx - b * cy,
            d, e, cy - d * cx - e * cy,
        )
        img = img.transform(
            img.size, Image.AFFINE, coeffs,
            resample=Image.BILINEAR, fillcolor=(255, 255, 255),
        )
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        arr = np.asarray(img, dtype=np.float64)
        arr = np.clip(arr + rng.normal(0.0, noise_sigma, arr.shape), 0, 255)
        img = Image.fromarray(arr.astype(np.uint8))
    img.save(out_path)
    return Path(out_path)
