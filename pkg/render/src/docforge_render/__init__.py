"""docforge-render: rasterize chart/formula specs, augment, and compare images."""

from .augment import augment_image
from .charts import render_chart, render_formula
from .similarity import image_similarity

__all__ = ["augment_image", "render_chart", "render_formula", "image_similarity"]

__version__ = "0.1.0"
