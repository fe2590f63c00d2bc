"""Independent oracles used by the tests.

These are deliberately separate implementations from the package code paths
they check: a recursive memoized edit distance, frozen template grammars,
and decimal recomputation helpers.
"""

from __future__ import annotations

import re
from decimal import Decimal
from functools import lru_cache

# Frozen two-round template grammar, written here independently of the
# builder's constants.
ROUND1_RE = re.compile(
    r"\ATo answer the question: (?P<q>.+), extract the relevant context from the image\.\Z",
    re.DOTALL,
)
ROUND2_RE = re.compile(
    r"\ABased on the image and extracted context, answer the question: (?P<q>.+)\Z",
    re.DOTALL,
)
FRAME_RE = re.compile(
    r"\A<(txt|txt_gd|md|latex|html|json|tikz)>(?P<body>.*)</\1>\Z", re.DOTALL
)


def brute_edit_distance(a, b) -> int:
    """Recursive memoized Levenshtein over sequences (independent oracle)."""
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        if a[i] == b[j]:
            return go(i + 1, j + 1)
        return 1 + min(go(i + 1, j), go(i, j + 1), go(i + 1, j + 1))

    return go(0, 0)


def recompute_receipt(obj: dict) -> tuple[str, str, str]:
    """Re-derive subtotal/total from a receipt JSON object with Decimal."""
    cents = Decimal("0.01")
    subtotal = sum(
        (Decimal(item["price"]) * item["qty"] for item in obj["items"]),
        Decimal("0"),
    ).quantize(cents)
    tax = Decimal(obj["tax"])
    total = (subtotal + tax).quantize(cents)
    return str(subtotal), str(tax), str(total)


def chart_cells(meta_obj: dict) -> dict:
    """Cell map {(series, category): value} from a parsed chart JSON object."""
    cells = {}
    for name, values in meta_obj["value"].items():
        for category, value in zip(meta_obj["x-axis"], values):
            cells[(name, category)] = value
    return cells
