"""Scoring predicted markup and answers against gold.

Gold-side inputs must always parse (GoldUnparseableError otherwise);
prediction-side parse failures score zero instead of erroring so a weak
model never aborts an evaluation run.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .convert import json_to_chart_meta, normalize_key, normalize_number
from .errors import (
    GoldUnparseableError,
    LengthMismatchError,
    NotJsonError,
    SchemaMismatchError,
    TileOutOfRangeError,
)
from .markup import MarkupKind
from .cot import ConversationRecord
import json as _json

MAX_IMAGE_TILES = 12
DEFAULT_TOKENS_PER_TILE = 256


# ---------------------------------------------------------------------------
# edit distance
# ---------------------------------------------------------------------------


def _levenshtein(a: Sequence, b: Sequence) -> int:
    """Classic two-row DP over any pair of sequences."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, item_a in enumerate(a, start=1):
        current = [i]
        for j, item_b in enumerate(b, start=1):
            cost = 0 if item_a == item_b else 1
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost)
            )
        previous = current
    return previous[-1]


def _normalize_for_edit(s: str) -> str:
    return " ".join(unicodedata.normalize("NFC", s).split())


def normalized_edit_distance(a: str, b: str) -> float:
    """Character Levenshtein over composition-normalized, whitespace-collapsed
    strings, divided by the longer length; 0.0 when both are empty."""
    na, nb = _normalize_for_edit(a), _normalize_for_edit(b)
    longest = max(len(na), len(nb))
    if longest == 0:
        return 0.0
    return _levenshtein(na, nb) / longest


# ---------------------------------------------------------------------------
# text recognition
# ---------------------------------------------------------------------------


def _strip_punctuation(s: str) -> str:
    return "".join(ch for ch in s if not unicodedata.category(ch).startswith("P"))


def _normalize_recognition(s: str) -> str:
    return " ".join(_strip_punctuation(unicodedata.normalize("NFC", s)).casefold().split())


def text_recognition_score(
    preds: Sequence[str], golds: Sequence[str]
) -> tuple[int, float]:
    """Count predictions that contain the gold string after normalization.

    Normalization: case fold, punctuation stripped, whitespace collapsed.
    Returns (correct_count, accuracy).
    """
    if len(preds) != len(golds):
        raise LengthMismatchError(f"{len(preds)} predictions vs {len(golds)} golds")
    correct = sum(
        1
        for pred, gold in zip(preds, golds)
        if _normalize_recognition(gold) in _normalize_recognition(pred)
    )
    return correct, (correct / len(preds) if preds else 0.0)


# ---------------------------------------------------------------------------
# structural AP over chart JSON
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ApConfig:
    tol_strict: float = 0.0
    tol_slight: float = 0.05
    tol_high: float = 0.10

    def __post_init__(self) -> None:
        if not 0 <= self.tol_strict <= self.tol_slight <= self.tol_high:
            raise ValueError("tolerances must satisfy 0 <= strict <= slight <= high")

    def items(self) -> tuple[tuple[str, float], ...]:
        return (
            ("AP@strict", self.tol_strict),
            ("AP@slight", self.tol_slight),
            ("AP@high", self.tol_high),
        )


_VALUE_EPS = 1e-9


def _normalize_label(s: str) -> str:
    return " ".join(s.casefold().split())


def _ap_counts(pred, gold, tol: float) -> dict:
    """Matched/total cell counts for one pred/gold ChartMeta pair."""
    string_matched = sum(
        1
        for pred_s, gold_s in (
            (pred.title, gold.title),
            (pred.source, gold.source),
            (pred.y_axis, gold.y_axis),
        )
        if _normalize_label(pred_s) == _normalize_label(gold_s)
    )
    pred_cells = {
        (_normalize_label(s.name), _normalize_label(cat)): value
        for s in pred.series
        for cat, value in zip(pred.x_axis, s.values)
    }
    value_matched = 0
    value_total = 0
    for s in gold.series:
        for cat, gold_value in zip(gold.x_axis, s.values):
            value_total += 1
            key = (_normalize_label(s.name), _normalize_label(cat))
            if key not in pred_cells:
                continue
            if abs(pred_cells[key] - gold_value) <= tol * max(abs(gold_value), _VALUE_EPS):
                value_matched += 1
    return {
        "string_matched": string_matched,
        "string_total": 3,
        "value_matched": value_matched,
        "value_total": value_total,
    }


def structural_ap(pred: str, gold: str, tol: float) -> float:
    """Fraction of gold cells matched by the prediction at tolerance ``tol``.

    Cells are the three string fields plus one value cell per
    (series, category); value cells match when labels agree after
    normalization and the relative error is within ``tol``.
    """
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    try:
        gold_meta = json_to_chart_meta(gold)
    except (NotJsonError, SchemaMismatchError) as exc:
        raise GoldUnparseableError(f"gold chart JSON invalid: {exc}") from exc
    try:
        pred_meta = json_to_chart_meta(pred)
    except (NotJsonError, SchemaMismatchError):
        return 0.0
    counts = _ap_counts(pred_meta, gold_meta, tol)
    total = counts["string_total"] + counts["value_total"]
    matched = counts["string_matched"] + counts["value_matched"]
    return matched / total


@dataclass(frozen=True)
class RecordScore:
    id: str
    score: float
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EvalReport:
    metric_name: str
    aggregate: float
    per_record: tuple[RecordScore, ...]

    @classmethod
    def from_scores(cls, metric_name: str, scores: Sequence[RecordScore]) -> "EvalReport":
        aggregate = (
            sum(r.score for r in scores) / len(scores) if scores else 0.0
        )
        return cls(metric_name=metric_name, aggregate=aggregate, per_record=tuple(scores))

    def to_dict(self, config: dict | None = None) -> dict:
        return {
            "metric": self.metric_name,
            "config": config or {},
            "aggregate": self.aggregate,
            "per_record": [
                {"id": r.id, "score": r.score, "diagnostics": r.diagnostics}
                for r in self.per_record
            ],
        }


def ap_suite(
    preds: Sequence[str],
    golds: Sequence[str],
    cfg: ApConfig = ApConfig(),
    ids: Sequence[str] | None = None,
) -> tuple[EvalReport, EvalReport, EvalReport]:
    """Mean structural AP at the three nested tolerances."""
    if len(preds) != len(golds):
        raise LengthMismatchError(f"{len(preds)} predictions vs {len(golds)} golds")
    if ids is None:
        ids = [str(i) for i in range(len(preds))]
    elif len(ids) != len(preds):
        raise LengthMismatchError(f"{len(ids)} ids vs {len(preds)} predictions")
    reports = []
    for name, tol in cfg.items():
        scores = []
        for record_id, pred, gold in zip(ids, preds, golds):
            try:
                gold_meta = json_to_chart_meta(gold)
            except (NotJsonError, SchemaMismatchError) as exc:
                raise GoldUnparseableError(
                    f"gold {record_id}: {exc}"
                ) from exc
            try:
                pred_meta = json_to_chart_meta(pred)
            except (NotJsonError, SchemaMismatchError):
                scores.append(
                    RecordScore(record_id, 0.0, {"unparseable_pred": True})
                )
                continue
            counts = _ap_counts(pred_meta, gold_meta, tol)
            total = counts["string_total"] + counts["value_total"]
            matched = counts["string_matched"] + counts["value_matched"]
            scores.append(RecordScore(record_id, matched / total, counts))
        reports.append(EvalReport.from_scores(name, scores))
    return tuple(reports)


# ---------------------------------------------------------------------------
# KIE field F1
# ---------------------------------------------------------------------------


def _normalize_kie_value(raw: object) -> tuple[str, object]:
    if isinstance(raw, bool):
        return ("str", str(raw).lower())
    if isinstance(raw, (int, float)):
        return ("num", float(raw))
    if raw is None:
        return ("str", "")
    if isinstance(raw, str):
        try:
            return ("num", normalize_number(raw))
        except ValueError:
            return ("str", " ".join(raw.casefold().split()))
    return ("raw", _json.dumps(raw, sort_keys=True, ensure_ascii=False))


def _load_flat_map(text: str) -> dict[str, tuple[str, object]] | None:
    try:
        obj = _json.loads(text)
    except ValueError:
        return None
    if not isinstance(obj, dict):
        return None
    return {normalize_key(str(k)): _normalize_kie_value(v) for k, v in obj.items()}


@dataclass(frozen=True)
class KieScore:
    precision: float
    recall: float
    f1: float
    per_field: tuple[tuple[str, str], ...]  # (key, match|value_mismatch|missing|spurious)


def kie_f1(pred_json: str, gold_json: str) -> KieScore:
    """Micro precision/recall/F1 over flat key-value fields.

    A field is a true positive when both the normalized key and the
    normalized value (numbers via the shared number rules) match.
    """
    gold = _load_flat_map(gold_json)
    if gold is None or any(kind == "raw" for kind, _ in gold.values()):
        raise GoldUnparseableError("gold KIE JSON must be a flat object")
    pred = _load_flat_map(pred_json)
    if pred is None:
        return KieScore(
            0.0, 0.0, 0.0,
            tuple((key, "missing") for key in gold),
        )
    per_field: list[tuple[str, str]] = []
    tp = 0
    for key, gold_value in gold.items():
        if key not in pred:
            per_field.append((key, "missing"))
        elif pred[key] == gold_value:
            per_field.append((key, "match"))
            tp += 1
        else:
            per_field.append((key, "value_mismatch"))
    for key in pred:
        if key not in gold:
            per_field.append((key, "spurious"))
    fp = len(pred) - tp
    fn = len(gold) - tp
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return KieScore(precision, recall, f1, tuple(per_field))


# ---------------------------------------------------------------------------
# code similarity
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+|[^\sA-Za-z0-9_]")
_COMMENT_RE = re.compile(r"(?<!\\)%[^\n]*")


def tokenize(text: str) -> list[str]:
    """Split on whitespace and punctuation boundaries; punctuation chars are
    single tokens."""
    return _TOKEN_RE.findall(text)


def code_similarity(pred: str, gold: str, kind: MarkupKind | None = None) -> float:
    """1 minus the normalized token-level edit distance.

    Comments are stripped first for tikz/latex kinds. Two empty token
    streams are identical (1.0).
    """
    if kind in (MarkupKind.TIKZ, MarkupKind.LATEX):
        pred = _COMMENT_RE.sub("", pred)
        gold = _COMMENT_RE.sub("", gold)
    pred_tokens = tokenize(pred)
    gold_tokens = tokenize(gold)
    longest = max(len(pred_tokens), len(gold_tokens))
    if longest == 0:
        return 1.0
    return 1.0 - _levenshtein(pred_tokens, gold_tokens) / longest


# ---------------------------------------------------------------------------
# token accounting
# ---------------------------------------------------------------------------


def default_token_count(text: str) -> int:
    return len(tokenize(text))


@dataclass(frozen=True)
class TokenReport:
    per_record: tuple[tuple[int, int, int], ...]  # (image, context, qa)
    totals: tuple[int, int, int]
    tokens_per_tile: int

    def __post_init__(self) -> None:
        sums = tuple(sum(t[i] for t in self.per_record) for i in range(3))
        if sums != self.totals:
            raise ValueError("totals must equal the per-record sums")

    def means(self) -> tuple[float, float, float]:
        n = len(self.per_record)
        if n == 0:
            return (0.0, 0.0, 0.0)
        return tuple(total / n for total in self.totals)


def token_stats(
    records: Sequence[ConversationRecord],
    image_tile_counts: Sequence[int],
    tokens_per_tile: int = DEFAULT_TOKENS_PER_TILE,
    token_count: Callable[[str], int] | None = None,
) -> TokenReport:
    """Image/context/QA token triples per record plus exact totals.

    Image tokens follow the tile model (tiles x tokens-per-tile, tiles in
    [1, 12]); context tokens count the round-1 answer body; QA tokens count
    q1, q2, and a2.
    """
    if len(records) != len(image_tile_counts):
        raise LengthMismatchError(
            f"{len(records)} records vs {len(image_tile_counts)} tile counts"
        )
    if tokens_per_tile < 1:
        raise ValueError("tokens_per_tile must be at least 1")
    count = token_count or default_token_count
    per_record: list[tuple[int, int, int]] = []
    for record, tiles in zip(records, image_tile_counts):
        if not 1 <= tiles <= MAX_IMAGE_TILES:
            raise TileOutOfRangeError(
                f"tile count {tiles} outside [1, {MAX_IMAGE_TILES}]"
            )
        image_tokens = tiles * tokens_per_tile
        context_tokens = count(record.context)
        qa_tokens = count(record.q1) + count(record.q2) + count(record.a2)
        per_record.append((image_tokens, context_tokens, qa_tokens))
    totals = tuple(sum(t[i] for t in per_record) for i in range(3))
    return TokenReport(
        per_record=tuple(per_record), totals=totals, tokens_per_tile=tokens_per_tile
    )
