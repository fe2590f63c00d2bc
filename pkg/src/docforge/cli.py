"""Command-line orchestration: synth, validate, package, evaluate, stats.

Progress goes to stderr; stdout carries only one-line aggregates so runs can
be piped. Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import cot, metrics
from .errors import CompilerTimeoutError, DocforgeError, InvalidConfigError
from .ioutil import atomic_write_json, read_jsonl, write_jsonl
from .manifest import CATEGORIES, Manifest
from .markup import MarkupKind, TaggedMarkup, parse_tagged, wrap_tagged
from .metrics import ApConfig, EvalReport, RecordScore
from .synth import SYNTHESIZERS, derive_seed, sample_prompt, spec_to_dict
from .validate import (
    TikzCompiler,
    ValidationReport,
    Violation,
    compile_check_tikz,
    filter_dataset,
)

_PROMPT_TASK_BY_CATEGORY = {
    "chart": "json",
    "table": "markdown",
    "formula": "latex",
    "receipt": "json",
    "page": "html",
}


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _emit(obj: dict) -> None:
    print(json.dumps(obj, ensure_ascii=False))


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def cmd_synth(manifest: Manifest, out_dir: Path) -> int:
    records = []
    for category in CATEGORIES:
        count = manifest.counts.get(category, 0)
        synthesize = SYNTHESIZERS[category]
        for index in range(count):
            label = f"{category}-{index:06d}"
            seed = derive_seed(manifest.master_seed, label)
            if category == "chart":
                record = synthesize(seed, manifest.chart)
            elif category == "table":
                record = synthesize(seed, manifest.table)
            elif category == "formula":
                record = synthesize(seed, manifest.formula_corpus)
            elif category == "receipt":
                record = synthesize(seed, manifest.receipt)
            else:
                record = synthesize(seed, manifest.page)
            prompt_seed = derive_seed(manifest.master_seed, f"{label}/prompt")
            prompt = sample_prompt(_PROMPT_TASK_BY_CATEGORY[category], prompt_seed)
            records.append((record, prompt))
        if count:
            _progress(f"synthesized {count} {category} records")

    lines = []
    for record, prompt in records:
        lines.append(
            {
                "id": record.id,
                "category": record.category,
                "markup_kind": record.gold.kind.value,
                "prompt": prompt,
                "answer": wrap_tagged(record.gold),
                "qa": (
                    [{"question": q, "answer": a} for q, a in record.qa]
                    if record.qa
                    else None
                ),
            }
        )
    write_jsonl(out_dir / "dataset.jsonl", lines)
    for record, _prompt in records:
        obj = {"id": record.id, **spec_to_dict(record.spec)}
        atomic_write_json(out_dir / "specs" / f"{record.id}.json", obj)

    kind_counts: dict[str, int] = {}
    for record, _prompt in records:
        kind = record.gold.kind.value
        kind_counts[kind] = kind_counts.get(kind, 0) + 1
    total = len(records)
    summary = {
        "master_seed": manifest.master_seed,
        "total": total,
        "counts": {c: manifest.counts.get(c, 0) for c in CATEGORIES},
        "kinds": {k: kind_counts[k] for k in sorted(kind_counts)},
        "kind_fractions": {
            k: round(kind_counts[k] / total, 4) for k in sorted(kind_counts)
        } if total else {},
    }
    atomic_write_json(out_dir / "summary.json", summary)
    _progress(f"wrote {len(records)} records to {out_dir}")
    _emit({"total": len(records), "out": str(out_dir)})
    return 0


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImportedRecord:
    id: str
    gold: TaggedMarkup


def _dataset_file(path: Path) -> Path:
    return path / "dataset.jsonl" if path.is_dir() else path


def _compile_report(record: ImportedRecord, code: str, message: str) -> ValidationReport:
    return ValidationReport(
        kind=record.gold.kind, violations=(Violation(code, message),)
    )


def cmd_validate(
    dataset_path: Path,
    report_path: Path | None,
    compiler: TikzCompiler | None = None,
) -> int:
    dataset = _dataset_file(dataset_path)
    records: list[ImportedRecord] = []
    frame_rejections = []
    for obj in read_jsonl(dataset):
        try:
            gold = parse_tagged(obj["answer"])
        except DocforgeError as exc:
            frame_rejections.append(
                {"id": obj["id"], "violations": [
                    {"code": "BadFrame", "message": str(exc), "byte_offset": None}
                ]}
            )
            continue
        records.append(ImportedRecord(id=obj["id"], gold=gold))
    kept, rejected = filter_dataset(records)
    if compiler is not None:
        still_kept = []
        for record in kept:
            if record.gold.kind is not MarkupKind.TIKZ:
                still_kept.append(record)
                continue
            try:
                outcome = compile_check_tikz(record.gold.body, compiler)
            except CompilerTimeoutError as exc:
                rejected.append((record, _compile_report(record, "CompilerTimeout", str(exc))))
                continue
            if outcome.status == "fail":
                rejected.append((record, _compile_report(record, "CompileFail", outcome.reason)))
            else:
                still_kept.append(record)
        kept = still_kept
    rejections = frame_rejections + [
        {
            "id": record.id,
            "violations": [
                {"code": v.code, "message": v.message, "byte_offset": v.byte_offset}
                for v in report.violations
            ],
        }
        for record, report in rejected
    ]
    report_obj = {
        "dataset": str(dataset),
        "kept": len(kept),
        "rejected": len(rejections),
        "rejections": rejections,
    }
    target = report_path or dataset.parent / "validation.json"
    atomic_write_json(target, report_obj)
    _progress(f"validation report written to {target}")
    _emit({"kept": len(kept), "rejected": len(rejections)})
    return 0 if not rejections else 1


# ---------------------------------------------------------------------------
# package
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _QaRecord:
    id: str
    gold: TaggedMarkup
    qa: tuple[tuple[str, str], ...]


def _make_annotator(kind: str) -> cot.AnnotatorClient:
    if kind == "stub":
        return cot.StubAnnotator()
    if kind == "http":
        return cot.HttpAnnotator()
    raise InvalidConfigError(f"unknown annotator {kind!r}")


def cmd_package(
    dataset_path: Path,
    out_path: Path | None,
    annotator_kind: str,
    cache_dir: Path | None,
    workers: int,
    max_context_chars: int,
) -> int:
    dataset = _dataset_file(dataset_path)
    records = []
    for obj in read_jsonl(dataset):
        if not obj.get("qa"):
            continue
        gold = parse_tagged(obj["answer"])
        qa = tuple((pair["question"], pair["answer"]) for pair in obj["qa"])
        records.append(_QaRecord(id=obj["id"], gold=gold, qa=qa))
    client = _make_annotator(annotator_kind)
    cache_root = cache_dir or dataset.parent / "annotation_cache"
    cache = cot.AnnotationCache(cache_root)
    packaged, rejected = cot.annotate_and_package(
        records,
        client,
        cache=cache,
        max_context_chars=max_context_chars,
        max_workers=max(1, workers),
    )
    target = out_path or dataset.parent / "cot.jsonl"
    written = cot.export_jsonl(packaged, target, rejected=rejected)
    _progress(
        f"packaged {written} records to {target}; "
        f"{len(rejected)} rejected to {cot.rejected_sidecar_path(target)}"
    )
    _emit({"packaged": written, "rejected": len(rejected)})
    return 0


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------


def _unwrap(text: str) -> tuple[str, MarkupKind | None]:
    try:
        tagged = parse_tagged(text)
        return tagged.body, tagged.kind
    except DocforgeError:
        return text, None


def _load_gold(path: Path) -> tuple[list[str], list[str], list[MarkupKind | None]]:
    ids, bodies, kinds = [], [], []
    for obj in read_jsonl(path):
        raw = obj.get("answer", obj.get("gold", obj.get("output")))
        if raw is None:
            raise InvalidConfigError(f"gold line for {obj.get('id')} has no answer field")
        body, kind = _unwrap(raw)
        ids.append(str(obj["id"]))
        bodies.append(body)
        kinds.append(kind)
    return ids, bodies, kinds


def _load_preds(path: Path, ids: list[str]) -> list[str]:
    by_id = {}
    for obj in read_jsonl(path):
        by_id[str(obj["id"])] = str(obj.get("output", ""))
    return [_unwrap(by_id.get(record_id, ""))[0] for record_id in ids]


def cmd_evaluate(
    pred_path: Path,
    gold_path: Path,
    metric: str,
    out_dir: Path | None,
    ap_config: ApConfig,
    image_scores_path: Path | None,
) -> int:
    ids, golds, kinds = _load_gold(_dataset_file(gold_path))
    preds = _load_preds(pred_path, ids)
    target_dir = out_dir or pred_path.parent
    if metric == "ap":
        reports = metrics.ap_suite(preds, golds, ap_config, ids)
        config = {
            "tol_strict": ap_config.tol_strict,
            "tol_slight": ap_config.tol_slight,
            "tol_high": ap_config.tol_high,
        }
        aggregates = {}
        for report in reports:
            name = report.metric_name.split("@")[1]
            atomic_write_json(target_dir / f"ap_{name}.json", report.to_dict(config))
            aggregates[report.metric_name] = report.aggregate
        _emit(aggregates)
        return 0
    if metric == "kie":
        scores = []
        for record_id, pred, gold in zip(ids, preds, golds):
            result = metrics.kie_f1(pred, gold)
            scores.append(
                RecordScore(
                    record_id,
                    result.f1,
                    {"precision": result.precision, "recall": result.recall},
                )
            )
        report = EvalReport.from_scores("kie_f1", scores)
        atomic_write_json(target_dir / "kie.json", report.to_dict({}))
        _emit({"kie_f1": report.aggregate})
        return 0
    if metric == "recognition":
        correct, accuracy = metrics.text_recognition_score(preds, golds)
        scores = [
            RecordScore(record_id, 1.0 if
                        metrics.text_recognition_score([pred], [gold])[0] else 0.0, {})
            for record_id, pred, gold in zip(ids, preds, golds)
        ]
        report = EvalReport.from_scores("text_recognition", scores)
        atomic_write_json(
            target_dir / "recognition.json",
            report.to_dict({"correct": correct, "total": len(preds)}),
        )
        _emit({"correct": correct, "accuracy": accuracy})
        return 0
    if metric == "edit":
        scores = [
            RecordScore(record_id, metrics.normalized_edit_distance(pred, gold), {})
            for record_id, pred, gold in zip(ids, preds, golds)
        ]
        report = EvalReport.from_scores("normalized_edit_distance", scores)
        atomic_write_json(target_dir / "edit.json", report.to_dict({}))
        _emit({"normalized_edit_distance": report.aggregate})
        return 0
    if metric == "code":
        image_scores: dict[str, float] = {}
        if image_scores_path is not None:
            image_scores = {
                str(k): float(v)
                for k, v in json.loads(
                    image_scores_path.read_text(encoding="utf-8")
                ).items()
            }
        scores = []
        for record_id, pred, gold, kind in zip(ids, preds, golds, kinds):
            code = metrics.code_similarity(pred, gold, kind)
            if record_id in image_scores:
                combined = (code + image_scores[record_id]) / 2
                scores.append(
                    RecordScore(record_id, combined,
                                {"code": code, "image": image_scores[record_id]})
                )
            else:
                scores.append(RecordScore(record_id, code, {"code": code}))
        image_half = "available" if image_scores else "unavailable"
        report = EvalReport.from_scores("code_similarity", scores)
        atomic_write_json(
            target_dir / "code.json", report.to_dict({"image_half": image_half})
        )
        payload = {"code_similarity": report.aggregate, "image_half": image_half}
        _emit(payload)
        return 0
    raise InvalidConfigError(f"unknown metric {metric!r}")


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------


def cmd_stats(
    cot_path: Path,
    tiles_path: Path | None,
    tokens_per_tile: int,
    out_path: Path | None,
) -> int:
    records = cot.import_jsonl(cot_path)
    if tiles_path is not None:
        tiles_by_id = {
            str(obj["id"]): int(obj["tiles"]) for obj in read_jsonl(tiles_path)
        }
        tile_counts = [
            tiles_by_id.get(record.id, metrics.MAX_IMAGE_TILES) for record in records
        ]
    else:
        tile_counts = [metrics.MAX_IMAGE_TILES] * len(records)
    report = metrics.token_stats(records, tile_counts, tokens_per_tile)
    target = out_path or Path(cot_path).parent / "token_report.json"
    obj = {
        "tokens_per_tile": report.tokens_per_tile,
        "totals": dict(zip(("image", "context", "qa"), report.totals)),
        "means": dict(zip(("image", "context", "qa"), report.means())),
        "per_record": [
            {"id": record.id, "image": t[0], "context": t[1], "qa": t[2]}
            for record, t in zip(records, report.per_record)
        ],
    }
    atomic_write_json(target, obj)
    _progress(f"token report written to {target}")
    means = report.means()
    print(f"records {len(records)}")
    print(f"{'':10s}{'image':>12s}{'context':>12s}{'qa':>12s}")
    print(f"{'total':10s}{report.totals[0]:>12d}{report.totals[1]:>12d}{report.totals[2]:>12d}")
    print(f"{'mean':10s}{means[0]:>12.1f}{means[1]:>12.1f}{means[2]:>12.1f}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docforge",
        description="Build, validate, package, and score markup-grounded datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a dataset from a manifest")
    p_synth.add_argument("--manifest", required=True, type=Path)
    p_synth.add_argument("--out", type=Path, help="override the manifest out_dir")
    p_synth.add_argument("--seed-override", type=int, default=None)
    p_synth.add_argument("--workers", type=int, default=1,
                         help="accepted for symmetry; synthesis runs serially")

    p_val = sub.add_parser("validate", help="filter a dataset by structural validity")
    p_val.add_argument("dataset", type=Path)
    p_val.add_argument("--out", type=Path, help="report path")
    p_val.add_argument("--compiler-cmd", default=None,
                       help="external TikZ compile command with an {input} placeholder")
    p_val.add_argument("--compile-timeout", type=float, default=20.0)

    p_pkg = sub.add_parser("package", help="build two-round context records")
    p_pkg.add_argument("dataset", type=Path)
    p_pkg.add_argument("--out", type=Path, help="output JSONL path")
    p_pkg.add_argument("--annotator", choices=("stub", "http"), default="stub")
    p_pkg.add_argument("--cache-dir", type=Path, default=None)
    p_pkg.add_argument("--workers", type=int, default=1)
    p_pkg.add_argument("--max-context-chars", type=int,
                       default=cot.DEFAULT_MAX_CONTEXT_CHARS)

    p_eval = sub.add_parser("evaluate", help="score predictions against gold")
    p_eval.add_argument("--pred", required=True, type=Path)
    p_eval.add_argument("--gold", required=True, type=Path)
    p_eval.add_argument(
        "--metric", required=True,
        choices=("ap", "kie", "recognition", "edit", "code"),
    )
    p_eval.add_argument("--out", type=Path, help="report directory")
    p_eval.add_argument("--ap-strict", type=float, default=0.0)
    p_eval.add_argument("--ap-slight", type=float, default=0.05)
    p_eval.add_argument("--ap-high", type=float, default=0.10)
    p_eval.add_argument("--image-scores", type=Path, default=None,
                        help="JSON id->similarity from the render component")

    p_stats = sub.add_parser("stats", help="token accounting over packaged records")
    p_stats.add_argument("cot", type=Path)
    p_stats.add_argument("--tiles", type=Path, default=None,
                         help="JSONL of {id, tiles}; default assumes full tiling")
    p_stats.add_argument("--tokens-per-tile", type=int,
                         default=metrics.DEFAULT_TOKENS_PER_TILE)
    p_stats.add_argument("--out", type=Path, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            manifest = Manifest.from_file(args.manifest)
            if args.seed_override is not None:
                manifest.master_seed = args.seed_override
            out_dir = args.out or Path(manifest.out_dir)
            return cmd_synth(manifest, out_dir)
        if args.command == "validate":
            compiler = None
            if args.compiler_cmd:
                try:
                    compiler = TikzCompiler(args.compiler_cmd, timeout_s=args.compile_timeout)
                except ValueError as exc:
                    raise InvalidConfigError(str(exc)) from exc
            return cmd_validate(args.dataset, args.out, compiler)
        if args.command == "package":
            return cmd_package(
                args.dataset,
                args.out,
                args.annotator,
                args.cache_dir,
                args.workers,
                args.max_context_chars,
            )
        if args.command == "evaluate":
            try:
                ap_config = ApConfig(args.ap_strict, args.ap_slight, args.ap_high)
            except ValueError as exc:
                raise InvalidConfigError(str(exc)) from exc
            return cmd_evaluate(
                args.pred, args.gold, args.metric, args.out, ap_config,
                args.image_scores,
            )
        if args.command == "stats":
            return cmd_stats(args.cot, args.tiles, args.tokens_per_tile, args.out)
        parser.error(f"unknown command {args.command!r}")
    except DocforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
