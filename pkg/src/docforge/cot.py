"""Two-round context-grounded conversation packaging.

Round 1 asks for the relevant context from the image and the answer carries
it wrapped in markup-kind tokens; round 2 asks the original question given
image plus context. Records whose annotator replies "unclear" are routed to
a rejected sidecar, never to the main export.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import requests

from .errors import (
    ClientError,
    EmptyQuestionError,
    IoError,
    OversizeContextError,
    UnclearContextError,
)
from .markup import FRAMING_TOKENS, MarkupKind, TaggedMarkup, parse_tagged, wrap_tagged

ROUND1_PREFIX = "To answer the question: "
ROUND1_SUFFIX = ", extract the relevant context from the image."
ROUND2_PREFIX = "Based on the image and extracted context, answer the question: "

DEFAULT_MAX_CONTEXT_CHARS = 4096

GROUNDED = "grounded"
UNCLEAR = "unclear"


@dataclass(frozen=True)
class QaPair:
    question: str
    answer: str

    def __post_init__(self) -> None:
        if not self.question or not self.answer:
            raise ValueError("question and answer must be non-empty")
        for token in FRAMING_TOKENS:
            if token in self.question or token in self.answer:
                raise ValueError(f"QA text contains framing token {token!r}")


@dataclass(frozen=True)
class ContextAnnotation:
    kind: MarkupKind
    context: str
    status: str

    def __post_init__(self) -> None:
        if self.status not in (GROUNDED, UNCLEAR):
            raise ValueError(f"status must be grounded or unclear, got {self.status!r}")
        if (self.status == UNCLEAR) != (self.context == ""):
            raise ValueError("status is unclear iff context is empty")


def build_round1_question(question: str) -> str:
    """Instantiate the fixed round-1 template; byte-exact, no escaping."""
    if not question:
        raise EmptyQuestionError("round-1 question must be non-empty")
    return f"{ROUND1_PREFIX}{question}{ROUND1_SUFFIX}"


def build_round2_question(question: str) -> str:
    """Instantiate the fixed round-2 template; byte-exact, no escaping."""
    if not question:
        raise EmptyQuestionError("round-2 question must be non-empty")
    return f"{ROUND2_PREFIX}{question}"


@dataclass(frozen=True)
class ConversationRecord:
    """One two-round dialogue; construction enforces the template grammar."""

    id: str
    image_ref: str
    q1: str
    a1: str
    q2: str
    a2: str
    source_qa: QaPair

    def __post_init__(self) -> None:
        if self.q1 != build_round1_question(self.source_qa.question):
            raise ValueError("q1 does not match the round-1 template")
        if self.q2 != build_round2_question(self.source_qa.question):
            raise ValueError("q2 does not match the round-2 template")
        if self.a2 != self.source_qa.answer:
            raise ValueError("a2 must equal the source answer")
        parse_tagged(self.a1)  # a1 must be exactly one framed payload

    @property
    def markup_kind(self) -> MarkupKind:
        return parse_tagged(self.a1).kind

    @property
    def context(self) -> str:
        return parse_tagged(self.a1).body


# ---------------------------------------------------------------------------
# annotator clients
# ---------------------------------------------------------------------------

ANNOTATOR_SYSTEM_PROMPT = (
    "You are given the markup source of a document image together with a "
    "question and its answer. Return the minimal context from the markup that "
    "supports the answer. If the markup does not contain information "
    'supporting the answer, reply with "unclear".'
)


def _render_user_prompt(markup: TaggedMarkup, qa: QaPair) -> str:
    return (
        f"Markup ({markup.kind.value}):\n{markup.body}\n\n"
        f"Question: {qa.question}\nAnswer: {qa.answer}\n\nContext:"
    )


@dataclass(frozen=True)
class AnnotationRequest:
    """Rendered prompt plus the semantic payload it was rendered from."""

    system: str
    user: str
    markup: TaggedMarkup
    qa: QaPair


class AnnotatorClient:
    """Produces a context reply (or "unclear") for an annotation request."""

    def reply(self, request: AnnotationRequest) -> str:
        raise NotImplementedError


class StubAnnotator(AnnotatorClient):
    """Deterministic offline annotator.

    Returns the shortest markup line containing the answer verbatim, or
    "unclear" when no line does. Grounded replies therefore always contain
    the answer as a substring.
    """

    def reply(self, request: AnnotationRequest) -> str:
        answer = request.qa.answer
        candidates = [
            line for line in request.markup.body.split("\n") if answer in line
        ]
        if not candidates:
            return UNCLEAR
        return min(candidates, key=len).strip()


class HttpAnnotator(AnnotatorClient):
    """Chat-completion style HTTP annotator.

    Endpoint, model, and key come from the environment unless passed
    explicitly; requests are retried with exponential backoff before a
    ClientError is raised.
    """

    ENDPOINT_ENV = "DOCFORGE_ANNOTATOR_ENDPOINT"
    MODEL_ENV = "DOCFORGE_ANNOTATOR_MODEL"
    KEY_ENV = "DOCFORGE_ANNOTATOR_KEY"

    def __init__(
        self,
        endpoint: str | None = None,
        model: str | None = None,
        api_key: str | None = None,
        *,
        timeout_s: float = 30.0,
        max_attempts: int = 3,
        backoff_s: float = 0.5,
        post: Callable | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint or os.environ.get(self.ENDPOINT_ENV, "")
        self.model = model or os.environ.get(self.MODEL_ENV, "")
        self.api_key = api_key or os.environ.get(self.KEY_ENV, "")
        if not self.endpoint or not self.model:
            raise ClientError(
                f"HTTP annotator needs {self.ENDPOINT_ENV} and {self.MODEL_ENV}"
            )
        self.timeout_s = timeout_s
        self.max_attempts = max_attempts
        self.backoff_s = backoff_s
        self._post = post or requests.post
        self._sleep = sleep

    def reply(self, request: AnnotationRequest) -> str:
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last: Exception | None = None
        for attempt in range(self.max_attempts):
            try:
                response = self._post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout_s
                )
                response.raise_for_status()
                data = response.json()
                return data["choices"][0]["message"]["content"]
            except Exception as exc:  # transport, HTTP status, or shape errors
                last = exc
                if attempt + 1 < self.max_attempts:
                    self._sleep(self.backoff_s * (2 ** attempt))
        raise ClientError(
            f"annotation failed after {self.max_attempts} attempts: {last}"
        )


class AnnotationCache:
    """Disk memo of annotator replies keyed by markup and question hashes.

    One file per key, written atomically, so reruns are idempotent and
    concurrent writers never interleave.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def _key(markup: TaggedMarkup, qa: QaPair) -> str:
        gold_hash = hashlib.sha256(
            f"{markup.kind.value}\0{markup.body}".encode("utf-8")
        ).hexdigest()
        # The answer participates so equal questions with different answers
        # cannot collide.
        qa_hash = hashlib.sha256(
            f"{qa.question}\0{qa.answer}".encode("utf-8")
        ).hexdigest()
        return f"{gold_hash[:24]}-{qa_hash[:24]}.json"

    def get(self, markup: TaggedMarkup, qa: QaPair) -> str | None:
        path = self.root / self._key(markup, qa)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))["reply"]

    def put(self, markup: TaggedMarkup, qa: QaPair, reply: str) -> None:
        path = self.root / self._key(markup, qa)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"reply": reply}, ensure_ascii=False), encoding="utf-8")
        os.replace(tmp, path)


def annotate_context(
    gold: TaggedMarkup,
    qa: QaPair,
    client: AnnotatorClient,
    *,
    cache: AnnotationCache | None = None,
    max_context_chars: int = DEFAULT_MAX_CONTEXT_CHARS,
) -> ContextAnnotation:
    """Obtain a context annotation for one QA pair over one gold markup.

    A reply equal to "unclear" (trimmed, case-folded) or empty maps to
    status=unclear; anything else is grounded context. Replies longer than
    ``max_context_chars`` raise OversizeContextError.
    """
    request = AnnotationRequest(
        system=ANNOTATOR_SYSTEM_PROMPT,
        user=_render_user_prompt(gold, qa),
        markup=gold,
        qa=qa,
    )
    reply = cache.get(gold, qa) if cache is not None else None
    if reply is None:
        reply = client.reply(request)
        if cache is not None:
            cache.put(gold, qa, reply)
    if len(reply) > max_context_chars:
        raise OversizeContextError(
            f"reply of {len(reply)} chars exceeds cap {max_context_chars}"
        )
    context = reply.strip()
    if not context or context.casefold() == UNCLEAR:
        return ContextAnnotation(kind=gold.kind, context="", status=UNCLEAR)
    return ContextAnnotation(kind=gold.kind, context=context, status=GROUNDED)


def package_record(
    image_ref: str,
    qa: QaPair,
    annotation: ContextAnnotation,
    *,
    record_id: str,
) -> ConversationRecord:
    """Assemble the four round strings for a grounded annotation."""
    if annotation.status != GROUNDED:
        raise UnclearContextError("unclear annotations go to the sidecar, not records")
    a1 = wrap_tagged(TaggedMarkup(annotation.kind, annotation.context))
    return ConversationRecord(
        id=record_id,
        image_ref=image_ref,
        q1=build_round1_question(qa.question),
        a1=a1,
        q2=build_round2_question(qa.question),
        a2=qa.answer,
        source_qa=qa,
    )


@dataclass(frozen=True)
class RejectedQa:
    id: str
    image_ref: str
    markup_kind: MarkupKind
    source_qa: QaPair
    reason: str


# ---------------------------------------------------------------------------
# batch annotation
# ---------------------------------------------------------------------------


def annotate_and_package(
    records: Iterable,
    client: AnnotatorClient,
    *,
    cache: AnnotationCache | None = None,
    max_context_chars: int = DEFAULT_MAX_CONTEXT_CHARS,
    max_workers: int = 1,
    image_ref_for: Callable[[object], str] | None = None,
) -> tuple[list[ConversationRecord], list[RejectedQa]]:
    """Annotate every QA pair of every record and package the grounded ones.

    ``records`` are SynthRecord-likes with ``id``, ``gold``, and ``qa``;
    records without QA are skipped. Annotation calls may run concurrently up
    to ``max_workers`` in flight; output order always follows input order.
    """
    ref_of = image_ref_for or (lambda record: f"images/{record.id}.png")
    jobs = []
    for record in records:
        if not record.qa:
            continue
        for qa_idx, (question, answer) in enumerate(record.qa):
            jobs.append((record, qa_idx, QaPair(question, answer)))

    def run(job):
        record, qa_idx, qa = job
        annotation = annotate_context(
            record.gold, qa, client, cache=cache, max_context_chars=max_context_chars
        )
        return record, qa_idx, qa, annotation

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]

    packaged: list[ConversationRecord] = []
    rejected: list[RejectedQa] = []
    for record, qa_idx, qa, annotation in results:
        record_id = f"{record.id}#q{qa_idx}"
        image_ref = ref_of(record)
        if annotation.status == GROUNDED:
            packaged.append(
                package_record(image_ref, qa, annotation, record_id=record_id)
            )
        else:
            rejected.append(
                RejectedQa(
                    id=record_id,
                    image_ref=image_ref,
                    markup_kind=record.gold.kind,
                    source_qa=qa,
                    reason=UNCLEAR,
                )
            )
    return packaged, rejected


# ---------------------------------------------------------------------------
# JSONL export / import
# ---------------------------------------------------------------------------


def _record_to_obj(record: ConversationRecord) -> dict:
    return {
        "id": record.id,
        "image_ref": record.image_ref,
        "conversations": [
            {"role": "user", "text": record.q1},
            {"role": "assistant", "text": record.a1},
            {"role": "user", "text": record.q2},
            {"role": "assistant", "text": record.a2},
        ],
        "markup_kind": record.markup_kind.value,
        "source_qa": {
            "question": record.source_qa.question,
            "answer": record.source_qa.answer,
        },
    }


def rejected_sidecar_path(path: str | Path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".rejected" + p.suffix)


def export_jsonl(
    records: Sequence[ConversationRecord],
    path: str | Path,
    *,
    rejected: Sequence[RejectedQa] = (),
) -> int:
    """Write records to JSONL (stable field order) plus a rejected sidecar.

    Returns the number of main lines written. Both files are written
    atomically via a temp file and rename.
    """
    path = Path(path)
    sidecar = rejected_sidecar_path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        main_lines = [
            json.dumps(_record_to_obj(r), ensure_ascii=False) for r in records
        ]
        side_lines = [
            json.dumps(
                {
                    "id": r.id,
                    "image_ref": r.image_ref,
                    "markup_kind": r.markup_kind.value,
                    "source_qa": {
                        "question": r.source_qa.question,
                        "answer": r.source_qa.answer,
                    },
                    "reason": r.reason,
                },
                ensure_ascii=False,
            )
            for r in rejected
        ]
        for target, lines in ((path, main_lines), (sidecar, side_lines)):
            tmp = target.with_suffix(target.suffix + ".tmp")
            text = "".join(line + "\n" for line in lines)
            tmp.write_text(text, encoding="utf-8")
            os.replace(tmp, target)
    except OSError as exc:
        raise IoError(f"failed to write {path}: {exc}") from exc
    return len(records)


def import_jsonl(path: str | Path) -> list[ConversationRecord]:
    """Read an exported file back into records, re-checking every invariant."""
    records: list[ConversationRecord] = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"failed to read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        obj = json.loads(line)
        convs = obj["conversations"]
        roles = [c["role"] for c in convs]
        if roles != ["user", "assistant", "user", "assistant"]:
            raise ValueError(f"line {lineno}: unexpected role sequence {roles}")
        records.append(
            ConversationRecord(
                id=obj["id"],
                image_ref=obj["image_ref"],
                q1=convs[0]["text"],
                a1=convs[1]["text"],
                q2=convs[2]["text"],
                a2=convs[3]["text"],
                source_qa=QaPair(
                    obj["source_qa"]["question"], obj["source_qa"]["answer"]
                ),
            )
        )
    return records
