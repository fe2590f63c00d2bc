"""Per-kind structural validation and dataset filtering.

These checks embody the compile/convert filtering steps of the dataset
build: anything whose gold markup fails its kind's structural rules is
excluded rather than shipped.
"""

from __future__ import annotations

import json
import re
import shlex
import subprocess
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

from .dom import parse_html
from .errors import CompilerTimeoutError, MalformedHtmlError
from .markup import FRAMING_TOKENS, MarkupKind, TaggedMarkup


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    byte_offset: int | None = None


@dataclass(frozen=True)
class ValidationReport:
    kind: MarkupKind
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> tuple[str, ...]:
        return tuple(v.code for v in self.violations)


# ---------------------------------------------------------------------------
# per-kind checks
# ---------------------------------------------------------------------------


def _check_json(body: str) -> list[Violation]:
    try:
        json.loads(body)
    except json.JSONDecodeError as exc:
        return [Violation("NotJson", exc.msg, exc.pos)]
    except ValueError as exc:
        return [Violation("NotJson", str(exc))]
    return []


_UNESCAPED_PIPE_RE = re.compile(r"(?<!\\)\|")


def _check_md(body: str) -> list[Violation]:
    violations: list[Violation] = []
    in_fence = False
    block_pipes: int | None = None
    for lineno, line in enumerate(body.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("```"):
            in_fence = not in_fence
            block_pipes = None
            continue
        if in_fence:
            continue
        if stripped.startswith("|"):
            pipes = len(_UNESCAPED_PIPE_RE.findall(stripped))
            if block_pipes is None:
                block_pipes = pipes
            elif pipes != block_pipes:
                violations.append(
                    Violation("RaggedTable", f"table row at line {lineno} has "
                              f"{pipes} pipes, block has {block_pipes}")
                )
        else:
            block_pipes = None
    if in_fence:
        violations.append(Violation("UnclosedFence", "unclosed fenced code block"))
    return violations


_LATEX_COMMENT_RE = re.compile(r"(?<!\\)%[^\n]*")
_ENV_RE = re.compile(r"\\(begin|end)\{([^}]*)\}")


def _strip_latex_comments(body: str) -> str:
    return _LATEX_COMMENT_RE.sub("", body)


def check_env_balance(body: str) -> list[Violation]:
    """Every ``\\begin{X}`` must be closed by a matching ``\\end{X}``."""
    violations: list[Violation] = []
    stack: list[tuple[str, int]] = []
    for m in _ENV_RE.finditer(body):
        word, env = m.group(1), m.group(2)
        if word == "begin":
            stack.append((env, m.start()))
        else:
            if not stack:
                violations.append(
                    Violation("EnvMismatch", f"\\end{{{env}}} without \\begin", m.start())
                )
            else:
                opened, pos = stack.pop()
                if opened != env:
                    violations.append(
                        Violation("EnvMismatch",
                                  f"\\begin{{{opened}}} closed by \\end{{{env}}}", pos)
                    )
    for env, pos in stack:
        violations.append(Violation("EnvMismatch", f"unclosed \\begin{{{env}}}", pos))
    return violations


def _check_braces(body: str) -> list[Violation]:
    depth = 0
    prev = ""
    for offset, ch in enumerate(body):
        if ch == "{" and prev != "\\":
            depth += 1
        elif ch == "}" and prev != "\\":
            depth -= 1
            if depth < 0:
                return [Violation("UnbalancedBraces", "closing brace without opener", offset)]
        prev = "" if prev == "\\" and ch == "\\" else ch
    if depth != 0:
        return [Violation("UnbalancedBraces", f"{depth} unclosed opening braces")]
    return []


def _check_latex(body: str) -> list[Violation]:
    text = _strip_latex_comments(body)
    return _check_braces(text) + check_env_balance(text)


_TIKZ_STATEMENT_RE = re.compile(
    r"\\(draw|node|path|fill|filldraw|shade|shadedraw|clip|coordinate|useasboundingbox)\b"
)
_TIKZ_BODY_RE = re.compile(r"\\begin\{tikzpicture\}(.*?)\\end\{tikzpicture\}", re.DOTALL)


def _check_tikz(body: str) -> list[Violation]:
    violations = _check_latex(body)
    text = _strip_latex_comments(body)
    pictures = _TIKZ_BODY_RE.findall(text)
    if not pictures:
        violations.append(
            Violation("MissingTikzPicture", "no tikzpicture environment found")
        )
        return violations
    for picture in pictures:
        starts = [m.start() for m in _TIKZ_STATEMENT_RE.finditer(picture)]
        for idx, start in enumerate(starts):
            end = starts[idx + 1] if idx + 1 < len(starts) else len(picture)
            if ";" not in picture[start:end]:
                violations.append(
                    Violation("MissingSemicolon",
                              f"statement {picture[start:start + 24]!r}... lacks a semicolon",
                              start)
                )
    return violations


def _check_html(body: str) -> list[Violation]:
    try:
        parse_html(body)
    except MalformedHtmlError as exc:
        return [Violation("MalformedHtml", str(exc))]
    return []


def _check_txt(body: str) -> list[Violation]:
    violations = []
    for token in FRAMING_TOKENS:
        pos = body.find(token)
        if pos >= 0:
            violations.append(
                Violation("EmbeddedTag", f"framing token {token!r} in plain text", pos)
            )
    return violations


_BOX_OPEN = "<box>"
_BOX_CLOSE = "</box>"
_BOX_GRAMMAR_RE = re.compile(r"<box>\((\d+),(\d+)\),\((\d+),(\d+)\)</box>")


def _check_txt_gd(body: str) -> list[Violation]:
    violations = _check_txt(body)
    matches = list(_BOX_GRAMMAR_RE.finditer(body))
    opens = body.count(_BOX_OPEN)
    closes = body.count(_BOX_CLOSE)
    if opens != len(matches) or closes != len(matches):
        violations.append(
            Violation("BadBoxSyntax",
                      f"{opens} <box> / {closes} </box> tokens but only "
                      f"{len(matches)} well-formed fragments")
        )
    for m in matches:
        x1, y1, x2, y2 = (int(g) for g in m.groups())
        if not all(0 <= v <= 1000 for v in (x1, y1, x2, y2)) or x1 > x2 or y1 > y2:
            violations.append(
                Violation("BoxOutOfRange",
                          f"box ({x1},{y1}),({x2},{y2}) outside the 0-1000 grid",
                          m.start())
            )
    return violations


_CHECKERS = {
    MarkupKind.JSON: _check_json,
    MarkupKind.MD: _check_md,
    MarkupKind.LATEX: _check_latex,
    MarkupKind.HTML: _check_html,
    MarkupKind.TIKZ: _check_tikz,
    MarkupKind.TXT: _check_txt,
    MarkupKind.TXT_GD: _check_txt_gd,
}


def validate(m: TaggedMarkup) -> ValidationReport:
    """Run the kind-specific structural checks; never raises."""
    violations = _CHECKERS[m.kind](m.body)
    return ValidationReport(kind=m.kind, violations=tuple(violations))


# ---------------------------------------------------------------------------
# optional external TikZ compile hook
# ---------------------------------------------------------------------------

_STANDALONE_DOC = (
    "\\documentclass{standalone}\n"
    "\\usepackage{tikz}\n"
    "\\begin{document}\n"
    "%s\n"
    "\\end{document}\n"
)


@dataclass(frozen=True)
class CompileOutcome:
    status: str  # "pass" | "fail" | "skipped"
    reason: str = ""


class TikzCompiler:
    """External compile hook; never auto-detected, always configured.

    ``command`` is a template receiving the input file path via ``{input}``.
    A compile passes when the command exits zero and leaves a new output
    artifact next to the input file. Concurrent invocations are bounded by
    ``max_in_flight``.
    """

    def __init__(self, command: str, timeout_s: float = 20.0, max_in_flight: int = 2):
        if "{input}" not in command:
            raise ValueError("compiler command must contain an {input} placeholder")
        self.command = command
        self.timeout_s = timeout_s
        self._gate = threading.BoundedSemaphore(max_in_flight)

    def compile(self, body: str) -> CompileOutcome:
        with self._gate, tempfile.TemporaryDirectory(prefix="docforge-tikz-") as tmp:
            tex = Path(tmp) / "input.tex"
            tex.write_text(_STANDALONE_DOC % body, encoding="utf-8")
            argv = [part.format(input=str(tex)) for part in shlex.split(self.command)]
            try:
                proc = subprocess.run(
                    argv, cwd=tmp, capture_output=True, text=True,
                    timeout=self.timeout_s,
                )
            except subprocess.TimeoutExpired as exc:
                raise CompilerTimeoutError(
                    f"compiler exceeded {self.timeout_s}s"
                ) from exc
            except OSError as exc:
                return CompileOutcome("fail", f"could not launch compiler: {exc}")
            if proc.returncode != 0:
                tail = (proc.stderr or proc.stdout or "").strip()[-200:]
                return CompileOutcome("fail", f"exit {proc.returncode}: {tail}")
            artifacts = [p for p in Path(tmp).iterdir() if p != tex]
            if not artifacts:
                return CompileOutcome("fail", "compiler produced no output artifact")
            return CompileOutcome("pass")


def compile_check_tikz(body: str, compiler: TikzCompiler | None = None) -> CompileOutcome:
    """Compile through the configured hook, or report skipped when absent."""
    if compiler is None:
        return CompileOutcome("skipped", "no compiler configured")
    return compiler.compile(body)


# ---------------------------------------------------------------------------
# dataset filtering
# ---------------------------------------------------------------------------


class HasGold(Protocol):
    gold: TaggedMarkup


def filter_dataset(
    records: Iterable[HasGold],
) -> tuple[list[HasGold], list[tuple[HasGold, ValidationReport]]]:
    """Partition records by whether their gold passes validation.

    Order is preserved on both sides; kept plus rejected is exactly the
    input.
    """
    kept: list[HasGold] = []
    rejected: list[tuple[HasGold, ValidationReport]] = []
    for record in records:
        report = validate(record.gold)
        if report.ok:
            kept.append(record)
        else:
            rejected.append((record, report))
    return kept, rejected
