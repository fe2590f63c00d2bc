"""Small file helpers: atomic writes and JSONL access."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterator

from .errors import IoError


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a temp file and rename so failures never leave partial files."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"failed to write {path}: {exc}") from exc


def atomic_write_json(path: str | Path, obj: object, *, indent: int | None = 2) -> None:
    atomic_write_text(path, json.dumps(obj, ensure_ascii=False, indent=indent) + "\n")


def read_jsonl(path: str | Path) -> Iterator[dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"failed to read {path}: {exc}") from exc
    for line in text.splitlines():
        if line.strip():
            yield json.loads(line)


def write_jsonl(path: str | Path, objs: list[dict]) -> int:
    atomic_write_text(
        path, "".join(json.dumps(o, ensure_ascii=False) + "\n" for o in objs)
    )
    return len(objs)
