"""Readers/writers for the toolkit file formats the adapter exchanges.

These parse the documented interchange formats directly (labels file,
dataset JSONL, prediction JSONL) — the formats, not the toolkit's code, are
the contract.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from . import AdapterError


def read_labels(path) -> list[str]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise AdapterError(f"cannot read labels file {path}: {e.strerror}") from e
    labels = [line.strip() for line in lines if line.strip()]
    if not labels:
        raise AdapterError(f"{path}: labels file contains no labels")
    if len(set(labels)) != len(labels):
        raise AdapterError(f"{path}: labels file contains duplicates")
    return labels


def read_dataset(path, require_labels: bool = False) -> list[dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise AdapterError(f"cannot read dataset {path}: {e.strerror}") from e
    rows: list[dict] = []
    seen: set[str] = set()
    # LF-only split: JSON strings may legally contain U+2028 and similar,
    # which str.splitlines() would treat as record boundaries.
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise AdapterError(f"{path}:{lineno}: invalid JSON: {e.msg}") from e
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), str) \
                or not isinstance(obj.get("text"), str):
            raise AdapterError(f"{path}:{lineno}: expected an object with string id and text")
        labels = obj.get("labels", [])
        if not isinstance(labels, list) or any(not isinstance(x, str) for x in labels):
            raise AdapterError(f"{path}:{lineno}: labels must be a list of strings")
        if require_labels and not labels:
            raise AdapterError(f"{path}:{lineno}: example {obj['id']!r} has no labels")
        if obj["id"] in seen:
            raise AdapterError(f"{path}:{lineno}: duplicate id {obj['id']!r}")
        seen.add(obj["id"])
        rows.append({"id": obj["id"], "text": obj["text"],
                     "labels": list(dict.fromkeys(labels))})
    return rows


def check_labels_covered(rows: list[dict], labels: list[str], where: str) -> None:
    known = set(labels)
    for row in rows:
        unknown = [name for name in row["labels"] if name not in known]
        if unknown:
            raise AdapterError(
                f"{where}: example {row['id']!r} uses labels missing from the labels file: "
                f"{', '.join(unknown)}"
            )


def write_predictions(rows: list[dict], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            for row in rows:
                f.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
