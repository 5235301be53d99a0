"""Deterministic file helpers shared by all artifact writers."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path


def json_line(obj) -> str:
    """One compact JSONL line, UTF-8 friendly, key order as given."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def json_pretty(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=False) + "\n"


def canonical_json(obj) -> str:
    """Canonical form used for hashing (sorted keys, compact)."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"), sort_keys=True)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def iter_lines(text: str):
    """Split on LF only (tolerating CRLF), numbering from 1.

    str.splitlines() would also split on U+2028/U+0085 and friends, which are
    legal unescaped inside JSON strings — JSONL records must survive them.
    """
    for lineno, line in enumerate(text.split("\n"), start=1):
        yield lineno, line.rstrip("\r")


def atomic_write_text(path, text: str) -> None:
    """Write via temp file + rename so readers never see partial artifacts."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
