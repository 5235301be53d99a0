"""Dataset ingest, label vocabulary, multi-hot encoding and corpus statistics.

Canonical dataset format is JSONL: one object per line with fields
``id`` (str), ``text`` (str) and optional ``labels`` (list of str).
A labels file holds one label per non-blank line; line order defines the
multi-hot index order. A TSV import (id<TAB>text<TAB>comma-separated labels)
is accepted for convenience.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataFormatError, ValidationError
from .ioutils import atomic_write_text, iter_lines, json_line, sha256_text


class LabelVocabulary:
    """Ordered, duplicate-free label names; position = multi-hot index."""

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValidationError("label vocabulary is empty")
        index: dict[str, int] = {}
        for i, name in enumerate(labels):
            if not name:
                raise ValidationError(f"empty label name at index {i}")
            if name in index:
                raise ValidationError(f"duplicate label {name!r}")
            index[name] = i
        self.labels = labels
        self._index = index

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def __iter__(self):
        return iter(self.labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelVocabulary) and self.labels == other.labels

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValidationError(f"unknown label {label!r}") from None

    def sha256(self) -> str:
        """Hash of the newline-joined label list; identifies the vocabulary."""
        return sha256_text("\n".join(self.labels))


@dataclass(frozen=True)
class Example:
    """One tweet: unique id, raw or normalized text, and its label set.

    ``labels`` keeps first-seen order (deterministic serialization) but is
    compared and counted with set semantics.
    """

    id: str
    text: str
    labels: tuple[str, ...] = ()

    @property
    def label_set(self) -> frozenset[str]:
        return frozenset(self.labels)


@dataclass
class DatasetStats:
    per_label_counts: dict[str, int]
    labels_per_example_histogram: dict[int, int]
    n_examples: int

    def to_json_dict(self) -> dict:
        return {
            "per_label_counts": {k: self.per_label_counts[k] for k in sorted(self.per_label_counts)},
            "labels_per_example_histogram": {
                str(k): self.labels_per_example_histogram[k]
                for k in sorted(self.labels_per_example_histogram)
            },
            "n_examples": self.n_examples,
        }


def load_vocabulary(path) -> LabelVocabulary:
    """Read a labels file: one label per non-blank line, UTF-8."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataFormatError(f"cannot read labels file: {e.strerror}", path=path) from e
    labels = [line.strip() for _, line in iter_lines(text) if line.strip()]
    if not labels:
        raise DataFormatError("labels file contains no labels", path=path)
    seen = set()
    for name in labels:
        if name in seen:
            raise ValidationError(f"{path}: duplicate label {name!r}")
        seen.add(name)
    return LabelVocabulary(labels)


def _dedupe(labels: Iterable[str]) -> tuple[str, ...]:
    out, seen = [], set()
    for name in labels:
        if name not in seen:
            seen.add(name)
            out.append(name)
    return tuple(out)


def _check_example(example: Example, vocab: LabelVocabulary | None, require_labels: bool,
                   path, line) -> None:
    if require_labels and not example.labels:
        raise ValidationError(f"{path}:{line}: example {example.id!r} has no labels")
    if vocab is not None:
        for name in example.labels:
            if name not in vocab:
                raise ValidationError(f"{path}:{line}: unknown label {name!r} on example {example.id!r}")


def load_dataset(path, vocab: LabelVocabulary | None = None,
                 require_labels: bool = False) -> list[Example]:
    """Parse a dataset file (JSONL, or TSV when the path ends in .tsv).

    With ``vocab`` given every label must belong to it; with
    ``require_labels`` every example must carry at least one label.
    Raises :class:`DataFormatError` with the offending line number on
    malformed input and :class:`ValidationError` on duplicate ids or
    unknown labels.
    """
    path = Path(path)
    if path.suffix == ".tsv":
        return load_tsv_dataset(path, vocab=vocab, require_labels=require_labels)
    examples: list[Example] = []
    seen_ids: set[str] = set()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataFormatError(f"cannot read dataset: {e.strerror}", path=path) from e
    for lineno, line in iter_lines(text):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise DataFormatError(f"invalid JSON: {e.msg}", path=path, line=lineno) from e
        example = _example_from_dict(obj, path, lineno)
        if example.id in seen_ids:
            raise ValidationError(f"{path}:{lineno}: duplicate id {example.id!r}")
        seen_ids.add(example.id)
        _check_example(example, vocab, require_labels, path, lineno)
        examples.append(example)
    return examples


def _example_from_dict(obj, path, lineno) -> Example:
    if not isinstance(obj, dict):
        raise DataFormatError("expected a JSON object", path=path, line=lineno)
    for key in ("id", "text"):
        if key not in obj:
            raise DataFormatError(f"missing field {key!r}", path=path, line=lineno)
        if not isinstance(obj[key], str):
            raise DataFormatError(f"field {key!r} must be a string", path=path, line=lineno)
    labels = obj.get("labels", [])
    if not isinstance(labels, list) or any(not isinstance(x, str) for x in labels):
        raise DataFormatError("field 'labels' must be a list of strings", path=path, line=lineno)
    return Example(id=obj["id"], text=obj["text"], labels=_dedupe(labels))


def load_tsv_dataset(path, vocab: LabelVocabulary | None = None,
                     require_labels: bool = False) -> list[Example]:
    """TSV convenience import: id<TAB>text<TAB>comma-separated labels.

    The label column cannot represent label names containing commas; use
    JSONL for those vocabularies.
    """
    path = Path(path)
    examples: list[Example] = []
    seen_ids: set[str] = set()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataFormatError(f"cannot read dataset: {e.strerror}", path=path) from e
    for lineno, line in iter_lines(text):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            raise DataFormatError(f"expected 2 or 3 tab-separated fields, got {len(parts)}",
                                  path=path, line=lineno)
        example_id, body = parts[0], parts[1]
        raw = parts[2] if len(parts) == 3 else ""
        labels = _dedupe(name.strip() for name in raw.split(",") if name.strip())
        example = Example(id=example_id, text=body, labels=labels)
        if not example.id:
            raise DataFormatError("empty id", path=path, line=lineno)
        if example.id in seen_ids:
            raise ValidationError(f"{path}:{lineno}: duplicate id {example.id!r}")
        seen_ids.add(example.id)
        _check_example(example, vocab, require_labels, path, lineno)
        examples.append(example)
    return examples


def example_to_dict(example: Example) -> dict:
    return {"id": example.id, "text": example.text, "labels": list(example.labels)}


def save_dataset(examples: Sequence[Example], path) -> None:
    lines = [json_line(example_to_dict(e)) for e in examples]
    atomic_write_text(path, "".join(line + "\n" for line in lines))


def encode(labels: Iterable[str], vocab: LabelVocabulary) -> np.ndarray:
    """Multi-hot encode a label set: bit i set iff vocab.labels[i] is present."""
    bits = np.zeros(len(vocab), dtype=np.uint8)
    for name in labels:
        bits[vocab.index(name)] = 1
    return bits


def decode(bits: Sequence[int], vocab: LabelVocabulary) -> set[str]:
    if len(bits) != len(vocab):
        raise ValidationError(f"multi-hot length {len(bits)} != vocabulary size {len(vocab)}")
    return {vocab.labels[i] for i, bit in enumerate(bits) if bit}


def encode_matrix(examples: Sequence[Example], vocab: LabelVocabulary) -> np.ndarray:
    """N x L multi-hot matrix (float64, ready for the trainer)."""
    out = np.zeros((len(examples), len(vocab)), dtype=np.float64)
    for row, example in enumerate(examples):
        for name in example.labels:
            out[row, vocab.index(name)] = 1.0
    return out


def compute_stats(examples: Sequence[Example]) -> DatasetStats:
    """Per-label occurrence counts and the labels-per-example histogram."""
    per_label: Counter[str] = Counter()
    histogram: Counter[int] = Counter()
    for example in examples:
        per_label.update(example.labels)
        histogram[len(example.labels)] += 1
    return DatasetStats(
        per_label_counts=dict(per_label),
        labels_per_example_histogram=dict(histogram),
        n_examples=len(examples),
    )
