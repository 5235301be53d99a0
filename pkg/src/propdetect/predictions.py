"""Prediction files: one JSON object per line with id, labels and optional scores."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import DataFormatError, ValidationError
from .ioutils import atomic_write_text, iter_lines, json_line


@dataclass(frozen=True)
class Prediction:
    id: str
    labels: tuple[str, ...]
    scores: dict[str, float] | None = None

    @property
    def label_set(self) -> frozenset[str]:
        return frozenset(self.labels)


def load_predictions(path) -> list[Prediction]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataFormatError(f"cannot read predictions: {e.strerror}", path=path) from e
    out: list[Prediction] = []
    seen: set[str] = set()
    for lineno, line in iter_lines(text):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise DataFormatError(f"invalid JSON: {e.msg}", path=path, line=lineno) from e
        pred = _prediction_from_dict(obj, path, lineno)
        if pred.id in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate id {pred.id!r}")
        seen.add(pred.id)
        out.append(pred)
    return out


def _prediction_from_dict(obj, path=None, lineno=None) -> Prediction:
    if not isinstance(obj, dict):
        raise DataFormatError("expected a JSON object", path=path, line=lineno)
    if "id" not in obj or not isinstance(obj["id"], str):
        raise DataFormatError("missing or non-string field 'id'", path=path, line=lineno)
    labels = obj.get("labels")
    if not isinstance(labels, list) or any(not isinstance(x, str) for x in labels):
        raise DataFormatError("field 'labels' must be a list of strings", path=path, line=lineno)
    scores = obj.get("scores")
    if scores is not None:
        if not isinstance(scores, dict) or any(
            not isinstance(k, str) or not isinstance(v, (int, float)) for k, v in scores.items()
        ):
            raise DataFormatError("field 'scores' must map labels to numbers", path=path, line=lineno)
        scores = {k: float(v) for k, v in scores.items()}
    deduped = tuple(dict.fromkeys(labels))
    return Prediction(id=obj["id"], labels=deduped, scores=scores)


def prediction_to_dict(pred: Prediction) -> dict:
    obj: dict = {"id": pred.id, "labels": list(pred.labels)}
    if pred.scores is not None:
        obj["scores"] = dict(pred.scores)
    return obj


def save_predictions(preds: Sequence[Prediction], path) -> None:
    lines = [json_line(prediction_to_dict(p)) for p in preds]
    atomic_write_text(path, "".join(line + "\n" for line in lines))
