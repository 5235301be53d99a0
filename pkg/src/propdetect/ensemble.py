"""Hard-voting combination of K prediction sets.

Each model casts one binary vote per label per example; a label is emitted
when its vote count reaches the threshold (default: strict majority,
floor(K/2)+1). Scores in the inputs are ignored — hard voting is set-based.
An example can end up with an empty label set; callers may opt into the
top-plurality fallback instead.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import LabelVocabulary
from .errors import ValidationError
from .predictions import Prediction


@dataclass
class VoteTally:
    """Per-example vote counts over K models, in first-input id order."""

    counts: dict[str, Counter]
    k: int


def tally(prediction_sets: Sequence[Sequence[Prediction]]) -> VoteTally:
    if len(prediction_sets) < 1:
        raise ValidationError("need at least one prediction set to vote")
    for i, preds in enumerate(prediction_sets, start=1):
        ids = [p.id for p in preds]
        if len(ids) != len(set(ids)):
            raise ValidationError(f"prediction set #{i} contains duplicate ids")
    base = prediction_sets[0]
    base_ids = [p.id for p in base]
    base_id_set = set(base_ids)
    for i, preds in enumerate(prediction_sets[1:], start=2):
        ids = {p.id for p in preds}
        if ids != base_id_set:
            missing = sorted(base_id_set - ids)
            extra = sorted(ids - base_id_set)
            raise ValidationError(
                f"prediction set #{i} covers different ids than #1 "
                f"(missing: {missing[:10]}, extra: {extra[:10]})"
            )
    counts = {example_id: Counter() for example_id in base_ids}
    for preds in prediction_sets:
        for p in preds:
            counts[p.id].update(p.label_set)
    return VoteTally(counts=counts, k=len(prediction_sets))


def majority_threshold(k: int) -> int:
    """Strict majority: more than half of k models."""
    return k // 2 + 1


def _check_vocab(prediction_sets, vocab: LabelVocabulary | None) -> None:
    if vocab is None:
        return
    for i, preds in enumerate(prediction_sets, start=1):
        for p in preds:
            bad = set(p.labels) - set(vocab.labels)
            if bad:
                raise ValidationError(
                    f"prediction set #{i}, id {p.id!r}: labels outside the vocabulary: {sorted(bad)}"
                )


def _ordered(labels: set[str], vocab: LabelVocabulary | None) -> tuple[str, ...]:
    if vocab is not None:
        return tuple(name for name in vocab.labels if name in labels)
    return tuple(sorted(labels))


def vote(prediction_sets: Sequence[Sequence[Prediction]],
         threshold_votes: int | None = None,
         vocab: LabelVocabulary | None = None) -> list[Prediction]:
    """Hard vote over K prediction sets covering the same ids.

    Returns one prediction per example (first input's id order); the label
    set may be empty when nothing reaches the threshold.
    """
    _check_vocab(prediction_sets, vocab)
    t = tally(prediction_sets)
    threshold = majority_threshold(t.k) if threshold_votes is None else threshold_votes
    if threshold < 1:
        raise ValidationError(f"threshold_votes must be >= 1, got {threshold}")
    out = []
    for example_id, votes in t.counts.items():
        chosen = {name for name, n in votes.items() if n >= threshold}
        out.append(Prediction(id=example_id, labels=_ordered(chosen, vocab)))
    return out


def vote_with_fallback(prediction_sets: Sequence[Sequence[Prediction]],
                       mode: str = "none",
                       threshold_votes: int | None = None,
                       vocab: LabelVocabulary | None = None) -> list[Prediction]:
    """``mode="none"`` is plain voting; ``mode="top-plurality"`` replaces empty
    outcomes with every label tied at the maximum vote count (when > 0)."""
    if mode not in ("none", "top-plurality"):
        raise ValidationError(f"unknown fallback mode {mode!r}")
    results = vote(prediction_sets, threshold_votes=threshold_votes, vocab=vocab)
    if mode == "none":
        return results
    t = tally(prediction_sets)
    out = []
    for pred in results:
        if pred.labels:
            out.append(pred)
            continue
        votes = t.counts[pred.id]
        top = max(votes.values(), default=0)
        if top == 0:
            out.append(pred)
            continue
        chosen = {name for name, n in votes.items() if n == top}
        out.append(Prediction(id=pred.id, labels=_ordered(chosen, vocab)))
    return out


def count_empty(preds: Sequence[Prediction]) -> int:
    return sum(1 for p in preds if not p.labels)
