"""Multi-label scoring: pooled micro-F1 (the task metric) plus macro-F1.

Pooling is over all (example, label) cells. Zero-denominator conventions are
pinned here because implementations silently disagree on them: any 0/0
precision or recall is 0; an all-zero confusion (nothing to find, nothing
predicted) scores F1 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Example, LabelVocabulary
from .errors import ValidationError
from .predictions import Prediction


@dataclass
class LabelCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0


@dataclass
class ConfusionCounts:
    per_label: dict[str, LabelCounts]

    @property
    def tp(self) -> int:
        return sum(c.tp for c in self.per_label.values())

    @property
    def fp(self) -> int:
        return sum(c.fp for c in self.per_label.values())

    @property
    def fn(self) -> int:
        return sum(c.fn for c in self.per_label.values())


def _id_mismatch_message(gold_ids: set[str], pred_ids: set[str]) -> str:
    missing = sorted(gold_ids - pred_ids)
    extra = sorted(pred_ids - gold_ids)
    parts = []
    if missing:
        parts.append(f"missing from predictions: {', '.join(missing[:10])}"
                     + (" ..." if len(missing) > 10 else ""))
    if extra:
        parts.append(f"not in gold: {', '.join(extra[:10])}" + (" ..." if len(extra) > 10 else ""))
    return "; ".join(parts)


def confusion(gold: Sequence[Example], pred: Sequence[Prediction],
              vocab: LabelVocabulary | None = None) -> ConfusionCounts:
    """Per-label tp/fp/fn over matching id sets.

    The label space is the vocabulary when given (all labels must belong to
    it), otherwise the union of labels observed in gold and predictions.
    """
    gold_ids = {e.id for e in gold}
    pred_ids = {p.id for p in pred}
    if len(gold_ids) != len(gold):
        raise ValidationError("gold dataset contains duplicate ids")
    if len(pred_ids) != len(pred):
        raise ValidationError("predictions contain duplicate ids")
    if gold_ids != pred_ids:
        raise ValidationError("gold/prediction id mismatch: " + _id_mismatch_message(gold_ids, pred_ids))

    if vocab is not None:
        labels = list(vocab.labels)
        allowed = set(labels)
        for e in gold:
            bad = set(e.labels) - allowed
            if bad:
                raise ValidationError(f"gold example {e.id!r} has labels outside the vocabulary: {sorted(bad)}")
        for p in pred:
            bad = set(p.labels) - allowed
            if bad:
                raise ValidationError(f"prediction {p.id!r} has labels outside the vocabulary: {sorted(bad)}")
    else:
        union: set[str] = set()
        for e in gold:
            union.update(e.labels)
        for p in pred:
            union.update(p.labels)
        labels = sorted(union)

    counts = {name: LabelCounts() for name in labels}
    pred_by_id: Mapping[str, Prediction] = {p.id: p for p in pred}
    for e in gold:
        g = e.label_set
        p = pred_by_id[e.id].label_set
        for name in g & p:
            counts[name].tp += 1
        for name in p - g:
            counts[name].fp += 1
        for name in g - p:
            counts[name].fn += 1
    return ConfusionCounts(per_label=counts)


def _f1(tp: int, fp: int, fn: int) -> float:
    if tp == 0 and fp == 0 and fn == 0:
        return 1.0
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def micro_f1(c: ConfusionCounts) -> float:
    return _f1(c.tp, c.fp, c.fn)


def macro_f1(c: ConfusionCounts) -> float:
    """Unweighted mean of per-label F1 over labels that occur at all
    (tp+fp+fn > 0); 1.0 when no label occurs."""
    scores = [
        _f1(lc.tp, lc.fp, lc.fn)
        for lc in c.per_label.values()
        if lc.tp + lc.fp + lc.fn > 0
    ]
    if not scores:
        return 1.0
    return sum(scores) / len(scores)


def per_label_report(c: ConfusionCounts) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for name in sorted(c.per_label):
        lc = c.per_label[name]
        precision = lc.tp / (lc.tp + lc.fp) if lc.tp + lc.fp > 0 else 0.0
        recall = lc.tp / (lc.tp + lc.fn) if lc.tp + lc.fn > 0 else 0.0
        out[name] = {
            "tp": lc.tp, "fp": lc.fp, "fn": lc.fn,
            "p": precision, "r": recall, "f1": _f1(lc.tp, lc.fp, lc.fn),
        }
    return out


def score_report(gold: Sequence[Example], pred: Sequence[Prediction],
                 vocab: LabelVocabulary | None = None, percent: bool = False,
                 per_label: bool = False) -> dict:
    """JSON-ready report; ``percent`` switches to 100-scale with 3 decimals."""
    c = confusion(gold, pred, vocab=vocab)
    micro, macro = micro_f1(c), macro_f1(c)
    if percent:
        fmt = lambda x: round(100.0 * x, 3)
    else:
        fmt = lambda x: round(x, 6)
    report = {
        "micro_f1": fmt(micro),
        "macro_f1": fmt(macro),
        "counts": {"tp": c.tp, "fp": c.fp, "fn": c.fn},
    }
    if per_label:
        table = per_label_report(c)
        for row in table.values():
            for key in ("p", "r", "f1"):
                row[key] = fmt(row[key])
        report["per_label"] = table
    return report
