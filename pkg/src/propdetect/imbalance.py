"""Oversampling by duplication of examples carrying rare labels.

The plan targets the mean per-label occurrence count: an example whose labels
are all rarer than that mean is repeated ``round(mean / rarest_count)`` times
(half away from zero), clipped to ``clip``. Examples carrying any label at or
above the mean are left alone — duplicating those would feed the imbalance
instead of fixing it.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import Example
from .errors import ValidationError


@dataclass
class OversamplePlan:
    per_example_copies: dict[str, int]
    label_counts_before: dict[str, int]
    label_counts_after: dict[str, int]
    average_count: float
    clip: int

    def to_json_dict(self) -> dict:
        return {
            "average_count": self.average_count,
            "clip": self.clip,
            "per_example_copies": dict(self.per_example_copies),
            "label_counts_before": {k: self.label_counts_before[k] for k in sorted(self.label_counts_before)},
            "label_counts_after": {k: self.label_counts_after[k] for k in sorted(self.label_counts_after)},
        }


def _round_half_away_from_zero(x: float) -> int:
    # Builtin round() is banker's rounding; the plan must not depend on that.
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def plan_oversample(examples: Sequence[Example], clip: int = 10) -> OversamplePlan:
    """Compute per-example copy counts from label frequencies.

    Requires a non-empty dataset where every example is labeled; ``clip``
    bounds the copy count from above.
    """
    if clip < 1:
        raise ValidationError(f"clip must be >= 1, got {clip}")
    if not examples:
        raise ValidationError("cannot plan oversampling for an empty dataset")
    counts: Counter[str] = Counter()
    for example in examples:
        if not example.labels:
            raise ValidationError(f"example {example.id!r} has no labels; oversampling needs a labeled dataset")
        counts.update(example.labels)

    average = sum(counts.values()) / len(counts)
    copies: dict[str, int] = {}
    for example in examples:
        eligible = all(counts[name] < average for name in example.labels)
        if eligible:
            rarest = min(counts[name] for name in example.labels)
            copies[example.id] = min(clip, _round_half_away_from_zero(average / rarest))
        else:
            copies[example.id] = 1

    after: Counter[str] = Counter()
    for example in examples:
        for name in example.labels:
            after[name] += copies[example.id]
    return OversamplePlan(
        per_example_copies=copies,
        label_counts_before=dict(counts),
        label_counts_after=dict(after),
        average_count=average,
        clip=clip,
    )


def materialize(examples: Sequence[Example], plan: OversamplePlan) -> list[Example]:
    """Expand the dataset per plan; duplicates follow their original with
    ``#dup<k>`` id suffixes so ids stay unique."""
    known = {example.id for example in examples}
    unknown = sorted(set(plan.per_example_copies) - known)
    if unknown:
        raise ValidationError(f"plan references unknown ids: {', '.join(unknown[:10])}")
    out: list[Example] = []
    for example in examples:
        n = plan.per_example_copies.get(example.id, 1)
        out.append(example)
        for k in range(1, n):
            out.append(Example(id=f"{example.id}#dup{k}", text=example.text, labels=example.labels))
    return out
