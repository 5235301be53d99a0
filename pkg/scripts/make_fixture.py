#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture under tests/data/fixture/.

The fixture imitates the target data shape: short Arabic-flavored tweets with
URLs/mentions/hashtags/emoji, a skewed multi-label distribution over
technique-style labels, and one 7-label example. Texts carry one marker word
per gold label plus noise (with a little label noise), so seeded baseline
models land in the 0.8-1.0 micro-F1 band without being identical.

After writing the files the script runs the full pipeline once and asserts
the regression property the e2e suite relies on: the 3-seed vote scores at
least as well as the worst single model.
"""

from __future__ import annotations

import json
import random
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from propdetect import corpus  # noqa: E402
from propdetect.ioutils import atomic_write_text, json_line  # noqa: E402

OUT = REPO / "tests" / "data" / "fixture"

LABELS = [
    "Loaded Language",
    "Name Calling",
    "Exaggeration",
    "Flag Waving",
    "Doubt",
    "Appeal to Fear",
    "Slogans",
    "Smears",
]

MARKERS = {
    "Loaded Language": "تهويل",
    "Name Calling": "تحقير",
    "Exaggeration": "مبالغة",
    "Flag Waving": "وطنية",
    "Doubt": "تشكيك",
    "Appeal to Fear": "تخويف",
    "Slogans": "شعارات",
    "Smears": "تشويه",
}

WEIGHTS = [30, 18, 12, 8, 6, 4, 3, 2]

NOISE = ["اليوم", "غدا", "الناس", "خبر", "عاجل", "الآن", "صورة", "فيديو",
         "تقرير", "مباشر", "breaking", "news"]
EMOJI = ["😀", "🔥", "🚨", "🎉", "💬"]
HASHTAGS = ["#اخبار_اليوم", "#breaking_news", "#عاجل_الان", "#live_now"]
URLS = ["http://t.co/ab12", "https://example.org/x?y=1", "www.short.link/z9"]
MENTIONS = ["@news_desk", "@مراسل", "@user123"]


def make_example(rng: random.Random, idx: int, split: str) -> corpus.Example:
    k = rng.choices([1, 2, 3], weights=[0.66, 0.24, 0.10])[0]
    labels: list[str] = []
    while len(labels) < k:
        name = rng.choices(LABELS, weights=WEIGHTS)[0]
        if name not in labels:
            labels.append(name)

    tokens = [MARKERS[name] for name in labels]
    if rng.random() < 0.10 and len(tokens) > 1:
        tokens.pop(rng.randrange(len(tokens)))  # label without its marker
    if rng.random() < 0.10:
        tokens.append(MARKERS[rng.choice(LABELS)])  # marker without its label
    tokens += rng.sample(NOISE, rng.randint(2, 4))
    if rng.random() < 0.4:
        tokens.append(rng.choice(URLS))
    if rng.random() < 0.4:
        tokens.append(rng.choice(MENTIONS))
    if rng.random() < 0.5:
        tokens.append(rng.choice(HASHTAGS))
    if rng.random() < 0.4:
        tokens.append(rng.choice(EMOJI))
    rng.shuffle(tokens)
    return corpus.Example(id=f"{split}-{idx:03d}", text=" ".join(tokens), labels=tuple(labels))


def make_split(rng: random.Random, split: str, n: int) -> list[corpus.Example]:
    return [make_example(rng, i, split) for i in range(n)]


def main() -> int:
    rng = random.Random(20220704)
    train = make_split(rng, "train", 64)
    valid = make_split(rng, "valid", 24)
    test = make_split(rng, "test", 24)

    seven = LABELS[:7]
    train[10] = corpus.Example(
        id=train[10].id,
        text=" ".join([MARKERS[name] for name in seven] + ["عاجل", "#breaking_news"]),
        labels=tuple(seven),
    )

    OUT.mkdir(parents=True, exist_ok=True)
    atomic_write_text(OUT / "labels.txt", "\n".join(LABELS) + "\n")
    corpus.save_dataset(train, OUT / "train.jsonl")
    corpus.save_dataset(valid, OUT / "valid.jsonl")
    corpus.save_dataset(test, OUT / "test.jsonl")

    config = {
        "paths": {"labels": "labels.txt", "train": "train.jsonl",
                  "valid": "valid.jsonl", "test": "test.jsonl"},
        "out_dir": "run_output",
        "preprocess": {"enabled": True, "drop_hashtag_body": False},
        "oversample": {"enabled": True, "clip": 10},
        "baseline": {"dim": 4096, "n_min": 2, "n_max": 4, "learning_rate": 10.0,
                     "epochs": 60, "l2": 0.0001, "batch_size": 16, "threshold": 0.5},
        "seeds": [11, 22, 33],
        "ensemble": {"threshold_votes": None, "fallback": "none"},
    }
    atomic_write_text(OUT / "run_config.json", json.dumps(config, indent=2) + "\n")

    # Sanity-run the pipeline and check the regression property the e2e
    # suite asserts (ensemble >= worst single model).
    from propdetect.client import ServiceClient
    from propdetect.pipeline import load_run_config, run_pipeline

    with tempfile.TemporaryDirectory() as tmp:
        run_config = load_run_config(OUT / "run_config.json", out_dir_override=tmp)
        with ServiceClient() as client:
            run_pipeline(run_config, client)
        score = json.loads((Path(tmp) / "score.json").read_text(encoding="utf-8"))
    singles = {name: report["micro_f1"] for name, report in score["per_model"].items()}
    ensemble_f1 = score["ensemble"]["micro_f1"]
    print("single-model micro-F1:", singles)
    print("ensemble micro-F1:", ensemble_f1)
    assert ensemble_f1 >= min(singles.values()), "fixture must satisfy vote >= worst single"
    assert 0.6 <= min(singles.values()) <= 1.0, "fixture should be learnable but not trivial"
    print("fixture written to", OUT)
    return 0


if __name__ == "__main__":
    sys.exit(main())
