import json
import os
from pathlib import Path

import pytest

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")
os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")

LABELS = ["Loaded Language", "Name Calling", "Doubt"]

# One marker word per label so even a tiny model can latch onto something.
MARKERS = {"Loaded Language": "blaze", "Name Calling": "mock", "Doubt": "maybe"}

SMOKE_ROWS = [
    {"id": "s0", "text": "blaze news today", "labels": ["Loaded Language"]},
    {"id": "s1", "text": "mock the speech", "labels": ["Name Calling"]},
    {"id": "s2", "text": "maybe it happened", "labels": ["Doubt"]},
    {"id": "s3", "text": "blaze and mock", "labels": ["Loaded Language", "Name Calling"]},
    {"id": "s4", "text": "quiet afternoon", "labels": ["Doubt"]},
    {"id": "s5", "text": "blaze blaze blaze", "labels": ["Loaded Language"]},
    {"id": "s6", "text": "they mock again", "labels": ["Name Calling"]},
    {"id": "s7", "text": "maybe maybe", "labels": ["Doubt"]},
    {"id": "s8", "text": "blaze maybe", "labels": ["Loaded Language", "Doubt"]},
    {"id": "s9", "text": "nothing to see", "labels": ["Name Calling"]},
]


def write_jsonl(path: Path, rows) -> None:
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows),
                    encoding="utf-8")


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory) -> Path:
    """A minimal local BERT checkpoint; nothing is downloaded."""
    import torch
    from transformers import BertConfig, BertModel, BertTokenizer

    directory = tmp_path_factory.mktemp("tiny-bert")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += list("abcdefghijklmnopqrstuvwxyz")
    vocab += ["##" + c for c in "abcdefghijklmnopqrstuvwxyz"]
    vocab += list(MARKERS.values()) + ["news", "today", "the", "speech", "it"]
    (directory / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")

    torch.manual_seed(1234)
    config = BertConfig(vocab_size=len(vocab), hidden_size=32, num_hidden_layers=1,
                        num_attention_heads=2, intermediate_size=64,
                        max_position_embeddings=64)
    BertModel(config).save_pretrained(directory)
    BertTokenizer(vocab_file=str(directory / "vocab.txt")).save_pretrained(directory)
    return directory


@pytest.fixture(scope="session")
def smoke_data(tmp_path_factory) -> dict:
    directory = tmp_path_factory.mktemp("smoke-data")
    labels = directory / "labels.txt"
    labels.write_text("\n".join(LABELS) + "\n", encoding="utf-8")
    train = directory / "train.jsonl"
    write_jsonl(train, SMOKE_ROWS)
    valid = directory / "valid.jsonl"
    write_jsonl(valid, SMOKE_ROWS[:6])
    return {"dir": directory, "labels": labels, "train": train, "valid": valid}


def make_config(path: Path, **fields) -> Path:
    path.write_text(json.dumps(fields, ensure_ascii=False, indent=1), encoding="utf-8")
    return path
