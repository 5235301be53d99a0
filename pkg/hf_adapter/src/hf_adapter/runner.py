"""Fine-tuning and inference around Hugging Face sequence classifiers.

The classifier head is multi-label (sigmoid per label, binary cross-entropy
loss). Epoch selection follows validation micro-F1 as reported by the main
toolkit's scorer; the per-example decision rule is probability >= threshold
with a highest-score fallback so no example ends up label-free.
"""

from __future__ import annotations

import json
import os
import random
import tempfile
from pathlib import Path

import numpy as np

from . import AdapterError
from .config import AdapterConfig
from .data import (check_labels_covered, read_dataset, read_labels,
                   write_predictions)
from .scoring import score_micro_f1

os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")

import torch  # noqa: E402
from transformers import AutoModelForSequenceClassification, AutoTokenizer  # noqa: E402
from transformers.utils import logging as hf_logging  # noqa: E402

hf_logging.set_verbosity_error()


def _resolve_device(requested: str) -> torch.device:
    if requested == "auto":
        return torch.device("cuda" if torch.cuda.is_available() else "cpu")
    if requested == "cuda" and not torch.cuda.is_available():
        raise AdapterError("config requests device 'cuda' but CUDA is not available")
    return torch.device(requested)


def _seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed & 0xFFFFFFFF)
    torch.manual_seed(seed)
    torch.set_num_threads(1)  # keeps CPU runs reproducible


def _load_model(checkpoint: str, n_labels: int):
    try:
        tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        model = AutoModelForSequenceClassification.from_pretrained(
            checkpoint, num_labels=n_labels,
            problem_type="multi_label_classification",
        )
    except (OSError, ValueError, EnvironmentError) as e:
        raise AdapterError(f"cannot load checkpoint {checkpoint!r}: {e}") from e
    return tokenizer, model


def _batches(n: int, batch_size: int, order=None):
    order = list(range(n)) if order is None else list(order)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def _choose(probs_row: np.ndarray, threshold: float) -> list[int]:
    chosen = np.flatnonzero(probs_row >= threshold)
    if chosen.size == 0:
        return [int(np.argmax(probs_row))]
    return [int(i) for i in chosen]


@torch.no_grad()
def _predict_rows(model, tokenizer, rows, labels, config, device) -> list[dict]:
    model.eval()
    out: list[dict] = []
    for batch in _batches(len(rows), config.batch_size):
        texts = [rows[i]["text"] for i in batch]
        enc = tokenizer(texts, padding=True, truncation=True,
                        max_length=config.max_length, return_tensors="pt").to(device)
        logits = model(**enc).logits.detach().cpu().to(torch.float64).numpy()
        probs = 1.0 / (1.0 + np.exp(-logits))
        for row_index, i in enumerate(batch):
            chosen = _choose(probs[row_index], config.threshold)
            out.append({
                "id": rows[i]["id"],
                "labels": [labels[j] for j in chosen],
                "scores": {name: float(probs[row_index, j]) for j, name in enumerate(labels)},
            })
    return out


def _multi_hot(row_labels, label_index) -> list[float]:
    bits = [0.0] * len(label_index)
    for name in row_labels:
        bits[label_index[name]] = 1.0
    return bits


def finetune(config: AdapterConfig) -> Path:
    """Train for config.epochs, keep the epoch with the best validation
    micro-F1 (toolkit-scored), save it under config.output_dir."""
    config.validate()
    config.require("labels", "train", "valid", "output_dir")
    labels = read_labels(config.labels)
    train_rows = read_dataset(config.train, require_labels=True)
    valid_rows = read_dataset(config.valid, require_labels=True)
    check_labels_covered(train_rows, labels, where=str(config.train))
    check_labels_covered(valid_rows, labels, where=str(config.valid))
    label_index = {name: i for i, name in enumerate(labels)}

    _seed_everything(config.seed)
    device = _resolve_device(config.device)
    tokenizer, model = _load_model(config.checkpoint, len(labels))
    model.to(device)
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    shuffler = torch.Generator().manual_seed(config.seed)

    targets = torch.tensor([_multi_hot(r["labels"], label_index) for r in train_rows])
    best_f1 = -1.0
    best_epoch = 0
    best_state: dict | None = None
    history: list[dict] = []

    with tempfile.TemporaryDirectory(prefix="hf-adapter-eval-") as tmp:
        tmp_pred = Path(tmp) / "valid_preds.jsonl"
        for epoch in range(1, config.epochs + 1):
            model.train()
            order = torch.randperm(len(train_rows), generator=shuffler).tolist()
            for batch in _batches(len(train_rows), config.batch_size, order):
                texts = [train_rows[i]["text"] for i in batch]
                enc = tokenizer(texts, padding=True, truncation=True,
                                max_length=config.max_length, return_tensors="pt").to(device)
                loss = model(**enc, labels=targets[batch].to(device)).loss
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()

            preds = _predict_rows(model, tokenizer, valid_rows, labels, config, device)
            write_predictions(preds, tmp_pred)
            f1 = score_micro_f1(config.valid, tmp_pred, config.labels,
                                scorer_command=config.scorer_command)
            history.append({"epoch": epoch, "valid_micro_f1": f1})
            if f1 > best_f1:
                best_f1 = f1
                best_epoch = epoch
                best_state = {k: v.detach().cpu().clone() for k, v in model.state_dict().items()}

    model.load_state_dict(best_state)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    (out_dir / "labels.txt").write_text("\n".join(labels) + "\n", encoding="utf-8")
    manifest = dict(config.manifest_dict(),
                    best_epoch=best_epoch, best_valid_micro_f1=best_f1, history=history)
    (out_dir / "adapter_manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return out_dir


def predict_file(config: AdapterConfig) -> Path:
    """Run inference over config.predict_input, write prediction JSONL."""
    config.validate()
    config.require("predict_input", "prediction_output")
    labels_path = config.labels
    checkpoint_labels = Path(config.checkpoint) / "labels.txt"
    if labels_path is None and checkpoint_labels.is_file():
        labels_path = str(checkpoint_labels)
    if labels_path is None:
        raise AdapterError("no labels file: set 'labels' or use a checkpoint that carries labels.txt")
    labels = read_labels(labels_path)

    rows = read_dataset(config.predict_input)
    out_path = Path(config.prediction_output)
    if not rows:
        write_predictions([], out_path)
        return out_path

    _seed_everything(config.seed)
    device = _resolve_device(config.device)
    tokenizer, model = _load_model(config.checkpoint, len(labels))
    model.to(device)
    preds = _predict_rows(model, tokenizer, rows, labels, config, device)
    write_predictions(preds, out_path)
    return out_path
