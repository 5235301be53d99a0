"""One-vs-rest logistic regression over hashed n-gram features.

Per-label linear scores pass through a sigmoid and are trained with binary
cross-entropy via seeded mini-batch SGD; after every epoch the validation
micro-F1 decides whether the current parameters become the returned snapshot
(ties keep the earlier epoch). The label decision at predict time is
``probability >= threshold`` with a single-argmax fallback when the set would
be empty, since the gold data never has label-free examples.
"""

from __future__ import annotations

import base64
import gzip
import json
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from . import MODEL_FORMAT_VERSION
from .corpus import Example, LabelVocabulary, encode_matrix
from .errors import DataFormatError, ValidationError
from .features import feature_matrix
from .ioutils import atomic_write_text
from .metrics import confusion, micro_f1
from .predictions import Prediction

PROB_EPS = 1e-12

_GZIP_LEVEL = 6  # fixed so model files are byte-reproducible


@dataclass(frozen=True)
class TrainConfig:
    dim: int = 2 ** 18
    n_min: int = 2
    n_max: int = 5
    learning_rate: float = 0.1
    epochs: int = 50
    l2: float = 1e-4
    batch_size: int = 16
    seed: int = 0
    threshold: float = 0.5

    def validate(self) -> None:
        if self.dim < 1 or self.dim & (self.dim - 1):
            raise ValidationError(f"dim must be a power of two, got {self.dim}")
        if not (1 <= self.n_min <= self.n_max):
            raise ValidationError(f"bad n-gram range ({self.n_min}, {self.n_max})")
        if self.epochs < 0:
            raise ValidationError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be > 0")
        if self.l2 < 0:
            raise ValidationError("l2 must be >= 0")
        if not (0.0 <= self.threshold <= 1.0):
            raise ValidationError("threshold must be in [0, 1]")


@dataclass
class LinearModel:
    weights: np.ndarray  # L x dim
    bias: np.ndarray  # L
    labels: tuple[str, ...]
    config: TrainConfig

    @property
    def vocab_sha256(self) -> str:
        return LabelVocabulary(self.labels).sha256()

    def scores(self, texts: Sequence[str]) -> np.ndarray:
        """N x L sigmoid probabilities."""
        X = feature_matrix(texts, self.config.dim, (self.config.n_min, self.config.n_max))
        return _sigmoid(X @ self.weights.T + self.bias)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def bce_loss_and_grad(weights: np.ndarray, bias: np.ndarray, X: sp.csr_matrix,
                      Y: np.ndarray, l2: float = 0.0):
    """Mean binary cross-entropy over all (example, label) cells plus
    ``l2 * ||weights||^2``, with the exact gradient.

    Probabilities are clamped to [PROB_EPS, 1 - PROB_EPS] before the logs;
    saturated cells contribute zero gradient, matching the clamped loss.
    """
    n, d = X.shape
    l, d2 = weights.shape
    if d != d2 or Y.shape != (n, l) or bias.shape != (l,):
        raise ValidationError(
            f"shape mismatch: X {X.shape}, weights {weights.shape}, bias {bias.shape}, Y {Y.shape}"
        )
    probs = _sigmoid(X @ weights.T + bias)
    clamped = np.clip(probs, PROB_EPS, 1.0 - PROB_EPS)
    cells = n * l
    loss = -(Y * np.log(clamped) + (1.0 - Y) * np.log(1.0 - clamped)).sum() / cells
    loss += l2 * float((weights ** 2).sum())

    dz = np.where((probs > PROB_EPS) & (probs < 1.0 - PROB_EPS), clamped - Y, 0.0) / cells
    grad_w = (X.T @ dz).T + 2.0 * l2 * weights
    grad_b = dz.sum(axis=0)
    return loss, grad_w, grad_b


def choose_labels(probs_row: np.ndarray, threshold: float) -> list[int]:
    """Indices with probability >= threshold; argmax (lowest index on ties)
    when that set is empty, so every example gets at least one label."""
    chosen = np.flatnonzero(probs_row >= threshold)
    if chosen.size == 0:
        return [int(np.argmax(probs_row))]
    return [int(i) for i in chosen]


@dataclass
class TrainResult:
    model: LinearModel
    history: list[dict]
    best_epoch: int


def train(train_examples: Sequence[Example], valid_examples: Sequence[Example],
          vocab: LabelVocabulary, config: TrainConfig = TrainConfig()) -> TrainResult:
    """Seeded mini-batch SGD; returns the parameters of the best epoch by
    validation micro-F1 (earlier epoch wins ties). ``epochs=0`` returns the
    zero-initialized model."""
    config.validate()
    if not train_examples:
        raise ValidationError("training split is empty")
    if not valid_examples:
        raise ValidationError("validation split is empty")
    for example in list(train_examples) + list(valid_examples):
        if not example.labels:
            raise ValidationError(f"example {example.id!r} has no labels; training needs labeled data")

    n_range = (config.n_min, config.n_max)
    X = feature_matrix([e.text for e in train_examples], config.dim, n_range)
    Y = encode_matrix(train_examples, vocab)
    X_valid = feature_matrix([e.text for e in valid_examples], config.dim, n_range)
    valid_gold = list(valid_examples)

    n_labels = len(vocab)
    weights = np.zeros((n_labels, config.dim), dtype=np.float64)
    bias = np.zeros(n_labels, dtype=np.float64)

    best_weights, best_bias = weights.copy(), bias.copy()
    best_f1 = -1.0
    best_epoch = 0
    history: list[dict] = []
    rng = np.random.default_rng(config.seed)
    n = X.shape[0]

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start:start + config.batch_size]
            _, grad_w, grad_b = bce_loss_and_grad(weights, bias, X[batch], Y[batch], config.l2)
            weights -= config.learning_rate * grad_w
            bias -= config.learning_rate * grad_b

        probs = _sigmoid(X_valid @ weights.T + bias)
        preds = [
            Prediction(id=e.id, labels=tuple(vocab.labels[i] for i in choose_labels(probs[row], config.threshold)))
            for row, e in enumerate(valid_gold)
        ]
        f1 = micro_f1(confusion(valid_gold, preds, vocab=vocab))
        history.append({"epoch": epoch, "valid_micro_f1": f1})
        if f1 > best_f1:
            best_f1 = f1
            best_epoch = epoch
            best_weights, best_bias = weights.copy(), bias.copy()

    model = LinearModel(weights=best_weights, bias=best_bias, labels=vocab.labels, config=config)
    return TrainResult(model=model, history=history, best_epoch=best_epoch)


def predict(model: LinearModel, examples: Sequence[Example],
            vocab: LabelVocabulary | None = None) -> list[Prediction]:
    """Score every example; emit chosen labels plus per-label probabilities.

    With ``vocab`` given, its hash must match the vocabulary the model was
    trained with.
    """
    if vocab is not None and vocab.sha256() != model.vocab_sha256:
        raise ValidationError("vocabulary mismatch: model was trained with a different labels file")
    probs = model.scores([e.text for e in examples])
    out = []
    for row, example in enumerate(examples):
        chosen = choose_labels(probs[row], model.config.threshold)
        scores = {name: float(probs[row, i]) for i, name in enumerate(model.labels)}
        out.append(Prediction(
            id=example.id,
            labels=tuple(model.labels[i] for i in chosen),
            scores=scores,
        ))
    return out


def _encode_array(arr: np.ndarray) -> dict:
    raw = np.ascontiguousarray(arr, dtype=np.float64).tobytes()
    packed = gzip.compress(raw, compresslevel=_GZIP_LEVEL, mtime=0)
    return {
        "shape": list(arr.shape),
        "dtype": "float64",
        "encoding": "gzip+base64",
        "data": base64.b64encode(packed).decode("ascii"),
    }


def _decode_array(obj: dict) -> np.ndarray:
    if obj.get("dtype") != "float64" or obj.get("encoding") != "gzip+base64":
        raise DataFormatError(f"unsupported array encoding: {obj.get('dtype')}/{obj.get('encoding')}")
    raw = gzip.decompress(base64.b64decode(obj["data"]))
    return np.frombuffer(raw, dtype=np.float64).reshape(obj["shape"]).copy()


def model_to_payload(model: LinearModel) -> dict:
    return {
        "format": "propdetect.model",
        "format_version": MODEL_FORMAT_VERSION,
        "labels": list(model.labels),
        "labels_sha256": model.vocab_sha256,
        "config": asdict(model.config),
        "weights": _encode_array(model.weights),
        "bias": _encode_array(model.bias),
    }


def model_from_payload(payload: dict) -> LinearModel:
    if payload.get("format") != "propdetect.model":
        raise DataFormatError("not a propdetect model file")
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise DataFormatError(f"unsupported model format version {payload.get('format_version')}")
    labels = tuple(payload["labels"])
    vocab = LabelVocabulary(labels)
    if payload.get("labels_sha256") != vocab.sha256():
        raise ValidationError("model file corrupt: stored vocabulary hash does not match its labels")
    config = TrainConfig(**payload["config"])
    weights = _decode_array(payload["weights"])
    bias = _decode_array(payload["bias"])
    if weights.shape != (len(labels), config.dim) or bias.shape != (len(labels),):
        raise DataFormatError("model file corrupt: array shapes disagree with config")
    return LinearModel(weights=weights, bias=bias, labels=labels, config=config)


def save_model(model: LinearModel, path) -> None:
    atomic_write_text(path, json.dumps(model_to_payload(model), ensure_ascii=False, indent=1) + "\n")


def load_model(path) -> LinearModel:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DataFormatError(f"cannot read model: {e.strerror}", path=path) from e
    except json.JSONDecodeError as e:
        raise DataFormatError(f"invalid JSON: {e.msg}", path=path) from e
    try:
        return model_from_payload(payload)
    except (KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"malformed model file: {e}", path=path) from e
