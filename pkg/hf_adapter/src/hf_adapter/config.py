"""Adapter run configuration, loaded from a JSON file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import AdapterError


@dataclass
class AdapterConfig:
    checkpoint: str
    labels: str | None = None
    train: str | None = None
    valid: str | None = None
    predict_input: str | None = None
    prediction_output: str | None = None
    output_dir: str | None = None
    epochs: int = 30
    learning_rate: float = 3e-6
    threshold: float = 0.5
    seed: int = 0
    batch_size: int = 8
    max_length: int = 128
    device: str = "auto"
    scorer_command: list[str] | None = None

    def validate(self) -> None:
        if self.epochs < 1:
            raise AdapterError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise AdapterError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (0.0 <= self.threshold <= 1.0):
            raise AdapterError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.batch_size < 1 or self.max_length < 8:
            raise AdapterError("batch_size must be >= 1 and max_length >= 8")

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) in (None, "")]
        if missing:
            raise AdapterError(f"config missing required fields: {', '.join(missing)}")

    def manifest_dict(self) -> dict:
        return {
            "checkpoint": self.checkpoint,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "threshold": self.threshold,
            "seed": self.seed,
            "batch_size": self.batch_size,
            "max_length": self.max_length,
        }


_KNOWN_KEYS = {
    "checkpoint", "labels", "train", "valid", "predict_input", "prediction_output",
    "output_dir", "epochs", "learning_rate", "threshold", "seed", "batch_size",
    "max_length", "device", "scorer_command",
}

_PATH_KEYS = {"labels", "train", "valid", "predict_input", "prediction_output", "output_dir"}


def load_config(path) -> AdapterConfig:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise AdapterError(f"cannot read config {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise AdapterError(f"{path}: invalid JSON: {e.msg}") from e
    if not isinstance(obj, dict):
        raise AdapterError(f"{path}: config must be a JSON object")
    unknown = set(obj) - _KNOWN_KEYS
    if unknown:
        raise AdapterError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
    if "checkpoint" not in obj:
        raise AdapterError(f"{path}: config missing 'checkpoint'")

    base = path.parent

    def resolve(value):
        p = Path(value)
        return str(p if p.is_absolute() else base / p)

    kwargs = {}
    for key, value in obj.items():
        if key in _PATH_KEYS and value is not None:
            kwargs[key] = resolve(value)
        elif key == "checkpoint":
            # Resolve only when it points at an existing local directory;
            # otherwise keep hub-style names as-is.
            kwargs[key] = resolve(value) if (base / value).is_dir() or Path(value).is_dir() else value
        else:
            kwargs[key] = value
    config = AdapterConfig(**kwargs)
    config.validate()
    return config
