"""End-to-end run orchestration: preprocess -> (oversample) -> train K seeds ->
predict -> vote -> score, with a manifest tying artifacts to the exact config.

Runs are reproducible: a fixed config (seeds included) yields byte-identical
artifacts, so manifests carry content hashes and no timestamps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, corpus
from .client import ServiceClient
from .errors import DataFormatError, ToolkitError, ValidationError
from .ioutils import (atomic_write_text, canonical_json, iter_lines, json_line,
                      json_pretty, sha256_file, sha256_text)


@dataclass
class RunConfig:
    labels: str
    train: str
    valid: str
    test: str
    out_dir: str
    preprocess_enabled: bool = True
    drop_hashtag_body: bool = False
    oversample_enabled: bool = False
    oversample_clip: int = 10
    baseline: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=lambda: [0])
    vote_threshold: int | None = None
    vote_fallback: str = "none"

    def resolved(self) -> dict:
        # Deliberately excludes out_dir: where artifacts land is not part of
        # the run identity, and manifests must be byte-stable across runs.
        return {
            "paths": {"labels": self.labels, "train": self.train,
                      "valid": self.valid, "test": self.test},
            "preprocess": {"enabled": self.preprocess_enabled,
                           "drop_hashtag_body": self.drop_hashtag_body},
            "oversample": {"enabled": self.oversample_enabled, "clip": self.oversample_clip},
            "baseline": dict(self.baseline),
            "seeds": list(self.seeds),
            "ensemble": {"threshold_votes": self.vote_threshold, "fallback": self.vote_fallback},
        }


def load_run_config(path, out_dir_override: str | None = None,
                    seed_override: int | None = None) -> RunConfig:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise DataFormatError(f"cannot read config: {e.strerror}", path=path) from e
    except json.JSONDecodeError as e:
        raise DataFormatError(f"invalid JSON: {e.msg}", path=path) from e
    if not isinstance(obj, dict):
        raise DataFormatError("config must be a JSON object", path=path)

    paths = obj.get("paths", {})
    for key in ("labels", "train", "valid", "test"):
        if key not in paths:
            raise ValidationError(f"config missing paths.{key}")
    pre = obj.get("preprocess", {})
    over = obj.get("oversample", {})
    ens = obj.get("ensemble", {})
    seeds = obj.get("seeds")
    if seeds is None:
        seeds = [int(obj.get("seed", 0))]
    if not isinstance(seeds, list) or not seeds or any(not isinstance(s, int) for s in seeds):
        raise ValidationError("config seeds must be a non-empty list of integers")

    base = path.parent

    def resolve(p: str) -> str:
        q = Path(p)
        return str(q if q.is_absolute() else base / q)

    config = RunConfig(
        labels=resolve(paths["labels"]),
        train=resolve(paths["train"]),
        valid=resolve(paths["valid"]),
        test=resolve(paths["test"]),
        out_dir=out_dir_override or resolve(obj.get("out_dir", "run_output")),
        preprocess_enabled=bool(pre.get("enabled", True)),
        drop_hashtag_body=bool(pre.get("drop_hashtag_body", False)),
        oversample_enabled=bool(over.get("enabled", False)),
        oversample_clip=int(over.get("clip", 10)),
        baseline=dict(obj.get("baseline", {})),
        seeds=[int(s) for s in seeds],
        vote_threshold=ens.get("threshold_votes"),
        vote_fallback=ens.get("fallback", "none"),
    )
    if seed_override is not None:
        config.seeds = [seed_override + i for i in range(len(config.seeds))]
    return config


def validate_run_config(config: RunConfig) -> None:
    for name in ("labels", "train", "valid", "test"):
        p = Path(getattr(config, name))
        if not p.is_file():
            raise ValidationError(f"config path {name} does not exist: {p}")
    if config.vote_fallback not in ("none", "top-plurality"):
        raise ValidationError(f"unknown vote fallback {config.vote_fallback!r}")
    if len(set(config.seeds)) != len(config.seeds):
        raise ValidationError("config seeds must be distinct")


def _records(examples) -> list[dict]:
    return [corpus.example_to_dict(e) for e in examples]


def _write_jsonl(path, records: list[dict]) -> None:
    atomic_write_text(path, "".join(json_line(r) + "\n" for r in records))


class _Stage:
    """Re-raises toolkit errors with the failing stage's name attached."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, ToolkitError):
            raise ToolkitError(f"stage {self.name}: {exc}") from exc
        return False


def run_pipeline(config: RunConfig, client: ServiceClient) -> dict:
    """Execute all enabled stages; returns the manifest dict."""
    validate_run_config(config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: list[str] = []
    stages: list[str] = []

    vocab = corpus.load_vocabulary(config.labels)
    labels = list(vocab.labels)
    train_examples = corpus.load_dataset(config.train, vocab=vocab, require_labels=True)
    valid_examples = corpus.load_dataset(config.valid, vocab=vocab, require_labels=True)
    test_examples = corpus.load_dataset(config.test, vocab=vocab)
    test_is_gold = all(e.labels for e in test_examples)

    train_records = _records(train_examples)
    valid_records = _records(valid_examples)
    test_records = _records(test_examples)

    if config.preprocess_enabled:
        with _Stage("preprocess"):
            stages.append("preprocess")
            for name, records in (("train", train_records), ("valid", valid_records),
                                  ("test", test_records)):
                result = client.preprocess(records, drop_hashtag_body=config.drop_hashtag_body)
                records[:] = result["records"]
                artifact = f"{name}.normalized.jsonl"
                _write_jsonl(out / artifact, records)
                artifacts.append(artifact)

    if config.oversample_enabled:
        with _Stage("oversample"):
            stages.append("oversample")
            result = client.oversample(train_records, clip=config.oversample_clip)
            train_records = result["records"]
            _write_jsonl(out / "train.oversampled.jsonl", train_records)
            atomic_write_text(out / "oversample_plan.json", json_pretty(result["plan"]))
            artifacts += ["train.oversampled.jsonl", "oversample_plan.json"]

    prediction_files: list[str] = []
    with _Stage("train"):
        stages.append("train")
        for seed in config.seeds:
            train_config = dict(config.baseline)
            train_config["seed"] = seed
            result = client.train(train_records, valid_records, labels, train_config)
            model_artifact = f"model_seed{seed}.json"
            atomic_write_text(out / model_artifact,
                              json.dumps(result["model"], ensure_ascii=False, indent=1) + "\n")
            artifacts.append(model_artifact)

            preds = client.predict(result["model"], test_records, labels=labels)
            pred_artifact = f"preds_seed{seed}.jsonl"
            _write_jsonl(out / pred_artifact, preds["predictions"])
            artifacts.append(pred_artifact)
            prediction_files.append(pred_artifact)

    with _Stage("vote"):
        stages.append("vote")
        prediction_sets = [
            [json.loads(line)
             for _, line in iter_lines((out / name).read_text(encoding="utf-8")) if line]
            for name in prediction_files
        ]
        voted = client.vote(prediction_sets, threshold_votes=config.vote_threshold,
                            fallback=config.vote_fallback, labels=labels)
        _write_jsonl(out / "ensemble.jsonl", voted["predictions"])
        artifacts.append("ensemble.jsonl")
        vote_summary = {"k": voted["k"], "threshold_votes": voted["threshold_votes"],
                        "empty_predictions": voted["empty_predictions"]}

    if test_is_gold:
        with _Stage("score"):
            stages.append("score")
            per_model = {}
            for name, preds in zip(prediction_files, prediction_sets):
                per_model[name] = client.score(test_records, preds, labels=labels)
            ensemble_report = client.score(test_records, voted["predictions"], labels=labels)
            score_payload = {"ensemble": ensemble_report, "per_model": per_model,
                             "vote": vote_summary}
            atomic_write_text(out / "score.json", json_pretty(score_payload))
            artifacts.append("score.json")

    manifest = {
        "toolkit_version": __version__,
        "config": config.resolved(),
        "config_sha256": _config_hash(config),
        "inputs": {name: sha256_file(getattr(config, name))
                   for name in ("labels", "train", "valid", "test")},
        "stages": stages,
        "artifacts": {name: sha256_file(out / name) for name in artifacts},
    }
    atomic_write_text(out / "manifest.json", json_pretty(manifest))
    return manifest


def _config_hash(config: RunConfig) -> str:
    return sha256_text(canonical_json(config.resolved()))
