"""Pydantic request/response models for the pipeline service.

These mirror the on-disk wire formats: dataset records are the JSONL dataset
schema, prediction records the prediction JSONL schema, and the model payload
is exactly the content of a saved model file.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from .. import corpus
from ..predictions import Prediction


class DatasetRecord(BaseModel):
    id: str
    text: str
    labels: list[str] = Field(default_factory=list)

    def to_example(self) -> corpus.Example:
        return corpus.Example(id=self.id, text=self.text,
                              labels=tuple(dict.fromkeys(self.labels)))

    @classmethod
    def from_example(cls, example: corpus.Example) -> "DatasetRecord":
        return cls(id=example.id, text=example.text, labels=list(example.labels))


class PredictionRecord(BaseModel):
    id: str
    labels: list[str]
    scores: dict[str, float] | None = None

    def to_prediction(self) -> Prediction:
        return Prediction(id=self.id, labels=tuple(dict.fromkeys(self.labels)),
                          scores=dict(self.scores) if self.scores is not None else None)

    @classmethod
    def from_prediction(cls, pred: Prediction) -> "PredictionRecord":
        return cls(id=pred.id, labels=list(pred.labels),
                   scores=dict(pred.scores) if pred.scores is not None else None)


class NormalizationReportModel(BaseModel):
    urls_removed: int
    mentions_removed: int
    hashtags_processed: int
    underscores_replaced: int


class NormalizeRequest(BaseModel):
    text: str
    drop_hashtag_body: bool = False


class NormalizeResponse(BaseModel):
    text: str
    report: NormalizationReportModel


class PreprocessRequest(BaseModel):
    records: list[DatasetRecord]
    drop_hashtag_body: bool = False


class PreprocessResponse(BaseModel):
    records: list[DatasetRecord]
    report: NormalizationReportModel


class StatsRequest(BaseModel):
    records: list[DatasetRecord]
    labels: list[str] | None = None


class StatsResponse(BaseModel):
    per_label_counts: dict[str, int]
    labels_per_example_histogram: dict[str, int]
    n_examples: int


class OversamplePlanModel(BaseModel):
    average_count: float
    clip: int
    per_example_copies: dict[str, int]
    label_counts_before: dict[str, int]
    label_counts_after: dict[str, int]


class OversampleRequest(BaseModel):
    records: list[DatasetRecord]
    clip: int = 10


class OversampleResponse(BaseModel):
    records: list[DatasetRecord]
    plan: OversamplePlanModel


class TrainConfigModel(BaseModel):
    # Strict: a typo'd hyperparameter must fail loudly, not silently
    # fall back to the default.
    model_config = ConfigDict(extra="forbid")

    dim: int = 2 ** 18
    n_min: int = 2
    n_max: int = 5
    learning_rate: float = 0.1
    epochs: int = 50
    l2: float = 1e-4
    batch_size: int = 16
    seed: int = 0
    threshold: float = 0.5


class ArrayBlob(BaseModel):
    shape: list[int]
    dtype: Literal["float64"]
    encoding: Literal["gzip+base64"]
    data: str


class ModelPayload(BaseModel):
    format: Literal["propdetect.model"]
    format_version: int
    labels: list[str]
    labels_sha256: str
    config: TrainConfigModel
    weights: ArrayBlob
    bias: ArrayBlob


class TrainRequest(BaseModel):
    train: list[DatasetRecord]
    valid: list[DatasetRecord]
    labels: list[str]
    config: TrainConfigModel = Field(default_factory=TrainConfigModel)


class EpochStats(BaseModel):
    epoch: int
    valid_micro_f1: float


class TrainResponse(BaseModel):
    model: ModelPayload
    history: list[EpochStats]
    best_epoch: int


class PredictRequest(BaseModel):
    model: ModelPayload
    records: list[DatasetRecord]
    labels: list[str] | None = None


class PredictResponse(BaseModel):
    predictions: list[PredictionRecord]


class VoteRequest(BaseModel):
    prediction_sets: list[list[PredictionRecord]]
    threshold_votes: int | None = None
    fallback: Literal["none", "top-plurality"] = "none"
    labels: list[str] | None = None


class VoteResponse(BaseModel):
    predictions: list[PredictionRecord]
    k: int
    threshold_votes: int
    empty_predictions: int


class ScoreRequest(BaseModel):
    gold: list[DatasetRecord]
    pred: list[PredictionRecord]
    labels: list[str] | None = None
    percent: bool = False
    per_label: bool = False


class VersionResponse(BaseModel):
    version: str
    model_format_version: int
