"""FastAPI app exposing every pipeline stage as a JSON endpoint."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, baseline, corpus, ensemble, imbalance, metrics, preprocess
from ..errors import ToolkitError, ValidationError
from . import schemas


def _vocab_or_none(labels: list[str] | None) -> corpus.LabelVocabulary | None:
    return corpus.LabelVocabulary(labels) if labels is not None else None


def create_app() -> FastAPI:
    app = FastAPI(title="propdetect", version=__version__)

    @app.exception_handler(ToolkitError)
    async def toolkit_error_handler(request: Request, exc: ToolkitError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/v1/version", response_model=schemas.VersionResponse)
    def version() -> schemas.VersionResponse:
        from .. import MODEL_FORMAT_VERSION

        return schemas.VersionResponse(version=__version__,
                                       model_format_version=MODEL_FORMAT_VERSION)

    @app.post("/v1/normalize", response_model=schemas.NormalizeResponse)
    def normalize(req: schemas.NormalizeRequest) -> schemas.NormalizeResponse:
        text, report = preprocess.normalize(req.text, drop_hashtag_body=req.drop_hashtag_body)
        return schemas.NormalizeResponse(
            text=text, report=schemas.NormalizationReportModel(**report.to_dict())
        )

    @app.post("/v1/preprocess", response_model=schemas.PreprocessResponse)
    def preprocess_records(req: schemas.PreprocessRequest) -> schemas.PreprocessResponse:
        examples = _to_examples(req.records)
        normalized, report = preprocess.normalize_examples(
            examples, drop_hashtag_body=req.drop_hashtag_body
        )
        return schemas.PreprocessResponse(
            records=[schemas.DatasetRecord.from_example(e) for e in normalized],
            report=schemas.NormalizationReportModel(**report.to_dict()),
        )

    @app.post("/v1/stats", response_model=schemas.StatsResponse)
    def stats(req: schemas.StatsRequest) -> schemas.StatsResponse:
        examples = _to_examples(req.records)
        vocab = _vocab_or_none(req.labels)
        if vocab is not None:
            for e in examples:
                for name in e.labels:
                    vocab.index(name)
        return schemas.StatsResponse(**corpus.compute_stats(examples).to_json_dict())

    @app.post("/v1/oversample", response_model=schemas.OversampleResponse)
    def oversample(req: schemas.OversampleRequest) -> schemas.OversampleResponse:
        examples = _to_examples(req.records)
        plan = imbalance.plan_oversample(examples, clip=req.clip)
        expanded = imbalance.materialize(examples, plan)
        return schemas.OversampleResponse(
            records=[schemas.DatasetRecord.from_example(e) for e in expanded],
            plan=schemas.OversamplePlanModel(**plan.to_json_dict()),
        )

    @app.post("/v1/train", response_model=schemas.TrainResponse)
    def train(req: schemas.TrainRequest) -> schemas.TrainResponse:
        vocab = corpus.LabelVocabulary(req.labels)
        config = baseline.TrainConfig(**req.config.model_dump())
        result = baseline.train(_to_examples(req.train), _to_examples(req.valid), vocab, config)
        return schemas.TrainResponse(
            model=schemas.ModelPayload(**baseline.model_to_payload(result.model)),
            history=[schemas.EpochStats(**entry) for entry in result.history],
            best_epoch=result.best_epoch,
        )

    @app.post("/v1/predict", response_model=schemas.PredictResponse)
    def predict(req: schemas.PredictRequest) -> schemas.PredictResponse:
        model = baseline.model_from_payload(req.model.model_dump())
        preds = baseline.predict(model, _to_examples(req.records),
                                 vocab=_vocab_or_none(req.labels))
        return schemas.PredictResponse(
            predictions=[schemas.PredictionRecord.from_prediction(p) for p in preds]
        )

    @app.post("/v1/vote", response_model=schemas.VoteResponse,
              response_model_exclude_none=True)
    def vote(req: schemas.VoteRequest) -> schemas.VoteResponse:
        sets = [[r.to_prediction() for r in batch] for batch in req.prediction_sets]
        vocab = _vocab_or_none(req.labels)
        preds = ensemble.vote_with_fallback(
            sets, mode=req.fallback, threshold_votes=req.threshold_votes, vocab=vocab
        )
        k = len(sets)
        threshold = (ensemble.majority_threshold(k)
                     if req.threshold_votes is None else req.threshold_votes)
        return schemas.VoteResponse(
            predictions=[schemas.PredictionRecord.from_prediction(p) for p in preds],
            k=k,
            threshold_votes=threshold,
            empty_predictions=ensemble.count_empty(preds),
        )

    @app.post("/v1/score")
    def score(req: schemas.ScoreRequest) -> dict:
        gold = _to_examples(req.gold)
        preds = [r.to_prediction() for r in req.pred]
        return metrics.score_report(gold, preds, vocab=_vocab_or_none(req.labels),
                                    percent=req.percent, per_label=req.per_label)

    return app


def _to_examples(records: list[schemas.DatasetRecord]) -> list[corpus.Example]:
    examples = [r.to_example() for r in records]
    seen: set[str] = set()
    for e in examples:
        if e.id in seen:
            raise ValidationError(f"duplicate id {e.id!r} in request records")
        seen.add(e.id)
    return examples
