"""Thin client for the pipeline service.

The CLI routes every operation through this client. Without a server URL the
service app runs in-process over an ASGI test transport, so single-machine
use needs no daemon; with a URL the same calls go over HTTP.
"""

from __future__ import annotations

import httpx

from .errors import ToolkitError


class ServiceError(ToolkitError):
    """Service rejected a request (4xx) or failed (5xx)."""


class ServiceClient:
    def __init__(self, server_url: str | None = None):
        if server_url:
            self._client = httpx.Client(base_url=server_url.rstrip("/"), timeout=600.0)
        else:
            # Local mode: run the FastAPI app in-process.
            import warnings

            with warnings.catch_warnings():
                warnings.filterwarnings("ignore", category=UserWarning,
                                        message=".*testclient.*")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(path, json=payload)
        except httpx.HTTPError as e:
            raise ServiceError(f"cannot reach service: {e}") from e
        if response.status_code >= 400:
            raise ServiceError(_describe_failure(response))
        return response.json()

    def _get(self, path: str) -> dict:
        try:
            response = self._client.get(path)
        except httpx.HTTPError as e:
            raise ServiceError(f"cannot reach service: {e}") from e
        if response.status_code >= 400:
            raise ServiceError(_describe_failure(response))
        return response.json()

    def version(self) -> dict:
        return self._get("/v1/version")

    def normalize(self, text: str, drop_hashtag_body: bool = False) -> dict:
        return self._post("/v1/normalize", {"text": text, "drop_hashtag_body": drop_hashtag_body})

    def preprocess(self, records: list[dict], drop_hashtag_body: bool = False) -> dict:
        return self._post("/v1/preprocess",
                          {"records": records, "drop_hashtag_body": drop_hashtag_body})

    def stats(self, records: list[dict], labels: list[str] | None = None) -> dict:
        return self._post("/v1/stats", {"records": records, "labels": labels})

    def oversample(self, records: list[dict], clip: int = 10) -> dict:
        return self._post("/v1/oversample", {"records": records, "clip": clip})

    def train(self, train_records: list[dict], valid_records: list[dict],
              labels: list[str], config: dict) -> dict:
        return self._post("/v1/train", {
            "train": train_records, "valid": valid_records,
            "labels": labels, "config": config,
        })

    def predict(self, model_payload: dict, records: list[dict],
                labels: list[str] | None = None) -> dict:
        return self._post("/v1/predict",
                          {"model": model_payload, "records": records, "labels": labels})

    def vote(self, prediction_sets: list[list[dict]], threshold_votes: int | None = None,
             fallback: str = "none", labels: list[str] | None = None) -> dict:
        return self._post("/v1/vote", {
            "prediction_sets": prediction_sets,
            "threshold_votes": threshold_votes,
            "fallback": fallback,
            "labels": labels,
        })

    def score(self, gold: list[dict], pred: list[dict], labels: list[str] | None = None,
              percent: bool = False, per_label: bool = False) -> dict:
        return self._post("/v1/score", {
            "gold": gold, "pred": pred, "labels": labels,
            "percent": percent, "per_label": per_label,
        })


def _describe_failure(response) -> str:
    try:
        detail = response.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, str):
        return detail
    if detail is not None:
        return f"invalid request: {detail}"
    return f"service error: HTTP {response.status_code}"
