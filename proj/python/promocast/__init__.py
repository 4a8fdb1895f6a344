"""Promotion-aware sales forecasting and what-if analysis."""

from __future__ import annotations

import json
import time
from typing import Any

from . import _promocast
from ._promocast import (
    InvalidArgument,
    NotFound,
    ParseError,
    PromocastError,
    UnrecognizedPromotion,
)

__all__ = [
    "InvalidArgument",
    "NotFound",
    "ParseError",
    "PromocastError",
    "Service",
    "UnrecognizedPromotion",
    "generate",
    "parse_promotion",
    "validate",
]


def parse_promotion(text: str) -> dict[str, Any]:
    return json.loads(_promocast.parse_promotion(text))


def generate(out: str, format: str = "csv-dir", **config: Any) -> dict[str, Any]:
    return json.loads(_promocast.generate(str(out), format, json.dumps(config)))


def validate(path: str, format: str = "csv-dir") -> dict[str, Any]:
    return json.loads(_promocast.validate(str(path), format))


class Service:
    """In-process counterpart of the HTTP server: same routes, same bodies."""

    def __init__(self, path: str, format: str = "csv-dir", seed: int = 42, workers: int = 2):
        self._impl = _promocast.Service(str(path), format, seed, workers)

    def request(self, method: str, path: str, query: dict[str, Any] | None = None,
                body: Any = None) -> tuple[int, Any]:
        q = {k: str(v) for k, v in (query or {}).items()}
        text = body if isinstance(body, str) else ("" if body is None else json.dumps(body))
        status, payload = self._impl.handle(method, path, q, text)
        return status, json.loads(payload)

    def get(self, path: str, **query: Any) -> tuple[int, Any]:
        return self.request("GET", path, query)

    def post(self, path: str, body: Any) -> tuple[int, Any]:
        return self.request("POST", path, body=body)

    def wait_idle(self) -> None:
        self._impl.wait_idle()

    def train(self, model_kind: str, config: dict[str, Any] | None = None,
              timeout: float = 600.0) -> dict[str, Any]:
        status, job = self.post("/train", {"model_kind": model_kind, "config": config or {}})
        if status != 202:
            raise PromocastError(job["error"]["message"])
        deadline = time.monotonic() + timeout
        while True:
            _, job = self.get(f"/jobs/{job['job_id']}")
            if job["status"] in ("done", "failed") or time.monotonic() > deadline:
                return job
            time.sleep(0.05)

    def predict(self, product_id: str, start: str, end: str,
                model_kind: str = "RandomForest") -> tuple[int, Any]:
        return self.post("/predict", {"product_id": product_id,
                                      "horizon": {"start": start, "end": end},
                                      "model_kind": model_kind})

    def whatif(self, scenario: dict[str, Any]) -> tuple[int, Any]:
        return self.post("/whatif", scenario)
