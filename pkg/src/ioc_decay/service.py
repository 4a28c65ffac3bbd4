"""HTTP JSON API over the scoring engine.

Every endpoint is a thin adapter: parse parameters, call the corresponding
module function, serialize its result. Errors come back as
``{"code": ..., "message": ..., "field": ...}``; the ``field`` key is only
present when a single parameter is to blame.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import decay, estimation
from .model import DecayModel, DecayProfile, ProfileError
from .profiles import ProfileStore
from .sightings import SightingStore, StreamError, read_jsonl
from .taxonomy import TaxonomyRegistry, load_bundled_taxonomies

DATA_DIR_ENV = "IOC_DECAY_DATA_DIR"


@dataclass
class ApiConfig:
    bind_address: str = "127.0.0.1:8787"
    data_dir: Union[str, Path] = "data"
    cors_allowed_origin: str = "*"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field: Optional[str] = None):
        self.status = status
        self.code = code
        self.message = message
        self.field = field

    def body(self) -> dict[str, Any]:
        body: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.field is not None:
            body["field"] = self.field
        return body


def _float_param(raw: Optional[str], name: str, default: Optional[float] = None) -> float:
    if raw is None:
        if default is None:
            raise ApiError(400, "missing_parameter", f"query parameter {name!r} is required", name)
        return default
    try:
        return float(raw)
    except ValueError:
        raise ApiError(400, "invalid_parameter", f"{name!r} must be a number", name) from None


def _int_param(raw: Optional[str], name: str, default: Optional[int] = None) -> int:
    if raw is None:
        if default is None:
            raise ApiError(400, "missing_parameter", f"query parameter {name!r} is required", name)
        return default
    try:
        return int(raw)
    except ValueError:
        raise ApiError(400, "invalid_parameter", f"{name!r} must be an integer", name) from None


def create_app(config: Optional[ApiConfig] = None) -> FastAPI:
    config = config or ApiConfig()
    data_dir = Path(os.environ.get(DATA_DIR_ENV, config.data_dir))
    data_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(data_dir, os.W_OK):
        raise PermissionError(f"data_dir {data_dir} is not writable")

    store = SightingStore(data_dir)
    profile_store = ProfileStore(data_dir / "profiles")
    registry: TaxonomyRegistry = load_bundled_taxonomies()

    app = FastAPI(title="ioc-decay", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.profiles = profile_store
    app.state.registry = registry
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[config.cors_allowed_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"code": "invalid_parameter", "message": str(exc.errors())}
        )

    @app.get("/v1/score/{attribute_id}")
    def get_score(attribute_id: str, at: Optional[str] = None) -> JSONResponse:
        attr = store.get_attribute(attribute_id)
        if attr is None:
            raise ApiError(404, "unknown_attribute", f"no attribute {attribute_id!r}")
        as_of = _int_param(at, "at", default=int(time.time()))
        profile = profile_store.resolve(attr.attr_type)
        if profile is None:
            raise ApiError(
                404, "no_profile_for_type", f"no decay profile for type {attr.attr_type!r}"
            )
        last = store.last_seen(attribute_id, as_of)
        if last is None:
            last = attr.first_seen
        override = store.expiration_override(attribute_id, as_of)
        try:
            evaluation = decay.evaluate(
                attr, profile, last, as_of, tau_override=override, registry=registry
            )
        except decay.ClockSkew as exc:
            raise ApiError(400, "clock_skew", str(exc), "at") from exc
        return JSONResponse(evaluation.to_json_dict())

    @app.get("/v1/curve")
    def get_curve(
        base: Optional[str] = None,
        tau: Optional[str] = None,
        delta: Optional[str] = None,
        model: Optional[str] = None,
        points: Optional[str] = None,
    ) -> JSONResponse:
        base_v = _float_param(base, "base")
        tau_v = _float_param(tau, "tau")
        delta_v = _float_param(delta, "delta")
        points_v = _int_param(points, "points")
        if model is None:
            raise ApiError(400, "missing_parameter", "query parameter 'model' is required", "model")
        try:
            model_v = DecayModel(model)
        except ValueError:
            raise ApiError(
                400, "invalid_parameter", f"unknown decay model {model!r}", "model"
            ) from None
        if not 2 <= points_v <= 10_000:
            raise ApiError(400, "invalid_parameter", "points must lie in [2, 10000]", "points")
        if not 0.0 <= base_v <= 100.0:
            raise ApiError(400, "invalid_parameter", "base must lie in [0, 100]", "base")
        try:
            samples = decay.sample_curve(model_v, base_v, tau_v, delta_v, points_v)
        except ValueError as exc:
            raise ApiError(400, "invalid_parameter", str(exc)) from exc
        return JSONResponse([[t, s] for t, s in samples])

    @app.get("/v1/profiles")
    def list_profiles() -> JSONResponse:
        return JSONResponse([p.to_json_dict() for p in profile_store.list()])

    @app.get("/v1/profiles/{attr_type}")
    def get_profile(attr_type: str) -> JSONResponse:
        profile = profile_store.get(attr_type)
        if profile is None:
            raise ApiError(404, "unknown_profile", f"no profile for type {attr_type!r}")
        return JSONResponse(profile.to_json_dict())

    @app.put("/v1/profiles/{attr_type}")
    async def put_profile(attr_type: str, request: Request) -> JSONResponse:
        try:
            body = await request.json()
        except Exception:
            raise ApiError(400, "parse_error", "body is not valid JSON") from None
        if not isinstance(body, dict):
            raise ApiError(422, "invalid_profile", "body must be a JSON object")
        if body.get("attr_type", attr_type) != attr_type:
            raise ApiError(
                422, "attr_type_mismatch", "body attr_type differs from URL", "attr_type"
            )
        body = {**body, "attr_type": attr_type}
        try:
            profile = DecayProfile.from_json_dict(body)
        except (KeyError, TypeError, ValueError) as exc:
            raise ApiError(422, "invalid_profile", f"malformed profile: {exc}") from exc
        try:
            profile_store.save(profile)
        except ProfileError as exc:
            raise ApiError(422, exc.code, str(exc), exc.field) from exc
        return JSONResponse(profile.to_json_dict())

    @app.post("/v1/sightings")
    async def post_sightings(request: Request) -> JSONResponse:
        raw = await request.body()
        try:
            records = list(read_jsonl(raw.decode("utf-8")))
        except (UnicodeDecodeError, StreamError) as exc:
            # Nothing was ingested: the batch is parsed in full before any insert.
            raise ApiError(400, "parse_error", str(exc)) from exc
        report = store.ingest(records)
        return JSONResponse(report.to_json_dict())

    @app.get("/v1/aggregate")
    def get_aggregate(
        request: Request,
        to: Optional[str] = None,
        bucket: Optional[str] = None,
    ) -> JSONResponse:
        # "from" is a Python keyword, so it cannot be a function parameter.
        from_v = _int_param(request.query_params.get("from"), "from")
        to_v = _int_param(to, "to")
        bucket_v = _int_param(bucket, "bucket", default=86_400)
        try:
            buckets = store.aggregate(from_v, to_v, bucket_v)
        except ValueError as exc:
            raise ApiError(400, "invalid_parameter", str(exc)) from exc
        return JSONResponse([b.to_json_dict() for b in buckets])

    @app.get("/v1/estimate")
    def get_estimate(
        attr_type: Optional[str] = None,
        cutoff: Optional[str] = None,
        tau_q: Optional[str] = None,
        half_q: Optional[str] = None,
    ) -> JSONResponse:
        if attr_type is None:
            raise ApiError(
                400, "missing_parameter", "query parameter 'attr_type' is required", "attr_type"
            )
        cutoff_v = _float_param(cutoff, "cutoff", default=168.0)
        tau_q_v = _float_param(tau_q, "tau_q", default=0.90)
        half_q_v = _float_param(half_q, "half_q", default=0.50)
        try:
            dist = estimation.build_distribution(store, attr_type, cutoff_v)
            result = estimation.fit(dist, tau_quantile=tau_q_v, half_quantile=half_q_v)
        except estimation.EmptyDistribution as exc:
            raise ApiError(422, "empty_distribution", str(exc), "attr_type") from exc
        except estimation.DegenerateQuantiles as exc:
            raise ApiError(422, "degenerate_quantiles", str(exc)) from exc
        except ValueError as exc:
            raise ApiError(400, "invalid_parameter", str(exc)) from exc
        return JSONResponse(
            {
                "fit": estimation.fit_report(dist, result),
                "histogram": [[h, c] for h, c in dist.histogram],
                "cdf": [[h, f] for h, f in dist.cdf],
            }
        )

    return app


def run(config: ApiConfig) -> None:
    """Serve the API until interrupted."""
    import uvicorn

    host, _, port = config.bind_address.partition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=int(port or 8787))
