"""HTTP service exposing the analysis workflows.

Records travel as file uploads (binary or CSV encoding, auto-detected);
results come back as JSON documents with plot CSV payloads inlined. Domain
errors map to status codes: usage/config/format problems are 400,
estimation failures (the data could not support an estimate) are 409.
"""

from __future__ import annotations

import json
from typing import Literal, Optional

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ValidationError

from . import __version__
from .config import AnalysisConfig, RunConfig, parse_run_config
from .documents import ResultDocument, ReproduceSummary
from .errors import ConfigError, EstimationError, UsageError
from . import workflows


class SimulateRequest(BaseModel):
    config: dict = {}
    seed: Optional[int] = None
    format: Literal["bin", "csv"] = "bin"


class AnalyzeResponse(BaseModel):
    result: ResultDocument
    plots: dict[str, str]


class ReproduceRequest(BaseModel):
    seed: int = 0


class ReproduceResponse(BaseModel):
    summary: ReproduceSummary
    artifacts: dict[str, str]


def _error_payload(kind: str, exc: Exception) -> dict:
    return {"error": {"kind": kind, "message": str(exc)}}


def create_app() -> FastAPI:
    app = FastAPI(title="seastrain", version=__version__)

    @app.exception_handler(UsageError)
    async def usage_error(request: Request, exc: UsageError):
        return JSONResponse(
            status_code=400,
            content=_error_payload(type(exc).__name__, exc),
        )

    @app.exception_handler(EstimationError)
    async def estimation_error(request: Request, exc: EstimationError):
        return JSONResponse(
            status_code=409,
            content=_error_payload(type(exc).__name__, exc),
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/config/default")
    def default_config():
        return RunConfig().model_dump()

    @app.get("/config/schema")
    def config_schema():
        return RunConfig.model_json_schema()

    @app.get("/documents/schema")
    def result_document_schema():
        return ResultDocument.model_json_schema()

    @app.post("/simulate")
    def simulate(req: SimulateRequest) -> Response:
        cfg = parse_run_config(req.config)
        blob, summary = workflows.simulate(cfg, seed=req.seed, fmt=req.format)
        media = "application/octet-stream" if req.format == "bin" else "text/csv"
        return Response(
            content=blob,
            media_type=media,
            headers={"X-Seastrain-Summary": json.dumps(summary)},
        )

    @app.post("/analyze", response_model=AnalyzeResponse)
    async def analyze(
        record: UploadFile = File(...),
        mode: Literal["period", "height", "psd"] = Form(...),
        channel_x_m: Optional[float] = Form(default=None),
        range_start_m: Optional[float] = Form(default=None),
        range_stop_m: Optional[float] = Form(default=None),
        calibration: Optional[UploadFile] = File(default=None),
        analysis_json: Optional[str] = Form(default=None),
    ):
        blob = await record.read()
        channel_range = _channel_range(range_start_m, range_stop_m)
        cal_section = None
        if calibration is not None:
            cal_doc = _parse_result_document(await calibration.read())
            if cal_doc.calibration is None:
                raise ConfigError("calibration document has no calibration section")
            cal_section = cal_doc.calibration
        result, plots = workflows.analyze(
            blob,
            mode=mode,
            analysis=_parse_analysis(analysis_json),
            channel_x_m=channel_x_m,
            channel_range_m=channel_range,
            calibration=cal_section,
        )
        return AnalyzeResponse(result=result, plots=plots)

    @app.post("/calibrate", response_model=AnalyzeResponse)
    async def calibrate(
        records: list[UploadFile] = File(...),
        heights_m: list[float] = Form(...),
        analysis_json: Optional[str] = Form(default=None),
    ):
        blobs = [await f.read() for f in records]
        result, plots = workflows.calibrate(
            blobs, heights_m, analysis=_parse_analysis(analysis_json)
        )
        return AnalyzeResponse(result=result, plots=plots)

    @app.post("/doa", response_model=AnalyzeResponse)
    async def doa(
        record_c1: UploadFile = File(...),
        record_c2: UploadFile = File(...),
        delta_deg: float = Form(...),
        f0_hz: Optional[float] = Form(default=None),
        analysis_json: Optional[str] = Form(default=None),
    ):
        blob1 = await record_c1.read()
        blob2 = await record_c2.read()
        result, plots = workflows.estimate_doa_pair(
            blob1,
            blob2,
            delta_deg=delta_deg,
            analysis=_parse_analysis(analysis_json),
            f0_hz=f0_hz,
        )
        return AnalyzeResponse(result=result, plots=plots)

    @app.post("/reproduce", response_model=ReproduceResponse)
    def reproduce(req: ReproduceRequest):
        summary, artifacts = workflows.reproduce(seed=req.seed)
        return ReproduceResponse(summary=summary, artifacts=artifacts)

    return app


def _channel_range(start, stop) -> Optional[tuple[float, float]]:
    if (start is None) != (stop is None):
        raise ConfigError("range_start_m and range_stop_m must be given together")
    if start is None:
        return None
    if not stop > start:
        raise ConfigError(f"channel range must be increasing, got [{start}, {stop}]")
    return (float(start), float(stop))


def _parse_analysis(analysis_json: Optional[str]) -> Optional[AnalysisConfig]:
    if analysis_json is None:
        return None
    try:
        return AnalysisConfig.model_validate(json.loads(analysis_json))
    except (json.JSONDecodeError, ValidationError) as exc:
        raise ConfigError(f"invalid analysis settings: {exc}") from exc


def _parse_result_document(blob: bytes) -> ResultDocument:
    try:
        return ResultDocument.model_validate(json.loads(blob.decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError, ValidationError) as exc:
        raise ConfigError(f"invalid calibration document: {exc}") from exc


app = create_app()
