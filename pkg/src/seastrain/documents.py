"""Result documents written by the analysis commands (JSON, strict schema).

Every numeric field is required to be finite; input digests are SHA-256 of
the exact record bytes analyzed, so results can be traced back to their
input.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Annotated, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError

FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PeriodSection(_Strict):
    period_s: FiniteFloat
    peak_freq_hz: FiniteFloat
    peak_to_median_ratio: FiniteFloat
    channel_position_m: Optional[FiniteFloat] = None


class HeightSection(_Strict):
    height_m: FiniteFloat
    median_rms: FiniteFloat
    n_rms_values: int
    slope_used: FiniteFloat


class FitPoint(_Strict):
    height_m: FiniteFloat
    median_rms: FiniteFloat
    n_values: int


class CalibrationSection(_Strict):
    slope: FiniteFloat
    rmspe_percent: FiniteFloat
    fit_points: list[FitPoint]


class DoaSection(_Strict):
    doa_c1_deg: FiniteFloat
    doa_c2_deg: FiniteFloat
    wavelength_m: FiniteFloat
    apparent_wavelength_c1_m: FiniteFloat
    apparent_wavelength_c2_m: FiniteFloat
    delta_deg: FiniteFloat
    ambiguity_flag: bool
    f0_hz: FiniteFloat
    phase_velocity_mps: Optional[FiniteFloat] = None


class ResultDocument(_Strict):
    tool_version: str
    mode: str
    input_digests: list[str]
    period: Optional[PeriodSection] = None
    height: Optional[HeightSection] = None
    calibration: Optional[CalibrationSection] = None
    doa: Optional[DoaSection] = None
    diagnostics: dict[str, float | str | bool] = {}


class ReproduceCheck(_Strict):
    condition: str
    metric: str
    value: FiniteFloat
    threshold: FiniteFloat
    benchmark: Optional[FiniteFloat] = None
    passed: bool


class ReproduceSummary(_Strict):
    tool_version: str
    seed: int
    all_pass: bool
    checks: list[ReproduceCheck]


def sha256_digest(blob: bytes) -> str:
    return hashlib.sha256(blob).hexdigest()


def save_document(doc: BaseModel, path) -> None:
    Path(path).write_text(doc.model_dump_json(indent=2) + "\n", encoding="utf-8")


def load_result_document(path) -> ResultDocument:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read result document {path}: {exc}") from exc
    try:
        return ResultDocument.model_validate(obj)
    except ValidationError as exc:
        raise ConfigError(f"invalid result document {path}: {exc}") from exc
