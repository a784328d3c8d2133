"""Pydantic request/response models for the detection service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class RunConfig(BaseModel):
    """Pipeline knobs shared by train/eval/reconstruct requests.

    The 0.5 s encoding window and 5 s vote window are fixed for all patients;
    t_p is always learned during training, never configured.
    """

    d: int = Field(default=10_000, ge=64)
    seed: int = Field(default=1, ge=0)
    lbp_len: int = Field(default=6, ge=1, lt=7)


class HealthResponse(BaseModel):
    status: str
    version: str


class SynthRequest(BaseModel):
    out_dir: str
    recordings: int = Field(default=5, ge=1)
    electrodes: int = Field(default=36, ge=1)
    seizure_len_s: float = Field(default=20.0, ge=10.0)
    ictal_freq_hz: float = 3.0
    asymmetry: float = 0.85
    noise_amp: float = 1500.0
    interictal_s: float = 180.0
    postictal_s: float = 180.0
    seed: int = 0
    patient_id: str = "SYN"


class SynthResponse(BaseModel):
    paths: list[str]


class TrainRequest(BaseModel):
    recordings: list[str]
    out_model: str
    config: RunConfig = RunConfig()


class TrainResponse(BaseModel):
    model_path: str
    t_p: int
    d: int
    lbp_len: int
    n_electrodes: int
    trained: list[str]


class DetectRequest(BaseModel):
    model: str
    recording: str
    out_log: Optional[str] = None


class DetectResponse(BaseModel):
    recording_id: str
    detected: bool
    delay_s: Optional[float]
    delay_net_s: Optional[float]
    n_decisions: int
    false_alarms: int
    log_path: Optional[str]
    decision_log: str


class EvalRequest(BaseModel):
    recordings: list[str]
    protocol: Literal["kfold", "first-m"] = "kfold"
    m: int = Field(default=1, ge=1)
    config: RunConfig = RunConfig()
    out_report: Optional[str] = None
    patient: Optional[str] = None  # report row ID; default derived from recording ids


class EvalResponse(BaseModel):
    report: dict
    table: str
    report_path: Optional[str]


class ReconstructRequest(BaseModel):
    recording: str
    config: RunConfig = RunConfig()
    max_windows: Optional[int] = Field(default=None, ge=1)
    out: Optional[str] = None


class ReconstructResponse(BaseModel):
    n_windows: int
    csv: str
    out_path: Optional[str]


class BenchRequest(BaseModel):
    d_values: list[int] = [10_000, 1_000]
    n_values: list[int] = [36, 64, 100]
    windows: int = Field(default=40, ge=1)
    seed: int = 1


class BenchResponse(BaseModel):
    rows: list[dict]
    table: str


class ErrorBody(BaseModel):
    detail: str
    exit_code: int
