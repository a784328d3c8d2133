"""FastAPI service wrapping the detection pipeline.

Stateless: every endpoint reads and writes files on the host running the
service and returns a JSON summary.  Errors carry the CLI exit code in the
body so thin clients can propagate it.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..bench import bench_dicts, bench_table, run_bench
from ..classifier import load_model, save_model
from ..dataset import SynthParams, load_recording, save_recording, synth_recording
from ..encoder import reconstruct_histogram
from ..errors import DataError, HdszError, TrainingFailure, UsageError
from ..evaluate import protocol_first_m, protocol_kfold, report_table, run_detection
from ..hypervector import Hypervector
from ..pipeline import RunParams, encode, train_model
from ..postprocess import format_decision_log
from . import schemas

app = FastAPI(title="hdseizure", version=__version__)

_HTTP_STATUS = {1: 400, 2: 422, 3: 409}


@app.exception_handler(HdszError)
async def _hdsz_error(request: Request, exc: HdszError):
    return JSONResponse(
        status_code=_HTTP_STATUS.get(exc.exit_code, 400),
        content={"detail": str(exc), "exit_code": exc.exit_code},
    )


@app.exception_handler(RequestValidationError)
async def _validation_error(request: Request, exc: RequestValidationError):
    return JSONResponse(status_code=400, content={"detail": str(exc), "exit_code": 1})


@app.exception_handler(FileNotFoundError)
async def _missing_file(request: Request, exc: FileNotFoundError):
    return JSONResponse(status_code=422, content={"detail": str(exc), "exit_code": 2})


def _params(config: schemas.RunConfig) -> RunParams:
    return RunParams(d=config.d, seed=config.seed, l=config.lbp_len)


@app.get("/health", response_model=schemas.HealthResponse)
def health():
    return schemas.HealthResponse(status="ok", version=__version__)


@app.post("/synth", response_model=schemas.SynthResponse)
def synth(req: schemas.SynthRequest):
    out_dir = Path(req.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(req.recordings):
        params = SynthParams(
            n_electrodes=req.electrodes,
            seizure_len_s=req.seizure_len_s,
            ictal_freq_hz=req.ictal_freq_hz,
            asymmetry=req.asymmetry,
            noise_amp=req.noise_amp,
            seed=req.seed + i,
            interictal_s=req.interictal_s,
            postictal_s=req.postictal_s,
        )
        rec = synth_recording(params, patient_id=f"{req.patient_id}-{i:02d}")
        path = out_dir / f"{req.patient_id.lower()}-{i:02d}.hdsr"
        save_recording(rec, path)
        paths.append(str(path))
    return schemas.SynthResponse(paths=paths)


@app.post("/train", response_model=schemas.TrainResponse)
def train(req: schemas.TrainRequest):
    if not req.recordings:
        raise UsageError("training needs at least one recording")
    params = _params(req.config)
    recs = [load_recording(p) for p in req.recordings]
    encs = [encode(r, params) for r in recs]
    model = train_model(encs, params)
    save_model(model, req.out_model)
    return schemas.TrainResponse(
        model_path=req.out_model,
        t_p=model.t_p,
        d=model.cfg.d,
        lbp_len=model.l,
        n_electrodes=model.n_electrodes,
        trained=[r.patient_id for r in recs],
    )


@app.post("/detect", response_model=schemas.DetectResponse)
def detect(req: schemas.DetectRequest):
    model = load_model(req.model)
    rec = load_recording(req.recording)
    params = RunParams(d=model.cfg.d, seed=model.cfg.seed, l=model.l)
    enc = encode(rec, params)
    outcome = run_detection(model, enc)
    log_text = format_decision_log(outcome.decisions)
    if req.out_log:
        Path(req.out_log).write_text(log_text)
    return schemas.DetectResponse(
        recording_id=rec.patient_id,
        detected=outcome.detected,
        delay_s=outcome.delay_s,
        delay_net_s=outcome.delay_net_s,
        n_decisions=len(outcome.decisions),
        false_alarms=outcome.false_alarms,
        log_path=req.out_log,
        decision_log=log_text,
    )


@app.post("/eval", response_model=schemas.EvalResponse)
def evaluate(req: schemas.EvalRequest):
    if len(req.recordings) < 2:
        raise UsageError("evaluation needs at least two recordings (train + test)")
    params = _params(req.config)
    recs = [load_recording(p) for p in req.recordings]
    if req.m >= len(recs):
        raise UsageError(f"m must be smaller than the recording count ({len(recs)})")
    patient = req.patient or re.sub(r"-\d+$", "", recs[0].patient_id)
    if req.protocol == "kfold":
        report = protocol_kfold(recs, req.m, params, patient_id=patient)
    else:
        report = protocol_first_m(recs, req.m, params, patient_id=patient)
    table = report_table([report])
    if req.out_report:
        Path(req.out_report).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return schemas.EvalResponse(report=report.to_dict(), table=table, report_path=req.out_report)


@app.post("/reconstruct-hist", response_model=schemas.ReconstructResponse)
def reconstruct(req: schemas.ReconstructRequest):
    params = _params(req.config)
    rec = load_recording(req.recording)
    enc = encode(rec, params)
    im = params.item_memory(rec.n_electrodes)
    rows = enc.h_rows if req.max_windows is None else enc.h_rows[: req.max_windows]
    lines = []
    for row in rows:
        est = reconstruct_histogram(Hypervector(params.cfg, row.copy()), im)
        lines.append(",".join(f"{v:.6f}" for v in est))
    csv = "\n".join(lines) + ("\n" if lines else "")
    if req.out:
        Path(req.out).write_text(csv)
    return schemas.ReconstructResponse(n_windows=len(lines), csv=csv, out_path=req.out)


@app.post("/bench", response_model=schemas.BenchResponse)
def bench(req: schemas.BenchRequest):
    rows = run_bench(
        d_values=tuple(req.d_values),
        n_values=tuple(req.n_values),
        windows=req.windows,
        seed=req.seed,
    )
    return schemas.BenchResponse(rows=bench_dicts(rows), table=bench_table(rows))
