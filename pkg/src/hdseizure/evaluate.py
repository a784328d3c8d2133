"""Detection metrics and the two training protocols.

Definitions (all pure functions of the decision log and the annotations, so
recomputing from a persisted log reproduces the report exactly):
  sensitivity  = detected test seizures / total test seizures
  specificity  = decisions outside [onset, offset] labeled non-seizure /
                 all decisions outside [onset, offset] (interictal + postictal)
  delay        = first positive decision inside [onset, offset] minus onset;
                 reported raw (delay_s) and with the 5 s vote-window fill
                 subtracted (delay_net_s), averaged over detected seizures.

k-fold protocol: fold f trains on the m chronologically consecutive
recordings starting at index f and tests the other N - m; there are
N - m + 1 folds (the k column), metrics pooled over folds.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import Recording
from .errors import DataError
from .pipeline import EncodedRecording, RunParams, detect, encode, train_model
from .postprocess import VOTE_WINDOW_LABELS, LABEL_PERIOD_S, Decision

VOTE_FILL_S = VOTE_WINDOW_LABELS * LABEL_PERIOD_S  # 5 s


@dataclass
class DetectionOutcome:
    """Scored decision stream of one test recording."""

    recording_id: str
    detected: bool
    delay_s: float | None
    delay_net_s: float | None
    n_outside: int          # decisions outside the ictal segment
    false_alarms: int       # positive decisions outside the ictal segment
    decisions: list[Decision] = field(repr=False, default_factory=list)


def score_decisions(
    decisions: list[Decision], onset_s: float, offset_s: float, recording_id: str = ""
) -> DetectionOutcome:
    """Metrics from a decision stream; usable on a re-parsed persisted log."""
    inside = [d for d in decisions if onset_s <= d.time_s <= offset_s]
    outside = [d for d in decisions if not onset_s <= d.time_s <= offset_s]
    hits = [d for d in inside if d.is_seizure]
    detected = bool(hits)
    delay = hits[0].time_s - onset_s if detected else None
    return DetectionOutcome(
        recording_id=recording_id,
        detected=detected,
        delay_s=delay,
        delay_net_s=None if delay is None else delay - VOTE_FILL_S,
        n_outside=len(outside),
        false_alarms=sum(d.is_seizure for d in outside),
        decisions=decisions,
    )


def run_detection(model, enc: EncodedRecording) -> DetectionOutcome:
    return score_decisions(detect(model, enc), enc.onset_s, enc.offset_s, enc.patient_id)


@dataclass
class FoldResult:
    fold: int
    trained: list[str]
    t_p: int
    outcomes: list[DetectionOutcome]

    @property
    def sensitivity_pct(self) -> float:
        return 100.0 * sum(o.detected for o in self.outcomes) / len(self.outcomes)

    @property
    def specificity_pct(self) -> float:
        total = sum(o.n_outside for o in self.outcomes)
        bad = sum(o.false_alarms for o in self.outcomes)
        return 100.0 * (total - bad) / total if total else 100.0


@dataclass
class EvalReport:
    """Pooled per-patient evaluation, one row of the results table."""

    patient_id: str
    protocol: str
    n_electrodes: int
    n_recordings: int
    m_trained: int
    k_folds: int
    sensitivity_pct: float
    specificity_pct: float
    mean_delay_s: float | None
    mean_delay_net_s: float | None
    thresholds: list[int]
    folds: list[FoldResult] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "patient_id": self.patient_id,
            "protocol": self.protocol,
            "n_electrodes": self.n_electrodes,
            "n_recordings": self.n_recordings,
            "m_trained": self.m_trained,
            "k_folds": self.k_folds,
            "sensitivity_pct": self.sensitivity_pct,
            "specificity_pct": self.specificity_pct,
            "mean_delay_s": self.mean_delay_s,
            "mean_delay_net_s": self.mean_delay_net_s,
            "thresholds": self.thresholds,
            "seizures": [
                {
                    "fold": f.fold,
                    "recording_id": o.recording_id,
                    "detected": o.detected,
                    "delay_s": o.delay_s,
                    "delay_net_s": o.delay_net_s,
                    "false_alarms": o.false_alarms,
                }
                for f in self.folds
                for o in f.outcomes
            ],
        }


def _pool(patient_id, protocol, n_electrodes, n_recordings, m, folds) -> EvalReport:
    outcomes = [o for f in folds for o in f.outcomes]
    delays = [o.delay_s for o in outcomes if o.detected]
    total_outside = sum(o.n_outside for o in outcomes)
    false_alarms = sum(o.false_alarms for o in outcomes)
    return EvalReport(
        patient_id=patient_id,
        protocol=protocol,
        n_electrodes=n_electrodes,
        n_recordings=n_recordings,
        m_trained=m,
        k_folds=len(folds),
        sensitivity_pct=100.0 * sum(o.detected for o in outcomes) / len(outcomes),
        specificity_pct=(
            100.0 * (total_outside - false_alarms) / total_outside if total_outside else 100.0
        ),
        mean_delay_s=float(np.mean(delays)) if delays else None,
        mean_delay_net_s=float(np.mean(delays)) - VOTE_FILL_S if delays else None,
        thresholds=[f.t_p for f in folds],
        folds=folds,
    )


def _max_workers() -> int:
    """Parallelism cap: HDSZ_THREADS env var, else the machine's cores."""
    env = os.environ.get("HDSZ_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _encode_all(recs: list[Recording], params: RunParams) -> list[EncodedRecording]:
    if not recs:
        raise DataError("no recordings given")
    n = recs[0].n_electrodes
    if any(r.n_electrodes != n for r in recs):
        raise DataError("recordings disagree on electrode count")
    im = params.item_memory(n)
    workers = min(_max_workers(), len(recs))
    if workers <= 1:
        return [encode(r, params, im) for r in recs]
    with ThreadPoolExecutor(workers) as pool:  # kernels run nogil
        return list(pool.map(lambda r: encode(r, params, im), recs))


def _run_fold(fold_idx, encs, train_idx, params) -> FoldResult:
    train_idx = sorted(train_idx)
    model = train_model([encs[i] for i in train_idx], params)
    outcomes = [run_detection(model, encs[i]) for i in range(len(encs)) if i not in train_idx]
    return FoldResult(
        fold=fold_idx,
        trained=[encs[i].patient_id for i in train_idx],
        t_p=model.t_p,
        outcomes=outcomes,
    )


def protocol_kfold(recs: list[Recording], m: int, params: RunParams, patient_id: str = "") -> EvalReport:
    """All sliding folds of m consecutive training recordings (chronological)."""
    n_rec = len(recs)
    if not 1 <= m < n_rec:
        raise DataError(f"need 1 <= m < number of recordings, got m={m}, N={n_rec}")
    encs = _encode_all(recs, params)
    folds = [
        _run_fold(f, encs, range(f, f + m), params) for f in range(n_rec - m + 1)
    ]
    return _pool(
        patient_id or recs[0].patient_id, "kfold", recs[0].n_electrodes, n_rec, m, folds
    )


def protocol_first_m(recs: list[Recording], m: int, params: RunParams, patient_id: str = "") -> EvalReport:
    """Single split: train on the chronologically first m, test the rest."""
    n_rec = len(recs)
    if not 1 <= m < n_rec:
        raise DataError(f"need 1 <= m < number of recordings, got m={m}, N={n_rec}")
    encs = _encode_all(recs, params)
    folds = [_run_fold(0, encs, range(m), params)]
    return _pool(
        patient_id or recs[0].patient_id, "first-m", recs[0].n_electrodes, n_rec, m, folds
    )


_COLUMNS = ("ID", "Elect.", "Seiz.", "Trained", "k", "Delay [s]", "Net [s]", "Spe. [%]", "Sen. [%]")


def report_table(reports: list[EvalReport]) -> str:
    """Delimited table mirroring the results-table columns."""
    rows = [_COLUMNS]
    for r in reports:
        rows.append(
            (
                r.patient_id,
                str(r.n_electrodes),
                str(r.n_recordings),
                str(r.m_trained),
                str(r.k_folds) if r.protocol == "kfold" else "-",
                f"{r.mean_delay_s:.1f}" if r.mean_delay_s is not None else "-",
                f"{r.mean_delay_net_s:.1f}" if r.mean_delay_net_s is not None else "-",
                f"{r.specificity_pct:.2f}",
                f"{r.sensitivity_pct:.2f}",
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(_COLUMNS))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    return "\n".join(lines) + "\n"
