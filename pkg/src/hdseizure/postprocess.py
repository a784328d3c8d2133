"""Final decisions from the per-0.5 s label stream.

A decision is emitted every 0.5 s once ten labels of history exist: seizure
iff the ictal-label count in the last ten is >= the patient threshold t_p.
After a positive decision the detector goes refractory until the vote count
stays below t_p for ten consecutive labels, so one seizure raises one alarm.

t_p is fitted on the training recording: start at 10 (favoring specificity)
and lower it until some decision inside the training ictal segment fires;
equivalently, the largest feasible threshold is the maximum vote count
reached inside the segment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, TrainingFailure

VOTE_WINDOW_LABELS = 10  # 5 s at one label per 0.5 s
LABEL_PERIOD_S = 0.5


@dataclass(frozen=True)
class VoteConfig:
    t_p: int
    window_labels: int = VOTE_WINDOW_LABELS

    def __post_init__(self):
        if not 1 <= self.t_p <= self.window_labels:
            raise DataError(f"t_p must be in [1, {self.window_labels}], got {self.t_p}")


@dataclass(frozen=True)
class Decision:
    time_s: float      # recording offset of the window's last label
    is_seizure: bool
    ictal_votes: int   # in [0, 10]


def vote(history, cfg: VoteConfig, time_s: float = 0.0) -> Decision:
    """Decision over exactly the last ten labels (True = ictal)."""
    labels = [bool(x) for x in history]
    if len(labels) != cfg.window_labels:
        raise DataError(
            f"vote needs exactly {cfg.window_labels} labels, got {len(labels)}"
        )
    votes = sum(labels)
    return Decision(time_s, votes >= cfg.t_p, votes)


def vote_counts(ictal_labels: np.ndarray, window_labels: int = VOTE_WINDOW_LABELS) -> np.ndarray:
    """Sliding ictal-vote counts; entry i covers labels [i-9, i]. First 9 entries absent."""
    labels = np.asarray(ictal_labels, dtype=np.int32)
    if labels.size < window_labels:
        return np.zeros(0, dtype=np.int32)
    kernel = np.ones(window_labels, dtype=np.int32)
    return np.convolve(labels, kernel, mode="valid")


def decision_stream(
    ictal_labels: np.ndarray,
    label_times: np.ndarray,
    t_p: int,
    refractory: bool = True,
) -> list[Decision]:
    """Decisions for a whole label stream (warm-up windows emit nothing)."""
    cfg = VoteConfig(t_p)
    votes = vote_counts(ictal_labels, cfg.window_labels)
    times = np.asarray(label_times, dtype=np.float64)[cfg.window_labels - 1 :]
    out = []
    armed = True
    below = 0
    for t, v in zip(times, votes):
        v = int(v)
        raw = v >= t_p
        if not refractory:
            fire = raw
        elif armed:
            fire = raw
            if fire:
                armed = False
                below = 0
        else:
            fire = False
            if v < t_p:
                below += 1
                if below >= cfg.window_labels:
                    armed = True
            else:
                below = 0
        out.append(Decision(float(t), fire, v))
    return out


def format_decision_log(decisions) -> str:
    """Plain-text decision log: one `time_s,ictal_votes,is_seizure` line each."""
    lines = ["time_s,ictal_votes,is_seizure"]
    lines += [f"{d.time_s:.1f},{d.ictal_votes},{int(d.is_seizure)}" for d in decisions]
    return "\n".join(lines) + "\n"


def parse_decision_log(text: str) -> list[Decision]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "time_s,ictal_votes,is_seizure":
        raise DataError("decision log: missing or unexpected header")
    out = []
    for ln in lines[1:]:
        t, v, s = ln.split(",")
        out.append(Decision(float(t), bool(int(s)), int(v)))
    return out


def fit_threshold(
    ictal_labels: np.ndarray,
    label_times: np.ndarray,
    onset_s: float,
    offset_s: float,
) -> int:
    """Largest t_p in [1, 10] that detects the training ictal segment.

    Containment means the decision timestamp falls in [onset_s, offset_s].
    Raises TrainingFailure when not even t_p = 1 fires inside the segment.
    """
    votes = vote_counts(ictal_labels)
    times = np.asarray(label_times, dtype=np.float64)[VOTE_WINDOW_LABELS - 1 :]
    inside = (times >= onset_s) & (times <= offset_s)
    if not inside.any():
        raise TrainingFailure(
            "no decision window falls inside the training ictal segment"
        )
    best = int(votes[inside].max())
    if best < 1:
        raise TrainingFailure(
            "training seizure not detectable at any threshold (prototypes inadequate)"
        )
    return min(best, VOTE_WINDOW_LABELS)
