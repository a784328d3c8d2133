"""End-to-end glue: recording -> codes -> histogram vectors -> model -> decisions.

Window timing convention: codes are stamped at their first sample, window w
bundles codes [256w, 256w+256) and its label time is the block end
(w+1) * 0.5 s on the 512 Hz grid.  Training spans are selected as whole
window ranges: interictal takes the first 80 windows after the 1 s filter
warm-up, ictal takes floor(2 * span) windows from the first block boundary
at or after the expert onset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifier import (
    INTERICTAL_TRAIN_WINDOWS,
    AssociativeMemory,
    DetectionModel,
    classify_rows,
    ictal_train_span_s,
    train_ictal,
    train_interictal,
)
from .dataset import Recording
from .encoder import WINDOW_RECORDS, ItemMemory, encode_recording, im_new
from .errors import DataError, TrainingFailure
from .hypervector import HdConfig
from .lbp import FS_TARGET, WARMUP_S, LbpConfig, decimation_factor, lbp_matrix, preprocess
from .postprocess import LABEL_PERIOD_S, decision_stream, fit_threshold

_WARMUP_WINDOWS = int(WARMUP_S * FS_TARGET) // WINDOW_RECORDS  # first training window index


@dataclass(frozen=True)
class RunParams:
    """The five-parameter interface: l, the two window lengths, d — plus the seed.

    Window lengths are fixed for all patients; t_p is always learned.
    """

    d: int = 10_000
    seed: int = 1
    l: int = 6
    window_s: float = field(default=0.5, init=False)
    vote_window_s: float = field(default=5.0, init=False)

    @property
    def cfg(self) -> HdConfig:
        return HdConfig(d=self.d, seed=self.seed)

    def lbp_config(self) -> LbpConfig:
        return LbpConfig(l=self.l)

    def item_memory(self, n_electrodes: int) -> ItemMemory:
        return im_new(self.cfg, self.l, n_electrodes)


@dataclass
class EncodedRecording:
    """Histogram-vector stream of one recording plus its annotations."""

    patient_id: str
    n_electrodes: int
    l: int
    h_rows: np.ndarray       # (n_windows, n_words) uint64
    label_times: np.ndarray  # (n_windows,) seconds, block ends
    onset_s: float
    offset_s: float

    @property
    def n_windows(self) -> int:
        return self.h_rows.shape[0]

    @property
    def seizure_len_s(self) -> float:
        return self.offset_s - self.onset_s


def encode(rec: Recording, params: RunParams, im: ItemMemory | None = None) -> EncodedRecording:
    """Preprocess, symbolize and HD-encode one recording."""
    if im is None:
        im = params.item_memory(rec.n_electrodes)
    elif im.n_electrodes != rec.n_electrodes:
        raise DataError(
            f"item memory built for {im.n_electrodes} electrodes, "
            f"recording has {rec.n_electrodes}"
        )
    factor = decimation_factor(rec.fs_in, params.lbp_config())
    y = preprocess(rec.samples, rec.fs_in, params.lbp_config())
    codes = lbp_matrix(y, params.l)
    h_rows = encode_recording(codes, im)
    n_win = h_rows.shape[0]
    label_times = (np.arange(1, n_win + 1)) * LABEL_PERIOD_S
    onset512 = rec.onset_idx // factor
    offset512 = rec.offset_idx // factor
    return EncodedRecording(
        patient_id=rec.patient_id,
        n_electrodes=rec.n_electrodes,
        l=params.l,
        h_rows=h_rows,
        label_times=label_times,
        onset_s=onset512 / FS_TARGET,
        offset_s=offset512 / FS_TARGET,
    )


def interictal_training_rows(enc: EncodedRecording) -> np.ndarray:
    """First 40 s of interictal windows after the filter warm-up."""
    start = _WARMUP_WINDOWS
    stop = start + INTERICTAL_TRAIN_WINDOWS
    if stop * WINDOW_RECORDS > enc.onset_s * FS_TARGET:
        raise DataError(
            "interictal span shorter than 40 s after the 1 s filter warm-up "
            f"(onset at {enc.onset_s:.1f} s)"
        )
    return enc.h_rows[start:stop]


def ictal_training_rows(enc: EncodedRecording) -> np.ndarray:
    """floor(2 * span) windows from the first block boundary at/after onset."""
    span_s = ictal_train_span_s(enc.seizure_len_s)
    k = int(span_s / LABEL_PERIOD_S)
    if k < 1:
        raise DataError(f"ictal segment too short to train on ({enc.seizure_len_s:.2f} s)")
    onset_sample = int(round(enc.onset_s * FS_TARGET))
    w0 = -(-onset_sample // WINDOW_RECORDS)  # ceil
    rows = enc.h_rows[w0 : w0 + k]
    if rows.shape[0] < 1:
        raise DataError("no whole encoding window falls inside the ictal segment")
    return rows


def train_model(encs: list[EncodedRecording], params: RunParams) -> DetectionModel:
    """One-/few-shot training: accumulate every recording, fit t_p as the
    minimum of the per-recording thresholds."""
    if not encs:
        raise DataError("training needs at least one recording")
    n = encs[0].n_electrodes
    if any(e.n_electrodes != n for e in encs):
        raise DataError("training recordings disagree on electrode count")
    am = AssociativeMemory(params.cfg)
    for enc in encs:
        train_interictal(am, interictal_training_rows(enc))
        train_ictal(am, ictal_training_rows(enc))
    model = DetectionModel(cfg=params.cfg, l=params.l, n_electrodes=n, t_p=10, am=am)
    t_p = min(fit_threshold_for(model, enc) for enc in encs)
    model.t_p = t_p
    model.validate()
    return model


def label_stream(model: DetectionModel, enc: EncodedRecording) -> np.ndarray:
    """Boolean ictal labels, one per histogram window."""
    if enc.n_electrodes != model.n_electrodes:
        raise DataError(
            f"model trained for {model.n_electrodes} electrodes, "
            f"recording has {enc.n_electrodes}"
        )
    if enc.l != model.l:
        raise DataError(f"model trained with l={model.l}, recording encoded with l={enc.l}")
    ictal_mask, _, _ = classify_rows(model.am, enc.h_rows)
    return ictal_mask


def fit_threshold_for(model: DetectionModel, enc: EncodedRecording) -> int:
    """t_p fit on one training recording (AM must already include it)."""
    labels = label_stream(model, enc)
    try:
        return fit_threshold(labels, enc.label_times, enc.onset_s, enc.offset_s)
    except TrainingFailure as e:
        raise TrainingFailure(f"{enc.patient_id}: {e}") from None


def detect(model: DetectionModel, enc: EncodedRecording):
    """Decision stream for one recording (refractory collapse applied)."""
    labels = label_stream(model, enc)
    return decision_stream(labels, enc.label_times, model.t_p)
