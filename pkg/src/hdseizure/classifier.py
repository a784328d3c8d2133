"""Associative memory: two class prototypes queried by Hamming distance.

Training accumulates histogram vectors per class and thresholds the counters
into a prototype; the accumulators persist so later seizures can be added
(few-shot growth) and the prototypes re-thresholded.  Classification labels a
query by the nearer prototype; exact ties go to interictal, which biases the
detector toward specificity.

Model file "HDSZ v1", little-endian:
  magic "HDSZ", version u16, d u32, l u8, n_electrodes u16, seed u64, t_p u8,
  ictal prototype, interictal prototype (hypervector wire format),
  ictal accumulator, interictal accumulator (n_added u32 + d x u32 counts).
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .hypervector import (
    KIND_TIE_PROTO,
    Accumulator,
    HdConfig,
    Hypervector,
    TieRule,
    hamming_normalized,
    hamming_words,
)

MODEL_MAGIC = b"HDSZ"
MODEL_VERSION = 1
_MODEL_HEADER = struct.Struct("<4sHIBHQB")

CLASS_ICTAL = 0
CLASS_INTERICTAL = 1

INTERICTAL_TRAIN_S = 40.0
INTERICTAL_TRAIN_WINDOWS = 80  # 40 s at one H per 0.5 s
ICTAL_TRAIN_MIN_S = 10.0
ICTAL_TRAIN_MAX_S = 30.0


@dataclass
class Label:
    """Classification outcome for one histogram vector."""

    value: str  # "ictal" | "interictal"
    distance_ictal: float
    distance_interictal: float


class AssociativeMemory:
    """Ictal/interictal prototype store with persistent accumulators."""

    def __init__(self, cfg: HdConfig):
        self.cfg = cfg
        self.ictal_acc = Accumulator(cfg)
        self.interictal_acc = Accumulator(cfg)
        self._proto_cache: dict = {}

    @property
    def trained(self) -> bool:
        return self.ictal_acc.n_added > 0 and self.interictal_acc.n_added > 0

    def _prototype(self, which: int, acc: Accumulator) -> Hypervector:
        key = (which, acc.n_added)
        cached = self._proto_cache.get(key)
        if cached is None:
            cached = acc.threshold(TieRule(self.cfg, kind=KIND_TIE_PROTO, index=which))
            self._proto_cache[key] = cached
        return cached

    @property
    def ictal_prototype(self) -> Hypervector:
        if self.ictal_acc.n_added == 0:
            raise DataError("associative memory has no ictal training data")
        return self._prototype(CLASS_ICTAL, self.ictal_acc)

    @property
    def interictal_prototype(self) -> Hypervector:
        if self.interictal_acc.n_added == 0:
            raise DataError("associative memory has no interictal training data")
        return self._prototype(CLASS_INTERICTAL, self.interictal_acc)

    def _invalidate(self):
        self._proto_cache = {}


def ictal_train_span_s(seizure_len_s: float) -> float:
    """Training window from onset: min(max(10 s, seizure length), 30 s), clipped."""
    target = min(max(ICTAL_TRAIN_MIN_S, seizure_len_s), ICTAL_TRAIN_MAX_S)
    return min(target, seizure_len_s)


def train_interictal(am: AssociativeMemory, h_rows: np.ndarray) -> AssociativeMemory:
    """Accumulate exactly 80 interictal H vectors (one 40 s span)."""
    h_rows = np.atleast_2d(h_rows)
    if h_rows.shape[0] != INTERICTAL_TRAIN_WINDOWS:
        raise DataError(
            f"interictal training takes a 40 s span = {INTERICTAL_TRAIN_WINDOWS} "
            f"histogram vectors, got {h_rows.shape[0]}"
        )
    am.interictal_acc.add_words(h_rows)
    am._invalidate()
    return am


def train_ictal(am: AssociativeMemory, h_rows: np.ndarray) -> AssociativeMemory:
    """Accumulate the H vectors of one seizure's training span."""
    h_rows = np.atleast_2d(h_rows)
    if h_rows.shape[0] < 1:
        raise DataError("ictal training span produced no histogram vectors")
    am.ictal_acc.add_words(h_rows)
    am._invalidate()
    return am


def classify(am: AssociativeMemory, h: Hypervector) -> Label:
    """Nearest prototype by normalized Hamming distance; tie -> interictal."""
    if not am.trained:
        raise DataError("associative memory is untrained")
    d_ict = hamming_normalized(h, am.ictal_prototype)
    d_int = hamming_normalized(h, am.interictal_prototype)
    value = "ictal" if d_ict < d_int else "interictal"
    return Label(value, d_ict, d_int)


def classify_rows(am: AssociativeMemory, h_rows: np.ndarray):
    """Vectorized classify: (ictal_mask, dist_ictal, dist_interictal) per row."""
    if not am.trained:
        raise DataError("associative memory is untrained")
    h_rows = np.atleast_2d(h_rows)
    d = float(am.cfg.d)
    d_ict = hamming_words(am.ictal_prototype.words, h_rows) / d
    d_int = hamming_words(am.interictal_prototype.words, h_rows) / d
    return d_ict < d_int, d_ict, d_int


@dataclass
class DetectionModel:
    """Trained artifact: space config, item-memory shape, AM, vote threshold."""

    cfg: HdConfig
    l: int
    n_electrodes: int
    t_p: int
    am: AssociativeMemory

    def validate(self) -> None:
        if not 1 <= self.t_p <= 10:
            raise DataError(f"t_p must be in [1, 10], got {self.t_p}")
        if not self.am.trained:
            raise DataError("model's associative memory is untrained")


def _write_acc(buf, acc: Accumulator) -> None:
    buf.write(struct.pack("<I", acc.n_added))
    buf.write(acc.counts.astype("<u4").tobytes())


def _read_acc(data: bytes, pos: int, cfg: HdConfig):
    if len(data) < pos + 4 + 4 * cfg.d:
        raise DataError("truncated model: accumulator incomplete")
    (n_added,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if n_added > 2**31 - 1:
        raise DataError(f"corrupt model: implausible accumulator size {n_added}")
    counts = np.frombuffer(data[pos : pos + 4 * cfg.d], dtype="<u4").astype(np.int32)
    pos += 4 * cfg.d
    acc = Accumulator(cfg)
    acc.counts = counts
    acc.n_added = n_added
    if n_added and counts.max(initial=0) > n_added:
        raise DataError("corrupt model: accumulator count exceeds n_added")
    return acc, pos


def model_to_bytes(model: DetectionModel) -> bytes:
    model.validate()
    buf = io.BytesIO()
    buf.write(
        _MODEL_HEADER.pack(
            MODEL_MAGIC, MODEL_VERSION, model.cfg.d, model.l,
            model.n_electrodes, model.cfg.seed, model.t_p,
        )
    )
    buf.write(model.am.ictal_prototype.to_bytes())
    buf.write(model.am.interictal_prototype.to_bytes())
    _write_acc(buf, model.am.ictal_acc)
    _write_acc(buf, model.am.interictal_acc)
    return buf.getvalue()


def model_from_bytes(data: bytes) -> DetectionModel:
    if len(data) < _MODEL_HEADER.size:
        raise DataError("truncated model: header incomplete")
    magic, version, d, l, n, seed, t_p = _MODEL_HEADER.unpack_from(data)
    if magic != MODEL_MAGIC:
        raise DataError(f"bad magic: expected {MODEL_MAGIC!r}, got {magic!r}")
    if version != MODEL_VERSION:
        raise DataError(f"unsupported model version: {version}")
    cfg = HdConfig(d=d, seed=seed)
    pos = _MODEL_HEADER.size
    hv_len = 4 + 8 * cfg.n_words
    protos = []
    for _ in range(2):
        if len(data) < pos + hv_len:
            raise DataError("truncated model: prototype incomplete")
        protos.append(Hypervector.from_bytes(data[pos : pos + hv_len], seed=seed))
        pos += hv_len
    am = AssociativeMemory(cfg)
    am.ictal_acc, pos = _read_acc(data, pos, cfg)
    am.interictal_acc, pos = _read_acc(data, pos, cfg)
    # keep the stored prototypes (they equal acc_threshold of the accumulators
    # for any file this package wrote; round-trip tests pin that)
    am._proto_cache = {
        (CLASS_ICTAL, am.ictal_acc.n_added): protos[0],
        (CLASS_INTERICTAL, am.interictal_acc.n_added): protos[1],
    }
    model = DetectionModel(cfg=cfg, l=l, n_electrodes=n, t_p=t_p, am=am)
    model.validate()
    return model


def save_model(model: DetectionModel, path) -> None:
    with open(path, "wb") as f:
        f.write(model_to_bytes(model))


def load_model(path) -> DetectionModel:
    with open(path, "rb") as f:
        return model_from_bytes(f.read())
