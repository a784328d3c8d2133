"""Projection of per-electrode LBP codes into hypervector space.

At every sampling point the codes of all n electrodes are bound to their
electrode vectors and bundled into one spatial record S; 256 consecutive
records (one 0.5 s block at 512 Hz) are bundled again into the histogram
vector H.  H windows step by a full block ("updated every 0.5 s") while the
codes themselves have stride 1.

Two routes compute the same bits: the public per-record operations built on
`Accumulator` (clear, used for small inputs and as the reference in tests)
and `encode_recording`, which drives the packed bit-sliced kernels over a
whole code matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DataError, DimensionMismatchError
from .hypervector import (
    KIND_CODE,
    KIND_ELECTRODE,
    KIND_TIE_SPATIAL,
    KIND_TIE_WINDOW,
    Accumulator,
    HdConfig,
    Hypervector,
    TieRule,
    bind,
    hamming_words,
    random_words,
    tie_words,
)

WINDOW_RECORDS = _kernels.WINDOW_RECORDS  # 256 codes per 0.5 s window at 512 Hz
_CHUNK_WINDOWS = 64  # kernel chunk size; bounds tie-material memory to ~20 MB


@dataclass(frozen=True)
class ItemMemory:
    """Seeded table of quasi-orthogonal atomic vectors for codes and electrodes.

    Fully determined by (cfg.seed, cfg.d, l, n_electrodes); electrode vector j
    is identical across item memories that share a seed, whatever n is.
    """

    cfg: HdConfig
    l: int
    n_electrodes: int
    code_words: np.ndarray      # (2**l, n_words) uint64
    electrode_words: np.ndarray  # (n_electrodes, n_words) uint64

    @property
    def n_codes(self) -> int:
        return self.code_words.shape[0]

    def code_vector(self, code: int) -> Hypervector:
        if not 0 <= code < self.n_codes:
            raise DataError(f"LBP code out of range: {code}")
        return Hypervector(self.cfg, self.code_words[code].copy())

    def electrode_vector(self, j: int) -> Hypervector:
        if not 0 <= j < self.n_electrodes:
            raise DataError(f"electrode index out of range: {j}")
        return Hypervector(self.cfg, self.electrode_words[j].copy())


def im_new(cfg: HdConfig, l: int = 6, n_electrodes: int = 1) -> ItemMemory:
    """Generate the 2**l code vectors and n electrode vectors for one patient."""
    if not 1 <= l < 7:
        raise DataError(f"LBP code length must satisfy 1 <= l < 7, got {l}")
    if n_electrodes < 1:
        raise DataError(f"need at least one electrode, got {n_electrodes}")
    code_words = np.stack([random_words(cfg, KIND_CODE, i) for i in range(2**l)])
    elec_words = np.stack([random_words(cfg, KIND_ELECTRODE, j) for j in range(n_electrodes)])
    code_words.flags.writeable = False
    elec_words.flags.writeable = False
    return ItemMemory(cfg, l, n_electrodes, code_words, elec_words)


def spatial_tie(cfg: HdConfig, sample_ordinal: int) -> TieRule:
    """Tie rule for the spatial majority at one sampling point."""
    return TieRule(
        cfg,
        kind=KIND_TIE_SPATIAL,
        index=sample_ordinal // WINDOW_RECORDS,
        row=sample_ordinal % WINDOW_RECORDS,
        rows=WINDOW_RECORDS,
    )


def window_tie(cfg: HdConfig, window_index: int) -> TieRule:
    return TieRule(cfg, kind=KIND_TIE_WINDOW, index=window_index)


def encode_spatial(codes, im: ItemMemory, sample_ordinal: int = 0) -> Hypervector:
    """Spatial record S: majority over {bind(E_j, C_code_j)} for all electrodes."""
    codes = np.asarray(codes)
    if codes.shape != (im.n_electrodes,):
        raise DataError(
            f"expected one code per electrode ({im.n_electrodes}), got {codes.shape}"
        )
    acc = Accumulator(im.cfg)
    for j, code in enumerate(codes):
        acc.add(bind(im.electrode_vector(j), im.code_vector(int(code))))
    return acc.threshold(spatial_tie(im.cfg, sample_ordinal))


def encode_window(records, cfg: HdConfig, window_index: int = 0) -> Hypervector:
    """Histogram vector H: majority over exactly 256 consecutive spatial records."""
    records = list(records)
    if len(records) != WINDOW_RECORDS:
        raise DataError(f"a window bundles exactly {WINDOW_RECORDS} records, got {len(records)}")
    acc = Accumulator(cfg)
    for r in records:
        acc.add(r)
    return acc.threshold(window_tie(cfg, window_index))


def window_count(n_codes: int) -> int:
    """Whole 0.5 s windows available from a code stream."""
    return n_codes // WINDOW_RECORDS


def encode_recording(code_matrix: np.ndarray, im: ItemMemory) -> np.ndarray:
    """Packed H rows (n_windows, n_words) for a whole recording's code matrix.

    `code_matrix` is time-major, shape (n_codes, n_electrodes); trailing codes
    that do not fill a 256-block are dropped.  Bit-identical to folding
    encode_spatial/encode_window over the same data.
    """
    code_matrix = np.ascontiguousarray(code_matrix, dtype=np.uint8)
    if code_matrix.ndim != 2 or code_matrix.shape[1] != im.n_electrodes:
        raise DimensionMismatchError(
            f"code matrix must be (n_codes, {im.n_electrodes}), got {code_matrix.shape}"
        )
    if code_matrix.size and code_matrix.max() >= im.n_codes:
        raise DataError("code value out of range for the item memory")
    cfg = im.cfg
    n = im.n_electrodes
    n_win = window_count(code_matrix.shape[0])
    out = np.empty((n_win, cfg.n_words), dtype=np.uint64)
    use_tie_s = n % 2 == 0
    dummy = np.zeros((1, 1), dtype=np.uint64)
    for start in range(0, n_win, _CHUNK_WINDOWS):
        stop = min(start + _CHUNK_WINDOWS, n_win)
        windows = range(start, stop)
        if use_tie_s:
            tie_s = np.concatenate(
                [tie_words(cfg, KIND_TIE_SPATIAL, w, WINDOW_RECORDS) for w in windows]
            )
        else:
            tie_s = dummy
        tie_w = np.concatenate([tie_words(cfg, KIND_TIE_WINDOW, w) for w in windows])
        rows = code_matrix[start * WINDOW_RECORDS : stop * WINDOW_RECORDS]
        out[start:stop] = _kernels.encode_windows(
            rows, im.code_words, im.electrode_words, tie_s, use_tie_s, tie_w, n
        )
    return out


def reconstruct_histogram(h: Hypervector, im: ItemMemory) -> np.ndarray:
    """Relative-frequency estimates for all 2**l codes from one H vector.

    H is built from electrode-bound code vectors, so the code vectors are
    probed through each electrode binding and the similarities averaged:
    estimate_i = mean_j (1 - 2 * normHamming(H, E_j xor C_i)).  Diagnostic
    only; classification never uses this.
    """
    if h.cfg.d != im.cfg.d:
        raise DimensionMismatchError("histogram vector does not match this item memory")
    probes = im.electrode_words[:, None, :] ^ im.code_words[None, :, :]
    dist = hamming_words(h.words, probes).astype(np.float64) / im.cfg.d
    return (1.0 - 2.0 * dist).mean(axis=0)
