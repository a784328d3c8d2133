"""Preprocessing and local-binary-pattern symbolization of iEEG channels.

Raw channels are band-passed 0.5-150 Hz with a causal 4th-order Butterworth
(direct-form SOS, forward only; the target is online operation, so no
zero-phase filtering) and decimated to 512 Hz by integer stride.  Each
sampling point then gets an l-bit code from the signs of the next l temporal
differences: bit 1 where the signal strictly rises, 0 otherwise (equality
counts as 0, which matters for 16-bit integer data), first-in-time difference
in the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import signal

from .errors import DataError, UnsupportedRateError

FS_TARGET = 512
WARMUP_S = 1.0  # filtered output before this is transient: excluded from training


@dataclass(frozen=True)
class LbpConfig:
    """Code length and preprocessing band; defaults are fixed for all patients."""

    l: int = 6
    fs_target: int = FS_TARGET
    band: tuple = (0.5, 150.0)
    filter_order: int = 4

    def __post_init__(self):
        if not 1 <= self.l < 7:
            # a 0.5 s window holds 256 codes and must allow every code to
            # occur: 256 > 2**(l+1)
            raise DataError(f"LBP code length must satisfy 1 <= l < 7, got {self.l}")
        if self.fs_target != FS_TARGET:
            raise DataError(f"target rate is fixed at {FS_TARGET} Hz")


@lru_cache(maxsize=8)
def _design_sos(fs_in: int, band: tuple, order: int) -> np.ndarray:
    return signal.butter(order, band, btype="bandpass", fs=fs_in, output="sos")


def bandpass_response(freqs_hz: np.ndarray, fs_in: int, cfg: LbpConfig = LbpConfig()) -> np.ndarray:
    """Complex frequency response of the preprocessing filter at the given frequencies."""
    sos = _design_sos(fs_in, cfg.band, cfg.filter_order)
    _, h = signal.sosfreqz(sos, worN=2 * np.pi * np.asarray(freqs_hz) / fs_in)
    return h


def decimation_factor(fs_in: int, cfg: LbpConfig = LbpConfig()) -> int:
    if fs_in < cfg.fs_target or fs_in % cfg.fs_target != 0:
        raise UnsupportedRateError(
            f"input rate {fs_in} Hz is not an integer multiple of {cfg.fs_target} Hz"
        )
    return fs_in // cfg.fs_target


def preprocess(samples: np.ndarray, fs_in: int, cfg: LbpConfig = LbpConfig()) -> np.ndarray:
    """Band-pass and decimate channel data to 512 Hz.

    `samples` is (n_channels, n_samples) or a single channel (n_samples,).
    Returns float64 at 512 Hz, same leading shape.
    """
    factor = decimation_factor(fs_in, cfg)
    x = np.asarray(samples, dtype=np.float64)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if not np.isfinite(x).all():
        raise DataError("samples contain non-finite values")
    sos = _design_sos(fs_in, cfg.band, cfg.filter_order)
    y = signal.sosfilt(sos, x, axis=1)
    if factor > 1:
        y = y[:, ::factor]
    return y[0] if single else y


def lbp_stream(samples: np.ndarray, l: int = 6) -> np.ndarray:
    """l-bit code per sampling point, stride 1; N samples give N - l codes."""
    x = np.asarray(samples)
    if x.ndim != 1:
        raise DataError("lbp_stream takes a single channel")
    if x.shape[0] < l + 1:
        raise DataError(f"need at least {l + 1} samples to emit one code, got {x.shape[0]}")
    bits = (np.diff(x) > 0).astype(np.uint8)
    weights = (1 << np.arange(l - 1, -1, -1)).astype(np.uint8)  # MSB first
    windows = np.lib.stride_tricks.sliding_window_view(bits, l)
    return (windows * weights).sum(axis=1, dtype=np.uint16).astype(np.uint8)


def lbp_matrix(samples: np.ndarray, l: int = 6) -> np.ndarray:
    """Time-major code matrix (n_codes, n_channels) for multi-channel data."""
    x = np.atleast_2d(np.asarray(samples))
    if x.shape[1] < l + 1:
        raise DataError(f"need at least {l + 1} samples to emit one code, got {x.shape[1]}")
    bits = (np.diff(x, axis=1) > 0).astype(np.uint8)
    weights = (1 << np.arange(l - 1, -1, -1)).astype(np.uint16)
    windows = np.lib.stride_tricks.sliding_window_view(bits, l, axis=1)
    return np.ascontiguousarray(
        (windows * weights).sum(axis=2, dtype=np.uint16).T.astype(np.uint8)
    )
