"""Bit-sliced majority kernels for the window encoder.

The per-sample spatial majority (over n electrodes) and the per-window
temporal majority (over 256 spatial records) are computed on packed uint64
words with vertical carry-save counters, so one machine word processes 64
vector components at once.  Counts are compared against the majority
threshold bit-plane by bit-plane (most significant first), which yields both
the strict-majority mask and the exact-tie mask; tie components are resolved
from the caller-supplied deterministic tie words.

Two variants: an unrolled 7-plane kernel for n <= 127 electrodes (the
clinical electrode counts) and a generic-plane kernel for up to 1024 electrodes.
Both are verified against a naive per-component counter in the tests.
"""

import numpy as np
from numba import njit

WINDOW_RECORDS = 256  # spatial records bundled into one 0.5 s histogram vector

_U0 = np.uint64(0)
_UFULL = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, nogil=True)
def _encode_windows_u7(codes, code_words, elec_words, tie_s, use_tie_s, tie_w, n_thresh, out):
    """Windows for n <= 127 electrodes: 7 unrolled count planes."""
    n_total, n = codes.shape
    W = code_words.shape[1]
    n_win = n_total // 256

    p0 = np.empty(W, np.uint64)
    p1 = np.empty(W, np.uint64)
    p2 = np.empty(W, np.uint64)
    p3 = np.empty(W, np.uint64)
    p4 = np.empty(W, np.uint64)
    p5 = np.empty(W, np.uint64)
    p6 = np.empty(W, np.uint64)
    hp = np.empty((9, W), np.uint64)

    t5 = np.uint64(0) - np.uint64((n_thresh >> 5) & 1)
    t4 = np.uint64(0) - np.uint64((n_thresh >> 4) & 1)
    t3 = np.uint64(0) - np.uint64((n_thresh >> 3) & 1)
    t2 = np.uint64(0) - np.uint64((n_thresh >> 2) & 1)
    t1 = np.uint64(0) - np.uint64((n_thresh >> 1) & 1)
    t0 = np.uint64(0) - np.uint64(n_thresh & 1)

    for w in range(n_win):
        hp[:, :] = _U0
        base = w * 256
        for t in range(256):
            row = base + t
            p0[:] = _U0
            p1[:] = _U0
            p2[:] = _U0
            p3[:] = _U0
            p4[:] = _U0
            p5[:] = _U0
            p6[:] = _U0
            for j in range(n):
                crow = code_words[codes[row, j]]
                erow = elec_words[j]
                for k in range(W):
                    c = crow[k] ^ erow[k]
                    tmp = p0[k] & c
                    p0[k] ^= c
                    c = tmp
                    tmp = p1[k] & c
                    p1[k] ^= c
                    c = tmp
                    tmp = p2[k] & c
                    p2[k] ^= c
                    c = tmp
                    tmp = p3[k] & c
                    p3[k] ^= c
                    c = tmp
                    tmp = p4[k] & c
                    p4[k] ^= c
                    c = tmp
                    tmp = p5[k] & c
                    p5[k] ^= c
                    c = tmp
                    p6[k] ^= c
            for k in range(W):
                # count > n_thresh (planes p6..p0 vs threshold bits, MSB first);
                # n_thresh < 64 so its bit 6 is always 0
                eq = _UFULL
                gt = eq & p6[k]
                eq &= ~p6[k]
                gt |= eq & p5[k] & ~t5
                eq &= ~(p5[k] ^ t5)
                gt |= eq & p4[k] & ~t4
                eq &= ~(p4[k] ^ t4)
                gt |= eq & p3[k] & ~t3
                eq &= ~(p3[k] ^ t3)
                gt |= eq & p2[k] & ~t2
                eq &= ~(p2[k] ^ t2)
                gt |= eq & p1[k] & ~t1
                eq &= ~(p1[k] ^ t1)
                gt |= eq & p0[k] & ~t0
                eq &= ~(p0[k] ^ t0)
                if use_tie_s:
                    s = gt | (eq & tie_s[row, k])
                else:
                    s = gt
                # accumulate S into the 9-plane window counter
                c = s
                for p in range(9):
                    tmp = hp[p, k] & c
                    hp[p, k] ^= c
                    c = tmp
        _window_threshold(hp, tie_w[w], out[w])
    return out


@njit(cache=True, nogil=True)
def _encode_windows_gen(codes, code_words, elec_words, tie_s, use_tie_s, tie_w, n_thresh, n_planes, out):
    """Windows for arbitrary n (<= 1024 electrodes): looped count planes."""
    n_total, n = codes.shape
    W = code_words.shape[1]
    n_win = n_total // 256

    planes = np.empty((n_planes, W), np.uint64)
    carry = np.empty(W, np.uint64)
    hp = np.empty((9, W), np.uint64)

    for w in range(n_win):
        hp[:, :] = _U0
        base = w * 256
        for t in range(256):
            row = base + t
            planes[:, :] = _U0
            for j in range(n):
                crow = code_words[codes[row, j]]
                erow = elec_words[j]
                for k in range(W):
                    carry[k] = crow[k] ^ erow[k]
                for p in range(n_planes):
                    prow = planes[p]
                    for k in range(W):
                        tmp = prow[k] & carry[k]
                        prow[k] ^= carry[k]
                        carry[k] = tmp
            for k in range(W):
                gt = _U0
                eq = _UFULL
                for p in range(n_planes - 1, -1, -1):
                    tb = np.uint64(0) - np.uint64((n_thresh >> p) & 1)
                    pv = planes[p, k]
                    gt |= eq & pv & ~tb
                    eq &= ~(pv ^ tb)
                if use_tie_s:
                    s = gt | (eq & tie_s[row, k])
                else:
                    s = gt
                c = s
                for p in range(9):
                    tmp = hp[p, k] & c
                    hp[p, k] ^= c
                    c = tmp
        _window_threshold(hp, tie_w[w], out[w])
    return out


@njit(cache=True, nogil=True, inline="always")
def _window_threshold(hp, tie_row, out_row):
    """count-of-256 > 128, exact 128 resolved from tie_row."""
    W = hp.shape[1]
    for k in range(W):
        gt = _U0
        eq = _UFULL
        for p in range(8, -1, -1):
            tb = np.uint64(0) - np.uint64((128 >> p) & 1)
            pv = hp[p, k]
            gt |= eq & pv & ~tb
            eq &= ~(pv ^ tb)
        out_row[k] = gt | (eq & tie_row[k])


def encode_windows(codes, code_words, elec_words, tie_s, use_tie_s, tie_w, n):
    """Dispatch to the right kernel; returns packed H rows (n_win, W)."""
    n_win = codes.shape[0] // WINDOW_RECORDS
    W = code_words.shape[1]
    out = np.empty((n_win, W), np.uint64)
    if n <= 127:
        _encode_windows_u7(codes, code_words, elec_words, tie_s, use_tie_s, tie_w, n // 2, out)
    else:
        n_planes = int(n).bit_length()
        _encode_windows_gen(
            codes, code_words, elec_words, tie_s, use_tie_s, tie_w, n // 2, n_planes, out
        )
    return out
