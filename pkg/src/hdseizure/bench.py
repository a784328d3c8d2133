"""Throughput measurement: windows encoded + classified per second.

Real-time factor is (0.5 s of signal per window) / (wall time per window);
the implantable-efficiency goal is a factor well above 1 on desktop CPUs.
Values are machine-dependent and reported, not asserted here.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from .classifier import AssociativeMemory, classify_rows, train_ictal, train_interictal
from .encoder import WINDOW_RECORDS, encode_recording, im_new
from .hypervector import HdConfig
from .postprocess import LABEL_PERIOD_S


@dataclass
class BenchRow:
    n_electrodes: int
    d: int
    windows: int
    ms_per_window: float
    windows_per_s: float
    realtime_factor: float


def _train_dummy_am(cfg: HdConfig, rows: np.ndarray) -> AssociativeMemory:
    am = AssociativeMemory(cfg)
    half = max(1, rows.shape[0] // 2)
    train_ictal(am, rows[:half])
    # interictal training expects an 80-row span; tile to size
    tiled = np.tile(rows[half:], (80 // max(1, rows.shape[0] - half) + 1, 1))[:80]
    train_interictal(am, tiled)
    return am


def run_bench(
    d_values=(10_000, 1_000),
    n_values=(36, 64, 100),
    windows: int = 40,
    seed: int = 1,
) -> list[BenchRow]:
    rng = np.random.default_rng(seed)
    rows_out = []
    for d in d_values:
        cfg = HdConfig(d=d, seed=seed)
        for n in n_values:
            im = im_new(cfg, 6, n)
            codes = rng.integers(0, 64, size=(windows * WINDOW_RECORDS, n)).astype(np.uint8)
            # warm-up pass compiles the kernel and touches caches
            h = encode_recording(codes[: 2 * WINDOW_RECORDS], im)
            am = _train_dummy_am(cfg, h)
            t0 = time.perf_counter()
            h = encode_recording(codes, im)
            classify_rows(am, h)
            dt = time.perf_counter() - t0
            per_window = dt / windows
            rows_out.append(
                BenchRow(
                    n_electrodes=n,
                    d=d,
                    windows=windows,
                    ms_per_window=per_window * 1e3,
                    windows_per_s=1.0 / per_window,
                    realtime_factor=LABEL_PERIOD_S / per_window,
                )
            )
    return rows_out


def bench_table(rows: list[BenchRow]) -> str:
    header = f"{'n':>5} {'d':>7} {'ms/window':>11} {'windows/s':>11} {'x realtime':>11}"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.n_electrodes:>5} {r.d:>7} {r.ms_per_window:>11.2f} "
            f"{r.windows_per_s:>11.1f} {r.realtime_factor:>11.1f}"
        )
    return "\n".join(lines) + "\n"


def bench_dicts(rows: list[BenchRow]) -> list[dict]:
    return [asdict(r) for r in rows]
