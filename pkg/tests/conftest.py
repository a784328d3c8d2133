"""Shared fixtures and the naive counting oracles the fast paths are checked against."""

import numpy as np
import pytest

from hdseizure.hypervector import HdConfig, Hypervector


def naive_hamming(a_bits, b_bits) -> int:
    """Per-component loop, independent of the packed popcount path."""
    assert len(a_bits) == len(b_bits)
    return int(sum(1 for x, y in zip(a_bits, b_bits) if x != y))


def naive_majority(rows_bits: np.ndarray, tie_bits: np.ndarray) -> np.ndarray:
    """Integer-counter majority over rows of 0/1 components."""
    rows_bits = np.asarray(rows_bits, dtype=np.int64)
    m = rows_bits.shape[0]
    counts = rows_bits.sum(axis=0)
    out = (2 * counts > m).astype(np.uint8)
    tied = 2 * counts == m
    out[tied] = np.asarray(tie_bits, dtype=np.uint8)[tied]
    return out


def hv_from_bits(cfg: HdConfig, bits) -> Hypervector:
    return Hypervector.from_bits(cfg, np.asarray(bits, dtype=np.uint8))


@pytest.fixture(scope="session")
def cfg64():
    return HdConfig(d=64, seed=2024)


@pytest.fixture(scope="session")
def cfg10k():
    return HdConfig(d=10_000, seed=2024)
