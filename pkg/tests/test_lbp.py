import numpy as np
import pytest

from hdseizure.errors import DataError, UnsupportedRateError
from hdseizure.lbp import (
    LbpConfig,
    bandpass_response,
    decimation_factor,
    lbp_matrix,
    lbp_stream,
    preprocess,
)


def _sine(freq, fs, seconds=8.0, amp=1000.0):
    t = np.arange(int(seconds * fs)) / fs
    return amp * np.sin(2 * np.pi * freq * t)


def _steady_rms(x, fs):
    tail = x[int(2.0 * fs) :]  # skip the causal-filter transient
    return np.sqrt(np.mean(tail**2))


def test_dc_is_rejected():
    x = np.full(512 * 20, 1234.0)
    y = preprocess(x, 512)
    # the 0.5 Hz high-pass drains the step at roughly a decade per second
    assert np.abs(y[512 * 10 :]).max() < 0.01
    assert np.abs(y[512 * 10 :]).max() < np.abs(y[512 * 5 :]).max() < np.abs(y).max()


def test_50hz_preserved_within_1db():
    fs = 512
    x = _sine(50.0, fs)
    y = preprocess(x, fs)
    measured_gain = _steady_rms(y, fs) / _steady_rms(x, fs)
    designed_gain = abs(bandpass_response(np.array([50.0]), fs)[0])
    assert abs(20 * np.log10(designed_gain)) < 1.0
    assert abs(20 * np.log10(measured_gain / designed_gain)) < 0.1


def test_200hz_attenuated_20db():
    fs = 512
    x = _sine(200.0, fs)
    y = preprocess(x, fs)
    measured_gain = _steady_rms(y, fs) / _steady_rms(x, fs)
    designed_gain = abs(bandpass_response(np.array([200.0]), fs)[0])
    assert 20 * np.log10(designed_gain) <= -20.0
    assert 20 * np.log10(measured_gain) <= -20.0


def test_decimation_from_1024():
    fs = 1024
    x = _sine(50.0, fs, seconds=6.0)
    y = preprocess(x, fs)
    assert y.shape[0] == x.shape[0] // 2
    # tone survives the downsample at full amplitude
    assert _steady_rms(y, 512) == pytest.approx(_steady_rms(x, fs), rel=0.02)


def test_unsupported_rates():
    x = np.zeros(4096)
    with pytest.raises(UnsupportedRateError):
        preprocess(x, 500)
    with pytest.raises(UnsupportedRateError):
        preprocess(x, 768)  # 1.5x is not an integer ratio
    assert decimation_factor(2048) == 4


def test_non_finite_samples_rejected():
    x = np.zeros(4096)
    x[100] = np.nan
    with pytest.raises(DataError):
        preprocess(x, 512)


def test_lbp_config_bounds():
    with pytest.raises(DataError):
        LbpConfig(l=7)
    with pytest.raises(DataError):
        LbpConfig(l=0)
    assert LbpConfig(l=6).l == 6


def test_monotone_sequences():
    up = np.arange(50, dtype=np.int16)
    down = up[::-1].copy()
    assert (lbp_stream(up, 6) == 63).all()
    assert (lbp_stream(down, 6) == 0).all()
    # equality maps to bit 0: a constant series codes as 0
    assert (lbp_stream(np.zeros(20, dtype=np.int16), 6) == 0).all()


def test_alternating_hand_enumerated():
    # diffs: +,-,+,-,+,- -> bits 1,0,1,0,1,0 MSB-first -> 0b101010 = 42
    codes = lbp_stream(np.array([0, 1, 0, 1, 0, 1, 0], dtype=np.int16), 6)
    assert codes.tolist() == [42]


def test_count_law_exact():
    rng = np.random.default_rng(0)
    for n in (7, 8, 100, 513):
        x = rng.integers(-100, 100, size=n).astype(np.int16)
        for l in (1, 3, 6):
            assert lbp_stream(x, l).shape[0] == n - l


def test_shift_equivariance():
    rng = np.random.default_rng(1)
    x = rng.integers(-1000, 1000, size=300).astype(np.int16)
    full = lbp_stream(x, 6)
    shifted = lbp_stream(x[1:], 6)
    assert np.array_equal(full[1:], shifted)


def test_amplitude_and_offset_invariance():
    rng = np.random.default_rng(2)
    x = rng.integers(-1000, 1000, size=400).astype(np.int64)
    base = lbp_stream(x, 6)
    assert np.array_equal(base, lbp_stream(3 * x + 7, 6))
    assert np.array_equal(base, lbp_stream(x.astype(np.float64) * 0.5 - 1e6, 6))


def test_too_short_input():
    with pytest.raises(DataError):
        lbp_stream(np.zeros(6), 6)
    assert lbp_stream(np.zeros(7), 6).shape[0] == 1


def test_matrix_matches_per_channel_stream():
    rng = np.random.default_rng(3)
    x = rng.integers(-500, 500, size=(5, 200)).astype(np.int16)
    mat = lbp_matrix(x, 6)
    assert mat.shape == (194, 5)
    for ch in range(5):
        assert np.array_equal(mat[:, ch], lbp_stream(x[ch], 6))
