"""Recording container, native HDSR v1 file format, and a synthetic generator.

HDSR v1 layout, little-endian:
  magic "HDSR" (4B), version u16, fs_in u32, n_electrodes u16, n_samples u64,
  onset_idx u64, offset_idx u64, patient_id u16 length + UTF-8 bytes,
  then samples as i16, channel-major (all of channel 0, then channel 1, ...).

The generator produces annotated recordings shaped like the clinical data:
an interictal stretch, an ictal segment of skewed sawtooth oscillations on a
majority of electrodes (slow rise, fast fall, so LBP histograms polarize),
and a postictal stretch.  Deterministic in the seed.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, replace

import numpy as np
from scipy import signal as _sig

from .errors import DataError
from .lbp import bandpass_response

MAGIC = b"HDSR"
VERSION = 1
_HEADER = struct.Struct("<4sHIHQQQ")
_MAX_ELECTRODES = 1024

# ictal waveform shaping (relative to noise_amp)
_ICTAL_GAIN = 8.0          # oscillation amplitude multiplier
_ICTAL_NOISE_FRAC = 0.06   # residual noise on seizing electrodes
_ICTAL_ELECTRODE_FRAC = 2 / 3
# noise synthesis: boost the pipeline filter's roll-off by up to 1/cap so the
# band-passed noise stays spectrally flat almost to Nyquist and its LBP codes
# stay near-uniform (the 8% histogram bound, with margin)
_NOISE_COMP_CAP = 0.0625


@dataclass
class Recording:
    """Annotated multi-electrode signal: interictal | ictal | postictal."""

    patient_id: str
    fs_in: int
    samples: np.ndarray  # (n_electrodes, n_samples) int16
    onset_idx: int       # first ictal sample, in fs_in units
    offset_idx: int      # one past the last ictal sample, in fs_in units

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.int16)
        self.validate()

    def validate(self) -> None:
        if self.samples.ndim != 2:
            raise DataError("samples: expected a (n_electrodes, n_samples) matrix")
        n, t = self.samples.shape
        if not 1 <= n <= _MAX_ELECTRODES:
            raise DataError(f"n_electrodes: must be in [1, {_MAX_ELECTRODES}], got {n}")
        if self.fs_in <= 0:
            raise DataError(f"fs_in: must be positive, got {self.fs_in}")
        if not 0 < self.onset_idx < self.offset_idx <= t:
            raise DataError(
                f"onset_idx/offset_idx: need 0 < onset < offset <= {t}, "
                f"got {self.onset_idx}, {self.offset_idx}"
            )

    @property
    def n_electrodes(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.fs_in

    @property
    def onset_s(self) -> float:
        return self.onset_idx / self.fs_in

    @property
    def offset_s(self) -> float:
        return self.offset_idx / self.fs_in

    @property
    def seizure_len_s(self) -> float:
        return (self.offset_idx - self.onset_idx) / self.fs_in


def save_recording(rec: Recording, path) -> None:
    with open(path, "wb") as f:
        _write_recording(rec, f)


def _write_recording(rec: Recording, f) -> None:
    pid = rec.patient_id.encode("utf-8")
    if len(pid) > 0xFFFF:
        raise DataError("patient_id: longer than 65535 bytes")
    f.write(
        _HEADER.pack(
            MAGIC, VERSION, rec.fs_in, rec.n_electrodes, rec.n_samples,
            rec.onset_idx, rec.offset_idx,
        )
    )
    f.write(struct.pack("<H", len(pid)))
    f.write(pid)
    f.write(rec.samples.astype("<i2").tobytes())


def recording_to_bytes(rec: Recording) -> bytes:
    buf = io.BytesIO()
    _write_recording(rec, buf)
    return buf.getvalue()


def load_recording(path) -> Recording:
    with open(path, "rb") as f:
        data = f.read()
    return recording_from_bytes(data)


def recording_from_bytes(data: bytes) -> Recording:
    if len(data) < _HEADER.size:
        raise DataError("truncated file: header incomplete")
    magic, version, fs_in, n, n_samples, onset, offset = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DataError(f"bad magic: expected {MAGIC!r}, got {magic!r}")
    if version != VERSION:
        raise DataError(f"unsupported version: {version}")
    pos = _HEADER.size
    if len(data) < pos + 2:
        raise DataError("truncated file: patient_id length missing")
    (pid_len,) = struct.unpack_from("<H", data, pos)
    pos += 2
    if len(data) < pos + pid_len:
        raise DataError("truncated file: patient_id incomplete")
    patient_id = data[pos : pos + pid_len].decode("utf-8")
    pos += pid_len
    expected = n * n_samples * 2
    payload = data[pos : pos + expected]
    if len(payload) != expected:
        raise DataError(
            f"truncated file: expected {expected} sample bytes, got {len(payload)}"
        )
    samples = np.frombuffer(payload, dtype="<i2").reshape(n, n_samples).astype(np.int16)
    return Recording(patient_id, fs_in, samples, onset, offset)


@dataclass(frozen=True)
class SynthParams:
    """Knobs of the seeded synthetic iEEG generator."""

    n_electrodes: int = 36
    seizure_len_s: float = 20.0
    ictal_freq_hz: float = 3.0
    asymmetry: float = 0.85   # rise fraction of the sawtooth period
    noise_amp: float = 1500.0  # interictal noise scale, ADC units
    seed: int = 0
    interictal_s: float = 180.0
    postictal_s: float = 180.0

    def __post_init__(self):
        if self.n_electrodes < 1:
            raise DataError("n_electrodes: must be >= 1")
        if self.seizure_len_s < 10.0:
            raise DataError(f"seizure_len_s: must be >= 10 s, got {self.seizure_len_s}")
        if not 0.5 <= self.ictal_freq_hz <= 150.0:
            raise DataError("ictal_freq_hz: must lie inside the 0.5-150 Hz passband")
        if not 0.5 < self.asymmetry < 1.0:
            raise DataError("asymmetry: rise fraction must be in (0.5, 1)")
        if self.noise_amp <= 0:
            raise DataError("noise_amp: must be positive")


def _background_noise(rng: np.random.Generator, n: int, total: int, amp: float, fs: int) -> np.ndarray:
    """Noise whose post-preprocessing spectrum is nearly flat to ~0.9 Nyquist.

    Synthesized in the frequency domain with weight 1/max(|H|, cap), H the
    preprocessing band-pass: the pipeline filter then undoes the weighting,
    leaving difference signs close to i.i.d. and LBP code histograms close to
    uniform.  `amp` scales the pre-filter standard deviation.
    """
    freqs = np.fft.rfftfreq(total, d=1.0 / fs)
    gain = 1.0 / np.maximum(np.abs(bandpass_response(freqs, fs)), _NOISE_COMP_CAP)
    gain[0] = 0.0
    spectrum = np.fft.rfft(rng.standard_normal((n, total)), axis=1) * gain
    x = np.fft.irfft(spectrum, n=total, axis=1)
    return x * (amp / np.sqrt(np.mean(gain**2)))


def synth_recording(p: SynthParams, patient_id: str = "SYN", fs: int = 512) -> Recording:
    """Deterministic synthetic recording with one annotated seizure."""
    rng = np.random.default_rng(p.seed)
    n = p.n_electrodes
    n_pre = int(round(p.interictal_s * fs))
    n_ict = int(round(p.seizure_len_s * fs))
    n_post = int(round(p.postictal_s * fs))
    total = n_pre + n_ict + n_post

    x = _background_noise(rng, n, total, p.noise_amp, fs)

    n_seizing = max(1, int(np.ceil(n * _ICTAL_ELECTRODE_FRAC)))
    seizing = rng.choice(n, size=n_seizing, replace=False)
    t = np.arange(n_ict) / fs
    phases = rng.uniform(0, 2 * np.pi, size=n_seizing)
    gains = _ICTAL_GAIN * p.noise_amp * rng.uniform(0.7, 1.0, size=n_seizing)
    for row, phase, gain in zip(seizing, phases, gains):
        saw = _sig.sawtooth(2 * np.pi * p.ictal_freq_hz * t + phase, width=p.asymmetry)
        burst = gain * saw + x[row, n_pre : n_pre + n_ict] * _ICTAL_NOISE_FRAC
        x[row, n_pre : n_pre + n_ict] = burst

    samples = np.clip(np.round(x), -32768, 32767).astype(np.int16)
    return Recording(patient_id, fs, samples, n_pre, n_pre + n_ict)


def synth_patient(
    params: SynthParams, n_recordings: int, patient_id: str = "SYN"
) -> list[Recording]:
    """A patient's worth of recordings: same electrodes, fresh seizure per seed."""
    recs = []
    for i in range(n_recordings):
        p = replace(params, seed=params.seed + i)
        recs.append(synth_recording(p, patient_id=f"{patient_id}-{i:02d}"))
    return recs
