"""Bit-packed binary hypervector algebra.

Vectors are d-dimensional dense binary vectors stored 64 components per
machine word: component i lives in word i // 64 at bit i % 64 (little-endian
bit order within the word). d may be any value >= 64; when d is not a
multiple of 64 the trailing pad bits of the last word are kept at zero and
are excluded from every count.

All randomness is drawn from counter-based Philox streams keyed by
(seed, namespace-tag), so any two processes configured with the same
(d, seed) produce bit-identical vectors, bundles and tie decisions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DimensionMismatchError

# Namespace tags for the keyed Philox streams. Each (kind, index) pair is an
# independent deterministic stream; kinds keep the symbol namespaces disjoint.
KIND_CODE = 1        # LBP-code atomic vectors C_i
KIND_ELECTRODE = 2   # electrode-name atomic vectors E_j
KIND_TIE_SPATIAL = 3  # tie bits for per-sample spatial majorities
KIND_TIE_WINDOW = 4   # tie bits for the 256-record window majority
KIND_TIE_PROTO = 5    # tie bits for prototype thresholding (index = class id)
KIND_TIE_ADHOC = 6    # free-form contexts (tests, library users)

_WORD_BITS = 64
_U64 = np.uint64


def _philox_words(seed: int, kind: int, index: int, n_words: int) -> np.ndarray:
    """Raw uint64 words from the Philox stream keyed by (seed, kind<<56 | index)."""
    if not 0 <= index < (1 << 56):
        raise ValueError(f"stream index out of range: {index}")
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, (kind << 56) | index], dtype=_U64)
    bg = np.random.Philox(key=key)
    return bg.random_raw(n_words).astype(_U64, copy=False)


@dataclass(frozen=True)
class HdConfig:
    """Dimensionality and reproducibility seed of one hypervector space."""

    d: int = 10_000
    seed: int = 1

    def __post_init__(self):
        if self.d < 64:
            raise DataError(f"hypervector dimensionality must be >= 64, got {self.d}")
        if not 0 <= self.seed < (1 << 64):
            raise DataError(f"seed must fit in 64 bits, got {self.seed}")

    @property
    def n_words(self) -> int:
        return (self.d + _WORD_BITS - 1) // _WORD_BITS

    @property
    def pad_mask(self) -> np.uint64:
        """Mask of valid bits in the last word (all-ones when d % 64 == 0)."""
        rem = self.d % _WORD_BITS
        if rem == 0:
            return _U64(0xFFFFFFFFFFFFFFFF)
        return _U64((1 << rem) - 1)


def _mask_pad(cfg: HdConfig, words: np.ndarray) -> np.ndarray:
    words[-1] &= cfg.pad_mask
    return words


def random_words(cfg: HdConfig, kind: int, index: int) -> np.ndarray:
    """Packed words of one atomic vector, pad bits zeroed."""
    return _mask_pad(cfg, _philox_words(cfg.seed, kind, index, cfg.n_words))


def tie_words(cfg: HdConfig, kind: int, index: int, rows: int = 1) -> np.ndarray:
    """Deterministic tie-break bits: (rows, n_words) block for one context."""
    block = _philox_words(cfg.seed, kind, index, rows * cfg.n_words)
    block = block.reshape(rows, cfg.n_words)
    block[:, -1] &= cfg.pad_mask
    return block


class Hypervector:
    """One d-dimensional binary vector, packed into uint64 words.

    Instances are immutable after creation (the word buffer is marked
    read-only); every operation returns a fresh vector.
    """

    __slots__ = ("cfg", "words")

    def __init__(self, cfg: HdConfig, words: np.ndarray):
        words = np.ascontiguousarray(words, dtype=_U64)
        if words.shape != (cfg.n_words,):
            raise DimensionMismatchError(
                f"expected {cfg.n_words} words for d={cfg.d}, got shape {words.shape}"
            )
        if int(words[-1] & ~cfg.pad_mask) != 0:
            raise DataError("pad bits of the last word must be zero")
        words.flags.writeable = False
        self.cfg = cfg
        self.words = words

    # -- constructors ---------------------------------------------------

    @classmethod
    def random(cls, cfg: HdConfig, kind: int, index: int) -> "Hypervector":
        """Atomic vector of i.i.d. fair bits from the (seed, kind, index) stream."""
        return cls(cfg, random_words(cfg, kind, index))

    @classmethod
    def zero(cls, cfg: HdConfig) -> "Hypervector":
        return cls(cfg, np.zeros(cfg.n_words, dtype=_U64))

    @classmethod
    def from_bits(cls, cfg: HdConfig, bits) -> "Hypervector":
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != (cfg.d,):
            raise DimensionMismatchError(f"expected {cfg.d} bits, got {bits.shape}")
        packed = np.packbits(bits, bitorder="little")
        packed = np.pad(packed, (0, cfg.n_words * 8 - packed.size))
        return cls(cfg, packed.view(_U64).copy())

    # -- views ------------------------------------------------------------

    def to_bits(self) -> np.ndarray:
        """Unpacked 0/1 components, shape (d,), index-addressable."""
        return np.unpackbits(self.words.view(np.uint8), bitorder="little")[: self.cfg.d]

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.cfg.d:
            raise IndexError(i)
        return int((self.words[i // 64] >> _U64(i % 64)) & _U64(1))

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def complement(self) -> "Hypervector":
        return Hypervector(self.cfg, _mask_pad(self.cfg, ~self.words))

    # -- serialization ----------------------------------------------------
    # Layout: u32 little-endian d, then ceil(d/64) u64 little-endian words.

    def to_bytes(self) -> bytes:
        head = np.array([self.cfg.d], dtype="<u4").tobytes()
        return head + self.words.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, seed: int = 0) -> "Hypervector":
        if len(data) < 4:
            raise DataError("truncated hypervector: missing length prefix")
        d = int(np.frombuffer(data[:4], dtype="<u4")[0])
        cfg = HdConfig(d=d, seed=seed)
        body = data[4 : 4 + 8 * cfg.n_words]
        if len(body) != 8 * cfg.n_words:
            raise DataError("truncated hypervector payload")
        return cls(cfg, np.frombuffer(body, dtype="<u8").astype(_U64))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypervector):
            return NotImplemented
        return self.cfg.d == other.cfg.d and bool(np.array_equal(self.words, other.words))

    def __hash__(self):
        return hash((self.cfg.d, self.words.tobytes()))

    def __repr__(self):
        return f"Hypervector(d={self.cfg.d}, ones={self.popcount()})"


def _check_same_space(a: Hypervector, b: Hypervector) -> None:
    if a.cfg.d != b.cfg.d:
        raise DimensionMismatchError(f"dimensionality mismatch: {a.cfg.d} vs {b.cfg.d}")


def bind(a: Hypervector, b: Hypervector) -> Hypervector:
    """Componentwise XOR. Commutative, associative, self-inverse."""
    _check_same_space(a, b)
    return Hypervector(a.cfg, a.words ^ b.words)


def hamming(a: Hypervector, b: Hypervector) -> int:
    """Number of differing components."""
    _check_same_space(a, b)
    return int(np.bitwise_count(a.words ^ b.words).sum())


def hamming_normalized(a: Hypervector, b: Hypervector) -> float:
    return hamming(a, b) / a.cfg.d


def hamming_words(query: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Hamming distances from one packed vector to each row of a packed matrix."""
    return np.bitwise_count(rows ^ query).sum(axis=-1)


@dataclass(frozen=True)
class TieRule:
    """Deterministic replacement for "ties broken at random".

    Bit i of the mask decides component i on an exact majority tie.  The mask
    is a pure function of (cfg.seed, kind, index, row), so bundles are
    reproducible regardless of process, thread or call order.
    """

    cfg: HdConfig
    kind: int = KIND_TIE_ADHOC
    index: int = 0
    row: int = 0
    rows: int = 1

    def mask(self) -> np.ndarray:
        return tie_words(self.cfg, self.kind, self.index, self.rows)[self.row]


class Accumulator:
    """Componentwise counter used to bundle hypervectors by majority.

    Counters are 32-bit: bounded by 256 adds per window and a few hundred
    thousand per training run.
    """

    __slots__ = ("cfg", "counts", "n_added")

    def __init__(self, cfg: HdConfig):
        self.cfg = cfg
        self.counts = np.zeros(cfg.d, dtype=np.int32)
        self.n_added = 0

    def add(self, v: Hypervector) -> "Accumulator":
        if v.cfg.d != self.cfg.d:
            raise DimensionMismatchError(f"dimensionality mismatch: {v.cfg.d} vs {self.cfg.d}")
        self.counts += v.to_bits()
        self.n_added += 1
        return self

    def add_words(self, rows: np.ndarray) -> "Accumulator":
        """Add every row of a packed (m, n_words) matrix."""
        rows = np.atleast_2d(rows)
        bits = np.unpackbits(rows.view(np.uint8), axis=1, bitorder="little")[:, : self.cfg.d]
        self.counts += bits.sum(axis=0, dtype=np.int32)
        self.n_added += rows.shape[0]
        return self

    def merge(self, other: "Accumulator") -> "Accumulator":
        if other.cfg.d != self.cfg.d:
            raise DimensionMismatchError("accumulator dimensionality mismatch")
        self.counts += other.counts
        self.n_added += other.n_added
        return self

    def threshold(self, tie: TieRule) -> Hypervector:
        """Majority vote: 1 where count > n/2, tie bits where count == n/2 (n even)."""
        if self.n_added < 1:
            raise DataError("cannot threshold an empty accumulator")
        doubled = self.counts.astype(np.int64) * 2
        out_bits = (doubled > self.n_added).astype(np.uint8)
        if self.n_added % 2 == 0:
            tied = doubled == self.n_added
            if tied.any():
                tie_bits = np.unpackbits(tie.mask().view(np.uint8), bitorder="little")[: self.cfg.d]
                out_bits[tied] = tie_bits[tied]
        return Hypervector.from_bits(self.cfg, out_bits)

    def state_dict(self) -> dict:
        return {"counts": self.counts.copy(), "n_added": self.n_added}


def bundle(vectors, tie: TieRule) -> Hypervector:
    """Majority of a sequence of hypervectors (convenience wrapper)."""
    vectors = list(vectors)
    if not vectors:
        raise DataError("cannot bundle zero vectors")
    acc = Accumulator(vectors[0].cfg)
    for v in vectors:
        acc.add(v)
    return acc.threshold(tie)
