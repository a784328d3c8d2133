"""Binary seizure detection from iEEG: LBP symbolization + HD computing."""

__version__ = "0.1.0"

from .hypervector import (  # noqa: F401
    Accumulator,
    HdConfig,
    Hypervector,
    TieRule,
    bind,
    bundle,
    hamming,
    hamming_normalized,
)
