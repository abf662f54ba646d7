"""Deterministic per-record seed derivation.

Every generated artifact gets its own 64-bit seed computed from the master
seed plus a textual identity (source id, stage name, realization index), so
results never depend on worker scheduling and any record can be replayed in
isolation.
"""
from __future__ import annotations

from .errors import InvalidParameterError

MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixer (public-domain constants)."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return (x ^ (x >> 31)) & MASK64


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & MASK64
    return h


def derive_seed(master: int, source_id: str, realization: int, stage: str) -> int:
    """Derive the seed for one (source, realization, stage) triple.

    splitmix64(splitmix64(master) XOR fnv1a64("source:stage:realization")),
    bit-exact on any platform.
    """
    if not 0 <= master <= MASK64:
        raise InvalidParameterError(f"master seed must fit in 64 unsigned bits, got {master}")
    if realization < 0:
        raise InvalidParameterError(f"realization must be >= 0, got {realization}")
    key = f"{source_id}:{stage}:{realization}".encode("utf-8")
    return splitmix64((splitmix64(master) ^ fnv1a64(key)) & MASK64)
