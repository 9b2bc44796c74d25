"""Keyed 64-bit mixing used to determinize every random choice.

All pseudo-random decisions in the package (neighbor selection, random
flips, training-sample draws) are pure functions of a small tuple of
integers hashed through :func:`keyed_mix`.  The scalar and numpy versions
produce identical values; ``tests/test_mixing.py`` pins golden vectors.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def tag(name: str) -> int:
    """Turn a short ASCII tag such as ``"SEL"`` into a 64-bit word."""
    raw = name.encode("ascii")
    if len(raw) > 8:
        raise ValueError("tags are at most 8 ASCII characters")
    return int.from_bytes(raw, "little")


TAG_SELECT = tag("SEL")
TAG_FLIP = tag("FLIP")
TAG_DRAW = tag("DRAW")
TAG_PERMUTE = tag("PERM")


def splitmix64(x: int) -> int:
    z = (x + _GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def keyed_mix(*words: int) -> int:
    """Fold the words into one 64-bit key, left to right."""
    h = 0
    for w in words:
        h = splitmix64(h ^ (w & MASK64))
    return h


@lru_cache(maxsize=1 << 14)
def position_hash(i: int) -> int:
    return splitmix64(i & MASK64)


def set_hash(positions) -> int:
    """Additive hash of a set of positions; ``set_hash(s | {x}) = set_hash(s) + position_hash(x)``."""
    h = 0
    for i in positions:
        h = (h + position_hash(i)) & MASK64
    return h


def unit_float(key: int) -> float:
    """Map a 64-bit key to a float in [0, 1) using its top 53 bits."""
    return (key >> 11) * (1.0 / (1 << 53))


# numpy counterparts -------------------------------------------------------

def splitmix64_np(x: np.ndarray) -> np.ndarray:
    # wraparound is the point; numpy warns on 0-d overflow
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def keyed_mix_np(*words) -> np.ndarray:
    """Broadcasting version of :func:`keyed_mix`. Python ints are masked to 64 bits."""
    h = np.zeros((), dtype=np.uint64)
    for w in words:
        if isinstance(w, (int, np.integer)):
            w = np.uint64(int(w) & MASK64)
        else:
            w = np.asarray(w).astype(np.uint64, copy=False)
        h = splitmix64_np(h ^ w)
    return h


def position_hash_np(positions) -> np.ndarray:
    return splitmix64_np(np.asarray(positions, dtype=np.uint64))


def unit_float_np(keys: np.ndarray) -> np.ndarray:
    return (np.asarray(keys, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
