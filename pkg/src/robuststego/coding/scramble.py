"""Keyed permutation of sequences (Fisher-Yates over a 64-bit LCG)."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

LCG_MUL = 6364136223846793005
LCG_INC = 1442695040888963407
MASK64 = (1 << 64) - 1


@lru_cache(maxsize=32)
def permutation(length: int, key: int) -> np.ndarray:
    """Index permutation used by :func:`scramble`; deterministic in (length, key)."""
    perm = list(range(length))
    state = key & MASK64
    for i in range(length - 1, 0, -1):
        state = (state * LCG_MUL + LCG_INC) & MASK64
        # high bits of an LCG are the well-mixed ones
        j = (state >> 32) % (i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    out = np.array(perm, dtype=np.int64)
    out.flags.writeable = False
    return out


def scramble(seq, key: int) -> np.ndarray:
    seq = np.asarray(seq)
    return seq[permutation(len(seq), key)]


def descramble(seq, key: int) -> np.ndarray:
    seq = np.asarray(seq)
    out = np.empty_like(seq)
    out[permutation(len(seq), key)] = seq
    return out
