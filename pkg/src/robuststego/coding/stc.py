"""Syndrome-trellis codes (binary, plus the double-layer ternary construction).

The parity-check matrix is built from an ``h``-row submatrix placed along
the diagonal: message bit ``i`` is the parity of rows ``i`` of every column
in block ``i`` and the following ``h - 1`` blocks. Block widths are
``floor((i+1) n / m) - floor(i n / m)``, so any rate ``m/n`` works. Column
patterns are integers whose bit ``r`` is row ``r`` of the submatrix; the
first and last rows are always set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit


class EmbeddingFailure(RuntimeError):
    """No stego sequence satisfies the syndrome at finite cost."""


@dataclass(frozen=True)
class StcParams:
    h: int = 10
    key: int = 0

    def __post_init__(self):
        if self.h < 2 or self.h > 20:
            raise ValueError("constraint height must lie in 2..20")

    def derive(self, salt: int) -> "StcParams":
        return StcParams(self.h, (self.key * 1_000_003 + salt) & 0xFFFF_FFFF_FFFF_FFFF)


@lru_cache(maxsize=256)
def submatrix(params: StcParams, width: int) -> np.ndarray:
    """Column patterns (as ints) of the ``h x width`` submatrix."""
    rng = np.random.default_rng([params.key, params.h, width])
    cols = rng.integers(0, 1 << params.h, size=width, dtype=np.int64)
    cols |= 1 | (1 << (params.h - 1))
    cols.flags.writeable = False
    return cols


def _layout(n: int, m: int, params: StcParams) -> tuple[np.ndarray, np.ndarray]:
    """Block widths and the (row-truncated) pattern of every column."""
    i = np.arange(m + 1, dtype=np.int64)
    edges = (i * n) // m
    widths = np.diff(edges)
    colpat = np.empty(n, dtype=np.int64)
    for b in range(m):
        w = int(widths[b])
        mask = (1 << min(params.h, m - b)) - 1
        colpat[edges[b] : edges[b + 1]] = submatrix(params, w)[:w] & mask
    return widths, colpat


def parity_check_matrix(n: int, m: int, params: StcParams) -> np.ndarray:
    """Dense ``m x n`` matrix H (for inspection and brute-force checks)."""
    widths, colpat = _layout(n, m, params)
    H = np.zeros((m, n), dtype=np.uint8)
    pos = 0
    for b, w in enumerate(widths):
        for _ in range(w):
            for r in range(params.h):
                if b + r < m and (colpat[pos] >> r) & 1:
                    H[b + r, pos] = 1
            pos += 1
    return H


@njit(cache=True)
def _viterbi(cover, costs, msg, widths, colpat, h):
    n = cover.size
    m = msg.size
    S = 1 << h
    cost = np.full(S, np.inf)
    cost[0] = 0.0
    new = np.empty(S)
    path = np.zeros((n, S), dtype=np.uint8)
    pos = 0
    for i in range(m):
        for _ in range(widths[i]):
            p = colpat[pos]
            c = costs[pos]
            if cover[pos] == 1:
                c0, c1 = c, 0.0
            else:
                c0, c1 = 0.0, c
            for s in range(S):
                a = cost[s] + c0
                b = cost[s ^ p] + c1
                if b < a:
                    new[s] = b
                    path[pos, s] = 1
                else:
                    new[s] = a
            cost, new = new, cost
            pos += 1
        # the lowest state bit is syndrome row i: it must equal the message bit
        bit = msg[i]
        half = S >> 1
        for s in range(half):
            new[s] = cost[(s << 1) | bit]
        for s in range(half, S):
            new[s] = np.inf
        cost, new = new, cost

    total = cost[0]
    stego = np.empty(n, dtype=np.uint8)
    state = 0
    pos = n - 1
    for i in range(m - 1, -1, -1):
        state = ((state << 1) | msg[i]) & (S - 1)
        for _ in range(widths[i]):
            y = path[pos, state]
            stego[pos] = y
            if y:
                state ^= colpat[pos]
            pos -= 1
    return stego, total


@njit(cache=True)
def _syndrome(stego, widths, colpat, m):
    out = np.zeros(m, dtype=np.uint8)
    state = 0
    pos = 0
    for i in range(m):
        for _ in range(widths[i]):
            if stego[pos]:
                state ^= colpat[pos]
            pos += 1
        out[i] = state & 1
        state >>= 1
    return out


def _bits(x, name: str) -> np.ndarray:
    a = np.asarray(x)
    if a.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if a.size and (a.min() < 0 or a.max() > 1):
        raise ValueError(f"{name} must contain only 0/1")
    return a.astype(np.uint8)


def stc_embed(cover_bits, costs, message_bits, params: StcParams = StcParams()) -> np.ndarray:
    """Minimum-cost stego bits with ``H @ stego == message (mod 2)``.

    ``costs[k]`` is paid when stego bit ``k`` differs from the cover bit;
    ``inf`` marks wet elements.
    """
    cover = _bits(cover_bits, "cover")
    msg = _bits(message_bits, "message")
    costs = np.asarray(costs, dtype=np.float64)
    n, m = cover.size, msg.size
    if costs.shape != cover.shape:
        raise ValueError("costs must align with the cover")
    if np.any(costs < 0) or np.any(np.isnan(costs)):
        raise ValueError("costs must be non-negative")
    if m > n:
        raise ValueError(f"message ({m} bits) longer than cover ({n} bits)")
    if m == 0:
        return cover.copy()
    widths, colpat = _layout(n, m, params)
    stego, total = _viterbi(cover, costs, msg, widths, colpat, params.h)
    if not np.isfinite(total):
        raise EmbeddingFailure("syndrome not reachable without changing wet elements")
    return stego


def stc_extract(stego_bits, msg_len: int, params: StcParams = StcParams()) -> np.ndarray:
    stego = _bits(stego_bits, "stego")
    if msg_len > stego.size:
        raise ValueError("message longer than stego sequence")
    if msg_len == 0:
        return np.zeros(0, dtype=np.uint8)
    widths, colpat = _layout(stego.size, msg_len, params)
    return _syndrome(stego, widths, colpat, msg_len)


def embedding_cost(cover_bits, stego_bits, costs) -> float:
    flips = np.asarray(cover_bits) != np.asarray(stego_bits)
    return float(np.sum(np.asarray(costs, dtype=np.float64)[flips]))


# ------------------------------------------------------------------ ternary


def ternary_planes(values) -> tuple[np.ndarray, np.ndarray]:
    """(parity, second bit) planes of integer element values."""
    v = np.asarray(values, dtype=np.int64)
    return np.mod(v, 2).astype(np.uint8), np.mod(np.floor_divide(v, 2), 2).astype(np.uint8)


def _split(msg_len: int) -> int:
    return msg_len // 2


def stc_embed_ternary(
    values, cost_plus, cost_minus, message_bits, params: StcParams = StcParams()
) -> np.ndarray:
    """Choose a change in {-1, 0, +1} per element to embed two message shares.

    The first share goes into the second bit plane ``floor(v/2) mod 2``,
    which every element can flip with exactly one direction (down from an
    even value, up from an odd one). With that layer fixed, the parity
    plane carries the second share: elements changed by the first layer are
    wet, the rest can flip parity by the opposite direction without
    disturbing the second bit.
    """
    v = np.asarray(values, dtype=np.int64)
    cp = np.asarray(cost_plus, dtype=np.float64)
    cm = np.asarray(cost_minus, dtype=np.float64)
    msg = _bits(message_bits, "message")
    if cp.shape != v.shape or cm.shape != v.shape:
        raise ValueError("costs must align with the cover values")
    k1 = _split(msg.size)
    parity, second = ternary_planes(v)
    even = parity == 0

    layer1_cost = np.where(even, cm, cp)
    s2 = stc_embed(second, layer1_cost, msg[:k1], params.derive(1))
    moved = s2 != second
    change = np.where(moved, np.where(even, -1, 1), 0).astype(np.int8)

    parity_now = np.where(moved, 1 - parity, parity).astype(np.uint8)
    layer2_cost = np.where(moved, np.inf, np.where(even, cp, cm))
    s1 = stc_embed(parity_now, layer2_cost, msg[k1:], params.derive(2))
    flip = s1 != parity_now
    change[flip] = np.where(even[flip], 1, -1)
    return change


def stc_extract_ternary(values, msg_len: int, params: StcParams = StcParams()) -> np.ndarray:
    parity, second = ternary_planes(values)
    k1 = _split(msg_len)
    return np.concatenate(
        [stc_extract(second, k1, params.derive(1)), stc_extract(parity, msg_len - k1, params.derive(2))]
    )
