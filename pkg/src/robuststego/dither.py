"""Embedding domains and dither-modulation cover sequences.

The value-level helpers work on a lattice of intervals ``[offset + n*step,
offset + (n+1)*step)``. Odd intervals carry bit 1. On quantized JPEG planes
the de-quantized values ``c*q`` are integer multiples of the step, so the
coefficient lattice is shifted by half a step (``offset = -q/2``). Every
representable value is then an interval midpoint and the interval index of
``c*q`` is ``c`` itself.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .jpeg import CoefImage, round_half_away


@dataclass(frozen=True)
class DomainSpec:
    """Union of anti-diagonals E_k of the 8x8 block (E_k holds k coefficients)."""

    diagonals: frozenset

    def __post_init__(self):
        d = frozenset(int(k) for k in self.diagonals)
        if not d:
            raise ValueError("embedding domain must not be empty")
        if not all(1 <= k <= 8 for k in d):
            raise ValueError("anti-diagonal index must lie in 1..8")
        object.__setattr__(self, "diagonals", d)

    @classmethod
    def parse(cls, text: str) -> "DomainSpec":
        m = re.fullmatch(r"E_?([1-8]+)", text.strip())
        if m is None:
            raise ValueError(f"bad embedding domain {text!r}; expected e.g. 'E_45'")
        return cls(frozenset(int(ch) for ch in m.group(1)))

    def __str__(self) -> str:
        return "E_" + "".join(str(k) for k in sorted(self.diagonals))

    @property
    def size(self) -> int:
        return sum(self.diagonals)


def domain_positions(spec: DomainSpec) -> list[tuple[int, int]]:
    """In-block (row, col) positions, 0-based: ascending diagonal, then row."""
    out = []
    for k in sorted(spec.diagonals):
        # E_k sits on row + col == k - 1 and holds exactly k coefficients
        for i in range(k):
            out.append((i, k - 1 - i))
    return out


@lru_cache(maxsize=64)
def _plane_positions(spec: DomainSpec, bh: int, bw: int) -> tuple[np.ndarray, np.ndarray]:
    local = np.array(domain_positions(spec))
    by, bx = np.divmod(np.arange(bh * bw), bw)
    rows = (8 * by[:, None] + local[None, :, 0]).ravel()
    cols = (8 * bx[:, None] + local[None, :, 1]).ravel()
    rows.flags.writeable = False
    cols.flags.writeable = False
    return rows, cols


def plane_positions(c: CoefImage, spec: DomainSpec) -> tuple[np.ndarray, np.ndarray]:
    """Plane coordinates of every cover element in scan order."""
    return _plane_positions(spec, *c.blocks_shape)


# ---------------------------------------------------------------- lattice maths


def interval_index(v, step, offset=0.0):
    return np.floor((np.asarray(v, dtype=np.float64) - offset) / step).astype(np.int64)


def dither_bit(v, step, offset=0.0):
    return np.mod(interval_index(v, step, offset), 2).astype(np.uint8)


def midpoint(n, step, offset=0.0):
    return (np.asarray(n, dtype=np.float64) + 0.5) * step + offset


def neighbour_distances(v, step, offset=0.0):
    """Distances (lower, upper) to the two nearest opposite-parity midpoints."""
    v = np.asarray(v, dtype=np.float64)
    n = interval_index(v, step, offset)
    return v - midpoint(n - 1, step, offset), midpoint(n + 1, step, offset) - v


@dataclass(frozen=True, eq=False)
class CoverSequence:
    bits: np.ndarray  # dither bits, uint8
    index: np.ndarray  # interval index of each element
    d: np.ndarray  # distance to the nearest opposite-parity midpoint
    d_minus: np.ndarray
    d_plus: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    steps: np.ndarray
    generalized: bool = False

    def __len__(self) -> int:
        return len(self.bits)


def extract_cover(c: CoefImage, spec: DomainSpec, generalized: bool = False) -> CoverSequence:
    rows, cols = plane_positions(c, spec)
    q = c.steps[rows, cols].astype(np.float64)
    v = c.coefs[rows, cols].astype(np.float64) * q
    offset = -0.5 * q
    n = interval_index(v, q, offset)
    d_minus, d_plus = neighbour_distances(v, q, offset)
    return CoverSequence(
        bits=np.mod(n, 2).astype(np.uint8),
        index=n,
        d=np.minimum(d_minus, d_plus),
        d_minus=d_minus,
        d_plus=d_plus,
        rows=rows,
        cols=cols,
        steps=q,
        generalized=generalized,
    )


def nearest_directions(cover: CoverSequence) -> np.ndarray:
    """+1/-1 per element towards the closer opposite-parity midpoint.

    Ties (the usual case on a quantized plane) move towards zero; a zero
    interval moves up.
    """
    toward_zero = np.where(cover.index > 0, -1, 1)
    return np.where(
        cover.d_minus < cover.d_plus, -1, np.where(cover.d_plus < cover.d_minus, 1, toward_zero)
    ).astype(np.int8)


def apply_stego(
    c: CoefImage, cover: CoverSequence, stego_bits, directions=None
) -> CoefImage:
    """Move every element whose bit must change to an opposite-parity midpoint.

    ``directions`` (+1 up / -1 down, per element) selects the target interval
    for flipped elements; by default the nearest one is used.
    """
    stego_bits = np.asarray(stego_bits, dtype=np.uint8)
    if stego_bits.shape != cover.bits.shape:
        raise ValueError(f"stego length {stego_bits.size} != cover length {cover.bits.size}")
    if directions is None:
        directions = nearest_directions(cover)
    directions = np.asarray(directions)
    if directions.shape != cover.bits.shape:
        raise ValueError("direction array does not match the cover length")
    flip = stego_bits != cover.bits
    if np.any(flip & (np.abs(directions) != 1)):
        raise ValueError("every flipped element needs a +1/-1 direction")
    if not flip.any():
        return c
    q = cover.steps[flip]
    target = midpoint(cover.index[flip] + directions[flip], q, -0.5 * q)
    coefs = np.array(c.coefs)
    coefs[cover.rows[flip], cover.cols[flip]] = round_half_away(target / q).astype(np.int32)
    return c.replace(coefs)


def read_bits(c: CoefImage, spec: DomainSpec) -> np.ndarray:
    """Dither bits of ``c`` on ``spec`` (receiver side)."""
    return extract_cover(c, spec).bits


def nearest_with_parity(index, bits):
    """Interval index nearest to ``index`` whose parity equals ``bits``.

    Matching parity keeps the interval. Otherwise both neighbours are equally
    near, and the step goes towards zero (up from zero), as in
    :func:`nearest_directions`.
    """
    index = np.asarray(index, dtype=np.int64)
    same = np.mod(index, 2) == np.asarray(bits)
    return np.where(same, index, index + np.where(index > 0, -1, 1))
