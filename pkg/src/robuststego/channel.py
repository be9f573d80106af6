"""JPEG re-compression channel and the modification-with-re-compression stage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dither import CoverSequence, midpoint, nearest_with_parity
from .jpeg import CoefImage, compress, decompress, round_half_away


@dataclass(frozen=True)
class ChannelSpec:
    quality: int = 65
    iterations: int = 1

    def __post_init__(self):
        if not 1 <= self.quality <= 100:
            raise ValueError("channel quality must lie in 1..100")
        if self.iterations < 1:
            raise ValueError("channel needs at least one iteration")


def recompress(img: CoefImage, spec: ChannelSpec) -> CoefImage:
    """Decompress to 8-bit pixels and compress again at the channel quality."""
    for _ in range(spec.iterations):
        img = compress(decompress(img), spec.quality)
    return img


def changed_coefficients(a: CoefImage, b: CoefImage) -> int:
    return int(np.count_nonzero(a.coefs != b.coefs))


def modification_pass(
    intermediate: CoefImage, target, cover_meta: CoverSequence, spec: ChannelSpec
) -> CoefImage:
    """Re-compress, then push every element whose bit drifted back.

    A drifted element is set to the midpoint of the target-bit interval
    nearest to its value before re-compression. All other coefficients keep
    their re-compressed values.
    """
    target = np.asarray(target, dtype=np.uint8)
    if target.shape != cover_meta.bits.shape:
        raise ValueError("target bits do not align with the cover positions")
    rows, cols = cover_meta.rows, cover_meta.cols
    after = recompress(intermediate, ChannelSpec(spec.quality))
    now = after.coefs[rows, cols].astype(np.int64)
    drift = np.mod(now, 2) != target
    if not drift.any():
        return after
    before = intermediate.coefs[rows, cols].astype(np.int64)
    q_before = intermediate.steps[rows, cols].astype(np.float64)
    q_after = after.steps[rows, cols].astype(np.float64)
    goal = nearest_with_parity(before[drift], target[drift])
    value = midpoint(goal, q_before[drift], -0.5 * q_before[drift])
    coefs = np.array(after.coefs)
    coefs[rows[drift], cols[drift]] = round_half_away(value / q_after[drift]).astype(np.int32)
    return after.replace(coefs)


def stabilize(
    intermediate: CoefImage,
    target,
    cover_meta: CoverSequence,
    passes: int = 2,
    spec: ChannelSpec | None = None,
) -> CoefImage:
    if passes < 0:
        raise ValueError("number of passes must be non-negative")
    if spec is None:
        spec = ChannelSpec(intermediate.table.quality or 65)
    img = intermediate
    for _ in range(passes):
        img = modification_pass(img, target, cover_meta, spec)
    return img
