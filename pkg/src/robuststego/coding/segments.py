"""Cover-sequence segmentation rules."""

from __future__ import annotations

import math


class CoverTooSmall(ValueError):
    pass


def segment_split(l_c: int) -> tuple[int, int, int]:
    """Lengths of the message, check-code and additional-check segments (15:3:1)."""
    if l_c < 19:
        raise CoverTooSmall(f"cover sequence of {l_c} elements cannot be split 15:3:1")
    l3 = l_c // 19
    l2 = 3 * l3
    return l_c - l2 - l3, l2, l3


def single_layer_split(l_c: int) -> tuple[int, int]:
    """Message and check-code lengths (15:3) when no additional layer is used."""
    if l_c < 6:
        raise CoverTooSmall(f"cover sequence of {l_c} elements cannot be split 15:3")
    l2 = l_c // 6
    return l_c - l2, l2


def edmas_split(l_c: int, l_r: int, k: int) -> int:
    """Message segment length when every ``l_r`` cover bits cost ``k`` CRC bits."""
    if l_r < 1 or k < 1:
        raise ValueError("group length and CRC degree must be positive")
    l_e = l_c - math.ceil(l_c / l_r) * k
    if l_e <= 0:
        raise CoverTooSmall(f"no room for a message: l_e = {l_e}")
    return l_e
