"""Bitwise CRC over GF(2) polynomials, with single-flip correction per group."""

from __future__ import annotations

import numpy as np

# x^8 + x^2 + x + 1
CRC8 = 0x107


def degree(poly: int) -> int:
    return poly.bit_length() - 1


def crc_encode(bits, poly: int = CRC8) -> np.ndarray:
    """Remainder of ``bits(x) * x^k mod poly`` as k bits, MSB first."""
    k = degree(poly)
    if k < 1:
        raise ValueError("generator polynomial must have degree >= 1")
    reg = 0
    top = 1 << k
    for b in np.asarray(bits, dtype=np.uint8).tolist():
        reg = (reg << 1) | b
        if reg & top:
            reg ^= poly
    for _ in range(k):
        reg <<= 1
        if reg & top:
            reg ^= poly
    return np.array([(reg >> (k - 1 - i)) & 1 for i in range(k)], dtype=np.uint8)


def crc_check(bits, check, poly: int = CRC8) -> bool:
    return bool(np.array_equal(crc_encode(bits, poly), np.asarray(check, dtype=np.uint8)))


def crc_groups(bits, group: int, poly: int = CRC8) -> np.ndarray:
    """Concatenated CRC of consecutive ``group``-bit slices (last may be short)."""
    bits = np.asarray(bits, dtype=np.uint8)
    parts = [crc_encode(bits[s : s + group], poly) for s in range(0, bits.size, group)]
    return np.concatenate(parts) if parts else np.zeros(0, np.uint8)


def crc_correct(bits, checks, group: int, poly: int = CRC8) -> tuple[np.ndarray, int]:
    """Repair single-bit errors in each failing group.

    A group whose CRC mismatches is fixed only when exactly one single-bit
    flip of its data reproduces the received check. Returns the repaired
    bits and the number of groups left inconsistent.
    """
    bits = np.array(bits, dtype=np.uint8)
    checks = np.asarray(checks, dtype=np.uint8)
    k = degree(poly)
    unresolved = 0
    for g, s in enumerate(range(0, bits.size, group)):
        data = bits[s : s + group]
        chk = checks[g * k : (g + 1) * k]
        if crc_check(data, chk, poly):
            continue
        hits = []
        for i in range(data.size):
            data[i] ^= 1
            if crc_check(data, chk, poly):
                hits.append(i)
            data[i] ^= 1
        if len(hits) == 1:
            data[hits[0]] ^= 1
        else:
            unresolved += 1
    return bits, unresolved
