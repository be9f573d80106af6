"""Grayscale JPEG coefficient model.

Coefficient planes are stored in the usual "spatial" layout: coefficient
``(i, j)`` of block ``(by, bx)`` lives at ``coefs[8 * by + i, 8 * bx + j]``.
All indices are 0-based in code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# IJG / Annex K standard luminance table, natural (row-major) order.
BASE_LUMINANCE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)


def _dct_matrix(n: int = 8) -> np.ndarray:
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    m = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * x + 1) * k / (2 * n))
    m[0, :] = np.sqrt(1.0 / n)
    return m


DCT = _dct_matrix()


class UnsupportedFormat(ValueError):
    """Raised for image files this codec does not handle."""


def round_half_away(x):
    """Round to nearest integer, ties away from zero."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


@dataclass(frozen=True)
class QuantTable:
    entries: np.ndarray
    quality: int | None = None

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.int64).reshape(8, 8).copy()
        if e.min() < 1 or e.max() > 255:
            raise ValueError("quantization steps must lie in [1, 255]")
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)

    def __eq__(self, other):
        if not isinstance(other, QuantTable):
            return NotImplemented
        return self.quality == other.quality and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.quality, self.entries.tobytes()))


def quant_table(quality: int) -> QuantTable:
    """IJG quality scaling of the standard luminance table."""
    if isinstance(quality, bool) or not isinstance(quality, (int, np.integer)):
        raise TypeError("quality must be an integer")
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be in 1..100, got {quality}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    entries = np.clip((BASE_LUMINANCE * scale + 50) // 100, 1, 255)
    return QuantTable(entries, int(quality))


def forward_block(block) -> np.ndarray:
    """Level-shifted orthonormal 2-D DCT-II of one 8x8 block (or a stack of them)."""
    b = np.asarray(block, dtype=np.float64) - 128.0
    return DCT @ b @ DCT.T


def inverse_block_real(coeffs) -> np.ndarray:
    """Inverse DCT plus level shift, no rounding or clamping."""
    c = np.asarray(coeffs, dtype=np.float64)
    return DCT.T @ c @ DCT + 128.0


def inverse_block(coeffs) -> np.ndarray:
    return np.clip(round_half_away(inverse_block_real(coeffs)), 0, 255).astype(np.uint8)


def to_blocks(plane: np.ndarray) -> np.ndarray:
    """(8*bh, 8*bw) plane -> (bh, bw, 8, 8) view-compatible copy."""
    h, w = plane.shape
    return plane.reshape(h // 8, 8, w // 8, 8).swapaxes(1, 2)


def from_blocks(blocks: np.ndarray) -> np.ndarray:
    bh, bw = blocks.shape[:2]
    return blocks.swapaxes(1, 2).reshape(bh * 8, bw * 8)


@dataclass(frozen=True, eq=False)
class CoefImage:
    """Quantized DCT coefficients of a grayscale JPEG."""

    coefs: np.ndarray
    table: QuantTable
    width: int
    height: int

    def __post_init__(self):
        c = np.asarray(self.coefs)
        if c.ndim != 2 or c.shape[0] % 8 or c.shape[1] % 8:
            raise ValueError("coefficient plane must be 2-D with block-multiple sides")
        if c.shape != (8 * -(-self.height // 8), 8 * -(-self.width // 8)):
            raise ValueError("coefficient plane does not match image dimensions")
        c = c.astype(np.int32, copy=True)
        c.flags.writeable = False
        object.__setattr__(self, "coefs", c)

    @property
    def blocks_shape(self) -> tuple[int, int]:
        return self.coefs.shape[0] // 8, self.coefs.shape[1] // 8

    @property
    def steps(self) -> np.ndarray:
        """Quantization step of every coefficient, tiled over the plane."""
        bh, bw = self.blocks_shape
        return np.tile(self.table.entries, (bh, bw))

    def dequantized(self) -> np.ndarray:
        return self.coefs.astype(np.float64) * self.steps

    def replace(self, coefs: np.ndarray) -> "CoefImage":
        return CoefImage(coefs, self.table, self.width, self.height)

    def __eq__(self, other):
        if not isinstance(other, CoefImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.table == other.table
            and np.array_equal(self.coefs, other.coefs)
        )


def _pad(img: np.ndarray) -> np.ndarray:
    h, w = img.shape
    return np.pad(img, ((0, -h % 8), (0, -w % 8)), mode="edge")


# For integer samples the coefficients whose row and column frequencies are
# both 0 or 4 are exact multiples of 1/8, so halfway ties really occur there.
# Snapping them removes the float noise that would otherwise decide the tie.


def compress(img, quality: int) -> CoefImage:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError("only grayscale images are supported")
    if img.min(initial=0) < 0 or img.max(initial=0) > 255:
        raise ValueError("pixel values must lie in [0, 255]")
    table = quant_table(quality)
    pixels = _pad(img).astype(np.float64)
    blocks = forward_block(to_blocks(pixels))
    if np.array_equal(pixels, np.round(pixels)):
        blocks[..., [[0], [4]], [[0, 4]]] = np.round(blocks[..., [[0], [4]], [[0, 4]]] * 8) / 8
    q = round_half_away(blocks / table.entries)
    return CoefImage(from_blocks(q), table, img.shape[1], img.shape[0])


def spatial_real(c: CoefImage) -> np.ndarray:
    """Decompressed plane of the padded block grid, before rounding/clamping."""
    blocks = to_blocks(c.coefs.astype(np.float64)) * c.table.entries
    return from_blocks(inverse_block_real(blocks))


def decompress(c: CoefImage) -> np.ndarray:
    plane = np.clip(round_half_away(spatial_real(c)), 0, 255).astype(np.uint8)
    return plane[: c.height, : c.width]


def nonzero_ac_count(c: CoefImage) -> int:
    blocks = to_blocks(c.coefs)
    return int(np.count_nonzero(blocks)) - int(np.count_nonzero(blocks[:, :, 0, 0]))
