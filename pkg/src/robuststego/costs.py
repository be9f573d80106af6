"""Embedding distortion: J-UNIWARD costs and the dither-modulation conversions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import convolve2d

from .jpeg import DCT, CoefImage, QuantTable, spatial_real

SIGMA = 2.0**-6

# Daubechies-8 decomposition high-pass filter (16 taps).
DB8_HIGH = np.array(
    [
        -0.0544158422, 0.3128715909, -0.6756307363, 0.5853546837,
        0.0158291053, -0.2840155430, -0.0004724846, 0.1287474266,
        0.0173693010, -0.0440882539, -0.0139810279, 0.0087460940,
        0.0048703530, -0.0003917404, -0.0006754494, -0.0001174768,
    ]
)  # fmt: skip
DB8_LOW = ((-1.0) ** np.arange(16)) * DB8_HIGH[::-1]

# LH, HL, HH directional residual kernels
FILTERS = (
    np.outer(DB8_LOW, DB8_HIGH),
    np.outer(DB8_HIGH, DB8_LOW),
    np.outer(DB8_HIGH, DB8_HIGH),
)
PAD = 16
# 'same' convolution with a 16x16 kernel is offset by 7 from 'full'
_SAME_OFFSET = 7
SUPPORT = 8 + 16 - 1


@dataclass(frozen=True, eq=False)
class CostMap:
    rho: np.ndarray
    rho_plus: np.ndarray | None = None
    rho_minus: np.ndarray | None = None

    @property
    def asymmetric(self) -> bool:
        return self.rho_plus is not None


def wavelet_residuals(plane: np.ndarray) -> list[np.ndarray]:
    """Directional residuals of a mirror-padded plane, over the padded grid."""
    padded = np.pad(plane, PAD, mode="symmetric")
    return [convolve2d(padded, f, mode="same") for f in FILTERS]


@lru_cache(maxsize=None)
def _impact_weights(table_key: bytes) -> np.ndarray:
    """|wavelet response| of a unit quantized change, per filter and DCT mode.

    Shape (3, 529, 64): filter, flattened 23x23 support, mode index 8*i+j.
    """
    steps = np.frombuffer(table_key, dtype=np.int64).reshape(8, 8)
    out = np.empty((3, SUPPORT * SUPPORT, 64))
    for i in range(8):
        for j in range(8):
            basis = steps[i, j] * np.outer(DCT[i], DCT[j])
            for k, f in enumerate(FILTERS):
                out[k, :, 8 * i + j] = np.abs(convolve2d(basis, f, mode="full")).ravel()
    return out


def juniward_costs(c: CoefImage) -> CostMap:
    """Relative wavelet distortion of a +-1 change of every quantized coefficient.

    Only the 23x23 neighbourhood of a block is touched by a change inside
    it, so each block's costs reduce to a dot product of its inverse-residual
    window with the precomputed impact of every DCT mode.
    """
    plane = spatial_real(c)
    bh, bw = c.blocks_shape
    weights = _impact_weights(c.table.entries.tobytes())
    rho = np.zeros((bh, bw, 64))
    start = PAD - _SAME_OFFSET
    for k, resid in enumerate(wavelet_residuals(plane)):
        inv = 1.0 / (np.abs(resid) + SIGMA)
        win = sliding_window_view(inv, (SUPPORT, SUPPORT))
        win = win[start : start + 8 * bh : 8, start : start + 8 * bw : 8]
        rho += win.reshape(bh, bw, -1) @ weights[k]
    rho = rho.reshape(bh, bw, 8, 8).swapaxes(1, 2).reshape(8 * bh, 8 * bw)
    return CostMap(rho)


def asymmetric_costs(rho: CostMap, cover: CoefImage, reference: np.ndarray, alpha: float = 0.7) -> CostMap:
    """Scale the cost of moving towards the reference plane by ``alpha``.

    ``reference`` holds de-quantized coefficients of the processed image, in
    the same layout as ``cover.coefs``.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    reference = np.asarray(reference, dtype=np.float64)
    if reference.shape != cover.coefs.shape:
        raise ValueError("reference plane does not match the cover")
    target = reference / cover.steps
    x = cover.coefs
    base = rho.rho
    plus = np.where(x < target, alpha * base, base)
    minus = np.where(x > target, alpha * base, base)
    return CostMap(base, plus, minus)


def dm_costs(rho, steps, d) -> np.ndarray:
    """Cost of moving a de-quantized coefficient by distance ``d``.

    ``rho`` is the per-unit quantized cost, ``steps`` the matching
    quantization steps (array or :class:`QuantTable` broadcastable).
    """
    if isinstance(steps, QuantTable):
        steps = steps.entries
    rho = np.asarray(rho, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0):
        raise ValueError("modification distances must be non-negative")
    zeta = rho / np.asarray(steps, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        xi = zeta * d
    # wet coefficient with zero distance: no move, no cost
    return np.where(d == 0, 0.0, xi)
