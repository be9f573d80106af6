"""Grayscale cover corpora: a bundled desk corpus or a directory of images."""

from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path

import numpy as np

ENV_VAR = "ROBUSTSTEGO_CORPUS"
TILE = 256
STRIDE = 128
MIN_STD = 12.0  # drop nearly flat tiles

# natural photographs bundled with scikit-image (no download needed)
SOURCES = (
    "astronaut", "camera", "coins", "moon", "chelsea", "coffee", "rocket",
    "immunohistochemistry", "brick", "grass", "gravel", "cell", "clock",
)  # fmt: skip


def _gray(a: np.ndarray) -> np.ndarray:
    if a.ndim == 3:
        # ITU-R 601 luma, as used by JPEG
        a = a[..., :3].astype(np.float64) @ np.array([0.299, 0.587, 0.114])
        a = np.floor(a + 0.5)
    return np.clip(a, 0, 255).astype(np.uint8)


@lru_cache(maxsize=1)
def _tile_pool() -> tuple[tuple[str, np.ndarray], ...]:
    import skimage.data

    out = []
    for name in SOURCES:
        img = _gray(getattr(skimage.data, name)())
        h, w = img.shape
        for y in range(0, h - TILE + 1, STRIDE):
            for x in range(0, w - TILE + 1, STRIDE):
                tile = img[y : y + TILE, x : x + TILE]
                if tile.std() >= MIN_STD:
                    tile = tile.copy()
                    tile.flags.writeable = False
                    out.append((f"{name}_{y}_{x}", tile))
    return tuple(out)


def _read_image(path: Path) -> np.ndarray:
    if path.suffix.lower() in (".pgm", ".pnm"):
        from .io import read_pgm

        return read_pgm(path.read_bytes())
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)


_SUFFIXES = {".pgm", ".pnm", ".png", ".bmp", ".tif", ".tiff"}


def _directory(path: Path) -> list[tuple[str, np.ndarray]]:
    files = sorted(p for p in path.iterdir() if p.suffix.lower() in _SUFFIXES)
    if not files:
        raise FileNotFoundError(f"no images found in {path}")
    return [(p.stem, _read_image(p)) for p in files]


def corpus_size(path: str | os.PathLike | None = None) -> int:
    path = path or os.environ.get(ENV_VAR)
    if path:
        return len([p for p in Path(path).iterdir() if p.suffix.lower() in _SUFFIXES])
    return len(_tile_pool())


def load_corpus(
    n: int | None = 50, seed: int = 0, path: str | os.PathLike | None = None
) -> list[tuple[str, np.ndarray]]:
    """``n`` (image id, uint8 image) pairs chosen by ``seed``, in a stable order.

    ``path`` (or the ``ROBUSTSTEGO_CORPUS`` environment variable) names a
    directory of grayscale images; otherwise 256x256 tiles are cut from
    scikit-image's bundled photographs.
    """
    path = path or os.environ.get(ENV_VAR)
    pool = _directory(Path(path)) if path else list(_tile_pool())
    if n is None or n >= len(pool):
        return pool
    if n < 1:
        raise ValueError("corpus size must be positive")
    pick = np.sort(np.random.default_rng(seed).choice(len(pool), size=n, replace=False))
    return [pool[i] for i in pick]
