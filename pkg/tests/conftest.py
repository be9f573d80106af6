import numpy as np
import pytest
from scipy.fft import dctn

from robuststego.corpus import load_corpus


# basis rows 0 and 4 are +-1/sqrt(8) times these signs
_SIGNS = {0: np.ones(8, np.int64), 4: np.array([1, -1, -1, 1, 1, -1, -1, 1])}


def _round_fraction(num: int, den: int) -> int:
    """num/den rounded half away from zero, in exact integer arithmetic."""
    s = -1 if num < 0 else 1
    return s * ((2 * abs(num) + den) // (2 * den))


def reference_compress(img, table):
    """Independent JPEG quantizer: scipy's DCT-II, exact integers where ties can occur."""
    img = np.asarray(img, dtype=np.int64)
    h, w = img.shape
    H, W = -(-h // 8) * 8, -(-w // 8) * 8
    img = np.pad(img, ((0, H - h), (0, W - w)), mode="edge") - 128
    table = np.asarray(table, dtype=np.int64)
    out = np.zeros((H, W), dtype=np.int64)
    for y in range(0, H, 8):
        for x in range(0, W, 8):
            b = img[y : y + 8, x : x + 8]
            d = dctn(b.astype(np.float64), type=2, norm="ortho") / table
            blk = np.sign(d) * np.floor(np.abs(d) + 0.5)
            for u in (0, 4):
                for v in (0, 4):
                    num = int(_SIGNS[u] @ b @ _SIGNS[v])  # coefficient = num / 8
                    blk[u, v] = _round_fraction(num, 8 * int(table[u, v]))
            out[y : y + 8, x : x + 8] = blk
    return out


@pytest.fixture(scope="session")
def corpus10():
    return load_corpus(10, seed=3)


@pytest.fixture(scope="session")
def small_image():
    # a textured 64x64 crop keeps the end-to-end tests fast
    return load_corpus(1, seed=11)[0][1][96:160, 96:160].copy()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, printed at the end of every run
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
