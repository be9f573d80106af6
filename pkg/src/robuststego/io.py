"""File formats: binary PGM, baseline grayscale JFIF and the JCOF/COST1 containers."""

from __future__ import annotations

import re
import struct

import numpy as np

from .jpeg import CoefImage, QuantTable, UnsupportedFormat, from_blocks, quant_table, to_blocks

ZIGZAG = np.array(
    [
        0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5,
        12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6, 7, 14, 21, 28,
        35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
        58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
    ]
)  # fmt: skip

# Annex K.3 typical luminance tables: (code-length counts, symbols).
DC_LUMA_BITS = [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
DC_LUMA_VALS = list(range(12))
AC_LUMA_BITS = [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7D]
AC_LUMA_VALS = [
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7,
    0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5,
    0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8,
    0xF9, 0xFA,
]  # fmt: skip


class FormatError(ValueError):
    """Malformed input file."""


# --------------------------------------------------------------------------- PGM

_PGM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def read_pgm(data: bytes) -> np.ndarray:
    pos = 0
    fields = []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if m is None:
            raise FormatError("truncated PGM header")
        fields.append(m.group(1))
        pos = m.end()
    if fields[0] != b"P5":
        raise FormatError("only binary PGM (P5) is supported")
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError as exc:
        raise FormatError("non-numeric PGM header field") from exc
    if maxval != 255:
        raise FormatError(f"maxval must be 255, got {maxval}")
    if width <= 0 or height <= 0:
        raise FormatError("PGM dimensions must be positive")
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise FormatError("missing whitespace after PGM header")
    raster = data[pos + 1 : pos + 1 + width * height]
    if len(raster) != width * height:
        raise FormatError("truncated PGM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(img) -> bytes:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError("PGM holds a single gray plane")
    h, w = img.shape
    return b"P5\n%d %d\n255\n" % (w, h) + img.astype(np.uint8).tobytes()


# ---------------------------------------------------------------- Huffman tables


def _huff_codes(bits, vals) -> dict[int, tuple[int, int]]:
    """Canonical code assignment (Annex C): symbol -> (code, length)."""
    codes = {}
    code = 0
    k = 0
    for length in range(1, 17):
        for _ in range(bits[length - 1]):
            codes[vals[k]] = (code, length)
            code += 1
            k += 1
        code <<= 1
    return codes


def _huff_lookup(bits, vals) -> dict[tuple[int, int], int]:
    return {(length, code): sym for sym, (code, length) in _huff_codes(bits, vals).items()}


class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.n = 0

    def write(self, value: int, length: int):
        self.acc = (self.acc << length) | (value & ((1 << length) - 1))
        self.n += length
        while self.n >= 8:
            self.n -= 8
            byte = (self.acc >> self.n) & 0xFF
            self.out.append(byte)
            if byte == 0xFF:
                self.out.append(0x00)
        self.acc &= (1 << self.n) - 1

    def flush(self) -> bytes:
        if self.n:
            self.write((1 << (8 - self.n)) - 1, 8 - self.n)
        return bytes(self.out)


def _category(v: int) -> int:
    return int(abs(v)).bit_length()


def _magnitude_bits(v: int, size: int) -> int:
    return v if v >= 0 else v + (1 << size) - 1


def _segment(marker: int, payload: bytes) -> bytes:
    return struct.pack(">HH", marker, len(payload) + 2) + payload


def encode_jfif(c: CoefImage) -> bytes:
    """Baseline sequential JFIF, one luminance component, Annex-K tables."""
    ac = to_blocks(c.coefs).reshape(-1, 64)[:, 1:]
    if np.abs(ac).max(initial=0) > 1023 or np.abs(c.coefs).max(initial=0) > 2047:
        raise ValueError("coefficient magnitude exceeds baseline range")
    out = bytearray(b"\xff\xd8")
    out += _segment(0xFFE0, b"JFIF\x00\x01\x01\x00\x00\x01\x00\x01\x00\x00")
    dqt = c.table.entries.reshape(64)[ZIGZAG]
    out += _segment(0xFFDB, bytes([0x00]) + bytes(int(v) for v in dqt))
    out += _segment(0xFFC0, struct.pack(">BHHB", 8, c.height, c.width, 1) + bytes([1, 0x11, 0]))
    out += _segment(0xFFC4, bytes([0x00] + DC_LUMA_BITS + DC_LUMA_VALS))
    out += _segment(0xFFC4, bytes([0x10] + AC_LUMA_BITS + AC_LUMA_VALS))
    out += _segment(0xFFDA, bytes([1, 1, 0x00, 0, 63, 0]))

    dc_codes = _huff_codes(DC_LUMA_BITS, DC_LUMA_VALS)
    ac_codes = _huff_codes(AC_LUMA_BITS, AC_LUMA_VALS)
    w = _BitWriter()
    blocks = to_blocks(c.coefs).reshape(-1, 64)[:, ZIGZAG].tolist()
    prev_dc = 0
    for zz in blocks:
        diff = zz[0] - prev_dc
        prev_dc = zz[0]
        size = _category(diff)
        w.write(*dc_codes[size])
        if size:
            w.write(_magnitude_bits(diff, size), size)
        run = 0
        for v in zz[1:]:
            if v == 0:
                run += 1
                continue
            while run > 15:
                w.write(*ac_codes[0xF0])
                run -= 16
            size = _category(v)
            w.write(*ac_codes[(run << 4) | size])
            w.write(_magnitude_bits(v, size), size)
            run = 0
        if run:
            w.write(*ac_codes[0x00])
    out += w.flush()
    out += b"\xff\xd9"
    return bytes(out)


class _BitReader:
    def __init__(self, data: bytes, pos: int):
        self.data = data
        self.pos = pos
        self.acc = 0
        self.n = 0

    def _fill(self):
        data = self.data
        if self.pos >= len(data):
            raise FormatError("entropy-coded segment ended early")
        byte = data[self.pos]
        if byte == 0xFF:
            nxt = data[self.pos + 1] if self.pos + 1 < len(data) else None
            if nxt == 0x00:
                self.pos += 2
            elif nxt is not None and 0xD0 <= nxt <= 0xD7:
                raise UnsupportedFormat("restart markers are not supported")
            else:
                raise FormatError("marker inside entropy-coded data")
        else:
            self.pos += 1
        self.acc = (self.acc << 8) | byte
        self.n += 8

    def bit(self) -> int:
        if self.n == 0:
            self._fill()
        self.n -= 1
        return (self.acc >> self.n) & 1

    def bits(self, k: int) -> int:
        while self.n < k:
            self._fill()
        self.n -= k
        v = (self.acc >> self.n) & ((1 << k) - 1)
        self.acc &= (1 << self.n) - 1
        return v

    def symbol(self, table) -> int:
        code = 0
        for length in range(1, 17):
            code = (code << 1) | self.bit()
            sym = table.get((length, code))
            if sym is not None:
                return sym
        raise FormatError("invalid Huffman code")


# progressive, lossless, hierarchical and arithmetic-coded frames
_OTHER_SOF = {0xFFC1, 0xFFC2, 0xFFC3, 0xFFC5, 0xFFC6, 0xFFC7, 0xFFC9, 0xFFCA, 0xFFCB, 0xFFCD, 0xFFCE, 0xFFCF}


def _extend(v: int, size: int) -> int:
    return v if v >= 1 << (size - 1) else v - (1 << size) + 1


def _infer_quality(entries: np.ndarray) -> int | None:
    for q in range(1, 101):
        if np.array_equal(quant_table(q).entries, entries):
            return q
    return None


def decode_jfif(data: bytes) -> CoefImage:
    """Read the quantized coefficients of a baseline grayscale JPEG."""
    if data[:2] != b"\xff\xd8":
        raise FormatError("not a JPEG file (missing SOI)")
    pos = 2
    qtables: dict[int, np.ndarray] = {}
    htables: dict[tuple[int, int], dict] = {}
    frame = None
    while True:
        while pos < len(data) and data[pos] == 0xFF and data[pos + 1] == 0xFF:
            pos += 1
        if pos + 4 > len(data):
            raise FormatError("truncated JPEG")
        marker, length = struct.unpack(">HH", data[pos : pos + 4])
        seg = data[pos + 4 : pos + 2 + length]
        pos += 2 + length
        if marker in _OTHER_SOF:
            raise UnsupportedFormat(f"unsupported frame type 0x{marker:04X} (baseline only)")
        if marker == 0xFFCC:
            raise UnsupportedFormat("arithmetic coding is not supported")
        if marker == 0xFFDB:
            k = 0
            while k < len(seg):
                pq, tq = seg[k] >> 4, seg[k] & 15
                if pq:
                    vals = struct.unpack(">64H", seg[k + 1 : k + 129])
                    k += 129
                else:
                    vals = tuple(seg[k + 1 : k + 65])
                    k += 65
                nat = np.zeros(64, dtype=np.int64)
                nat[ZIGZAG] = vals
                qtables[tq] = nat.reshape(8, 8)
        elif marker == 0xFFC4:
            k = 0
            while k < len(seg):
                tc, th = seg[k] >> 4, seg[k] & 15
                bits = list(seg[k + 1 : k + 17])
                vals = list(seg[k + 17 : k + 17 + sum(bits)])
                htables[(tc, th)] = _huff_lookup(bits, vals)
                k += 17 + sum(bits)
        elif marker == 0xFFC0:
            precision, height, width, ncomp = struct.unpack(">BHHB", seg[:6])
            if ncomp != 1:
                raise UnsupportedFormat("only single-component (grayscale) JPEG is supported")
            if precision != 8:
                raise UnsupportedFormat("only 8-bit precision is supported")
            _, sampling, tq = seg[6:9]
            frame = (height, width, tq)
        elif marker == 0xFFDD:
            if struct.unpack(">H", seg[:2])[0]:
                raise UnsupportedFormat("restart intervals are not supported")
        elif marker == 0xFFDA:
            if frame is None:
                raise FormatError("SOS before SOF")
            _, cs, tables = seg[0], seg[1], seg[2]
            dc_t, ac_t = htables[(0, tables >> 4)], htables[(1, tables & 15)]
            break
        elif marker == 0xFFD9:
            raise FormatError("no scan in JPEG")
    height, width, tq = frame
    bh, bw = -(-height // 8), -(-width // 8)
    reader = _BitReader(data, pos)
    zz = np.zeros((bh * bw, 64), dtype=np.int32)
    prev_dc = 0
    for b in range(bh * bw):
        size = reader.symbol(dc_t)
        diff = _extend(reader.bits(size), size) if size else 0
        prev_dc += diff
        row = zz[b]
        row[0] = prev_dc
        k = 1
        while k < 64:
            rs = reader.symbol(ac_t)
            run, size = rs >> 4, rs & 15
            if size == 0:
                if run == 15:
                    k += 16
                    continue
                break
            k += run
            if k > 63:
                raise FormatError("AC run past end of block")
            row[k] = _extend(reader.bits(size), size)
            k += 1
    nat = np.zeros_like(zz)
    nat[:, ZIGZAG] = zz
    entries = qtables[tq]
    table = QuantTable(entries, _infer_quality(entries))
    coefs = from_blocks(nat.reshape(bh, bw, 8, 8))
    return CoefImage(coefs, table, width, height)


# ------------------------------------------------------------------------- JCOF

JCOF_MAGIC = b"JCOF1"
COST_MAGIC = b"COST1"


def write_jcof(c: CoefImage) -> bytes:
    if c.table.quality is None:
        raise ValueError("JCOF stores IJG tables only (quality must be known)")
    head = JCOF_MAGIC + struct.pack("<III", c.width, c.height, c.table.quality)
    return head + c.coefs.astype("<i2").tobytes()


def read_jcof(data: bytes) -> CoefImage:
    if data[:5] != JCOF_MAGIC:
        raise FormatError("not a JCOF container")
    width, height, quality = struct.unpack("<III", data[5:17])
    shape = (8 * -(-height // 8), 8 * -(-width // 8))
    body = data[17:]
    if len(body) != 2 * shape[0] * shape[1]:
        raise FormatError("JCOF payload size does not match header")
    coefs = np.frombuffer(body, dtype="<i2").reshape(shape)
    return CoefImage(coefs, quant_table(quality), width, height)


def write_costs(rho: np.ndarray) -> bytes:
    """Dump a cost plane (float64, row-major) for debugging."""
    rho = np.asarray(rho, dtype="<f8")
    return COST_MAGIC + struct.pack("<II", rho.shape[1], rho.shape[0]) + rho.tobytes()


def read_costs(data: bytes) -> np.ndarray:
    if data[:5] != COST_MAGIC:
        raise FormatError("not a COST1 container")
    w, h = struct.unpack("<II", data[5:13])
    return np.frombuffer(data[13:], dtype="<f8").reshape(h, w).copy()


def load_coefs(data: bytes) -> CoefImage:
    """Dispatch on magic bytes: JCOF container or JFIF."""
    if data[:5] == JCOF_MAGIC:
        return read_jcof(data)
    return decode_jfif(data)
