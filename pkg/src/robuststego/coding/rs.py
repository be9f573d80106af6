"""Reed-Solomon codes over GF(2^8).

Field polynomial 0x11d, generator alpha = 2, first consecutive root alpha^0.
Codewords are systematic (data symbols first, parity last) and may be
shortened: a block with fewer than ``n - nsym`` data symbols is treated as
if padded with leading zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PRIM = 0x11D

EXP = np.zeros(512, dtype=np.int64)
LOG = np.zeros(256, dtype=np.int64)
_x = 1
for _i in range(255):
    EXP[_i] = _x
    LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= PRIM
EXP[255:510] = EXP[:255]
del _x, _i


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return int(EXP[LOG[a] + LOG[b]])


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return int(EXP[(LOG[a] - LOG[b]) % 255])


def gf_pow(a: int, e: int) -> int:
    if a == 0:
        return 0 if e else 1
    return int(EXP[(LOG[a] * e) % 255])


def poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] ^= gf_mul(a, b)
    return out


def poly_eval(p: list[int], x: int) -> int:
    """Horner evaluation; ``p`` is highest-degree first."""
    y = 0
    for c in p:
        y = gf_mul(y, x) ^ c
    return y


class DecodeFailure(Exception):
    pass


@dataclass(frozen=True)
class RsCode:
    n: int = 255
    k: int = 251
    generator: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 < self.k < self.n <= 255:
            raise ValueError("need 0 < k < n <= 255")
        g = [1]
        for i in range(self.n - self.k):
            g = poly_mul(g, [1, gf_pow(2, i)])
        object.__setattr__(self, "generator", tuple(g))

    @property
    def nsym(self) -> int:
        return self.n - self.k

    @property
    def t(self) -> int:
        return self.nsym // 2

    def parity(self, data) -> list[int]:
        data = [int(s) for s in data]
        if len(data) > self.k:
            raise ValueError(f"at most {self.k} data symbols per block")
        if any(not 0 <= s < 256 for s in data):
            raise ValueError("symbols must be bytes")
        g = self.generator
        rem = [0] * self.nsym
        for s in data:
            coef = s ^ rem[0]
            rem = rem[1:] + [0]
            if coef:
                for j in range(self.nsym):
                    rem[j] ^= gf_mul(g[j + 1], coef)
        return rem

    def encode(self, data) -> list[int]:
        return [int(s) for s in data] + self.parity(data)

    def syndromes(self, codeword) -> list[int]:
        return [poly_eval(list(codeword), gf_pow(2, i)) for i in range(self.nsym)]

    def decode(self, codeword) -> tuple[list[int], bool, int]:
        """Correct up to ``t`` symbol errors.

        Returns ``(data, ok, n_corrected)``. On failure ``data`` is the
        uncorrected data part and ``ok`` is False; the decoder never
        returns ``ok`` unless the corrected word has zero syndromes.
        """
        word = [int(s) for s in codeword]
        length = len(word)
        if not self.nsym < length <= self.n:
            raise ValueError("codeword length out of range")
        k = length - self.nsym
        synd = self.syndromes(word)
        if not any(synd):
            return word[:k], True, 0
        try:
            positions = self._locate(synd, length)
            fixed = self._correct(word, synd, positions)
        except DecodeFailure:
            return word[:k], False, 0
        if any(self.syndromes(fixed)):
            return word[:k], False, 0
        return fixed[:k], True, len(positions)

    def _locate(self, synd: list[int], length: int) -> list[int]:
        # Berlekamp-Massey; polynomials lowest-degree first here
        lam = [1]
        prev = [1]
        L = 0
        shift = 1
        b = 1
        for r in range(self.nsym):
            delta = synd[r]
            for i in range(1, L + 1):
                if i < len(lam):
                    delta ^= gf_mul(lam[i], synd[r - i])
            if delta == 0:
                shift += 1
                continue
            coef = gf_div(delta, b)
            cand = lam + [0] * max(0, len(prev) + shift - len(lam))
            for i, p in enumerate(prev):
                cand[i + shift] ^= gf_mul(coef, p)
            if 2 * L <= r:
                prev, L, b, shift = lam, r + 1 - L, delta, 1
            else:
                shift += 1
            lam = cand
        while len(lam) > 1 and lam[-1] == 0:
            lam.pop()
        if L > self.t or len(lam) - 1 != L:
            raise DecodeFailure("too many errors")
        # Chien search over the (possibly shortened) codeword positions
        positions = []
        for pos in range(length):
            power = length - 1 - pos
            xinv = gf_pow(2, (255 - power) % 255)
            acc = 0
            for c in reversed(lam):
                acc = gf_mul(acc, xinv) ^ c
            if acc == 0:
                positions.append(pos)
        if len(positions) != L:
            raise DecodeFailure("error locator roots outside the codeword")
        return positions

    def _correct(self, word: list[int], synd: list[int], positions: list[int]) -> list[int]:
        # solve the Vandermonde system for error values (nu <= t is small)
        length = len(word)
        xs = [gf_pow(2, length - 1 - p) for p in positions]
        nu = len(xs)
        A = [[gf_pow(x, i) for x in xs] + [synd[i]] for i in range(nu)]
        for col in range(nu):
            piv = next((r for r in range(col, nu) if A[r][col]), None)
            if piv is None:
                raise DecodeFailure("singular error system")
            A[col], A[piv] = A[piv], A[col]
            inv = gf_div(1, A[col][col])
            A[col] = [gf_mul(v, inv) for v in A[col]]
            for r in range(nu):
                if r != col and A[r][col]:
                    f = A[r][col]
                    A[r] = [a ^ gf_mul(f, c) for a, c in zip(A[r], A[col])]
        fixed = list(word)
        for (p, row) in zip(positions, A):
            fixed[p] ^= row[nu]
        return fixed


RS_255_251 = RsCode(255, 251)


def rs_encode(symbols, code: RsCode = RS_255_251) -> list[int]:
    return code.encode(symbols)


def rs_decode(codeword, code: RsCode = RS_255_251) -> tuple[list[int], bool]:
    data, ok, _ = code.decode(codeword)
    return data, ok


# --------------------------------------------------------- bit-level framing


def bits_to_bytes(bits) -> list[int]:
    """Pack bits MSB-first into bytes, zero-padding the tail."""
    bits = np.asarray(bits, dtype=np.uint8)
    return np.packbits(bits).tolist() if bits.size else []


def bytes_to_bits(symbols, nbits: int | None = None) -> np.ndarray:
    out = np.unpackbits(np.asarray(symbols, dtype=np.uint8)) if len(symbols) else np.zeros(0, np.uint8)
    return out if nbits is None else out[:nbits]


def _blocks(n_symbols: int, k: int) -> list[tuple[int, int]]:
    return [(s, min(s + k, n_symbols)) for s in range(0, n_symbols, k)]


def check_bits(bits, code: RsCode = RS_255_251) -> np.ndarray:
    """RS parity of a bit sequence taken as bytes, as a bit sequence."""
    data = bits_to_bytes(bits)
    parity = []
    for a, b in _blocks(len(data), code.k):
        parity += code.parity(data[a:b])
    return bytes_to_bits(parity)


def check_bits_len(nbits: int, code: RsCode = RS_255_251) -> int:
    nsym = -(-nbits // 8)
    return 8 * code.nsym * (-(-nsym // code.k))


def correct_bits(bits, parity_bits, code: RsCode = RS_255_251) -> tuple[np.ndarray, int, int]:
    """Correct ``bits`` with its parity bits.

    Returns ``(bits, failed_blocks, corrected_symbols)``. Failed blocks keep
    their received data.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    data = bits_to_bytes(bits)
    parity = bits_to_bytes(parity_bits)
    out = []
    failures = 0
    corrected = 0
    for idx, (a, b) in enumerate(_blocks(len(data), code.k)):
        word = data[a:b] + parity[idx * code.nsym : (idx + 1) * code.nsym]
        fixed, ok, nfix = code.decode(word)
        failures += not ok
        corrected += nfix
        out += fixed
    return bytes_to_bits(out, bits.size), failures, corrected


def rs_encode_bits(bits, code: RsCode) -> np.ndarray:
    """Systematic bit-level encoding: message bytes followed by all parity."""
    return np.concatenate([bytes_to_bits(bits_to_bytes(bits)), check_bits(bits, code)])


def rs_decode_bits(coded, msg_len: int, code: RsCode) -> tuple[np.ndarray, int]:
    nbytes = -(-msg_len // 8)
    coded = np.asarray(coded, dtype=np.uint8)
    data_bits = coded[: 8 * nbytes]
    fixed, failures, _ = correct_bits(data_bits, coded[8 * nbytes :], code)
    return fixed[:msg_len], failures


def rs_encoded_len(msg_len: int, code: RsCode) -> int:
    return 8 * (-(-msg_len // 8)) + check_bits_len(msg_len, code)
