import numpy as np
import pytest

from robuststego.coding.crc import CRC8, crc_check, crc_correct, crc_encode, crc_groups, degree
from robuststego.coding.scramble import descramble, permutation, scramble
from robuststego.coding.segments import CoverTooSmall, edmas_split, segment_split, single_layer_split


# ---------------------------------------------------------------------- CRC


def test_crc_zero_input():
    assert not crc_encode(np.zeros(40, np.uint8)).any()
    assert degree(CRC8) == 8


def test_crc_known_value():
    # CRC-8 (poly 0x07, zero init, no reflection) of ASCII "123456789" is 0xF4
    bits = np.unpackbits(np.frombuffer(b"123456789", np.uint8))
    assert int("".join(map(str, crc_encode(bits))), 2) == 0xF4


def test_crc_detects_every_single_flip(rng):
    for poly in (CRC8, 0b1011, 0x11021):
        x = rng.integers(0, 2, 64).astype(np.uint8)
        chk = crc_encode(x, poly)
        assert crc_check(x, chk, poly)
        for i in range(64):
            y = x.copy()
            y[i] ^= 1
            assert not crc_check(y, chk, poly)


def test_crc_rejects_constant_poly():
    with pytest.raises(ValueError):
        crc_encode([1, 0], 1)


def test_crc_groups_and_correction(rng):
    bits = rng.integers(0, 2, 100).astype(np.uint8)
    checks = crc_groups(bits, 16)
    assert checks.size == 7 * 8
    noisy = bits.copy()
    noisy[[3, 40, 99]] ^= 1  # one flip in three different groups
    fixed, unresolved = crc_correct(noisy, checks, 16)
    assert unresolved == 0 and np.array_equal(fixed, bits)
    noisy[[4, 5]] ^= 1  # a second and third flip in group 0
    _, unresolved = crc_correct(noisy, checks, 16)
    assert unresolved >= 1


# ---------------------------------------------------------------- scramble


def test_scramble_inverse(rng):
    for _ in range(200):
        n = int(rng.integers(1, 300))
        x = rng.integers(0, 100, n)
        key = int(rng.integers(0, 2**63))
        assert np.array_equal(descramble(scramble(x, key), key), x)


def test_scramble_keys_differ(rng):
    x = rng.integers(0, 2, 256)
    for _ in range(100):
        k1, k2 = (int(k) for k in rng.integers(0, 2**63, 2))
        assert not np.array_equal(scramble(x, k1), scramble(x, k2))


def test_scramble_is_permutation():
    p = permutation(1000, 17)
    assert np.array_equal(np.sort(p), np.arange(1000))
    assert np.array_equal(scramble(np.array([5]), 3), [5])


def test_scramble_lcg_reference():
    # first swap of a length-3 shuffle with key 0, computed by hand
    state = (0 * 6364136223846793005 + 1442695040888963407) % 2**64
    j = (state >> 32) % 3
    expect = [0, 1, 2]
    expect[2], expect[j] = expect[j], expect[2]
    state = (state * 6364136223846793005 + 1442695040888963407) % 2**64
    j = (state >> 32) % 2
    expect[1], expect[j] = expect[j], expect[1]
    assert permutation(3, 0).tolist() == expect


# ---------------------------------------------------------------- segments


@pytest.mark.parametrize("lc,expect", [(1900, (1500, 300, 100)), (19, (15, 3, 1)), (20, (16, 3, 1))])
def test_segment_split(lc, expect):
    assert segment_split(lc) == expect


def test_segment_split_sums(rng):
    for lc in rng.integers(19, 10**6, 200):
        assert sum(segment_split(int(lc))) == lc
    with pytest.raises(CoverTooSmall):
        segment_split(18)
    l1, l2 = single_layer_split(600)
    assert (l1, l2) == (500, 100)


@pytest.mark.parametrize("lc,lr,k,le", [(96, 16, 8, 48), (100, 16, 8, 44)])
def test_edmas_split(lc, lr, k, le):
    assert edmas_split(lc, lr, k) == le


def test_edmas_split_degenerate():
    with pytest.raises(CoverTooSmall):
        edmas_split(16, 16, 16)
    with pytest.raises(ValueError):
        edmas_split(100, 0, 8)
