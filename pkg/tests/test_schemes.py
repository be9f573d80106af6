import numpy as np
import pytest

from robuststego.coding.scramble import permutation
from robuststego.coding.segments import edmas_split, segment_split
from robuststego.coding.stc import StcParams
from robuststego.dither import extract_cover, read_bits
from robuststego.jpeg import compress
from robuststego.schemes import (
    CapacityError,
    SchemeConfig,
    embed,
    embed_edmas,
    embed_gmas,
    embed_proposed,
    extract,
    extract_edmas,
    extract_gmas,
    extract_proposed,
    message_length,
)


@pytest.fixture(scope="module")
def cover(request):
    from robuststego.corpus import load_corpus

    return compress(load_corpus(1, seed=21)[0][1][:128, :128], 65)


def _message(cover, payload, seed=0):
    n = message_length(cover, payload)
    return np.random.default_rng(seed).integers(0, 2, n).astype(np.uint8)


def _flip_elements(stego, cfg, scrambled_positions):
    """Flip the dither bit of cover elements addressed in scrambled order."""
    seq = extract_cover(stego, cfg.domain)
    perm = permutation(len(seq), cfg.key)
    idx = perm[np.asarray(scrambled_positions)]
    coefs = np.array(stego.coefs)
    r, c = seq.rows[idx], seq.cols[idx]
    coefs[r, c] += np.where(coefs[r, c] > 0, -1, 1)
    return stego.replace(coefs)


@pytest.mark.parametrize("scheme", ["proposed", "gmas", "edmas"])
@pytest.mark.parametrize("payload", [0.01, 0.05, 0.1])
def test_round_trip(cover, scheme, payload):
    cfg = SchemeConfig(scheme=scheme, payload=payload)
    msg = _message(cover, payload)
    res = embed(cover, msg, cfg)
    out = extract(res.stego, cfg, msg.size)
    assert out.ok and np.array_equal(out.message, msg)
    # the stego image carries exactly the intended sequence
    assert np.array_equal(read_bits(res.stego, cfg.domain), res.target)


def test_wrappers(cover):
    msg = _message(cover, 0.04)
    for emb, ext, name in (
        (embed_proposed, extract_proposed, "proposed"),
        (embed_gmas, extract_gmas, "gmas"),
        (embed_edmas, extract_edmas, "edmas"),
    ):
        stego = emb(cover, msg)
        assert np.array_equal(ext(stego, msg.size).message, msg)
        with pytest.raises(ValueError):
            emb(cover, msg, SchemeConfig(scheme="proposed" if name != "proposed" else "gmas"))


def test_deterministic(cover):
    cfg = SchemeConfig(payload=0.05, key=77)
    msg = _message(cover, 0.05)
    assert embed(cover, msg, cfg).stego == embed(cover, msg, cfg).stego


def test_wrong_key_scrambles_message(cover):
    cfg = SchemeConfig(payload=0.05, key=1)
    msg = _message(cover, 0.05)
    stego = embed(cover, msg, cfg).stego
    out = extract(stego, cfg.replace(key=2), msg.size)
    assert np.count_nonzero(out.message != msg) > msg.size // 5


def test_defaults():
    assert str(SchemeConfig().domain) == "E_45"
    assert str(SchemeConfig(scheme="gmas").domain) == "E_678"
    assert str(SchemeConfig(scheme="edmas").domain) == "E_78"
    assert SchemeConfig().modification_passes == 2
    assert SchemeConfig().stc.h == 10


@pytest.mark.parametrize(
    "bad", [{"payload": 0}, {"payload": 1.5}, {"scheme": "dmas"}, {"check_layers": 3}, {"alpha": 2.0}]
)
def test_config_validation(bad):
    with pytest.raises(ValueError):
        SchemeConfig(**bad)


def test_config_dict_round_trip():
    cfg = SchemeConfig(scheme="gmas", domain="E_67", payload=0.03, stc=StcParams(7, 5), alpha=0.5)
    assert SchemeConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        SchemeConfig.from_dict({"nonsense": 1})


def test_quality_must_match(cover):
    with pytest.raises(ValueError):
        embed(cover, _message(cover, 0.01), SchemeConfig(quality=75))


def test_capacity_is_a_hard_error(cover):
    msg = np.zeros(len(extract_cover(cover, SchemeConfig().domain)), np.uint8)
    with pytest.raises(CapacityError):
        embed(cover, msg, SchemeConfig(payload=1.0))


def test_proposed_corrects_errors_in_s1(cover):
    cfg = SchemeConfig(payload=0.05)
    msg = _message(cover, 0.05)
    stego = embed(cover, msg, cfg).stego
    # two bad symbols in the first RS block of S1
    attacked = _flip_elements(stego, cfg, [5, 100])
    out = extract(attacked, cfg, msg.size)
    assert out.ok and np.array_equal(out.message, msg)


def test_proposed_double_layer_rescues_s1_and_s2(cover):
    cfg = SchemeConfig(payload=0.05)
    msg = _message(cover, 0.05)
    stego = embed(cover, msg, cfg).stego
    l1, l2, _ = segment_split(len(extract_cover(cover, cfg.domain)))
    # two bad symbols in S1's first block use up its budget; the S2 errors are
    # only harmless when the additional layer repairs them first
    hits = [3, 12, l1 + 2, l1 + 40]
    attacked = _flip_elements(stego, cfg, hits)
    out = extract(attacked, cfg, msg.size)
    assert out.ok and np.array_equal(out.message, msg)
    single = cfg.replace(check_layers=1)
    stego1 = embed(cover, msg, single).stego
    l1s = len(extract_cover(cover, cfg.domain)) - len(extract_cover(cover, cfg.domain)) // 6
    attacked1 = _flip_elements(stego1, single, [3, 12, l1s + 2, l1s + 40])
    out1 = extract(attacked1, single, msg.size)
    assert not np.array_equal(out1.message, msg)


def test_proposed_reports_rs_failure(cover):
    cfg = SchemeConfig(payload=0.05)
    msg = _message(cover, 0.05)
    stego = embed(cover, msg, cfg).stego
    attacked = _flip_elements(stego, cfg, [0, 9, 17, 25, 33])  # five symbols of one block
    out = extract(attacked, cfg, msg.size)
    assert not out.ok and out.rs_failures >= 1
    assert out.message.size == msg.size


def test_edmas_split_is_honoured(cover):
    cfg = SchemeConfig(scheme="edmas", payload=0.05)
    msg = _message(cover, 0.05)
    res = embed(cover, msg, cfg)
    l_e = edmas_split(len(res.cover_seq), cfg.crc_group, 8)
    perm = permutation(len(res.cover_seq), cfg.key)
    from robuststego.coding.stc import stc_extract

    s1 = res.target[perm][:l_e]
    assert np.array_equal(stc_extract(s1, msg.size, cfg.stc.derive(21)), msg)


def test_edmas_check_burst_diffuses(cover):
    cfg = SchemeConfig(scheme="edmas", payload=0.05)
    msg = _message(cover, 0.05)
    res = embed(cover, msg, cfg)
    l_e = edmas_split(len(res.cover_seq), cfg.crc_group, 8)
    # one S1 error plus a burst in the check segment that guards it
    attacked = _flip_elements(res.stego, cfg, [3, l_e, l_e + 1, l_e + 2])
    out = extract(attacked, cfg, msg.size)
    single = _flip_elements(res.stego, cfg, [3])
    assert np.array_equal(extract(single, cfg, msg.size).message, msg)
    assert np.count_nonzero(out.message != msg) > 1


def test_gmas_alpha_one(cover):
    cfg = SchemeConfig(scheme="gmas", alpha=1.0, payload=0.05)
    msg = _message(cover, 0.05)
    res = embed(cover, msg, cfg)
    assert np.array_equal(extract(res.stego, cfg, msg.size).message, msg)
    # every element moves by at most one interval
    assert np.max(np.abs(res.stego.coefs - cover.coefs)) <= 1


def test_message_must_be_bits(cover):
    with pytest.raises(ValueError):
        embed(cover, np.array([0, 2, 1]), SchemeConfig())
    with pytest.raises(ValueError):
        extract(cover, SchemeConfig(), -1)
