"""End-to-end embed/extract pipelines: the proposed scheme, GMAS and E-DMAS."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSpec, stabilize
from .coding.crc import CRC8, crc_correct, crc_groups, degree
from .coding.rs import (
    RS_255_251,
    RsCode,
    check_bits,
    check_bits_len,
    correct_bits,
    rs_decode_bits,
    rs_encode_bits,
    rs_encoded_len,
)
from .coding.scramble import descramble, scramble
from .coding.segments import edmas_split, segment_split, single_layer_split
from .coding.stc import StcParams, stc_embed, stc_embed_ternary, stc_extract, stc_extract_ternary
from .costs import CostMap, asymmetric_costs, dm_costs, juniward_costs
from .dither import CoverSequence, DomainSpec, apply_stego, extract_cover
from .jpeg import CoefImage, _pad, decompress, forward_block, from_blocks, nonzero_ac_count, to_blocks

SCHEMES = ("proposed", "gmas", "edmas")
DEFAULT_DOMAINS = {"proposed": "E_45", "gmas": "E_678", "edmas": "E_78"}
DEFAULT_PASSES = {"proposed": 2, "gmas": 0, "edmas": 0}

# salts separating the STC matrices of the individual segments
_S1, _S2, _S3 = 11, 12, 13
_EDMAS_MSG, _EDMAS_CHK = 21, 22


class CapacityError(ValueError):
    """The message (or its check codes) does not fit the cover."""


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str = "proposed"
    domain: DomainSpec | None = None
    quality: int = 65
    payload: float = 0.05
    key: int = 0x5EED
    stc: StcParams = field(default_factory=StcParams)
    alpha: float = 0.7
    crc_poly: int = CRC8
    crc_group: int = 16
    gmas_rs_k: int = 223
    check_layers: int = 2
    modification_passes: int | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.domain is None:
            object.__setattr__(self, "domain", DomainSpec.parse(DEFAULT_DOMAINS[self.scheme]))
        elif isinstance(self.domain, str):
            object.__setattr__(self, "domain", DomainSpec.parse(self.domain))
        if self.modification_passes is None:
            object.__setattr__(self, "modification_passes", DEFAULT_PASSES[self.scheme])
        if not 0 < self.payload <= 1:
            raise ValueError("payload must lie in (0, 1] bpnzac")
        if self.check_layers not in (1, 2):
            raise ValueError("check_layers must be 1 or 2")
        if self.modification_passes < 0:
            raise ValueError("modification_passes must be non-negative")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")

    def replace(self, **changes) -> "SchemeConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["domain"] = str(self.domain)
        d["stc"] = {"h": self.stc.h, "key": self.stc.key}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SchemeConfig":
        d = dict(d)
        if isinstance(d.get("stc"), dict):
            d["stc"] = StcParams(**d["stc"])
        if isinstance(d.get("domain"), str):
            d["domain"] = DomainSpec.parse(d["domain"])
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown scheme settings: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True, eq=False)
class EmbedResult:
    stego: CoefImage
    intermediate: CoefImage
    cover_seq: CoverSequence
    target: np.ndarray  # intended stego sequence, natural scan order
    msg_len: int

    @property
    def modified(self) -> np.ndarray:
        return self.target != self.cover_seq.bits


@dataclass(frozen=True, eq=False)
class Extraction:
    message: np.ndarray
    ok: bool
    rs_failures: int = 0


def message_length(cover: CoefImage, payload: float) -> int:
    return int(np.floor(payload * nonzero_ac_count(cover)))


def _check_cover(cover: CoefImage, cfg: SchemeConfig):
    if cover.table.quality != cfg.quality:
        raise ValueError(
            f"cover quality {cover.table.quality} does not match the channel quality {cfg.quality}"
        )


def _message(message) -> np.ndarray:
    m = np.asarray(message, dtype=np.uint8).ravel()
    if m.size and m.max() > 1:
        raise ValueError("message must be a bit array")
    return m


def _embed_segment(cover_bits, costs, payload_bits, params: StcParams, what: str) -> np.ndarray:
    if payload_bits.size > cover_bits.size:
        raise CapacityError(
            f"{what}: {payload_bits.size} bits do not fit a {cover_bits.size}-element segment"
        )
    return stc_embed(cover_bits, costs, payload_bits, params)


def _finish(cover, seq, target, cfg, msg_len, directions=None) -> EmbedResult:
    intermediate = apply_stego(cover, seq, target, directions)
    stego = stabilize(intermediate, target, seq, cfg.modification_passes, ChannelSpec(cfg.quality))
    return EmbedResult(stego, intermediate, seq, target, msg_len)


# ------------------------------------------------------------------ proposed


def _proposed_lengths(l_c: int, cfg: SchemeConfig) -> tuple[int, int, int]:
    if cfg.check_layers == 2:
        return segment_split(l_c)
    return (*single_layer_split(l_c), 0)


def _embed_proposed(cover, msg, cfg, costs) -> EmbedResult:
    seq = extract_cover(cover, cfg.domain)
    xi = dm_costs(costs.rho[seq.rows, seq.cols], seq.steps, seq.d)
    c = scramble(seq.bits, cfg.key)
    x = scramble(xi, cfg.key)
    l1, l2, l3 = _proposed_lengths(len(seq), cfg)
    a, b = l1, l1 + l2

    s1 = _embed_segment(c[:a], x[:a], msg, cfg.stc.derive(_S1), "message")
    s2 = _embed_segment(c[a:b], x[a:b], check_bits(s1), cfg.stc.derive(_S2), "check codes")
    parts = [s1, s2]
    if cfg.check_layers == 2:
        parts.append(
            _embed_segment(c[b:], x[b:], check_bits(s2), cfg.stc.derive(_S3), "additional check codes")
        )
    target = descramble(np.concatenate(parts), cfg.key)
    return _finish(cover, seq, target, cfg, msg.size)


def _extract_proposed(stego, cfg, msg_len) -> Extraction:
    seq = extract_cover(stego, cfg.domain)
    r = scramble(seq.bits, cfg.key)
    l1, l2, l3 = _proposed_lengths(len(seq), cfg)
    r1, r2 = r[:l1], r[l1 : l1 + l2]
    failures = 0
    if cfg.check_layers == 2:
        chk2 = stc_extract(r[l1 + l2 :], check_bits_len(l2), cfg.stc.derive(_S3))
        r2, f, _ = correct_bits(r2, chk2)
        failures += f
    chk1 = stc_extract(r2, check_bits_len(l1), cfg.stc.derive(_S2))
    r1, f, _ = correct_bits(r1, chk1)
    failures += f
    msg = stc_extract(r1, msg_len, cfg.stc.derive(_S1))
    return Extraction(msg, failures == 0, failures)


# ---------------------------------------------------------------------- GMAS


def processed_reference(cover: CoefImage) -> np.ndarray:
    """Unquantized DCT plane of the decompressed 8-bit cover (de-quantized units)."""
    pixels = _pad(decompress(cover)).astype(np.float64)
    return from_blocks(forward_block(to_blocks(pixels)))


def _embed_gmas(cover, msg, cfg, costs) -> EmbedResult:
    seq = extract_cover(cover, cfg.domain, generalized=True)
    asym = asymmetric_costs(costs, cover, processed_reference(cover), cfg.alpha)
    pos = (seq.rows, seq.cols)
    xi_plus = dm_costs(asym.rho_plus[pos], seq.steps, seq.d_plus)
    xi_minus = dm_costs(asym.rho_minus[pos], seq.steps, seq.d_minus)
    coded = rs_encode_bits(msg, RsCode(255, cfg.gmas_rs_k))
    if coded.size > len(seq):
        raise CapacityError(f"RS-coded message ({coded.size} bits) exceeds the cover ({len(seq)})")
    change = stc_embed_ternary(seq.index, xi_plus, xi_minus, coded, cfg.stc)
    target = np.mod(seq.index + change, 2).astype(np.uint8)
    return _finish(cover, seq, target, cfg, msg.size, directions=change)


def _extract_gmas(stego, cfg, msg_len) -> Extraction:
    seq = extract_cover(stego, cfg.domain, generalized=True)
    code = RsCode(255, cfg.gmas_rs_k)
    coded = stc_extract_ternary(seq.index, rs_encoded_len(msg_len, code), cfg.stc)
    msg, failures = rs_decode_bits(coded, msg_len, code)
    return Extraction(msg, failures == 0, failures)


# -------------------------------------------------------------------- E-DMAS


def _edmas_len(l_c: int, cfg: SchemeConfig) -> int:
    return edmas_split(l_c, cfg.crc_group, degree(cfg.crc_poly))


def _embed_edmas(cover, msg, cfg, costs) -> EmbedResult:
    seq = extract_cover(cover, cfg.domain)
    xi = dm_costs(costs.rho[seq.rows, seq.cols], seq.steps, seq.d)
    c = scramble(seq.bits, cfg.key)
    x = scramble(xi, cfg.key)
    l_e = _edmas_len(len(seq), cfg)
    s1 = _embed_segment(c[:l_e], x[:l_e], msg, cfg.stc.derive(_EDMAS_MSG), "message")
    checks = crc_groups(s1, cfg.crc_group, cfg.crc_poly)
    s2 = _embed_segment(c[l_e:], x[l_e:], checks, cfg.stc.derive(_EDMAS_CHK), "CRC codes")
    target = descramble(np.concatenate([s1, s2]), cfg.key)
    return _finish(cover, seq, target, cfg, msg.size)


def _extract_edmas(stego, cfg, msg_len) -> Extraction:
    seq = extract_cover(stego, cfg.domain)
    r = scramble(seq.bits, cfg.key)
    l_e = _edmas_len(len(seq), cfg)
    n_checks = -(-l_e // cfg.crc_group) * degree(cfg.crc_poly)
    checks = stc_extract(r[l_e:], n_checks, cfg.stc.derive(_EDMAS_CHK))
    r1, unresolved = crc_correct(r[:l_e], checks, cfg.crc_group, cfg.crc_poly)
    msg = stc_extract(r1, msg_len, cfg.stc.derive(_EDMAS_MSG))
    return Extraction(msg, unresolved == 0, unresolved)


# ------------------------------------------------------------------ dispatch

_EMBED = {"proposed": _embed_proposed, "gmas": _embed_gmas, "edmas": _embed_edmas}
_EXTRACT = {"proposed": _extract_proposed, "gmas": _extract_gmas, "edmas": _extract_edmas}


def embed(cover: CoefImage, message, cfg: SchemeConfig, costs: CostMap | None = None) -> EmbedResult:
    """Run the configured scheme; ``costs`` may carry precomputed J-UNIWARD costs."""
    _check_cover(cover, cfg)
    msg = _message(message)
    if costs is None:
        costs = juniward_costs(cover)
    return _EMBED[cfg.scheme](cover, msg, cfg, costs)


def extract(stego: CoefImage, cfg: SchemeConfig, msg_len: int) -> Extraction:
    if msg_len < 0:
        raise ValueError("message length must be non-negative")
    return _EXTRACT[cfg.scheme](stego, cfg, msg_len)


def _as(cfg: SchemeConfig | None, scheme: str) -> SchemeConfig:
    if cfg is None:
        return SchemeConfig(scheme=scheme)
    if cfg.scheme != scheme:
        raise ValueError(f"configuration is for {cfg.scheme!r}, not {scheme!r}")
    return cfg


def embed_proposed(cover, message, cfg: SchemeConfig | None = None, costs=None) -> CoefImage:
    return embed(cover, message, _as(cfg, "proposed"), costs).stego


def extract_proposed(stego, msg_len: int, cfg: SchemeConfig | None = None) -> Extraction:
    return extract(stego, _as(cfg, "proposed"), msg_len)


def embed_gmas(cover, message, cfg: SchemeConfig | None = None, costs=None) -> CoefImage:
    return embed(cover, message, _as(cfg, "gmas"), costs).stego


def extract_gmas(stego, msg_len: int, cfg: SchemeConfig | None = None) -> Extraction:
    return extract(stego, _as(cfg, "gmas"), msg_len)


def embed_edmas(cover, message, cfg: SchemeConfig | None = None, costs=None) -> CoefImage:
    return embed(cover, message, _as(cfg, "edmas"), costs).stego


def extract_edmas(stego, msg_len: int, cfg: SchemeConfig | None = None) -> Extraction:
    return extract(stego, _as(cfg, "edmas"), msg_len)
