from .crc import CRC8, crc_check, crc_correct, crc_encode, crc_groups
from .rs import RS_255_251, RsCode, rs_decode, rs_encode
from .scramble import descramble, scramble
from .segments import CoverTooSmall, edmas_split, segment_split, single_layer_split
from .stc import (
    EmbeddingFailure,
    StcParams,
    parity_check_matrix,
    stc_embed,
    stc_embed_ternary,
    stc_extract,
    stc_extract_ternary,
)

__all__ = [
    "CRC8",
    "RS_255_251",
    "CoverTooSmall",
    "EmbeddingFailure",
    "RsCode",
    "StcParams",
    "crc_check",
    "crc_correct",
    "crc_encode",
    "crc_groups",
    "descramble",
    "edmas_split",
    "parity_check_matrix",
    "rs_decode",
    "rs_encode",
    "scramble",
    "segment_split",
    "single_layer_split",
    "stc_embed",
    "stc_embed_ternary",
    "stc_extract",
    "stc_extract_ternary",
]
