"""Robust JPEG steganography under re-compression: codec model, costs, coding, schemes and benchmarks."""

from .channel import ChannelSpec, recompress
from .jpeg import CoefImage, compress, decompress, quant_table
from .schemes import (
    CapacityError,
    EmbedResult,
    Extraction,
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

__version__ = "0.1.0"
