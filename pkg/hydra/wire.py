"""
Varint primitives for the canonical byte formats.

These wrap protobuf's own varint codec. The two functions imported here live
in `google.protobuf.internal` and are not part of protobuf's public API, so
this is the only module allowed to touch them.
"""

# Standard
from typing import Dict, Iterable, Tuple

# Third Party
from google.protobuf.internal.decoder import _DecodeVarint
from google.protobuf.internal.encoder import _VarintBytes

## Interface ###################################################################


def encode_varint(value: int) -> bytes:
    """Unsigned little-endian base-128 encoding of a non-negative int"""
    assert value >= 0, f"PROGRAMMING ERROR: negative varint {value}"
    return _VarintBytes(value)


def encode_varints(values: Iterable[int]) -> bytes:
    """Concatenated varints"""
    encoded: Dict[int, bytes] = {}
    parts = []
    for value in values:
        chunk = encoded.get(value)
        if chunk is None:
            chunk = encoded[value] = encode_varint(value)
        parts.append(chunk)
    return b"".join(parts)


def decode_varint(data: bytes, pos: int) -> Tuple[int, int]:
    """Read one varint at pos

    Args:
        data:  bytes
            Encoded buffer
        pos:  int
            Offset of the first byte

    Returns:
        value:  int
            The decoded value
        pos:  int
            Offset just past the varint
    """
    if pos >= len(data):
        raise IndexError(f"Truncated varint at offset {pos}")
    return _DecodeVarint(data, pos)
