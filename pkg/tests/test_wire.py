"""
Tests for the varint helpers behind the canonical byte formats
"""

# Third Party
import pytest

# Local
from hydra.wire import decode_varint, encode_varint, encode_varints

## Happy Path ##################################################################


def test_small_values_take_one_byte():
    """Values below 128 encode as themselves"""
    assert encode_varint(0) == b"\x00"
    assert encode_varint(127) == b"\x7f"


def test_multi_byte_value():
    """300 spills into a second byte"""
    assert encode_varint(300) == b"\xac\x02"
    assert decode_varint(b"\xac\x02", 0) == (300, 2)


def test_encode_many_and_decode_in_sequence():
    """Concatenated varints decode one after another"""
    data = encode_varints([5, 300, 5, 0])
    assert data == b"\x05\xac\x02\x05\x00"
    pos, values = 0, []
    while pos < len(data):
        value, pos = decode_varint(data, pos)
        values.append(value)
    assert values == [5, 300, 5, 0]


## Error Cases #################################################################


def test_decode_past_the_end():
    """Reading beyond the buffer is an IndexError"""
    with pytest.raises(IndexError):
        decode_varint(b"\x01", 1)
