"""Length-prefixed binary packing helpers for the bundle wire format.

All integers are big-endian. Variable-length fields carry a u32 byte-length
prefix. The Reader raises MalformedBundle on any truncation or overrun so
parsers never need bounds checks of their own.
"""

from __future__ import annotations

import struct

from .errors import MalformedBundle


def pack_u8(value: int) -> bytes:
    return struct.pack(">B", value)


def pack_u16(value: int) -> bytes:
    return struct.pack(">H", value)


def pack_u32(value: int) -> bytes:
    return struct.pack(">I", value)


def pack_u64(value: int) -> bytes:
    return struct.pack(">Q", value)


def pack_i64(value: int) -> bytes:
    return struct.pack(">q", value)


def pack_bytes(data: bytes) -> bytes:
    return pack_u32(len(data)) + data


def pack_str(text: str) -> bytes:
    return pack_bytes(text.encode("utf-8"))


class Reader:
    """Sequential reader over a byte buffer with hard bounds checking."""

    def __init__(self, data: bytes) -> None:
        self._data = data
        self._pos = 0

    @property
    def position(self) -> int:
        return self._pos

    def remaining(self) -> int:
        return len(self._data) - self._pos

    def take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._data):
            raise MalformedBundle(
                f"truncated: wanted {n} bytes at offset {self._pos}, "
                f"have {len(self._data) - self._pos}"
            )
        out = self._data[self._pos : self._pos + n]
        self._pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack(">Q", self.take(8))[0]

    def i64(self) -> int:
        return struct.unpack(">q", self.take(8))[0]

    def bytes_field(self) -> bytes:
        return self.take(self.u32())

    def str_field(self) -> str:
        raw = self.bytes_field()
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedBundle("string field is not valid UTF-8") from exc

    def expect_end(self) -> None:
        if self.remaining() != 0:
            raise MalformedBundle(f"{self.remaining()} trailing bytes after last section")
