"""Big-endian framing helpers shared by the artifact encoders.

Strings and opaque byte fields carry a 4-byte length prefix; counts are
2 bytes; timestamps 8 bytes.
"""
from __future__ import annotations

import struct

from .algebra import DecodeError


class Writer:
    def __init__(self):
        self._parts: list[bytes] = []

    def raw(self, b: bytes) -> "Writer":
        self._parts.append(bytes(b))
        return self

    def blob(self, b: bytes) -> "Writer":
        self._parts.append(struct.pack(">I", len(b)) + bytes(b))
        return self

    def text(self, s: str) -> "Writer":
        return self.blob(s.encode("utf-8"))

    def count(self, n: int) -> "Writer":
        self._parts.append(struct.pack(">H", n))
        return self

    def u64(self, n: int) -> "Writer":
        self._parts.append(struct.pack(">Q", n))
        return self

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes):
        self.data = bytes(data)
        self.pos = 0

    def raw(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise DecodeError("truncated input")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def blob(self) -> bytes:
        (n,) = struct.unpack(">I", self.raw(4))
        return self.raw(n)

    def text(self) -> str:
        try:
            return self.blob().decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError("invalid utf-8 string") from exc

    def count(self) -> int:
        return struct.unpack(">H", self.raw(2))[0]

    def u64(self) -> int:
        return struct.unpack(">Q", self.raw(8))[0]

    def rest(self) -> bytes:
        return self.raw(len(self.data) - self.pos)

    def done(self):
        if self.pos != len(self.data):
            raise DecodeError("trailing bytes")
