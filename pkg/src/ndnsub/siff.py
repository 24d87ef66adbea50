"""Sibling-intractable polynomial sharing of a key over Z_q.

``build(roots, K)`` returns the monic ``P(x) = prod(x - r) + K``, so every
root evaluates to ``K`` and any other point evaluates to something else.
Only the coefficients are published.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

__all__ = ["SiffPolynomial", "DuplicateRoot", "build", "evaluate"]


class DuplicateRoot(ValueError):
    pass


@dataclass(frozen=True)
class SiffPolynomial:
    """Monic ``x^n + a_1 x^(n-1) + ... + a_n`` over Z_q.

    ``coeffs`` holds ``(a_1, ..., a_n)``; the leading 1 is implicit.
    """

    coeffs: tuple[int, ...]
    q: int

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def __call__(self, x: int) -> int:
        return evaluate(self, x)

    def to_bytes(self, width: int) -> bytes:
        """2-byte degree, then ``(1, a_1, ..., a_n)`` as ``width``-byte big-endian integers.

        The leading coefficient is written out so a degree-n polynomial
        occupies n + 1 field elements on the wire.
        """
        out = [struct.pack(">H", self.degree), (1).to_bytes(width, "big")]
        out += [c.to_bytes(width, "big") for c in self.coeffs]
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes, width: int, q: int) -> tuple["SiffPolynomial", int]:
        """Parse from the front of ``data``; returns the polynomial and bytes consumed."""
        if len(data) < 2:
            raise ValueError("truncated polynomial")
        (n,) = struct.unpack(">H", data[:2])
        end = 2 + (n + 1) * width
        if len(data) < end:
            raise ValueError("truncated polynomial")
        vals = [int.from_bytes(data[2 + k * width: 2 + (k + 1) * width], "big")
                for k in range(n + 1)]
        if vals[0] != 1:
            raise ValueError("polynomial is not monic")
        if any(v >= q for v in vals):
            raise ValueError("coefficient out of range")
        return cls(tuple(vals[1:]), q), end


def build(roots, key: int, q: int) -> SiffPolynomial:
    """Expand ``prod(x - r) + key`` mod q.

    Roots are sorted first so the coefficients depend only on the root set.
    """
    roots = sorted(r % q for r in roots)
    if not roots:
        raise ValueError("need at least one root")
    if len(set(roots)) != len(roots):
        raise DuplicateRoot("roots must be pairwise distinct")
    # poly[k] is the coefficient of x^(n-k); start from the constant 1
    poly = [1]
    for r in roots:
        nxt = poly + [0]
        for k in range(1, len(nxt)):
            nxt[k] = (nxt[k] - r * poly[k - 1]) % q
        poly = nxt
    poly[-1] = (poly[-1] + key) % q
    return SiffPolynomial(tuple(poly[1:]), q)


def evaluate(poly: SiffPolynomial, x: int) -> int:
    """Horner evaluation of the monic polynomial at ``x``."""
    q = poly.q
    acc = 1
    for c in poly.coeffs:
        acc = (acc * x + c) % q
    return acc
