"""Symmetric (Type-1) bilinear pairing over a supersingular curve.

The curve is ``E: y^2 = x^3 + x`` over ``F_p`` with ``p = 3 (mod 4)``, so
``#E(F_p) = p + 1 = h * q`` and the embedding degree is 2.  The pairing is
the reduced Tate pairing composed with the distortion map
``(x, y) -> (-x, i*y)``, which makes ``pair(P, Q)`` symmetric and
non-degenerate on the order-``q`` subgroup ``G1``.  ``GT`` is the order-``q``
subgroup of ``F_{p^2}^*`` with ``F_{p^2} = F_p[i] / (i^2 + 1)``.

Groups are written multiplicatively, matching the usual pairing-crypto
notation: ``a * b`` is the group law and ``a ** k`` is exponentiation.
Scalars are plain ``int`` values in ``[1, q)``.

Encodings (all big-endian, fixed width):

* scalar: ``scalar_bytes`` = ceil(bits(q) / 8)
* G1: the x coordinate in ``g1_bytes`` bytes; the top bit of the first byte
  carries the parity of y.  The identity is encoded as all zero bytes (the
  point (0, 0) has order 2 and is never a member of G1).
* GT: real part then imaginary part, each ``gt_bytes / 2`` bytes.
"""
from __future__ import annotations

import hashlib
import secrets
import struct
from typing import NamedTuple

import gmpy2
from gmpy2 import mpz

__all__ = [
    "CurveParams", "SS511", "TOY", "PairingGroup", "G1", "GT",
    "ZeroInverse", "DecodeError", "concat", "default_group",
]


class ZeroInverse(ArithmeticError):
    pass


class DecodeError(ValueError):
    pass


class CurveParams(NamedTuple):
    name: str
    p: int   # base field prime, p = 3 mod 4
    q: int   # prime group order
    h: int   # cofactor, p + 1 = h * q


# q = 2^159 + 2^107 + 1 (the 160-bit Solinas order used by the common "SS512"
# parameter set); p is a 511-bit prime so that x plus a parity bit fits in
# 64 bytes.  Generated by scanning h = 4k upward from a hashed seed.
SS511 = CurveParams(
    name="SS511",
    p=5517473813118429455936933506130560494524383352933788921348301087307266455636444133933488400851148016545474528729150550894639943740941533465475598013234439,
    q=730750818665451621361119245571504901405976559617,
    h=7550417559839107629693455562849115066357036596382278352099095098686616996590196316107307987548178376621320,
)

# Reduced-scale parameters for fast exhaustive tests (q = 2^61 - 1).
TOY = CurveParams(
    name="TOY",
    p=42535295865117422293511710891336220219,
    q=2**61 - 1,
    h=18446744073709601220,
)


def concat(*parts: bytes) -> bytes:
    """Unambiguous ``a || b || ...``: each part is prefixed with its 4-byte length."""
    return b"".join(struct.pack(">I", len(p)) + p for p in parts)


class PairingGroup:
    """Parameters plus the operations that need them.

    >>> grp = PairingGroup(TOY)
    >>> g = grp.random_g1()
    >>> grp.pair(g ** 2, g ** 3) == grp.pair(g, g) ** 6
    True
    """

    def __init__(self, params: CurveParams = SS511):
        self.params = params
        self.p = mpz(params.p)
        self.q = params.q
        self.h = params.h
        if (self.p + 1) != params.h * params.q or self.p % 4 != 3:
            raise ValueError("inconsistent curve parameters")
        self.scalar_bytes = (self.q.bit_length() + 7) // 8
        # x needs bits(p) bits plus one parity bit
        self.g1_bytes = (self.p.bit_length() + 1 + 7) // 8
        self.gt_bytes = 2 * ((self.p.bit_length() + 7) // 8)
        self._fe_bytes = self.gt_bytes // 2
        self._sqrt_exp = (self.p + 1) // 4
        self.identity_g1 = G1(self, None)
        self.identity_gt = GT(self, mpz(1), mpz(0))

    def __repr__(self):
        return f"PairingGroup({self.params.name})"

    def __eq__(self, other):
        return isinstance(other, PairingGroup) and other.params == self.params

    def __hash__(self):
        return hash(self.params)

    # -- scalars ----------------------------------------------------------

    def random_scalar(self, rng=None) -> int:
        rng = rng or secrets.SystemRandom()
        return rng.randrange(1, self.q)

    def scalar_inverse(self, a: int) -> int:
        return scalar_inverse(a, self.q)

    def hash_to_scalar(self, data: bytes) -> int:
        return hash_to_scalar(data, self.q)

    def hash_gt_to_scalar(self, x: GT) -> int:
        return self.hash_to_scalar(x.to_bytes())

    def encode_scalar(self, a: int) -> bytes:
        if not 0 < a < self.q:
            raise ValueError("scalar out of range")
        return int(a).to_bytes(self.scalar_bytes, "big")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != self.scalar_bytes:
            raise DecodeError("bad scalar length")
        a = int.from_bytes(data, "big")
        if not 0 < a < self.q:
            raise DecodeError("scalar out of range")
        return a

    # -- G1 ---------------------------------------------------------------

    def _sqrt(self, a):
        y = gmpy2.powmod(a, self._sqrt_exp, self.p)
        return y if (y * y) % self.p == a % self.p else None

    def random_g1(self, rng=None) -> G1:
        """A uniformly random non-identity element of G1."""
        rng = rng or secrets.SystemRandom()
        p = self.p
        while True:
            x = mpz(rng.randrange(1, int(p)))
            y = self._sqrt((x * x * x + x) % p)
            if y is None:
                continue
            if rng.getrandbits(1):
                y = p - y
            pt = G1(self, (x, y)) ** self.h
            if not pt.is_identity():
                return pt

    def decode_g1(self, data: bytes) -> G1:
        if len(data) != self.g1_bytes:
            raise DecodeError("bad G1 length")
        n = int.from_bytes(data, "big")
        if n == 0:
            return self.identity_g1
        top = 8 * self.g1_bytes - 1
        parity = n >> top
        x = mpz(n & ((1 << top) - 1))
        if x >= self.p:
            raise DecodeError("G1 x out of range")
        y = self._sqrt((x * x * x + x) % self.p)
        if y is None:
            raise DecodeError("point not on curve")
        if int(y & 1) != parity:
            y = self.p - y
        if y == 0 and parity:
            raise DecodeError("non-canonical G1 encoding")
        pt = G1(self, (x, y))
        if not (pt ** self.q).is_identity():
            raise DecodeError("point not in G1")
        return pt

    # -- GT ---------------------------------------------------------------

    def decode_gt(self, data: bytes) -> GT:
        if len(data) != self.gt_bytes:
            raise DecodeError("bad GT length")
        n = self._fe_bytes
        a = mpz(int.from_bytes(data[:n], "big"))
        b = mpz(int.from_bytes(data[n:], "big"))
        p = self.p
        if a >= p or b >= p:
            raise DecodeError("GT coordinate out of range")
        if (a * a + b * b) % p != 1:
            raise DecodeError("element not in GT")
        x = GT(self, a, b)
        if x ** self.q != self.identity_gt:
            raise DecodeError("element not in GT")
        return x

    # -- pairing ----------------------------------------------------------

    def pair(self, a: G1, b: G1) -> GT:
        """Reduced Tate pairing ``e(a, phi(b))``; symmetric and bilinear on G1."""
        if a.is_identity() or b.is_identity():
            return self.identity_gt
        p = self.p
        xp, yp = a.pt
        xq, yq = b.pt
        # phi(b) = (-xq, i*yq).  Vertical lines evaluate into F_p and vanish
        # under the final exponentiation, so they are skipped.
        fa, fb = mpz(1), mpz(0)
        xt, yt = xp, yp
        bits = bin(self.q)[3:]
        nbits = len(bits)
        for idx, bit in enumerate(bits):
            # tangent at T
            lam = (3 * xt * xt + 1) * gmpy2.invert(2 * yt, p) % p
            la = (lam * (xq + xt) - yt) % p
            # f = f^2 * (la + yq i)
            sa = (fa + fb) * (fa - fb) % p
            sb = 2 * fa * fb % p
            fa, fb = (sa * la - sb * yq) % p, (sa * yq + sb * la) % p
            x3 = (lam * lam - 2 * xt) % p
            yt = (lam * (xt - x3) - yt) % p
            xt = x3
            if bit == "1":
                if xt == xp:
                    # T = -P on the last step: vertical line only
                    if idx != nbits - 1:
                        raise ArithmeticError("unexpected degenerate Miller step")
                    continue
                lam = (yp - yt) * gmpy2.invert(xp - xt, p) % p
                la = (lam * (xq + xt) - yt) % p
                fa, fb = (fa * la - fb * yq) % p, (fa * yq + fb * la) % p
                x3 = (lam * lam - xt - xp) % p
                yt = (lam * (xt - x3) - yt) % p
                xt = x3
        # final exponentiation: f^(p-1) = conj(f) / f, then ^h
        norm_inv = gmpy2.invert((fa * fa + fb * fb) % p, p)
        ua = (fa * fa - fb * fb) * norm_inv % p
        ub = (-2 * fa * fb) * norm_inv % p
        return GT(self, ua, ub) ** self.h


class G1:
    """A point of the order-q subgroup of E(F_p); ``pt`` is None for the identity."""

    __slots__ = ("group", "pt")

    def __init__(self, group: PairingGroup, pt):
        self.group = group
        self.pt = pt

    def is_identity(self) -> bool:
        return self.pt is None

    def __eq__(self, other):
        return isinstance(other, G1) and self.pt == other.pt and self.group == other.group

    def __hash__(self):
        return hash(self.pt)

    def __repr__(self):
        if self.pt is None:
            return "G1(identity)"
        return f"G1(x={int(self.pt[0]):#x})"

    def __mul__(self, other: G1) -> G1:
        return G1(self.group, _add(self.pt, other.pt, self.group.p))

    def __invert__(self) -> G1:
        if self.pt is None:
            return self
        x, y = self.pt
        return G1(self.group, (x, (-y) % self.group.p))

    def __truediv__(self, other: G1) -> G1:
        return self * ~other

    def __pow__(self, k: int) -> G1:
        return G1(self.group, _mul(self.pt, int(k), self.group.p))

    def to_bytes(self) -> bytes:
        grp = self.group
        if self.pt is None:
            return bytes(grp.g1_bytes)
        x, y = self.pt
        n = int(x) | (int(y & 1) << (8 * grp.g1_bytes - 1))
        return n.to_bytes(grp.g1_bytes, "big")


class GT:
    """An element ``a + b*i`` of the order-q subgroup of F_{p^2}^*."""

    __slots__ = ("group", "a", "b")

    def __init__(self, group: PairingGroup, a, b):
        self.group = group
        self.a = a
        self.b = b

    def __eq__(self, other):
        return (isinstance(other, GT) and self.a == other.a and self.b == other.b
                and self.group == other.group)

    def __hash__(self):
        return hash((int(self.a), int(self.b)))

    def __repr__(self):
        return f"GT({int(self.a):#x}, {int(self.b):#x})"

    def __mul__(self, other: GT) -> GT:
        p = self.group.p
        a, b, c, d = self.a, self.b, other.a, other.b
        return GT(self.group, (a * c - b * d) % p, (a * d + b * c) % p)

    def __invert__(self) -> GT:
        # unitary elements: inverse is the conjugate
        return GT(self.group, self.a, (-self.b) % self.group.p)

    def __truediv__(self, other: GT) -> GT:
        return self * ~other

    def __pow__(self, k: int) -> GT:
        k = int(k)
        if k < 0:
            return (~self) ** (-k)
        p = self.group.p
        ra, rb = mpz(1), mpz(0)
        a, b = self.a, self.b
        for bit in bin(k)[2:]:
            ra, rb = (ra + rb) * (ra - rb) % p, 2 * ra * rb % p
            if bit == "1":
                ra, rb = (ra * a - rb * b) % p, (ra * b + rb * a) % p
        return GT(self.group, ra, rb)

    def to_bytes(self) -> bytes:
        n = self.group._fe_bytes
        return int(self.a).to_bytes(n, "big") + int(self.b).to_bytes(n, "big")


def _add(P, Q, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + 1) * gmpy2.invert(2 * y1, p) % p
    else:
        lam = (y2 - y1) * gmpy2.invert(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


# Jacobian coordinates for scalar multiplication: a = 1, b = 0.
def _jdouble(X, Y, Z, p):
    if Y == 0:
        return mpz(1), mpz(1), mpz(0)
    YY = Y * Y % p
    S = 4 * X * YY % p
    ZZ = Z * Z % p
    M = (3 * X * X + ZZ * ZZ) % p
    X3 = (M * M - 2 * S) % p
    return X3, (M * (S - X3) - 8 * YY * YY) % p, 2 * Y * Z % p


def _jadd_affine(X, Y, Z, x2, y2, p):
    if Z == 0:
        return x2, y2, mpz(1)
    ZZ = Z * Z % p
    U2 = x2 * ZZ % p
    S2 = y2 * ZZ * Z % p
    H = (U2 - X) % p
    R = (S2 - Y) % p
    if H == 0:
        if R == 0:
            return _jdouble(X, Y, Z, p)
        return mpz(1), mpz(1), mpz(0)
    HH = H * H % p
    HHH = H * HH % p
    V = X * HH % p
    X3 = (R * R - HHH - 2 * V) % p
    return X3, (R * (V - X3) - Y * HHH) % p, Z * H % p


def _mul(P, k, p):
    if P is None or k == 0:
        return None
    x, y = P
    if k < 0:
        k = -k
        y = (-y) % p
    X, Y, Z = mpz(1), mpz(1), mpz(0)
    for bit in bin(k)[2:]:
        X, Y, Z = _jdouble(X, Y, Z, p)
        if bit == "1":
            X, Y, Z = _jadd_affine(X, Y, Z, x, y, p)
    if Z == 0:
        return None
    zi = gmpy2.invert(Z, p)
    zi2 = zi * zi % p
    return X * zi2 % p, Y * zi2 * zi % p


def scalar_inverse(a: int, q: int) -> int:
    """Multiplicative inverse of ``a`` modulo the prime ``q``."""
    a %= q
    if a == 0:
        raise ZeroInverse("zero has no inverse")
    return pow(a, -1, q)


def hash_to_scalar(data: bytes, q: int) -> int:
    """SHA-256 of ``data`` read big-endian, reduced mod q; 0 is mapped to 1."""
    v = int.from_bytes(hashlib.sha256(data).digest(), "big") % q
    return v or 1


_DEFAULT: dict[str, PairingGroup] = {}


def default_group(name: str = "SS511") -> PairingGroup:
    """Shared group instance for a named parameter set."""
    if name not in _DEFAULT:
        params = {"SS511": SS511, "TOY": TOY}[name]
        _DEFAULT[name] = PairingGroup(params)
    return _DEFAULT[name]
