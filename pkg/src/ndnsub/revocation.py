"""Immediate revocation by a Lagrange-in-the-exponent broadcast.

The producer holds a random degree-t polynomial ``u`` over Z_q, where q is
the prime order of ``g`` in a Schnorr group mod p.  Every consumer gets one
point ``(x_u, u(x_u))``; t further points are kept back in a pool.  A header

    U = k * g^(a_0 r),  V = g^r,  E = {(x_i, g^(r u(x_i)))},  Lambda

carries t points of ``u`` in the exponent.  Any consumer whose own point is
not in E has t + 1 distinct points, interpolates ``g^(r u(0)) = g^(a_0 r)``
and unwraps ``k``.  Revoked consumers' points are the ones placed in E, so
they only ever hold t distinct points.
"""
from __future__ import annotations

import secrets
from dataclasses import dataclass, field
from typing import Hashable, Iterable, NamedTuple, Optional

import gmpy2

from .algebra import DecodeError
from .wire import Reader, Writer

__all__ = [
    "SchnorrGroup", "SCHNORR1024", "TOY_SCHNORR", "Share", "RevocationSetup",
    "RevocationHeader", "PoolExhausted", "DuplicateConsumer", "TooManyRevoked",
    "DegenerateShare", "revocation_setup", "issue_share", "make_header",
    "recover_key", "random_rekey", "rekey_bytes", "lagrange_at_zero", "DEFAULT_DEGREE",
]

DEFAULT_DEGREE = 16


class PoolExhausted(RuntimeError):
    pass


class DuplicateConsumer(ValueError):
    pass


class TooManyRevoked(ValueError):
    pass


class DegenerateShare(ArithmeticError):
    """The share's x coordinate is one of the header's points."""


class SchnorrGroup(NamedTuple):
    name: str
    p: int   # modulus
    q: int   # prime order of g, q | p - 1
    g: int

    @property
    def element_bytes(self) -> int:
        return (self.p.bit_length() + 7) // 8

    @property
    def scalar_bytes(self) -> int:
        return (self.q.bit_length() + 7) // 8


# 1024-bit modulus, 160-bit subgroup: the same ~80-bit level as the pairing.
SCHNORR1024 = SchnorrGroup(
    name="SCHNORR1024",
    p=101723264572677329178755392176134964102266228584647140167863638676745950302565623970367475000189911135372346717278414936801120549656713259606678083766585936035142724553841924867786188570535685274015676121683735699050655697120775779994746740208545112184580211055244102009902602750675643147219627278944693954251,
    q=1395800439514947716217858384789725884633402998217,
    g=9738425449846835523145116832371612493016442327966423366079302932261802899389622088607739358637536719007570481473734299265276543538824574713386494040657337120496872523155001762695927982163838769774367110845963717179554577062854044924210206292028867614237854884481191278788575786271669754784056499545886917854,
)

TOY_SCHNORR = SchnorrGroup(name="TOY_SCHNORR", p=2039, q=1019, g=4)

_GROUPS = {grp.name: grp for grp in (SCHNORR1024, TOY_SCHNORR)}


class Share(NamedTuple):
    x: int
    y: int


def _poly_eval(coeffs, x, q):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    return acc


def lagrange_at_zero(xs: list[int], k: int, q: int) -> int:
    """Basis coefficient of point ``xs[k]`` for interpolating at 0: ``prod_{j != k} x_j / (x_j - x_k)``."""
    num, den = 1, 1
    xk = xs[k]
    for j, xj in enumerate(xs):
        if j != k:
            num = num * xj % q
            den = den * (xj - xk) % q
    if den == 0:
        raise DegenerateShare("repeated x coordinate")
    return num * pow(den, -1, q) % q


@dataclass
class RevocationSetup:
    group: SchnorrGroup
    coeffs: list[int]                # a_0 .. a_t
    pool: list[Share]                # t reserved, never-issued points
    n_max: int
    shares: dict[Hashable, Share] = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def u(self, x: int) -> int:
        return _poly_eval(self.coeffs, x, self.group.q)

    def _used_x(self) -> set[int]:
        return {s.x for s in self.pool} | {s.x for s in self.shares.values()}


@dataclass
class RevocationHeader:
    group: SchnorrGroup
    U: int
    V: int
    E: list[tuple[int, int]]         # (x_i, g^(r u(x_i)))
    lambdas: list[int]               # partial coefficients over E's x coordinates

    def to_bytes(self) -> bytes:
        eb, sb = self.group.element_bytes, self.group.scalar_bytes
        w = Writer().text(self.group.name)
        w.raw(self.U.to_bytes(eb, "big")).raw(self.V.to_bytes(eb, "big"))
        w.count(len(self.E))
        for x, y in self.E:
            w.raw(x.to_bytes(sb, "big")).raw(y.to_bytes(eb, "big"))
        for lam in self.lambdas:
            w.raw(lam.to_bytes(sb, "big"))
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "RevocationHeader":
        r = Reader(data)
        try:
            grp = _GROUPS[r.text()]
        except KeyError as exc:
            raise DecodeError("unknown revocation group") from exc
        eb, sb = grp.element_bytes, grp.scalar_bytes
        U = int.from_bytes(r.raw(eb), "big")
        V = int.from_bytes(r.raw(eb), "big")
        n = r.count()
        E = [(int.from_bytes(r.raw(sb), "big"), int.from_bytes(r.raw(eb), "big"))
             for _ in range(n)]
        lambdas = [int.from_bytes(r.raw(sb), "big") for _ in range(n)]
        r.done()
        for v in [U, V] + [y for _, y in E]:
            if not 0 < v < grp.p:
                raise DecodeError("group element out of range")
        return cls(grp, U, V, E, lambdas)


def _fresh_x(rng, q: int, used: set[int]) -> int:
    while True:
        x = rng.randrange(1, q)
        if x not in used:
            return x


def revocation_setup(t: int = DEFAULT_DEGREE, n_max: int = 1000, rng=None,
                     group: SchnorrGroup = SCHNORR1024) -> RevocationSetup:
    """Random degree-``t`` polynomial plus ``t`` pooled points; room for ``n_max`` consumers."""
    if t < 1:
        raise ValueError("degree must be at least 1")
    if n_max + t >= group.q:
        raise ValueError("not enough distinct x coordinates for n_max consumers")
    rng = rng or secrets.SystemRandom()
    q = group.q
    coeffs = [rng.randrange(1, q) for _ in range(t + 1)]
    setup = RevocationSetup(group, coeffs, [], n_max)
    used: set[int] = set()
    for _ in range(t):
        x = _fresh_x(rng, q, used)
        used.add(x)
        setup.pool.append(Share(x, setup.u(x)))
    return setup


def issue_share(setup: RevocationSetup, consumer: Hashable, rng=None) -> Share:
    if consumer in setup.shares:
        raise DuplicateConsumer(f"{consumer!r} already holds a share")
    if len(setup.shares) >= setup.n_max:
        raise PoolExhausted(f"all {setup.n_max} shares issued")
    rng = rng or secrets.SystemRandom()
    x = _fresh_x(rng, setup.group.q, setup._used_x())
    share = Share(x, setup.u(x))
    setup.shares[consumer] = share
    return share


def random_rekey(group: SchnorrGroup = SCHNORR1024, rng=None) -> int:
    """A random subgroup element to use as the rekey secret k."""
    rng = rng or secrets.SystemRandom()
    return int(gmpy2.powmod(group.g, rng.randrange(1, group.q), group.p))


def rekey_bytes(k: int, group: SchnorrGroup = SCHNORR1024) -> bytes:
    return int(k).to_bytes(group.element_bytes, "big")


def make_header(setup: RevocationSetup, revoked: Iterable[Hashable], k: int, rng=None,
                r: Optional[int] = None) -> RevocationHeader:
    """Broadcast ``k`` to everyone except ``revoked``.

    E holds the revoked consumers' points, topped up to exactly t from the
    reserved pool.  ``r`` may be pinned for testing; otherwise it is fresh.
    """
    grp = setup.group
    p, q, g = grp.p, grp.q, grp.g
    revoked = list(dict.fromkeys(revoked))
    if len(revoked) > setup.degree:
        raise TooManyRevoked(f"{len(revoked)} revoked, header degree {setup.degree}")
    unknown = [c for c in revoked if c not in setup.shares]
    if unknown:
        raise KeyError(f"no share issued to {unknown[0]!r}")
    rng = rng or secrets.SystemRandom()
    if r is None:
        r = rng.randrange(1, q)
    points = [setup.shares[c] for c in revoked]
    points += setup.pool[:setup.degree - len(points)]
    V = int(gmpy2.powmod(g, r, p))
    U = int(k) * int(gmpy2.powmod(g, setup.coeffs[0] * r % q, p)) % p
    E = [(s.x, int(gmpy2.powmod(V, s.y, p))) for s in points]
    xs = [s.x for s in points]
    lambdas = [lagrange_at_zero(xs, i, q) for i in range(len(xs))]
    return RevocationHeader(grp, U, V, E, lambdas)


def recover_key(header: RevocationHeader, share: Share) -> int:
    """Interpolate ``g^(a_0 r)`` from E plus the consumer's own point and unwrap ``k``.

    Raises :class:`DegenerateShare` when the share is one of E's points.
    """
    grp = header.group
    p, q = grp.p, grp.q
    xu, yu = share.x % q, share.y % q
    if any((x - xu) % q == 0 for x, _ in header.E):
        raise DegenerateShare("share is burned into this header")
    delta1 = 1
    lam_u_num, lam_u_den = 1, 1
    for (xk, yk), lam_partial in zip(header.E, header.lambdas):
        lam_k = lam_partial * xu % q * pow(xu - xk, -1, q) % q
        delta1 = delta1 * gmpy2.powmod(yk, lam_k, p) % p
        lam_u_num = lam_u_num * xk % q
        lam_u_den = lam_u_den * (xk - xu) % q
    lam_u = lam_u_num * pow(lam_u_den, -1, q) % q
    delta2 = gmpy2.powmod(header.V, yu * lam_u % q, p)
    return int(header.U * gmpy2.invert(delta1 * delta2 % p, p) % p)
