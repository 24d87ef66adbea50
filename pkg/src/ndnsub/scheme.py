"""Time-subscription access control: setup, registration, publication,
anonymous interest signing, edge verification and decryption.

Roles and what they hold:

* producer: :class:`PublicParams` and :class:`MasterSecret`
* consumer: a :class:`ConsumerKey` covering its subscribed days
* edge router: :class:`PublicParams` only

A ciphertext is bound to the policy path of its publication date (leaf day,
week, month, year).  Each node ``i`` on the path contributes a root
``x_i = e(g,g)^(delta*r/eta_i)`` to a SIFF polynomial sharing the content key;
a consumer whose cover set meets the path recomputes one root with its
token and evaluates the polynomial.
"""
from __future__ import annotations

import datetime as dt
import enum
import functools
import secrets
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from . import dem, siff
from .algebra import G1, GT, DecodeError, PairingGroup, concat, default_group
from .dem import AeadFailure
from .subtree import (CALENDAR_FANOUT, CALENDAR_PREFIXES, InvalidRange, NodeId,
                      PolicyTree, YearMismatch, covers, date_to_leaf, min_cover,
                      path_to_root, policy_path)
from .wire import Reader, Writer

__all__ = [
    "PublicParams", "MasterSecret", "ConsumerKey", "Ciphertext", "InterestSignature",
    "Verdict", "NoCoverNode", "MissingRekey", "AeadFailure", "InvalidRange", "YearMismatch",
    "producer_setup", "register_consumer", "register_leaves", "publish", "publish_path",
    "sign_interest", "verify_interest", "decrypt", "content_name", "parse_policy",
    "recover_root", "DEFAULT_DELTA_T",
]

DEFAULT_DELTA_T = 10


class NoCoverNode(LookupError):
    """The consumer's cover set does not meet the policy path."""


class MissingRekey(ValueError):
    """The ciphertext is bound to a revocation header but no rekey secret was supplied."""


def _ts_bytes(ts: int) -> bytes:
    return int(ts).to_bytes(8, "big")


def _label(n: Union[NodeId, str]) -> bytes:
    return str(n).encode("utf-8")


@dataclass(frozen=True)
class PublicParams:
    """Published by the producer; everything an edge router needs.

    H1 is SHA-256 reduced mod q (see :func:`ndnsub.algebra.hash_to_scalar`).
    The second hash of the published parameter tuple has no use in any
    phase and is not instantiated.
    """

    group: PairingGroup
    g: G1
    Y1: GT
    Y2: GT
    year: int
    delta_t: int = DEFAULT_DELTA_T
    fanout: tuple[int, ...] = CALENDAR_FANOUT
    prefixes: tuple[str, ...] = CALENDAR_PREFIXES

    @functools.cached_property
    def tree(self) -> PolicyTree:
        return PolicyTree(self.year, self.fanout, self.prefixes)

    @functools.cached_property
    def egg(self) -> GT:
        return self.group.pair(self.g, self.g)

    def h1(self, *parts: bytes) -> int:
        """H1 of one part, or of the length-prefixed concatenation of several."""
        data = parts[0] if len(parts) == 1 else concat(*parts)
        return self.group.hash_to_scalar(data)

    def g_inv_node(self, label: str) -> G1:
        """``g^(1/H1(t_i))``, computable by anyone from public data."""
        return _g_inv_node(self, label)

    def to_bytes(self) -> bytes:
        w = Writer().text(self.group.params.name)
        w.raw(self.g.to_bytes()).raw(self.Y1.to_bytes()).raw(self.Y2.to_bytes())
        w.u64(self.year).u64(self.delta_t).count(len(self.fanout))
        for f, p in zip(self.fanout, self.prefixes):
            w.count(f).text(p)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "PublicParams":
        r = Reader(data)
        grp = default_group(r.text())
        g = grp.decode_g1(r.raw(grp.g1_bytes))
        y1 = grp.decode_gt(r.raw(grp.gt_bytes))
        y2 = grp.decode_gt(r.raw(grp.gt_bytes))
        year, delta_t = r.u64(), r.u64()
        fanout, prefixes = [], []
        for _ in range(r.count()):
            fanout.append(r.count())
            prefixes.append(r.text())
        r.done()
        return cls(grp, g, y1, y2, year, delta_t, tuple(fanout), tuple(prefixes))


@functools.lru_cache(maxsize=4096)
def _g_inv_node(pp: PublicParams, label: str) -> G1:
    h = pp.h1(label.encode("utf-8"))
    return pp.g ** pp.group.scalar_inverse(h)


@dataclass
class MasterSecret:
    sigma: int
    delta: int
    kappa: int
    varkappa: int
    node_secrets: dict[str, int]   # label -> eta_i

    def eta(self, n: Union[NodeId, str]) -> int:
        return self.node_secrets[str(n)]

    def to_bytes(self, group: PairingGroup) -> bytes:
        enc = group.encode_scalar
        w = Writer()
        for s in (self.sigma, self.delta, self.kappa, self.varkappa):
            w.raw(enc(s))
        w.u64(len(self.node_secrets))
        for label, eta in self.node_secrets.items():
            w.text(label).raw(enc(eta))
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes, group: PairingGroup) -> "MasterSecret":
        r = Reader(data)
        dec = group.decode_scalar
        n = group.scalar_bytes
        sigma, delta, kappa, varkappa = (dec(r.raw(n)) for _ in range(4))
        secrets_ = {}
        for _ in range(r.u64()):
            label = r.text()
            secrets_[label] = dec(r.raw(n))
        r.done()
        return cls(sigma, delta, kappa, varkappa, secrets_)


@dataclass
class ConsumerKey:
    consumer_id: bytes
    uk: int
    tokens: dict[str, tuple[G1, G1]]   # cover-node label -> (TK1, TK2)
    cover: list[NodeId]

    def core_bytes(self) -> bytes:
        """``UK`` followed by every ``(TK1, TK2)``: the counted key material."""
        grp = next(iter(self.tokens.values()))[0].group
        out = [grp.encode_scalar(self.uk)]
        for n in self.cover:
            tk1, tk2 = self.tokens[n.label]
            out += [tk1.to_bytes(), tk2.to_bytes()]
        return b"".join(out)

    def to_bytes(self) -> bytes:
        grp = next(iter(self.tokens.values()))[0].group
        w = Writer().blob(self.consumer_id).raw(grp.encode_scalar(self.uk))
        w.count(len(self.cover))
        for n in self.cover:
            tk1, tk2 = self.tokens[n.label]
            w.text(n.label).raw(tk1.to_bytes()).raw(tk2.to_bytes())
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes, pp: PublicParams,
                   tree: Optional[PolicyTree] = None) -> "ConsumerKey":
        tree = tree or pp.tree
        grp = pp.group
        r = Reader(data)
        cid = r.blob()
        uk = grp.decode_scalar(r.raw(grp.scalar_bytes))
        tokens, cover = {}, []
        for _ in range(r.count()):
            node = tree.by_label(r.text())
            tk1 = grp.decode_g1(r.raw(grp.g1_bytes))
            tk2 = grp.decode_g1(r.raw(grp.g1_bytes))
            tokens[node.label] = (tk1, tk2)
            cover.append(node)
        r.done()
        return cls(cid, uk, tokens, cover)


@dataclass
class Ciphertext:
    content_name: str
    payload: bytes                   # AEAD output: nonce || ciphertext || tag
    c1: GT
    c_nodes: dict[str, G1]           # policy-path label (leaf first) -> C_i
    poly: siff.SiffPolynomial
    revocation_ref: str = ""         # name of the bound revocation header, if any

    @property
    def path_labels(self) -> list[str]:
        return list(self.c_nodes)

    def core_bytes(self) -> bytes:
        """``C1``, every ``C_i`` and the polynomial's coefficients, without framing or payload."""
        grp = self.c1.group
        out = [self.c1.to_bytes()] + [c.to_bytes() for c in self.c_nodes.values()]
        out += [(1).to_bytes(grp.scalar_bytes, "big")]
        out += [a.to_bytes(grp.scalar_bytes, "big") for a in self.poly.coeffs]
        return b"".join(out)

    def to_bytes(self) -> bytes:
        grp = self.c1.group
        w = Writer().text(self.content_name).raw(self.c1.to_bytes())
        w.count(len(self.c_nodes))
        for label, c in self.c_nodes.items():
            w.text(label).raw(c.to_bytes())
        w.raw(self.poly.to_bytes(grp.scalar_bytes))
        w.blob(self.payload).text(self.revocation_ref)
        return w.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes, group: PairingGroup) -> "Ciphertext":
        r = Reader(data)
        name = r.text()
        c1 = group.decode_gt(r.raw(group.gt_bytes))
        nodes = {}
        for _ in range(r.count()):
            label = r.text()
            nodes[label] = group.decode_g1(r.raw(group.g1_bytes))
        try:
            poly, used = siff.SiffPolynomial.from_bytes(r.data[r.pos:], group.scalar_bytes, group.q)
        except ValueError as exc:
            raise DecodeError(str(exc)) from exc
        r.pos += used
        payload = r.blob()
        ref = r.text()
        r.done()
        return cls(name, payload, c1, nodes, poly, ref)


@dataclass
class InterestSignature:
    s1: int
    s2: G1
    s3: GT
    s4: GT
    node: str        # label of the chosen cover/path node t_i
    ts: int          # integer seconds
    cn: str          # signed content name

    def core_bytes(self) -> bytes:
        grp = self.s2.group
        return (grp.encode_scalar(self.s1) + self.s2.to_bytes()
                + self.s3.to_bytes() + self.s4.to_bytes())

    def to_bytes(self) -> bytes:
        return (Writer().raw(self.core_bytes()).text(self.node)
                .u64(self.ts).text(self.cn).getvalue())

    @classmethod
    def from_bytes(cls, data: bytes, group: PairingGroup) -> "InterestSignature":
        r = Reader(data)
        s1 = group.decode_scalar(r.raw(group.scalar_bytes))
        s2 = group.decode_g1(r.raw(group.g1_bytes))
        s3 = group.decode_gt(r.raw(group.gt_bytes))
        s4 = group.decode_gt(r.raw(group.gt_bytes))
        node = r.text()
        ts = r.u64()
        cn = r.text()
        r.done()
        return cls(s1, s2, s3, s4, node, ts, cn)


class Verdict(enum.Enum):
    ACCEPT = "accept"
    STALE = "stale"
    WRONG_NODE = "wrong-node"
    MALFORMED = "malformed"
    BAD_SIGNATURE = "bad-signature"

    def __bool__(self):
        return self is Verdict.ACCEPT


# ---------------------------------------------------------------- producer

def producer_setup(year: int, delta_t: int = DEFAULT_DELTA_T, rng=None,
                   group: Optional[PairingGroup] = None,
                   tree: Optional[PolicyTree] = None):
    """Generate ``(PublicParams, MasterSecret, PolicyTree)`` for one year.

    Draw order from ``rng``: g, sigma, delta, kappa, varkappa, then one eta
    per tree node in pre-order.  A seeded ``random.Random`` therefore makes
    the whole setup reproducible.
    """
    if delta_t <= 0:
        raise ValueError("delta_t must be positive")
    rng = rng or secrets.SystemRandom()
    group = group or default_group()
    tree = tree or PolicyTree(year)
    if tree.year != year:
        raise YearMismatch("tree year differs from setup year")
    g = group.random_g1(rng)
    sigma, delta, kappa, varkappa = (group.random_scalar(rng) for _ in range(4))
    etas = {n.label: group.random_scalar(rng) for n in tree.nodes()}
    egg = group.pair(g, g)
    pp = PublicParams(group, g, egg ** kappa, egg ** varkappa, year, delta_t,
                      tree.fanout, tree.prefixes)
    ms = MasterSecret(sigma, delta, kappa, varkappa, etas)
    return pp, ms, tree


def register_leaves(ms: MasterSecret, pp: PublicParams, consumer_id: bytes,
                    start: NodeId, end: NodeId, tree: Optional[PolicyTree] = None,
                    rng=None) -> ConsumerKey:
    tree = tree or pp.tree
    rng = rng or secrets.SystemRandom()
    grp, q = pp.group, pp.group.q
    cover = min_cover(start, end, tree)
    uk = grp.random_scalar(rng)
    h_id = pp.h1(consumer_id)
    tokens = {}
    for n in cover:
        eta = ms.eta(n)
        eta_inv = grp.scalar_inverse(eta)
        e1 = (ms.delta * uk * eta_inv * eta_inv + ms.sigma * h_id * eta_inv) % q
        e2 = (ms.kappa * uk * pp.h1(_label(n))
              + ms.varkappa * pp.h1(consumer_id, _label(n))) % q
        tokens[n.label] = (pp.g ** e1, pp.g ** e2)
    return ConsumerKey(consumer_id, uk, tokens, cover)


def register_consumer(ms: MasterSecret, pp: PublicParams, consumer_id: bytes,
                      start: dt.date, end: dt.date, tree: Optional[PolicyTree] = None,
                      rng=None) -> ConsumerKey:
    """Issue the key for a subscription covering ``start..end`` inclusive."""
    tree = tree or pp.tree
    if start > end:
        raise InvalidRange(f"{start} is after {end}")
    return register_leaves(ms, pp, consumer_id, date_to_leaf(start, tree),
                           date_to_leaf(end, tree), tree, rng)


def content_name(prefix: str, date: dt.date, filename: str,
                 tree: PolicyTree) -> str:
    """``<prefix>/<tau>/<filename>``, where tau names the root and leaf of the date's path."""
    leaf = date_to_leaf(date, tree)
    return f"{prefix.rstrip('/')}/{tree.root.label}{leaf.label}/{filename.lstrip('/')}"


def parse_policy(name: str, tree: PolicyTree) -> Optional[list[NodeId]]:
    """Recover the policy path embedded in a content name, if any component names one."""
    root = tree.root.label
    for comp in name.split("/"):
        if comp.startswith(root) and len(comp) > len(root):
            try:
                leaf = tree.by_label(comp[len(root):])
            except KeyError:
                continue
            if tree.is_leaf(leaf):
                return path_to_root(leaf, tree)
    return None


def publish_path(ms: MasterSecret, pp: PublicParams, path: Sequence[NodeId], name: str,
                 plaintext: bytes, rng=None, rekey: Optional[bytes] = None,
                 revocation_ref: str = "") -> Ciphertext:
    """Encrypt ``plaintext`` for every consumer holding a node of ``path``."""
    if not name:
        raise ValueError("content name must be non-empty")
    if rekey is not None and not revocation_ref:
        raise ValueError("rekeyed content must name its revocation header")
    rng = rng or secrets.SystemRandom()
    grp = pp.group
    r = grp.random_scalar(rng)
    key = grp.random_scalar(rng)
    egg = pp.egg
    c1 = egg ** (ms.sigma * r % grp.q)
    c_nodes, roots = {}, []
    for n in path:
        eta = ms.eta(n)
        c_nodes[str(n)] = pp.g ** (eta * r % grp.q)
        x_i = egg ** (ms.delta * r * grp.scalar_inverse(eta) % grp.q)
        roots.append(grp.hash_gt_to_scalar(x_i))
    poly = siff.build(roots, key, grp.q)
    sym = _content_key(grp, key, rekey, name)
    payload = dem.seal(sym, plaintext, name.encode("utf-8"), rng)
    return Ciphertext(name, payload, c1, c_nodes, poly, revocation_ref)


def publish(ms: MasterSecret, pp: PublicParams, date: dt.date, name: str,
            plaintext: bytes, tree: Optional[PolicyTree] = None, rng=None,
            rekey: Optional[bytes] = None, revocation_ref: str = "") -> Ciphertext:
    """Encrypt under the policy path of ``date``; fresh ``r`` and content key per call."""
    tree = tree or pp.tree
    return publish_path(ms, pp, policy_path(date, tree), name, plaintext, rng,
                        rekey, revocation_ref)


def _content_key(grp: PairingGroup, key: int, rekey: Optional[bytes], name: str) -> bytes:
    material = int(key).to_bytes(grp.scalar_bytes, "big")
    if rekey is not None:
        material = concat(material, rekey)
    return dem.derive_key(material, name.encode("utf-8"))


# ---------------------------------------------------------------- consumer

def sign_interest(key: ConsumerKey, pp: PublicParams, cn: str, ts: int, date: dt.date,
                  tree: Optional[PolicyTree] = None, rng=None) -> InterestSignature:
    """Randomised signature over ``(ts, cn)`` bound to the cover node on the date's path."""
    tree = tree or pp.tree
    node = covers(key.cover, policy_path(date, tree))
    if node is None:
        raise NoCoverNode(f"subscription does not include {date}")
    return sign_with_node(key, pp, cn, ts, node.label, rng)


def sign_with_node(key: ConsumerKey, pp: PublicParams, cn: str, ts: int, label: str,
                   rng=None) -> InterestSignature:
    rng = rng or secrets.SystemRandom()
    grp, q = pp.group, pp.group.q
    if label not in key.tokens:
        raise NoCoverNode(f"no token for node {label}")
    v = grp.random_scalar(rng)
    h_t = pp.h1(label.encode("utf-8"))
    h_msg = pp.h1(_ts_bytes(ts), cn.encode("utf-8"))
    h_idt = pp.h1(key.consumer_id, label.encode("utf-8"))
    s1 = (key.uk + h_msg * grp.scalar_inverse(h_t)) * v % q
    if s1 == 0:
        # probability ~1/q; a fresh v fixes it
        return sign_with_node(key, pp, cn, ts, label, rng)
    s2 = key.tokens[label][1] ** v
    s3 = pp.Y1 ** (q - v)
    s4 = pp.Y2 ** (v * h_idt % q)
    return InterestSignature(s1, s2, s3, s4, label, int(ts), cn)


def decrypt(key: ConsumerKey, pp: PublicParams, ct: Ciphertext,
            tree: Optional[PolicyTree] = None, rekey: Optional[bytes] = None) -> bytes:
    """Recover the plaintext, or raise :class:`NoCoverNode` / :class:`AeadFailure`."""
    tree = tree or pp.tree
    if ct.revocation_ref and rekey is None:
        raise MissingRekey(f"content is bound to header {ct.revocation_ref}")
    path = [tree.by_label(lbl) for lbl in ct.path_labels]
    node = covers(key.cover, path)
    if node is None:
        raise NoCoverNode("subscription does not cover this content's policy path")
    x_i = recover_root(key, pp, ct, node.label)
    k = siff.evaluate(ct.poly, pp.group.hash_gt_to_scalar(x_i))
    sym = _content_key(pp.group, k, rekey, ct.content_name)
    return dem.open_(sym, ct.payload, ct.content_name.encode("utf-8"))


def recover_root(key: ConsumerKey, pp: PublicParams, ct: Ciphertext, label: str) -> GT:
    """``x_i`` for node ``label``: pair the token with ``C_i`` and strip the identity blinding."""
    grp = pp.group
    tk1 = key.tokens[label][0]
    d1 = grp.pair(tk1, ct.c_nodes[label])
    d2 = d1 / (ct.c1 ** pp.h1(key.consumer_id))
    return d2 ** grp.scalar_inverse(key.uk)


# ---------------------------------------------------------------- edge router

def verify_interest(pp: PublicParams, sig: Union[InterestSignature, bytes], now: int,
                    date: dt.date, tree: Optional[PolicyTree] = None) -> Verdict:
    """Freshness, policy-node and pairing checks, in that order.

    ``|now - ts| <= delta_t`` is fresh.  ``sig.node`` must lie on the policy
    path of ``date``, otherwise an old token would keep verifying.
    """
    tree = tree or pp.tree
    grp, q = pp.group, pp.group.q
    if isinstance(sig, (bytes, bytearray)):
        try:
            sig = InterestSignature.from_bytes(sig, grp)
        except DecodeError:
            return Verdict.MALFORMED
    if abs(int(now) - sig.ts) > pp.delta_t:
        return Verdict.STALE
    if sig.node not in {n.label for n in policy_path(date, tree)}:
        return Verdict.WRONG_NODE
    h_t = pp.h1(sig.node.encode("utf-8"))
    h_t_inv = grp.scalar_inverse(h_t)
    h_msg = pp.h1(_ts_bytes(sig.ts), sig.cn.encode("utf-8"))
    v1 = grp.pair(sig.s2, pp.g_inv_node(sig.node))
    v2 = pp.Y1 ** sig.s1
    v3 = v1 / v2
    v4 = (sig.s4 ** h_t_inv) * (sig.s3 ** (h_msg * h_t_inv % q))
    return Verdict.ACCEPT if v3 == v4 else Verdict.BAD_SIGNATURE
