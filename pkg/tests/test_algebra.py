import random

import pytest

from ndnsub.algebra import (SS511, TOY, CurveParams, DecodeError, PairingGroup, ZeroInverse,
                            concat, hash_to_scalar, scalar_inverse)

# p = 43, #E = 44 = 4 * 11: small enough to enumerate every point.
TINY = CurveParams("TINY", p=43, q=11, h=4)


def test_parameter_sizes(ss511):
    assert (ss511.scalar_bytes, ss511.g1_bytes, ss511.gt_bytes) == (20, 64, 128)
    assert ss511.q == 2**159 + 2**107 + 1


@pytest.mark.parametrize("params", [SS511, TOY])
def test_parameters_are_consistent(params):
    import gmpy2
    assert gmpy2.is_prime(params.p) and gmpy2.is_prime(params.q)
    assert params.p % 4 == 3
    assert params.p + 1 == params.h * params.q
    # embedding degree 2: q divides p^2 - 1 but not p - 1
    assert (params.p - 1) % params.q != 0


def test_tiny_curve_order_by_enumeration():
    p = TINY.p
    count = 1 + sum(1 for x in range(p) for y in range(p) if (y * y - x**3 - x) % p == 0)
    assert count == p + 1 == TINY.h * TINY.q


def test_tiny_pairing_bilinear_exhaustively():
    grp = PairingGroup(TINY)
    rng = random.Random(1)
    g = grp.random_g1(rng)
    assert not g.is_identity() and (g ** TINY.q).is_identity()
    base = grp.pair(g, g)
    assert base != grp.identity_gt
    assert base ** TINY.q == grp.identity_gt
    for a in range(1, TINY.q):
        for b in range(1, TINY.q):
            assert grp.pair(g ** a, g ** b) == base ** (a * b % TINY.q)


def test_pairing_small_exponents(toy):
    g = toy.random_g1(random.Random(2))
    assert toy.pair(g ** 2, g ** 3) == toy.pair(g, g) ** 6


def test_pairing_bilinear_random(toy):
    rng = random.Random(3)
    g = toy.random_g1(rng)
    e = toy.pair(g, g)
    for _ in range(5):
        a, b = toy.random_scalar(rng), toy.random_scalar(rng)
        assert toy.pair(g ** a, g ** b) == e ** (a * b % toy.q)


def test_pairing_bilinear_full_size(ss511):
    rng = random.Random(4)
    g = ss511.random_g1(rng)
    a, b = ss511.random_scalar(rng), ss511.random_scalar(rng)
    assert ss511.pair(g ** a, g ** b) == ss511.pair(g, g) ** (a * b % ss511.q)
    assert ss511.pair(g, g) != ss511.identity_gt


def test_pairing_symmetric_and_identity(toy):
    rng = random.Random(5)
    a, b = toy.random_g1(rng), toy.random_g1(rng)
    assert toy.pair(a, b) == toy.pair(b, a)
    assert toy.pair(toy.identity_g1, a) == toy.identity_gt


def test_group_laws(toy):
    rng = random.Random(6)
    g = toy.random_g1(rng)
    a, b = toy.random_scalar(rng), toy.random_scalar(rng)
    assert g ** a * g ** b == g ** ((a + b) % toy.q)
    assert (g ** a) ** b == g ** (a * b % toy.q)
    assert g / g == toy.identity_g1
    assert g * ~g == toy.identity_g1
    x = toy.pair(g, g)
    assert x ** a * x ** b == x ** ((a + b) % toy.q)
    assert x / x == toy.identity_gt
    assert x ** -1 == ~x


@pytest.mark.parametrize("name", ["toy", "ss511"])
def test_encodings_roundtrip(name, request):
    grp = request.getfixturevalue(name)
    rng = random.Random(7)
    for _ in range(5):
        g = grp.random_g1(rng)
        enc = g.to_bytes()
        assert len(enc) == grp.g1_bytes
        assert grp.decode_g1(enc) == g
        x = grp.pair(g, g)
        assert len(x.to_bytes()) == grp.gt_bytes
        assert grp.decode_gt(x.to_bytes()) == x
        s = grp.random_scalar(rng)
        assert grp.decode_scalar(grp.encode_scalar(s)) == s
    assert grp.decode_g1(grp.identity_g1.to_bytes()).is_identity()


def test_decode_rejects_garbage(toy):
    with pytest.raises(DecodeError):
        toy.decode_g1(b"\x00" * (toy.g1_bytes - 1))
    with pytest.raises(DecodeError):
        toy.decode_gt(b"\x00" * toy.gt_bytes)
    with pytest.raises(DecodeError):
        toy.decode_scalar(b"\x00" * toy.scalar_bytes)
    with pytest.raises(DecodeError):
        toy.decode_scalar(toy.q.to_bytes(toy.scalar_bytes, "big"))
    # an x whose point lies off G1 (or off the curve) must not decode
    bad = 0
    for x in range(2, 200):
        try:
            toy.decode_g1(x.to_bytes(toy.g1_bytes, "big"))
        except DecodeError:
            bad += 1
    assert bad > 0


def test_scalar_inverse():
    assert scalar_inverse(1, TOY.q) == 1
    assert scalar_inverse(3, 7) == 5
    rng = random.Random(8)
    for _ in range(100):
        a = rng.randrange(1, SS511.q)
        assert a * scalar_inverse(a, SS511.q) % SS511.q == 1
    with pytest.raises(ZeroInverse):
        scalar_inverse(0, 7)


def test_hash_to_scalar_deterministic_and_injective_on_corpus():
    assert hash_to_scalar(b"abc", SS511.q) == hash_to_scalar(b"abc", SS511.q)
    corpus = {hash_to_scalar(f"item-{i}".encode(), SS511.q) for i in range(10_000)}
    assert len(corpus) == 10_000


def test_hash_to_scalar_definition():
    import hashlib
    d = hashlib.sha256(concat(b"alice", b"m1")).digest()
    assert hash_to_scalar(concat(b"alice", b"m1"), SS511.q) == int.from_bytes(d, "big") % SS511.q


def test_concat_is_unambiguous():
    assert concat(b"ab", b"c") != concat(b"a", b"bc")
    assert concat(b"ab") == b"\x00\x00\x00\x02ab"


def test_hash_gt(toy, ss511):
    rng = random.Random(9)
    g = toy.random_g1(rng)
    x, y = toy.pair(g, g), toy.pair(g, g) ** 2
    assert toy.hash_gt_to_scalar(x) == toy.hash_gt_to_scalar(toy.decode_gt(x.to_bytes()))
    assert toy.hash_gt_to_scalar(x) != toy.hash_gt_to_scalar(y)
    # regression vector: the GT identity encodes as (1, 0)
    ident = ss511.identity_gt.to_bytes()
    assert ident == (1).to_bytes(64, "big") + bytes(64)
    assert ss511.hash_gt_to_scalar(ss511.identity_gt) == hash_to_scalar(ident, SS511.q)
    assert ss511.hash_gt_to_scalar(ss511.identity_gt) == \
        640717661386223928451532664393099103249678239024
