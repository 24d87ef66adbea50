import random

import gmpy2
import pytest

from oracles import interpolate_at_zero, lagrange_basis_at_zero
from ndnsub import revocation as rv

G = rv.TOY_SCHNORR


def _populated(t=4, n=10, seed=0, group=G):
    rng = random.Random(seed)
    setup = rv.revocation_setup(t, n, rng, group)
    for i in range(n):
        rv.issue_share(setup, f"c{i}", rng)
    return setup, rng


@pytest.mark.parametrize("grp", [rv.SCHNORR1024, rv.TOY_SCHNORR])
def test_group_parameters(grp):
    assert gmpy2.is_prime(grp.p) and gmpy2.is_prime(grp.q)
    assert (grp.p - 1) % grp.q == 0
    assert grp.g != 1 and pow(grp.g, grp.q, grp.p) == 1


def test_setup_shape():
    setup, _ = _populated(t=5, n=8)
    assert setup.degree == 5 and setup.coeffs[-1] != 0
    xs = [s.x for s in setup.pool] + [s.x for s in setup.shares.values()]
    assert len(set(xs)) == len(xs) == 13
    for s in list(setup.pool) + list(setup.shares.values()):
        assert s.y == sum(c * pow(s.x, i, G.q) for i, c in enumerate(setup.coeffs)) % G.q


def test_pool_plus_share_interpolates_a0():
    setup, _ = _populated(t=4, n=6, seed=1, group=rv.SCHNORR1024)
    for share in setup.shares.values():
        pts = [tuple(s) for s in setup.pool] + [tuple(share)]
        assert interpolate_at_zero(pts, rv.SCHNORR1024.q) == setup.coeffs[0]


def test_issue_errors():
    setup, rng = _populated(t=2, n=3)
    with pytest.raises(rv.DuplicateConsumer):
        rv.issue_share(setup, "c0", rng)
    with pytest.raises(rv.PoolExhausted):
        rv.issue_share(setup, "new", rng)


def test_lambdas_match_clear_oracle():
    rng = random.Random(2)
    q = rv.SCHNORR1024.q
    for _ in range(10):
        xs = rng.sample(range(1, 10**9), 6)
        ref = lagrange_basis_at_zero(xs, q)
        assert [rv.lagrange_at_zero(xs, k, q) for k in range(len(xs))] == ref


def test_header_lambdas_are_partial_basis():
    setup, rng = _populated(t=3, n=5, seed=3)
    header = rv.make_header(setup, ["c1"], rv.random_rekey(G, rng), rng)
    xs = [x for x, _ in header.E]
    assert header.lambdas == [rv.lagrange_at_zero(xs, k, G.q) for k in range(3)]


def test_empty_revocation_everyone_recovers():
    setup, rng = _populated(t=4, n=10, seed=4)
    k = rv.random_rekey(G, rng)
    header = rv.make_header(setup, [], k, rng)
    assert [x for x, _ in header.E] == [s.x for s in setup.pool]
    assert all(rv.recover_key(header, s) == k for s in setup.shares.values())


def test_revoked_consumer_cannot_recover():
    setup, rng = _populated(t=4, n=10, seed=5, group=rv.SCHNORR1024)
    k = rv.random_rekey(rv.SCHNORR1024, rng)
    header = rv.make_header(setup, ["c3", "c7"], k, rng)
    assert setup.shares["c3"].x in {x for x, _ in header.E}
    for cid, share in setup.shares.items():
        if cid in ("c3", "c7"):
            with pytest.raises(rv.DegenerateShare):
                rv.recover_key(header, share)
        else:
            assert rv.recover_key(header, share) == k


def test_exponent_matches_clear_interpolation():
    """g^(r a_0) from the exponent equals g^r raised to the clear-text interpolation of a_0."""
    grp = rv.SCHNORR1024
    setup, rng = _populated(t=3, n=4, seed=6, group=grp)
    r = 12345
    header = rv.make_header(setup, ["c0"], 1, rng, r=r)
    # with k = 1, U is exactly g^(a_0 r)
    assert header.U == pow(grp.g, setup.coeffs[0] * r % grp.q, grp.p)
    share = setup.shares["c2"]
    pts = [(x, setup.u(x)) for x, _ in header.E] + [tuple(share)]
    assert interpolate_at_zero(pts, grp.q) == setup.coeffs[0]
    assert rv.recover_key(header, share) == 1


def test_fake_shares_miss():
    setup, rng = _populated(t=4, n=6, seed=7)
    k = rv.random_rekey(G, rng)
    header = rv.make_header(setup, [], k, rng)
    used = {x for x, _ in header.E}
    hits = 0
    for _ in range(100):
        x = rng.randrange(1, G.q)
        if x in used:
            continue
        y = (setup.u(x) + rng.randrange(1, G.q)) % G.q
        hits += rv.recover_key(header, rv.Share(x, y)) == k
    assert hits == 0


def test_too_many_revoked_and_unknown():
    setup, rng = _populated(t=2, n=5, seed=8)
    with pytest.raises(rv.TooManyRevoked):
        rv.make_header(setup, ["c0", "c1", "c2"], 1, rng)
    with pytest.raises(KeyError):
        rv.make_header(setup, ["nobody"], 1, rng)


def test_header_roundtrip_and_validation():
    setup, rng = _populated(t=3, n=4, seed=9, group=rv.SCHNORR1024)
    header = rv.make_header(setup, ["c1"], rv.random_rekey(rv.SCHNORR1024, rng), rng)
    data = header.to_bytes()
    assert rv.RevocationHeader.from_bytes(data) == header
    with pytest.raises(Exception):
        rv.RevocationHeader.from_bytes(data[:-1])


def test_rekey_is_subgroup_element():
    k = rv.random_rekey(G, random.Random(10))
    assert pow(k, G.q, G.p) == 1
    assert len(rv.rekey_bytes(k, G)) == G.element_bytes
