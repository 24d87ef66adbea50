import copy
import datetime as dt
import random

import pytest

from ndnsub import scheme
from ndnsub.algebra import concat
from ndnsub.dem import AeadFailure
from ndnsub.subtree import policy_path

D = dt.date


def test_setup_public_values(toy_setup):
    pp, ms, tree = toy_setup
    egg = pp.group.pair(pp.g, pp.g)
    assert pp.Y1 == egg ** ms.kappa
    assert pp.Y2 == egg ** ms.varkappa
    assert set(ms.node_secrets) == {n.label for n in tree.nodes()}


def test_setup_reproducible_and_seed_sensitive(toy):
    a = scheme.producer_setup(2023, rng=random.Random(1), group=toy)
    b = scheme.producer_setup(2023, rng=random.Random(1), group=toy)
    c = scheme.producer_setup(2023, rng=random.Random(2), group=toy)
    assert a[0].to_bytes() == b[0].to_bytes()
    assert a[1].to_bytes(toy) == b[1].to_bytes(toy)
    assert a[0].g != c[0].g and a[0].Y1 != c[0].Y1 and a[0].Y2 != c[0].Y2


def test_params_and_master_roundtrip(toy_setup):
    pp, ms, _ = toy_setup
    assert scheme.PublicParams.from_bytes(pp.to_bytes()) == pp
    assert scheme.MasterSecret.from_bytes(ms.to_bytes(pp.group), pp.group) == ms


def test_setup_rejects_bad_inputs(toy):
    with pytest.raises(ValueError):
        scheme.producer_setup(2023, delta_t=0, group=toy)


def test_register_cover_examples(toy_setup):
    pp, ms, tree = toy_setup
    rng = random.Random(3)
    jan = scheme.register_consumer(ms, pp, b"u1", D(2023, 1, 1), D(2023, 1, 28), tree, rng)
    assert list(jan.tokens) == ["m1"]
    one = scheme.register_consumer(ms, pp, b"u2", D(2023, 5, 9), D(2023, 5, 9), tree, rng)
    assert list(one.tokens) == ["m5w2d2"]


def test_tokens_recomputed_from_master(toy_setup, toy_alice):
    pp, ms, _ = toy_setup
    q, g = pp.group.q, pp.g
    h = pp.h1
    uk, cid = toy_alice.uk, toy_alice.consumer_id
    for label, (tk1, tk2) in toy_alice.tokens.items():
        eta = ms.node_secrets[label]
        inv = pow(eta, -1, q)
        assert tk1 == (g ** (ms.delta * uk * inv * inv % q)) * (g ** (ms.sigma * h(cid) * inv % q))
        lb = label.encode()
        assert tk2 == (g ** (ms.kappa * uk * h(lb) % q)) * (g ** (ms.varkappa * h(cid, lb) % q))


def test_h1_of_id_and_label_uses_concat(toy_setup):
    pp, _, _ = toy_setup
    assert pp.h1(b"alice", b"m1") == pp.group.hash_to_scalar(concat(b"alice", b"m1"))


def test_key_roundtrip(toy_setup, toy_alice):
    pp, _, tree = toy_setup
    back = scheme.ConsumerKey.from_bytes(toy_alice.to_bytes(), pp, tree)
    assert back.to_bytes() == toy_alice.to_bytes()
    assert back.uk == toy_alice.uk and back.cover == toy_alice.cover


def test_publish_decrypt_roundtrip(toy_setup, toy_alice):
    pp, ms, tree = toy_setup
    rng = random.Random(4)
    name = scheme.content_name("/com/test", D(2023, 3, 15), "a.mp4", tree)
    assert name == "/com/test/y2023m3w3d1/a.mp4"
    ct = scheme.publish(ms, pp, D(2023, 3, 15), name, b"secret bytes", tree, rng)
    assert len(ct.c_nodes) == 4 and ct.poly.degree == 4
    assert ct.path_labels == ["m3w3d1", "m3w3", "m3", "y2023"]
    assert scheme.decrypt(toy_alice, pp, ct, tree) == b"secret bytes"
    back = scheme.Ciphertext.from_bytes(ct.to_bytes(), pp.group)
    assert scheme.decrypt(toy_alice, pp, back, tree) == b"secret bytes"


def test_recovered_root_equals_producer_value(toy_setup, toy_alice):
    pp, ms, tree = toy_setup
    rng = random.Random(5)
    replay = copy.deepcopy(rng)
    ct = scheme.publish(ms, pp, D(2023, 2, 10), "/x", b"m", tree, rng)
    r = pp.group.random_scalar(replay)          # first draw inside publish
    q = pp.group.q
    expect = pp.group.pair(pp.g, pp.g) ** (ms.delta * r * pow(ms.node_secrets["m2"], -1, q) % q)
    assert scheme.recover_root(toy_alice, pp, ct, "m2") == expect


def test_decrypt_outside_subscription(toy_setup, toy_alice):
    pp, ms, tree = toy_setup
    ct = scheme.publish(ms, pp, D(2023, 9, 1), "/x", b"m", tree, random.Random(6))
    with pytest.raises(scheme.NoCoverNode):
        scheme.decrypt(toy_alice, pp, ct, tree)


def test_decrypt_with_foreign_token_fails_aead(toy_setup, toy_alice):
    """Relabelling the path so covers() matches still cannot produce the right x_i."""
    pp, ms, tree = toy_setup
    ct = scheme.publish(ms, pp, D(2023, 9, 1), "/x", b"m", tree, random.Random(7))
    forged = scheme.Ciphertext(ct.content_name, ct.payload, ct.c1,
                               {"m1" if k == "m9" else k: v for k, v in ct.c_nodes.items()},
                               ct.poly)
    with pytest.raises(AeadFailure):
        scheme.decrypt(toy_alice, pp, forged, tree)


def test_tampered_payload_or_name_fails(toy_setup, toy_alice):
    pp, ms, tree = toy_setup
    ct = scheme.publish(ms, pp, D(2023, 3, 1), "/a", b"payload", tree, random.Random(8))
    bad = bytearray(ct.payload)
    bad[-1] ^= 1
    with pytest.raises(AeadFailure):
        scheme.decrypt(toy_alice, pp, scheme.Ciphertext(ct.content_name, bytes(bad), ct.c1,
                                                        ct.c_nodes, ct.poly), tree)
    with pytest.raises(AeadFailure):
        scheme.decrypt(toy_alice, pp, scheme.Ciphertext("/b", ct.payload, ct.c1,
                                                        ct.c_nodes, ct.poly), tree)


def test_rekeyed_content_needs_rekey(toy_setup, toy_alice):
    pp, ms, tree = toy_setup
    ct = scheme.publish(ms, pp, D(2023, 3, 1), "/a", b"p", tree, random.Random(9),
                        rekey=b"k1", revocation_ref="/rev/seq=1")
    with pytest.raises(scheme.MissingRekey):
        scheme.decrypt(toy_alice, pp, ct, tree)
    with pytest.raises(AeadFailure):
        scheme.decrypt(toy_alice, pp, ct, tree, rekey=b"k2")
    assert scheme.decrypt(toy_alice, pp, ct, tree, rekey=b"k1") == b"p"


def test_sign_verify_roundtrip(toy_setup, toy_alice):
    pp, _, tree = toy_setup
    date = D(2023, 3, 15)
    sig = scheme.sign_interest(toy_alice, pp, "/com/test/a", 1000, date, tree, random.Random(10))
    assert sig.node == "m3"
    assert scheme.verify_interest(pp, sig, 1000, date, tree) is scheme.Verdict.ACCEPT
    assert scheme.verify_interest(pp, sig.to_bytes(), 1000, date, tree) is scheme.Verdict.ACCEPT


def test_freshness_boundary(toy_setup, toy_alice):
    pp, _, tree = toy_setup
    date = D(2023, 3, 15)
    sig = scheme.sign_interest(toy_alice, pp, "/a", 1000, date, tree, random.Random(11))
    dt_ = pp.delta_t
    assert scheme.verify_interest(pp, sig, 1000 + dt_, date, tree) is scheme.Verdict.ACCEPT
    assert scheme.verify_interest(pp, sig, 1000 - dt_, date, tree) is scheme.Verdict.ACCEPT
    assert scheme.verify_interest(pp, sig, 1000 + dt_ + 1, date, tree) is scheme.Verdict.STALE
    assert scheme.verify_interest(pp, sig, 1000 - dt_ - 1, date, tree) is scheme.Verdict.STALE


def test_wrong_node_rejected(toy_setup, toy_alice):
    pp, _, tree = toy_setup
    sig = scheme.sign_interest(toy_alice, pp, "/a", 5, D(2023, 3, 15), tree, random.Random(12))
    # a March token presented for an April request
    assert scheme.verify_interest(pp, sig, 5, D(2023, 4, 2), tree) is scheme.Verdict.WRONG_NODE


def test_tampered_fields_rejected(toy_setup, toy_alice):
    pp, _, tree = toy_setup
    date = D(2023, 3, 15)
    sig = scheme.sign_interest(toy_alice, pp, "/a", 50, date, tree, random.Random(13))
    variants = [
        scheme.InterestSignature(sig.s1, sig.s2, sig.s3, sig.s4, sig.node, sig.ts, "/b"),
        scheme.InterestSignature(sig.s1, sig.s2, sig.s3, sig.s4, sig.node, sig.ts + 1, sig.cn),
        scheme.InterestSignature(sig.s1 % (pp.group.q - 1) + 1, sig.s2, sig.s3, sig.s4,
                                 sig.node, sig.ts, sig.cn),
        scheme.InterestSignature(sig.s1, sig.s2 ** 2, sig.s3, sig.s4, sig.node, sig.ts, sig.cn),
        scheme.InterestSignature(sig.s1, sig.s2, sig.s3 ** 2, sig.s4, sig.node, sig.ts, sig.cn),
        scheme.InterestSignature(sig.s1, sig.s2, sig.s3, sig.s4 ** 2, sig.node, sig.ts, sig.cn),
        scheme.InterestSignature(sig.s1, sig.s2, sig.s3, sig.s4, "m3w3", sig.ts, sig.cn),
    ]
    for v in variants:
        assert scheme.verify_interest(pp, v, 50, date, tree) is not scheme.Verdict.ACCEPT


def test_byte_flips_rejected(toy_setup, toy_alice):
    pp, _, tree = toy_setup
    date = D(2023, 3, 15)
    raw = scheme.sign_interest(toy_alice, pp, "/a", 50, date, tree, random.Random(14)).to_bytes()
    rng = random.Random(15)
    for _ in range(100):
        b = bytearray(raw)
        i = rng.randrange(len(b))
        b[i] ^= rng.randrange(1, 256)
        assert not scheme.verify_interest(pp, bytes(b), 50, date, tree)
    assert scheme.verify_interest(pp, b"\x00" * 10, 50, date, tree) is scheme.Verdict.MALFORMED


def test_signatures_unlinkable_components(toy_setup, toy_alice):
    pp, _, tree = toy_setup
    date = D(2023, 3, 15)
    rng = random.Random(16)
    a = scheme.sign_interest(toy_alice, pp, "/a", 7, date, tree, rng)
    b = scheme.sign_interest(toy_alice, pp, "/a", 7, date, tree, rng)
    assert a.s1 != b.s1 and a.s2 != b.s2 and a.s3 != b.s3 and a.s4 != b.s4
    assert b"alice" not in a.to_bytes()


def test_sign_outside_subscription(toy_setup, toy_alice):
    pp, _, tree = toy_setup
    with pytest.raises(scheme.NoCoverNode):
        scheme.sign_interest(toy_alice, pp, "/a", 1, D(2023, 10, 1), tree)


def test_signature_node_on_cover_and_path(toy_setup, toy_alice):
    pp, _, tree = toy_setup
    rng = random.Random(17)
    for month in range(1, 7):
        date = D(2023, month, 12)
        sig = scheme.sign_interest(toy_alice, pp, "/a", 1, date, tree, rng)
        assert sig.node in toy_alice.tokens
        assert sig.node in {n.label for n in policy_path(date, tree)}


def test_parse_policy(toy_setup):
    _, _, tree = toy_setup
    name = scheme.content_name("/p/", D(2023, 8, 20), "f/chunk_3", tree)
    assert [n.label for n in scheme.parse_policy(name, tree)] == ["m8w3d6", "m8w3", "m8", "y2023"]
    assert scheme.parse_policy("/no/policy/here", tree) is None


def test_core_sizes_full_scale():
    from ndnsub.bench import size_artifacts
    ct, key, sig = size_artifacts(seed=3)
    assert len(sig.core_bytes()) == 340
    assert len(key.core_bytes()) == 532
    assert len(ct.core_bytes()) == 484
    # Table-1 style field counts behind those bytes
    assert (len(ct.c_nodes), ct.poly.degree + 1) == (4, 5)
    assert len(key.tokens) == 4
