import pytest

from ndnsub.ndnsim.topology import (DisconnectedGraph, Link, ParseError, Topology,
                                    load_topology, parse_topology)

LINE = """
# consumer - edge - producer
node c consumer
node e edge
node p producer prefix=/com/test
link c e cost=1 lat_us=1000 bw_bps=100000000
link e p cost=2 lat_us=500 bw_bps=1000000000
"""


def test_line_parses_and_routes():
    t = parse_topology(LINE)
    assert t.roles == {"c": "consumer", "e": "edge", "p": "producer"}
    fibs = t.fibs()
    assert fibs["c"] == {"/com/test": "e"}
    assert fibs["e"] == {"/com/test": "p"}
    assert fibs["p"] == {}


@pytest.mark.parametrize("extra,exc", [
    ("link c e cost=1 lat_us=1 bw_bps=1", ParseError),
    ("link e e cost=1 lat_us=1 bw_bps=1", ParseError),
    ("link e x cost=1 lat_us=1 bw_bps=1", ParseError),
    ("link e p cost=0 lat_us=1 bw_bps=1", ParseError),
    ("node e edge", ParseError),
    ("node z wizard", ParseError),
    ("frobnicate", ParseError),
    ("link e p cost=1 lat_us=1", ParseError),
    ("link e p cost=x lat_us=1 bw_bps=1", ParseError),
    ("node island intermediate", DisconnectedGraph),
])
def test_malformed(extra, exc):
    with pytest.raises(exc):
        parse_topology(LINE + extra + "\n")


def test_consumer_must_hang_off_one_edge():
    bad = LINE + "node r intermediate\nlink c r cost=1 lat_us=1 bw_bps=1\nlink r p cost=1 lat_us=1 bw_bps=1\n"
    with pytest.raises(ParseError):
        parse_topology(bad)


def test_tie_break_smallest_id_and_no_transit_through_consumers():
    text = """
node c consumer
node e edge
node a intermediate
node b intermediate
node p producer prefix=/
link c e cost=1 lat_us=1 bw_bps=1
link e b cost=1 lat_us=1 bw_bps=1
link e a cost=1 lat_us=1 bw_bps=1
link a p cost=1 lat_us=1 bw_bps=1
link b p cost=1 lat_us=1 bw_bps=1
"""
    t = parse_topology(text)
    assert t.next_hops("p")["e"] == "a"
    # a consumer attached to both sides must not become a shortcut
    t2 = Topology()
    for n, r in [("c", "consumer"), ("e1", "edge"), ("e2", "edge"), ("p", "producer")]:
        t2.add_node(n, r)
    t2.add_link(Link("e1", "c", 1, 1, 1))
    t2.add_link(Link("c", "e2", 1, 1, 1))
    t2.add_link(Link("e1", "p", 10, 1, 1))
    t2.add_link(Link("e2", "p", 1, 1, 1))
    assert t2.next_hops("p")["e1"] == "p"


def test_fib_is_acyclic():
    t = load_topology()
    for prefix_owner in t.by_role("producer"):
        hops = t.next_hops(prefix_owner)
        for start in hops:
            seen, cur = set(), start
            while cur != prefix_owner:
                assert cur not in seen
                seen.add(cur)
                cur = hops[cur]


def test_bundled_testbed():
    t = load_topology()
    assert len(t.roles) == 37
    assert len(t.links) == 99
    assert len(t.by_role("producer")) == 1
    assert len(t.by_role("edge")) >= 5
    fibs = t.fibs()
    assert all(fibs[e] == {"/com/test": fibs[e]["/com/test"]} for e in t.by_role("edge"))


def test_text_roundtrip_and_attach():
    t = load_topology()
    again = parse_topology(t.to_text())
    assert again.roles == t.roles and again.links == t.links
    c = t.copy()
    c.attach_consumer("C1", c.by_role("edge")[0])
    c.validate()
    assert "C1" not in t.roles
    with pytest.raises(ValueError):
        c.attach_consumer("C2", "MEMPHIS")
