"""Topology files and static shortest-path FIBs.

File format, one directive per line, ``#`` starts a comment::

    node <id> <role> [prefix=<name-prefix>]
    link <a> <b> cost=<int> lat_us=<int> bw_bps=<int>

Roles are ``consumer``, ``edge``, ``intermediate`` and ``producer``.
Producers announce ``prefix`` (default ``/``).  Links are bidirectional.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

ROLES = ("consumer", "edge", "intermediate", "producer")


class ParseError(ValueError):
    pass


class DisconnectedGraph(ValueError):
    pass


@dataclass(frozen=True)
class Link:
    a: str
    b: str
    cost: int
    lat_us: int
    bw_bps: int

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


@dataclass
class Topology:
    roles: dict[str, str] = field(default_factory=dict)
    prefixes: dict[str, str] = field(default_factory=dict)   # producer -> prefix
    links: list[Link] = field(default_factory=list)
    _adj: dict[str, dict[str, Link]] = field(default_factory=dict, repr=False)

    @property
    def nodes(self) -> list[str]:
        return list(self.roles)

    def neighbors(self, node: str) -> dict[str, Link]:
        return self._adj.get(node, {})

    def link(self, a: str, b: str) -> Link:
        return self._adj[a][b]

    def by_role(self, role: str) -> list[str]:
        return sorted(n for n, r in self.roles.items() if r == role)

    def add_node(self, node: str, role: str, prefix: Optional[str] = None):
        if role not in ROLES:
            raise ParseError(f"unknown role {role!r}")
        if node in self.roles:
            raise ParseError(f"duplicate node {node!r}")
        self.roles[node] = role
        self._adj[node] = {}
        if role == "producer":
            self.prefixes[node] = prefix or "/"

    def add_link(self, link: Link):
        for end in (link.a, link.b):
            if end not in self.roles:
                raise ParseError(f"link endpoint {end!r} is not a declared node")
        if link.a == link.b:
            raise ParseError(f"self-loop on {link.a!r}")
        if link.b in self._adj[link.a]:
            raise ParseError(f"duplicate link {link.a}-{link.b}")
        if link.cost < 1 or link.lat_us < 0 or link.bw_bps < 1:
            raise ParseError(f"bad link parameters on {link.a}-{link.b}")
        self.links.append(link)
        self._adj[link.a][link.b] = link
        self._adj[link.b][link.a] = link

    def attach_consumer(self, node: str, edge: str, lat_us: int = 1000,
                        bw_bps: int = 100_000_000):
        if self.roles.get(edge) != "edge":
            raise ValueError(f"{edge!r} is not an edge router")
        self.add_node(node, "consumer")
        self.add_link(Link(node, edge, 1, lat_us, bw_bps))

    def validate(self):
        if not self.roles:
            raise ParseError("empty topology")
        start = next(iter(self.roles))
        seen = {start}
        stack = [start]
        while stack:
            for m in self._adj[stack.pop()]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        if len(seen) != len(self.roles):
            missing = sorted(set(self.roles) - seen)
            raise DisconnectedGraph(f"unreachable nodes: {', '.join(missing[:5])}")
        for n, role in self.roles.items():
            if role == "consumer":
                nbrs = list(self._adj[n])
                if len(nbrs) != 1 or self.roles[nbrs[0]] != "edge":
                    raise ParseError(f"consumer {n!r} must attach to exactly one edge router")

    def copy(self) -> "Topology":
        t = Topology()
        for n, r in self.roles.items():
            t.add_node(n, r, self.prefixes.get(n))
        for link in self.links:
            t.add_link(link)
        return t

    def distances_to(self, target: str) -> dict[str, int]:
        dist = {target: 0}
        heap = [(0, target)]
        while heap:
            d, n = heapq.heappop(heap)
            if d > dist[n]:
                continue
            # consumers and producers never transit traffic
            if n != target and self.roles[n] in ("consumer", "producer"):
                continue
            for m, link in self._adj[n].items():
                nd = d + link.cost
                if nd < dist.get(m, nd + 1):
                    dist[m] = nd
                    heapq.heappush(heap, (nd, m))
        return dist

    def next_hops(self, target: str) -> dict[str, str]:
        """Next hop toward ``target`` for every node; ties go to the smallest neighbour id."""
        dist = self.distances_to(target)
        hops = {}
        for n in self.roles:
            if n == target or n not in dist:
                continue
            best = [m for m, link in self._adj[n].items()
                    if m in dist and dist[m] + link.cost == dist[n]
                    and (m == target or self.roles[m] not in ("consumer", "producer"))]
            if best:
                hops[n] = min(best)
        return hops

    def fibs(self) -> dict[str, dict[str, str]]:
        """Per node: name prefix -> next-hop node, one entry per producer prefix."""
        out: dict[str, dict[str, str]] = {n: {} for n in self.roles}
        for producer, prefix in sorted(self.prefixes.items()):
            for n, hop in self.next_hops(producer).items():
                out[n].setdefault(prefix, hop)
        return out

    def to_text(self) -> str:
        lines = []
        for n, r in self.roles.items():
            extra = f" prefix={self.prefixes[n]}" if r == "producer" else ""
            lines.append(f"node {n} {r}{extra}")
        for link in self.links:
            lines.append(f"link {link.a} {link.b} cost={link.cost} "
                         f"lat_us={link.lat_us} bw_bps={link.bw_bps}")
        return "\n".join(lines) + "\n"


def _kv(tokens, lineno, required=()):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(f"line {lineno}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        if k in out:
            raise ParseError(f"line {lineno}: repeated key {k!r}")
        out[k] = v
    for k in required:
        if k not in out:
            raise ParseError(f"line {lineno}: missing {k}=")
    return out


def parse_topology(text: str) -> Topology:
    topo = Topology()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        try:
            if kind == "node":
                if len(tokens) < 3:
                    raise ParseError("node needs <id> <role>")
                kv = _kv(tokens[3:], lineno)
                unknown = set(kv) - {"prefix"}
                if unknown:
                    raise ParseError(f"unknown node attribute {sorted(unknown)[0]!r}")
                topo.add_node(tokens[1], tokens[2], kv.get("prefix"))
            elif kind == "link":
                if len(tokens) < 3:
                    raise ParseError("link needs <a> <b>")
                kv = _kv(tokens[3:], lineno, ("cost", "lat_us", "bw_bps"))
                unknown = set(kv) - {"cost", "lat_us", "bw_bps"}
                if unknown:
                    raise ParseError(f"unknown link attribute {sorted(unknown)[0]!r}")
                topo.add_link(Link(tokens[1], tokens[2], int(kv["cost"]),
                                   int(kv["lat_us"]), int(kv["bw_bps"])))
            else:
                raise ParseError(f"unknown directive {kind!r}")
        except ParseError as exc:
            msg = str(exc)
            if not msg.startswith("line "):
                msg = f"line {lineno}: {msg}"
            raise ParseError(msg) from None
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    topo.validate()
    return topo


def load_topology(source: Union[str, Path, None] = None) -> Topology:
    """Parse a topology file; with no argument, the bundled testbed stand-in."""
    if source is None:
        text = resources.files("ndnsub.ndnsim").joinpath("data/testbed.topo").read_text()
    else:
        text = Path(source).read_text()
    return parse_topology(text)
