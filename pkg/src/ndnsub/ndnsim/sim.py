"""Discrete-event NDN forwarding-plane simulator.

Time is an integer number of microseconds.  Each directed link is a FIFO
with serialization delay ``size * 8 / bw`` followed by propagation delay
``lat_us``; queues are unbounded and packets are dropped only by the
optional random loss.  Routers keep a PIT, a static FIB and an LRU content
store.  Edge routers additionally verify the signature carried by every
interest arriving from a consumer before it reaches the PIT; verification
occupies one of ``verify_workers`` parallel verifiers for
``verify_time_us``.

Three content scenarios mirror the emulation this simulator stands in for:

1. ``plain``: the file as cleartext segments, no interest signatures
2. ``encrypted``: the encrypted file plus one segment holding the
   ciphertext header (C1, C_i, coefficients); interests are signed and
   verified at the edge
3. ``revocation``: as 2, plus one segment holding a revocation header that
   the content key is bound to
"""
from __future__ import annotations

import csv
import datetime as dt
import enum
import heapq
import io
import random
from collections import Counter, OrderedDict
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional

from .. import revocation as rv
from .. import scheme
from ..algebra import default_group
from .topology import Topology, load_topology

SEGMENT_SIZE = 8192
HEADER_BYTES = 40          # fixed per-packet overhead besides name and payload

SCENARIOS = ("plain", "encrypted", "revocation")


class Unsatisfiable(RuntimeError):
    pass


class Ingress(enum.Enum):
    FORWARD = "forward"
    UNSIGNED = "unsigned"
    NAME_MISMATCH = "name-mismatch"
    STALE = "stale"
    WRONG_NODE = "wrong-node"
    MALFORMED = "malformed"
    BAD_SIGNATURE = "bad-signature"

    def __bool__(self):
        return self is Ingress.FORWARD


_FROM_VERDICT = {
    scheme.Verdict.ACCEPT: Ingress.FORWARD,
    scheme.Verdict.STALE: Ingress.STALE,
    scheme.Verdict.WRONG_NODE: Ingress.WRONG_NODE,
    scheme.Verdict.MALFORMED: Ingress.MALFORMED,
    scheme.Verdict.BAD_SIGNATURE: Ingress.BAD_SIGNATURE,
}


@dataclass
class Interest:
    name: str
    nonce: bytes
    signature: Optional[bytes] = None
    lifetime_us: int = 4_000_000

    @property
    def size(self) -> int:
        return HEADER_BYTES + len(self.name) + len(self.nonce) + len(self.signature or b"")


@dataclass
class DataPacket:
    name: str
    payload: bytes
    freshness: bool = True

    @property
    def size(self) -> int:
        return HEADER_BYTES + len(self.name) + len(self.payload)


@dataclass
class Scenario:
    """Everything that parameterises one fetch experiment."""

    content: str = "plain"                 # plain | encrypted | revocation
    consumers: int = 5
    file_size: int = 500 * SEGMENT_SIZE
    segment_size: int = SEGMENT_SIZE
    start: str = "concurrent"              # concurrent | staggered | sequential
    stagger_s: float = 1.0
    window: int = 64
    pit_lifetime_s: float = 4.0
    cs_capacity: int = 10_000
    loss_rate: float = 0.0
    verify_time_us: int = 1700
    verify_workers: int = 4
    delta_t: int = scheme.DEFAULT_DELTA_T
    group: str = "SS511"
    revocation_degree: int = 16
    revoked: int = 0                       # consumers revoked before publication
    access_lat_us: int = 1000
    access_bw_bps: int = 100_000_000
    consumer_edges: tuple[str, ...] = ()
    date: dt.date = dt.date(2023, 3, 15)
    prefix: str = "/com/test"
    filename: str = "abc.mp4"

    def __post_init__(self):
        if self.content not in SCENARIOS:
            raise ValueError(f"unknown content scenario {self.content!r}")
        if self.start not in ("concurrent", "staggered", "sequential"):
            raise ValueError(f"unknown start mode {self.start!r}")
        if self.consumers < 1 or self.window < 1 or self.segment_size < 1:
            raise ValueError("consumers, window and segment_size must be positive")
        if not 0.0 <= self.loss_rate < 1.0:
            raise ValueError("loss_rate must be in [0, 1)")
        if self.revoked > self.consumers or self.revoked > self.revocation_degree:
            raise ValueError("too many revoked consumers")
        if self.revoked and self.content != "revocation":
            raise ValueError("revoked consumers need the revocation scenario")

    @property
    def auth(self) -> bool:
        return self.content != "plain"

    @property
    def epoch_s(self) -> int:
        """Wall-clock seconds at simulation time zero (midday UTC of ``date``)."""
        d = dt.datetime(self.date.year, self.date.month, self.date.day, 12,
                        tzinfo=dt.timezone.utc)
        return int(d.timestamp())

    @classmethod
    def numbered(cls, number: int, **overrides) -> "Scenario":
        """Scenario (i), (ii) or (iii) by number."""
        return cls(content=SCENARIOS[number - 1], **overrides)


@dataclass
class ConsumerMetrics:
    consumer: str
    edge: str
    transfer_time_s: float
    goodput: float            # bytes per second
    interests_sent: int
    data_received: int
    retransmissions: int
    bytes_received: int
    content_ok: bool


@dataclass
class Metrics:
    scenario: Scenario
    seed: int
    segments: int
    consumers: list[ConsumerMetrics]
    nodes: dict[str, dict[str, int]]
    roles: dict[str, str]
    producer_egress: int
    finished_us: int

    CONSUMER_COLUMNS = ("consumer", "transfer_time_s", "goodput_bps",
                        "interests_sent", "data_received")
    NODE_COLUMNS = ("node", "role", "interests_in", "interests_out", "data_in",
                    "data_out", "cs_hits", "aggregated", "unsolicited", "dropped")

    @property
    def mean_transfer_time(self) -> float:
        return sum(c.transfer_time_s for c in self.consumers) / len(self.consumers)

    @property
    def mean_goodput(self) -> float:
        return sum(c.goodput for c in self.consumers) / len(self.consumers)

    def consumer_csv(self) -> str:
        """One row per consumer; ``goodput_bps`` is in bits per second."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CONSUMER_COLUMNS)
        for c in self.consumers:
            w.writerow([c.consumer, f"{c.transfer_time_s:.6f}", f"{8 * c.goodput:.1f}",
                        c.interests_sent, c.data_received])
        return buf.getvalue()

    def node_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.NODE_COLUMNS)
        for node in sorted(self.nodes):
            cnt = self.nodes[node]
            dropped = sum(v for k, v in cnt.items() if k.startswith("drop_"))
            w.writerow([node, self.roles[node]] + [cnt.get(k, 0) for k in self.NODE_COLUMNS[2:-1]]
                       + [dropped])
        return buf.getvalue()

    def summary(self) -> dict:
        interests = [c.interests_sent for c in self.consumers]
        return {
            "scenario": self.scenario.content,
            "consumers": len(self.consumers),
            "segments": self.segments,
            "mean_transfer_time_s": round(self.mean_transfer_time, 6),
            "mean_goodput_Bps": round(self.mean_goodput, 1),
            "mean_interests_per_consumer": sum(interests) / len(interests),
            "producer_egress_data": self.producer_egress,
            "all_content_ok": all(c.content_ok for c in self.consumers
                                  if c.consumer not in self._revoked_ids()),
        }

    def _revoked_ids(self) -> set[str]:
        return {f"C{i + 1}" for i in range(self.scenario.revoked)}


# ---------------------------------------------------------------- nodes

class Router:
    """PIT / FIB / CS forwarding for edge and intermediate routers."""

    def __init__(self, node_id: str, fib: dict[str, str], cs_capacity: int = 10_000,
                 role: str = "intermediate"):
        self.id = node_id
        self.role = role
        self.fib = dict(fib)
        self.cs_capacity = cs_capacity
        self.pit: dict[str, dict] = {}
        self.cs: OrderedDict[str, DataPacket] = OrderedDict()
        self.counters: Counter = Counter()

    def fib_lookup(self, name: str) -> Optional[str]:
        best, best_len = None, -1
        for prefix, hop in self.fib.items():
            p = prefix.rstrip("/")
            if (name == p or name.startswith(p + "/") or p == "") and len(p) > best_len:
                best, best_len = hop, len(p)
        return best

    def forward_interest(self, interest: Interest, face: str, now: int) -> list:
        """Returns ``[(face, packet), ...]`` to transmit."""
        self.counters["interests_in"] += 1
        name = interest.name
        if name in self.cs:
            self.cs.move_to_end(name)
            self.counters["cs_hits"] += 1
            self.counters["data_out"] += 1
            return [(face, self.cs[name])]
        entry = self.pit.get(name)
        if entry is not None and entry["expiry"] <= now:
            self.counters["pit_expired"] += 1
            del self.pit[name]
            entry = None
        if entry is not None:
            if interest.nonce in entry["nonces"] and entry["faces"].get(face) != interest.nonce:
                self.counters["drop_duplicate_nonce"] += 1
                return []
            retransmit = face in entry["faces"]
            entry["faces"][face] = interest.nonce
            entry["nonces"].add(interest.nonce)
            if not retransmit:
                self.counters["aggregated"] += 1
                return []
            entry["expiry"] = now + interest.lifetime_us
        else:
            self.pit[name] = {"faces": {face: interest.nonce}, "nonces": {interest.nonce},
                              "expiry": now + interest.lifetime_us}
        hop = self.fib_lookup(name)
        if hop is None:
            self.counters["drop_no_route"] += 1
            del self.pit[name]
            return []
        self.counters["interests_out"] += 1
        return [(hop, interest)]

    def forward_data(self, data: DataPacket, face: str, now: int) -> list:
        self.counters["data_in"] += 1
        entry = self.pit.pop(data.name, None)
        if entry is None or entry["expiry"] <= now:
            self.counters["unsolicited"] += 1
            return []
        if self.cs_capacity > 0:
            self.cs[data.name] = data
            self.cs.move_to_end(data.name)
            while len(self.cs) > self.cs_capacity:
                self.cs.popitem(last=False)
        out = [(f, data) for f in sorted(entry["faces"]) if f != face]
        self.counters["data_out"] += len(out)
        return out


class EdgeRouter(Router):
    """A router that admits consumer interests only with a valid signature."""

    def __init__(self, node_id: str, fib: dict[str, str], cs_capacity: int = 10_000,
                 verifier: Optional[Callable[[bytes, int], scheme.Verdict]] = None,
                 epoch_s: int = 0):
        super().__init__(node_id, fib, cs_capacity, role="edge")
        self.verifier = verifier
        self.epoch_s = epoch_s

    def edge_ingress(self, interest: Interest, now: int) -> Ingress:
        if self.verifier is None:
            return Ingress.FORWARD
        if interest.signature is None:
            verdict = Ingress.UNSIGNED
        else:
            verdict = _FROM_VERDICT[self.verifier(interest.signature, interest.name,
                                                  self.epoch_s + now // 1_000_000)]
        if not verdict:
            self.counters[f"drop_{verdict.value}"] += 1
        else:
            self.counters["verified"] += 1
        return verdict


class Producer:
    def __init__(self, node_id: str, store: dict[str, bytes]):
        self.id = node_id
        self.role = "producer"
        self.store = store
        self.counters: Counter = Counter()

    def on_interest(self, interest: Interest, face: str, now: int) -> list:
        self.counters["interests_in"] += 1
        payload = self.store.get(interest.name)
        if payload is None:
            self.counters["drop_unknown_name"] += 1
            return []
        self.counters["data_out"] += 1
        return [(face, DataPacket(interest.name, payload))]


class Consumer:
    def __init__(self, node_id: str, edge: str, names: list[str], window: int,
                 lifetime_us: int, rng: random.Random,
                 signer: Optional[Callable[[str, int], bytes]] = None):
        self.id = node_id
        self.role = "consumer"
        self.edge = edge
        self.names = names
        self.window = window
        self.lifetime_us = lifetime_us
        self.rng = rng
        self.signer = signer
        self.next_idx = 0
        self.outstanding: dict[str, int] = {}      # name -> timer token
        self.received: dict[str, bytes] = {}
        self.start_us: Optional[int] = None
        self.finish_us: Optional[int] = None
        self.counters: Counter = Counter()
        self._token = 0

    @property
    def done(self) -> bool:
        return len(self.received) == len(self.names)


# ---------------------------------------------------------------- engine

class Simulation:
    def __init__(self, topology: Topology, scenario: Scenario, seed: int = 0,
                 stores: Optional[dict[str, dict[str, bytes]]] = None,
                 verifier=None, signers=None, names: Optional[list[str]] = None):
        self.topo = topology
        self.scenario = scenario
        self.seed = seed
        self.loss_rng = random.Random(f"{seed}/loss")
        self.now = 0
        self._queue: list = []
        self._seq = 0
        self._busy: dict[tuple[str, str], int] = {}
        self._verify_free: dict[str, list[int]] = {}
        self.on_consumer_done: Optional[Callable[[Consumer], None]] = None
        lifetime = int(scenario.pit_lifetime_s * 1_000_000)

        fibs = topology.fibs()
        self.nodes: dict[str, object] = {}
        for n, role in topology.roles.items():
            if role == "edge":
                self.nodes[n] = EdgeRouter(n, fibs[n], scenario.cs_capacity,
                                           verifier if scenario.auth else None,
                                           scenario.epoch_s)
                self._verify_free[n] = [0] * scenario.verify_workers
            elif role == "intermediate":
                self.nodes[n] = Router(n, fibs[n], scenario.cs_capacity)
            elif role == "producer":
                self.nodes[n] = Producer(n, (stores or {}).get(n, {}))
        signers = signers or {}
        for idx, c in enumerate(topology.by_role("consumer")):
            edge = next(iter(topology.neighbors(c)))
            if not fibs[c]:
                raise Unsatisfiable(f"consumer {c} has no route to any producer")
            self.nodes[c] = Consumer(c, edge, list(names or []), scenario.window, lifetime,
                                     random.Random(f"{seed}/nonce/{c}"), signers.get(c))
        self._check_routes(fibs)

    def _check_routes(self, fibs):
        for c in self.topo.by_role("consumer"):
            cur, hops = c, 0
            name = (self.nodes[c].names or [self.scenario.prefix])[0]
            while self.topo.roles[cur] != "producer":
                node = self.nodes.get(cur)
                hop = node.fib_lookup(name) if isinstance(node, Router) else fibs[cur].get(
                    next(iter(fibs[cur]), None))
                if hop is None or hops > len(self.topo.roles):
                    raise Unsatisfiable(f"no route from {c} toward {name}")
                cur, hops = hop, hops + 1

    # -- event plumbing --

    def schedule(self, at_us: int, fn, *args):
        self._seq += 1
        heapq.heappush(self._queue, (at_us, self._seq, fn, args))

    def transmit(self, src: str, dst: str, pkt):
        link = self.topo.link(src, dst)
        key = (src, dst)
        start = max(self.now, self._busy.get(key, 0))
        tx = (pkt.size * 8 * 1_000_000 + link.bw_bps - 1) // link.bw_bps
        self._busy[key] = start + tx
        if self.scenario.loss_rate and self.loss_rng.random() < self.scenario.loss_rate:
            self.nodes[src].counters["lost_on_link"] += 1
            return
        self.schedule(start + tx + link.lat_us, self.deliver, dst, src, pkt)

    def deliver(self, dst: str, src: str, pkt):
        node = self.nodes[dst]
        if isinstance(pkt, Interest):
            if isinstance(node, EdgeRouter) and self.topo.roles[src] == "consumer" \
                    and node.verifier is not None:
                verdict = node.edge_ingress(pkt, self.now)
                if not verdict:
                    return
                workers = self._verify_free[dst]
                i = min(range(len(workers)), key=workers.__getitem__)
                done = max(self.now, workers[i]) + self.scenario.verify_time_us
                workers[i] = done
                self.schedule(done, self._route_interest, dst, src, pkt)
                return
            self._route_interest(dst, src, pkt)
        else:
            if isinstance(node, Consumer):
                self._consumer_data(node, pkt)
            elif isinstance(node, Router):
                for face, out in node.forward_data(pkt, src, self.now):
                    self.transmit(dst, face, out)

    def _route_interest(self, dst, src, pkt):
        node = self.nodes[dst]
        if isinstance(node, Producer):
            outs = node.on_interest(pkt, src, self.now)
        else:
            outs = node.forward_interest(pkt, src, self.now)
        for face, out in outs:
            self.transmit(dst, face, out)

    # -- consumer behaviour --

    def start_consumer(self, c: Consumer):
        c.start_us = self.now
        while c.next_idx < len(c.names) and len(c.outstanding) < c.window:
            self._send_next(c)

    def _send_next(self, c: Consumer):
        name = c.names[c.next_idx]
        c.next_idx += 1
        self._express(c, name)

    def _express(self, c: Consumer, name: str):
        nonce = c.rng.getrandbits(64).to_bytes(8, "big")
        sig = None
        if c.signer is not None:
            sig = c.signer(name, self.scenario.epoch_s + self.now // 1_000_000)
        c._token += 1
        c.outstanding[name] = c._token
        c.counters["interests_sent"] += 1
        self.transmit(c.id, c.edge, Interest(name, nonce, sig, c.lifetime_us))
        self.schedule(self.now + c.lifetime_us, self._timeout, c, name, c._token)

    def _timeout(self, c: Consumer, name: str, token: int):
        if c.outstanding.get(name) == token:
            c.counters["retransmissions"] += 1
            self._express(c, name)

    def _consumer_data(self, c: Consumer, data: DataPacket):
        c.counters["data_received"] += 1
        if data.name not in c.outstanding:
            c.counters["late_data"] += 1
            return
        del c.outstanding[data.name]
        c.received[data.name] = data.payload
        if c.next_idx < len(c.names):
            self._send_next(c)
        elif c.done and c.finish_us is None:
            c.finish_us = self.now
            if self.on_consumer_done:
                self.on_consumer_done(c)

    def run(self, until_us: Optional[int] = None):
        while self._queue:
            at, _, fn, args = self._queue[0]
            if until_us is not None and at > until_us:
                break
            heapq.heappop(self._queue)
            self.now = at
            fn(*args)


# ---------------------------------------------------------------- experiments

@dataclass
class Content:
    """What the producer serves and what consumers need to check it."""

    store: dict[str, bytes]
    names: list[str]                         # fetch order, metadata first
    plaintext: bytes
    check: Callable[[str, dict[str, bytes]], bool]
    signers: dict[str, Callable[[str, int], bytes]] = field(default_factory=dict)
    verifier: Optional[Callable[[bytes, str, int], scheme.Verdict]] = None


def _segment(data: bytes, size: int) -> list[bytes]:
    return [data[i:i + size] for i in range(0, len(data), size)] or [b""]


def prepare_content(scenario: Scenario, consumer_ids: list[str], seed: int) -> Content:
    """Publish the scenario's file and provision keys for every consumer."""
    rng = random.Random(f"{seed}/content")
    plaintext = rng.randbytes(scenario.file_size)
    tree = None
    if scenario.content == "plain":
        base = f"{scenario.prefix.rstrip('/')}/{scenario.filename}"
        segs = _segment(plaintext, scenario.segment_size)
        names = [f"{base}/chunk_{i}" for i in range(len(segs))]

        def check_plain(cid, received):
            return b"".join(received[n] for n in names) == plaintext

        return Content(dict(zip(names, segs)), names, plaintext, check_plain)

    crypto = random.Random(f"{seed}/crypto")
    grp = default_group(scenario.group)
    pp, ms, tree = scheme.producer_setup(scenario.date.year, scenario.delta_t, crypto, grp)
    base = scheme.content_name(scenario.prefix, scenario.date, scenario.filename, tree)
    start = dt.date(scenario.date.year, 1, 1)
    end = dt.date(scenario.date.year, 12, 31)
    keys = {cid: scheme.register_consumer(ms, pp, cid.encode(), start, end, tree, crypto)
            for cid in consumer_ids}

    store: dict[str, bytes] = {}
    meta_names: list[str] = []
    rekey = None
    ref = ""
    shares = {}
    if scenario.content == "revocation":
        setup = rv.revocation_setup(scenario.revocation_degree,
                                    max(len(consumer_ids), 1), crypto)
        shares = {cid: rv.issue_share(setup, cid, crypto) for cid in consumer_ids}
        revoked = consumer_ids[:scenario.revoked]
        k = rv.random_rekey(rng=crypto)
        header = rv.make_header(setup, revoked, k, crypto)
        ref = f"{scenario.prefix.rstrip('/')}/revocation/seq=1"
        store[ref] = header.to_bytes()
        meta_names.append(ref)
        rekey = rv.rekey_bytes(k)
    ct = scheme.publish(ms, pp, scenario.date, base, plaintext, tree, crypto, rekey, ref)
    height_name = f"{base}/height"
    store[height_name] = scheme.Ciphertext(ct.content_name, b"", ct.c1, ct.c_nodes, ct.poly,
                                           ct.revocation_ref).to_bytes()
    meta_names.insert(0, height_name)
    segs = _segment(ct.payload, scenario.segment_size)
    chunk_names = [f"{base}/chunk_{i}" for i in range(len(segs))]
    store.update(zip(chunk_names, segs))
    if max(len(v) for v in store.values()) > scenario.segment_size:
        raise ValueError("metadata does not fit in one segment")

    def check_encrypted(cid, received):
        head = scheme.Ciphertext.from_bytes(received[height_name], grp)
        head.payload = b"".join(received[n] for n in chunk_names)
        k_bytes = None
        if head.revocation_ref:
            hdr = rv.RevocationHeader.from_bytes(received[head.revocation_ref])
            try:
                k_bytes = rv.rekey_bytes(rv.recover_key(hdr, shares[cid]), hdr.group)
            except rv.DegenerateShare:
                return False
        try:
            return scheme.decrypt(keys[cid], pp, head, tree, k_bytes) == plaintext
        except (scheme.AeadFailure, scheme.NoCoverNode):
            return False

    sign_rng = {cid: random.Random(f"{seed}/sign/{cid}") for cid in consumer_ids}

    def make_signer(cid):
        def sign(name, ts):
            return scheme.sign_interest(keys[cid], pp, name, ts, scenario.date, tree,
                                        sign_rng[cid]).to_bytes()
        return sign

    def verifier(sig: bytes, name: str, now_s: int) -> scheme.Verdict:
        try:
            parsed = scheme.InterestSignature.from_bytes(sig, grp)
        except scheme.DecodeError:
            return scheme.Verdict.MALFORMED
        verdict = scheme.verify_interest(pp, parsed, now_s, scenario.date, tree)
        if verdict and parsed.cn != name:
            return scheme.Verdict.BAD_SIGNATURE
        return verdict

    return Content(store, meta_names + chunk_names, plaintext, check_encrypted,
                   {cid: make_signer(cid) for cid in consumer_ids}, verifier)


def attach_consumers(topology: Topology, scenario: Scenario) -> Topology:
    topo = topology.copy()
    existing = topo.by_role("consumer")
    if existing:
        if len(existing) < scenario.consumers:
            raise ValueError("topology declares fewer consumers than the scenario needs")
        return topo
    edges = list(scenario.consumer_edges) or topo.by_role("edge")
    if not edges:
        raise Unsatisfiable("topology has no edge routers")
    for i in range(scenario.consumers):
        topo.attach_consumer(f"C{i + 1}", edges[i % len(edges)],
                             scenario.access_lat_us, scenario.access_bw_bps)
    return topo


def run_fetch(topology: Optional[Topology], scenario: Scenario, seed: int = 0) -> Metrics:
    """Every consumer fetches every segment of the scenario's content."""
    topology = topology or load_topology()
    topo = attach_consumers(topology, scenario)
    producers = topo.by_role("producer")
    if not producers:
        raise Unsatisfiable("topology has no producer")
    consumer_ids = topo.by_role("consumer")[:scenario.consumers]
    consumer_ids.sort(key=lambda c: (len(c), c))
    content = prepare_content(scenario, consumer_ids, seed)
    verifier = content.verifier
    sim = Simulation(topo, scenario, seed, {producers[0]: content.store},
                     verifier, content.signers, content.names)

    consumers = [sim.nodes[c] for c in consumer_ids]
    if scenario.start == "sequential":
        pending = list(consumers[1:])

        def next_one(_done):
            if pending:
                sim.start_consumer(pending.pop(0))
        sim.on_consumer_done = next_one
        sim.schedule(0, sim.start_consumer, consumers[0])
    else:
        for i, c in enumerate(consumers):
            offset = int(i * scenario.stagger_s * 1_000_000) if scenario.start == "staggered" else 0
            sim.schedule(offset, sim.start_consumer, c)
    sim.run()

    out = []
    for c in consumers:
        if c.finish_us is None:
            raise Unsatisfiable(f"consumer {c.id} did not finish")
        elapsed = (c.finish_us - c.start_us) / 1_000_000
        nbytes = sum(len(v) for v in c.received.values())
        out.append(ConsumerMetrics(
            consumer=c.id, edge=c.edge, transfer_time_s=elapsed,
            goodput=scenario.file_size / elapsed if elapsed > 0 else 0.0,
            interests_sent=c.counters["interests_sent"],
            data_received=c.counters["data_received"],
            retransmissions=c.counters["retransmissions"],
            bytes_received=nbytes, content_ok=content.check(c.id, c.received)))
    nodes = {n: dict(sorted(obj.counters.items())) for n, obj in sim.nodes.items()}
    producer_egress = sum(sim.nodes[p].counters["data_out"] for p in producers)
    return Metrics(scenario, seed, len(content.names), out, nodes, dict(topo.roles),
                   producer_egress, sim.now)


def scenario_dict(s: Scenario) -> dict:
    d = asdict(s)
    d["date"] = s.date.isoformat()
    d["consumer_edges"] = list(s.consumer_edges)
    return d


__all__ = [
    "Interest", "DataPacket", "Scenario", "Metrics", "ConsumerMetrics", "Router",
    "EdgeRouter", "Producer", "Consumer", "Simulation", "Ingress", "Unsatisfiable",
    "run_fetch", "prepare_content", "attach_consumers", "scenario_dict", "replace",
    "SEGMENT_SIZE", "SCENARIOS",
]
