"""Micro-benchmarks: publication vs. tree height, key update vs. revoked
count, serialized sizes and per-operation costs.

Every suite returns a list of :class:`Row`; :func:`to_csv` and
:func:`to_table` render them.  Timings are wall-clock means over
``trials`` repetitions on one core.
"""
from __future__ import annotations

import csv
import gc
import datetime as dt
import io
import random
import statistics
import time
from dataclasses import dataclass
from typing import Callable

from . import revocation as rv
from . import scheme
from .algebra import default_group
from .subtree import PolicyTree, path_to_root

SUITES = ("publish-height", "keyupdate-revoked", "sizes", "crypto-ops")
HEIGHTS = (3, 5, 7, 9)
REVOKED = (1, 4, 7, 11)
CSV_COLUMNS = ("suite", "metric", "param", "trials", "mean", "stdev", "unit")


@dataclass(frozen=True)
class Row:
    suite: str
    metric: str
    param: int
    trials: int
    mean: float
    stdev: float
    unit: str


def _timed(fn: Callable[[], object], trials: int) -> tuple[float, float]:
    fn()  # warm caches before timing
    samples = []
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(trials):
            t0 = time.perf_counter()
            fn()
            samples.append((time.perf_counter() - t0) * 1000)
    finally:
        if enabled:
            gc.enable()
    sd = statistics.stdev(samples) if len(samples) > 1 else 0.0
    return statistics.fmean(samples), sd


def publish_height(trials: int = 20, seed: int = 0, group: str = "SS511",
                   heights=HEIGHTS) -> list[Row]:
    """Time to encrypt one small payload under a path of each height."""
    grp = default_group(group)
    rows = []
    for h in heights:
        rng = random.Random(f"{seed}/bench/publish/{h}")
        tree = PolicyTree.extended(2023, h)
        pp, ms, _ = scheme.producer_setup(2023, rng=rng, group=grp, tree=tree)
        leaf = tree.leaf_at(rng.randrange(tree.leaf_count))
        path = path_to_root(leaf, tree)
        body = b"x" * 1024
        mean, sd = _timed(lambda: scheme.publish_path(ms, pp, path, "/bench/obj", body, rng),
                          trials)
        rows.append(Row("publish-height", "publish_ms", h, trials, mean, sd, "ms"))
    return rows


def keyupdate_revoked(trials: int = 20, seed: int = 0, counts=REVOKED,
                      group: rv.SchnorrGroup = rv.SCHNORR1024) -> list[Row]:
    """Time for a non-revoked consumer to recover k from a header revoking n consumers.

    The header degree is set to n at each point, so E carries exactly the
    revoked points and nothing else.
    """
    rows = []
    for n in counts:
        rng = random.Random(f"{seed}/bench/keyupdate/{n}")
        setup = rv.revocation_setup(n, n + 1, rng, group)
        ids = [f"c{i}" for i in range(n + 1)]
        for cid in ids:
            rv.issue_share(setup, cid, rng)
        k = rv.random_rekey(group, rng)
        header = rv.make_header(setup, ids[:n], k, rng)
        share = setup.shares[ids[n]]
        mean, sd = _timed(lambda: rv.recover_key(header, share), trials)
        rows.append(Row("keyupdate-revoked", "recover_ms", n, trials, mean, sd, "ms"))
    return rows


def size_artifacts(seed: int = 0, group: str = "SS511"):
    """A ciphertext with |tau| = 4, a key with |CS| = 4 and one signature."""
    grp = default_group(group)
    rng = random.Random(f"{seed}/bench/sizes")
    pp, ms, tree = scheme.producer_setup(2023, rng=rng, group=grp)
    date = dt.date(2023, 3, 15)
    ct = scheme.publish(ms, pp, date, "/bench/obj", b"payload", tree, rng)
    # Jan 1 .. Mar 14 covers as {m1, m2, m3w1, m3w2}
    key = scheme.register_consumer(ms, pp, b"bench", dt.date(2023, 1, 1),
                                   dt.date(2023, 3, 14), tree, rng)
    if len(key.cover) != 4:
        raise AssertionError(f"expected a 4-node cover, got {len(key.cover)}")
    sig = scheme.sign_interest(key, pp, ct.content_name, 1_700_000_000, dt.date(2023, 3, 1),
                               tree, rng)
    return ct, key, sig


def sizes(seed: int = 0, group: str = "SS511") -> list[Row]:
    ct, key, sig = size_artifacts(seed, group)
    return [
        Row("sizes", "ciphertext_core_bytes", len(ct.c_nodes), 1, len(ct.core_bytes()), 0.0, "B"),
        Row("sizes", "consumer_key_core_bytes", len(key.cover), 1, len(key.core_bytes()), 0.0, "B"),
        Row("sizes", "signature_core_bytes", 0, 1, len(sig.core_bytes()), 0.0, "B"),
    ]


def crypto_ops(trials: int = 20, seed: int = 0, group: str = "SS511") -> list[Row]:
    grp = default_group(group)
    rng = random.Random(f"{seed}/bench/ops")
    pp, ms, tree = scheme.producer_setup(2023, rng=rng, group=grp)
    date = dt.date(2023, 3, 15)
    key = scheme.register_consumer(ms, pp, b"bench", dt.date(2023, 1, 1),
                                   dt.date(2023, 12, 31), tree, rng)
    ct = scheme.publish(ms, pp, date, "/bench/obj", b"x" * 1024, tree, rng)
    sig = scheme.sign_interest(key, pp, ct.content_name, 100, date, tree, rng)
    a, b = grp.random_g1(rng), grp.random_g1(rng)
    s = grp.random_scalar(rng)
    ops = {
        "sign_ms": lambda: scheme.sign_interest(key, pp, ct.content_name, 100, date, tree, rng),
        "verify_ms": lambda: scheme.verify_interest(pp, sig, 100, date, tree),
        "decrypt_ms": lambda: scheme.decrypt(key, pp, ct, tree),
        "pairing_ms": lambda: grp.pair(a, b),
        "g1_exp_ms": lambda: a ** s,
    }
    rows = []
    for metric, fn in ops.items():
        mean, sd = _timed(fn, trials)
        rows.append(Row("crypto-ops", metric, 0, trials, mean, sd, "ms"))
    return rows


def run_suite(suite: str, trials: int = 20, seed: int = 0, group: str = "SS511") -> list[Row]:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if suite == "publish-height":
        return publish_height(trials, seed, group)
    if suite == "keyupdate-revoked":
        rgroup = rv.TOY_SCHNORR if group == "TOY" else rv.SCHNORR1024
        return keyupdate_revoked(trials, seed, group=rgroup)
    if suite == "sizes":
        return sizes(seed, group)
    if suite == "crypto-ops":
        return crypto_ops(trials, seed, group)
    raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")


def to_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.suite, r.metric, r.param, r.trials, f"{r.mean:.4f}", f"{r.stdev:.4f}", r.unit])
    return buf.getvalue()


def to_table(rows: list[Row]) -> str:
    head = f"{'suite':<18} {'metric':<24} {'param':>5} {'mean':>10} {'stdev':>9}  unit"
    lines = [head, "-" * len(head)]
    for r in rows:
        mean = f"{r.mean:.0f}" if r.unit == "B" else f"{r.mean:.3f}"
        lines.append(f"{r.suite:<18} {r.metric:<24} {r.param:>5} {mean:>10} "
                     f"{r.stdev:>9.3f}  {r.unit}")
    return "\n".join(lines)
