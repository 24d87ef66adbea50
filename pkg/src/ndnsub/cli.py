"""``ndnsub`` command line.

Artifacts live under one directory (``--dir``, ``$NDNSUB_DIR``)::

    params.bin            public parameters
    master.bin            producer master secret
    revocation.json       producer revocation state (polynomial, pool, shares, current rekey)
    keys/<id>.key         consumer key
    keys/<id>.share       consumer revocation share
    content/<file>.ct     published ciphertext
    revocation/seq=N.hdr  revocation headers

Settings are resolved as defaults < config file < environment < flags.
With a seed every random draw comes from ``random.Random(f"{seed}/{purpose}")``
where *purpose* names the step (``setup``, ``register/<id>``, ``publish/<name>``,
``sign/<ts>/<name>``, ``revoke/<seq>``, ``sim``, ``bench``), so reruns give
byte-identical artifacts.  Seeded mode is for reproducibility only; without
a seed the system CSPRNG is used.
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import datetime as dt
import enum
import json
import os
import random
import secrets
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import bench as benchmod
from . import revocation as rv
from . import scheme
from .algebra import DecodeError, default_group
from .ndnsim import sim as simmod
from .ndnsim.topology import DisconnectedGraph, ParseError, load_topology
from .subtree import InvalidRange, NodeId, YearMismatch

ENV_SEED = "NDNSUB_SEED"
ENV_DIR = "NDNSUB_DIR"


class ExitCode(enum.IntEnum):
    OK = 0
    ERROR = 1
    USAGE = 2
    MISSING_INPUT = 3
    MALFORMED = 4
    NOT_COVERED = 5
    AEAD_FAILURE = 6
    REVOCATION = 7
    UNSATISFIABLE = 8
    CONFIG = 9
    STALE = 10
    WRONG_NODE = 11
    BAD_SIGNATURE = 12


_VERDICT_EXIT = {
    scheme.Verdict.ACCEPT: ExitCode.OK,
    scheme.Verdict.STALE: ExitCode.STALE,
    scheme.Verdict.WRONG_NODE: ExitCode.WRONG_NODE,
    scheme.Verdict.MALFORMED: ExitCode.MALFORMED,
    scheme.Verdict.BAD_SIGNATURE: ExitCode.BAD_SIGNATURE,
}


class CliError(Exception):
    def __init__(self, code: ExitCode, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- config

@dataclass
class RunConfig:
    seed: Optional[int] = None
    dir: str = "."
    group: str = "SS511"
    year: int = 2023
    delta_t: int = scheme.DEFAULT_DELTA_T
    prefix: str = "/com/test"
    revocation_degree: int = rv.DEFAULT_DEGREE
    n_max: int = 1000
    topology: str = ""                 # empty: bundled testbed
    scenario: simmod.Scenario = field(default_factory=simmod.Scenario)
    bench_suite: str = "sizes"
    bench_trials: int = 20

    _RUN = ("seed", "dir", "group", "year", "delta_t", "prefix", "revocation_degree",
            "n_max", "topology")

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp["run"] = {k: _fmt(getattr(self, k)) for k in self._RUN}
        cp["sim"] = {f.name: _fmt(getattr(self.scenario, f.name))
                     for f in dataclasses.fields(simmod.Scenario)}
        cp["bench"] = {"suite": self.bench_suite, "trials": str(self.bench_trials)}
        buf = []
        for section in cp.sections():
            buf.append(f"[{section}]")
            buf += [f"{k} = {v}" for k, v in cp[section].items()]
            buf.append("")
        return "\n".join(buf)

    @classmethod
    def from_text(cls, text: str, base: Optional["RunConfig"] = None) -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None)
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise CliError(ExitCode.CONFIG, f"config: {exc}") from None
        cfg = dataclasses.replace(base) if base else cls()
        unknown = set(cp.sections()) - {"run", "sim", "bench"}
        if unknown:
            raise CliError(ExitCode.CONFIG, f"config: unknown section [{sorted(unknown)[0]}]")
        defaults = cls()
        if cp.has_section("run"):
            for k, v in cp["run"].items():
                if k not in cls._RUN:
                    raise CliError(ExitCode.CONFIG, f"config: unknown key run.{k}")
                setattr(cfg, k, _parse(k, v, getattr(defaults, k)))
        if cp.has_section("sim"):
            sdef = simmod.Scenario()
            names = {f.name for f in dataclasses.fields(simmod.Scenario)}
            updates = {}
            for k, v in cp["sim"].items():
                if k not in names:
                    raise CliError(ExitCode.CONFIG, f"config: unknown key sim.{k}")
                updates[k] = _parse(k, v, getattr(sdef, k))
            try:
                cfg.scenario = dataclasses.replace(cfg.scenario, **updates)
            except ValueError as exc:
                raise CliError(ExitCode.CONFIG, f"config: {exc}") from None
        if cp.has_section("bench"):
            for k, v in cp["bench"].items():
                if k == "suite":
                    cfg.bench_suite = v
                elif k == "trials":
                    cfg.bench_trials = _parse(k, v, 0)
                else:
                    raise CliError(ExitCode.CONFIG, f"config: unknown key bench.{k}")
        return cfg


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, dt.date):
        return v.isoformat()
    if isinstance(v, tuple):
        return ",".join(v)
    return str(v)


def _parse(key: str, text: str, default):
    text = text.strip()
    try:
        if key == "seed":
            return int(text) if text else None
        if isinstance(default, bool):
            if text.lower() not in ("true", "false"):
                raise ValueError("expected true or false")
            return text.lower() == "true"
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, dt.date):
            return dt.date.fromisoformat(text)
        if isinstance(default, tuple):
            return tuple(p.strip() for p in text.split(",") if p.strip())
        return text
    except ValueError as exc:
        raise CliError(ExitCode.CONFIG, f"config: bad value for {key}: {exc}") from None


def resolve_config(args, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    cfg = RunConfig()
    path = getattr(args, "config", None)
    if path:
        try:
            cfg = RunConfig.from_text(Path(path).read_text())
        except FileNotFoundError:
            raise CliError(ExitCode.MISSING_INPUT, f"config file {path} not found") from None
    if environ.get(ENV_SEED):
        cfg.seed = _parse("seed", environ[ENV_SEED], None)
    if environ.get(ENV_DIR):
        cfg.dir = environ[ENV_DIR]
    for key in ("seed", "dir", "group", "year", "delta_t", "prefix"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    return cfg


def rng_for(cfg: RunConfig, purpose: str):
    """The random source for one step of the pipeline."""
    if cfg.seed is None:
        return secrets.SystemRandom()
    return random.Random(f"{cfg.seed}/{purpose}")


# ---------------------------------------------------------------- artifact io

def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except FileNotFoundError:
        raise CliError(ExitCode.MISSING_INPUT, f"{path} not found") from None


def _write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _load_pp(cfg) -> scheme.PublicParams:
    return scheme.PublicParams.from_bytes(_read(Path(cfg.dir) / "params.bin"))


def _load_ms(cfg, pp) -> scheme.MasterSecret:
    return scheme.MasterSecret.from_bytes(_read(Path(cfg.dir) / "master.bin"), pp.group)


def _rv_group(cfg) -> rv.SchnorrGroup:
    return rv.TOY_SCHNORR if cfg.group == "TOY" else rv.SCHNORR1024


def _save_rv_state(cfg, setup: rv.RevocationSetup, current: Optional[dict]):
    state = {
        "group": setup.group.name,
        "coeffs": [str(c) for c in setup.coeffs],
        "pool": [[str(s.x), str(s.y)] for s in setup.pool],
        "n_max": setup.n_max,
        "shares": {cid: [str(s.x), str(s.y)] for cid, s in setup.shares.items()},
        "current": current,
    }
    _write(Path(cfg.dir) / "revocation.json", json.dumps(state, indent=1).encode())


def _load_rv_state(cfg) -> tuple[rv.RevocationSetup, Optional[dict]]:
    raw = json.loads(_read(Path(cfg.dir) / "revocation.json"))
    grp = {g.name: g for g in (rv.SCHNORR1024, rv.TOY_SCHNORR)}[raw["group"]]
    setup = rv.RevocationSetup(grp, [int(c) for c in raw["coeffs"]],
                               [rv.Share(int(x), int(y)) for x, y in raw["pool"]],
                               raw["n_max"],
                               {cid: rv.Share(int(x), int(y)) for cid, (x, y) in raw["shares"].items()})
    return setup, raw["current"]


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {text!r}") from None


def leaf_date(leaf: NodeId, year: int) -> dt.date:
    """A date that maps to ``leaf``: the earliest day of that leaf."""
    month, week, day = leaf.index[:3]
    return dt.date(year, month, 7 * (week - 1) + day)


def _policy_date(pp, name: str) -> dt.date:
    path = scheme.parse_policy(name, pp.tree)
    if path is None:
        raise CliError(ExitCode.MALFORMED, f"content name {name!r} carries no policy")
    return leaf_date(path[0], pp.year)


# ---------------------------------------------------------------- commands

def cmd_setup(cfg: RunConfig, args) -> int:
    grp = default_group(cfg.group)
    pp, ms, _ = scheme.producer_setup(cfg.year, cfg.delta_t, rng_for(cfg, "setup"), grp)
    d = Path(cfg.dir)
    _write(d / "params.bin", pp.to_bytes())
    _write(d / "master.bin", ms.to_bytes(grp))
    degree = args.revocation_degree or cfg.revocation_degree
    n_max = args.n_max or cfg.n_max
    setup = rv.revocation_setup(degree, n_max, rng_for(cfg, "setup/revocation"), _rv_group(cfg))
    _save_rv_state(cfg, setup, None)
    print(f"setup: year {cfg.year}, group {cfg.group}, delta_t {cfg.delta_t}s -> {d}")
    return ExitCode.OK


def cmd_register(cfg: RunConfig, args) -> int:
    pp = _load_pp(cfg)
    ms = _load_ms(cfg, pp)
    setup, current = _load_rv_state(cfg)
    rng = rng_for(cfg, f"register/{args.id}")
    key = scheme.register_consumer(ms, pp, args.id.encode("utf-8"), args.start, args.end,
                                   pp.tree, rng)
    share = rv.issue_share(setup, args.id, rng)
    d = Path(cfg.dir) / "keys"
    _write(d / f"{args.id}.key", key.to_bytes())
    _write(d / f"{args.id}.share", json.dumps({"x": str(share.x), "y": str(share.y)}).encode())
    _save_rv_state(cfg, setup, current)
    print(f"register: {args.id} cover {{{', '.join(n.label for n in key.cover)}}}")
    return ExitCode.OK


def cmd_publish(cfg: RunConfig, args) -> int:
    pp = _load_pp(cfg)
    ms = _load_ms(cfg, pp)
    setup, current = _load_rv_state(cfg)
    plaintext = _read(Path(args.input))
    filename = args.filename or Path(args.input).name
    name = scheme.content_name(cfg.prefix, args.date, filename, pp.tree)
    rekey, ref = None, ""
    if current is not None:
        rekey = rv.rekey_bytes(int(current["k"]), setup.group)
        ref = current["name"]
    ct = scheme.publish(ms, pp, args.date, name, plaintext, pp.tree,
                        rng_for(cfg, f"publish/{name}"), rekey, ref)
    out = Path(args.out) if args.out else Path(cfg.dir) / "content" / f"{filename}.ct"
    _write(out, ct.to_bytes())
    print(name)
    return ExitCode.OK


def _load_key(pp, path: str) -> scheme.ConsumerKey:
    return scheme.ConsumerKey.from_bytes(_read(Path(path)), pp, pp.tree)


def cmd_sign(cfg: RunConfig, args) -> int:
    pp = _load_pp(cfg)
    key = _load_key(pp, args.key)
    ts = args.ts if args.ts is not None else int(time.time())
    date = args.date or _policy_date(pp, args.name)
    sig = scheme.sign_interest(key, pp, args.name, ts, date, pp.tree,
                               rng_for(cfg, f"sign/{ts}/{args.name}"))
    out = Path(args.out) if args.out else Path(cfg.dir) / "sig.bin"
    _write(out, sig.to_bytes())
    print(f"sign: node {sig.node} ts {ts} -> {out}")
    return ExitCode.OK


def cmd_verify(cfg: RunConfig, args) -> int:
    pp = _load_pp(cfg)
    data = _read(Path(args.sig))
    try:
        sig = scheme.InterestSignature.from_bytes(data, pp.group)
    except DecodeError:
        print("reject(malformed)")
        return ExitCode.MALFORMED
    now = args.now if args.now is not None else int(time.time())
    date = args.date or _policy_date(pp, sig.cn)
    verdict = scheme.verify_interest(pp, sig, now, date, pp.tree)
    print("accept" if verdict else f"reject({verdict.value})")
    return _VERDICT_EXIT[verdict]


def cmd_decrypt(cfg: RunConfig, args) -> int:
    pp = _load_pp(cfg)
    key = _load_key(pp, args.key)
    ct = scheme.Ciphertext.from_bytes(_read(Path(args.ct)), pp.group)
    rekey = None
    if ct.revocation_ref:
        seq = ct.revocation_ref.rstrip("/").rsplit("/", 1)[-1]
        header = rv.RevocationHeader.from_bytes(
            _read(Path(cfg.dir) / "revocation" / f"{seq}.hdr"))
        share_path = Path(args.share) if args.share else \
            Path(cfg.dir) / "keys" / f"{key.consumer_id.decode('utf-8')}.share"
        raw = json.loads(_read(share_path))
        try:
            k = rv.recover_key(header, rv.Share(int(raw["x"]), int(raw["y"])))
        except rv.DegenerateShare:
            raise CliError(ExitCode.AEAD_FAILURE,
                           "decrypt: revoked, no content key derivable") from None
        rekey = rv.rekey_bytes(k, header.group)
    plaintext = scheme.decrypt(key, pp, ct, pp.tree, rekey)
    if args.out:
        _write(Path(args.out), plaintext)
    else:
        sys.stdout.buffer.write(plaintext)
    return ExitCode.OK


def cmd_revoke(cfg: RunConfig, args) -> int:
    setup, current = _load_rv_state(cfg)
    seq = (current["seq"] + 1) if current else 1
    rng = rng_for(cfg, f"revoke/{seq}")
    k = rv.random_rekey(setup.group, rng)
    header = rv.make_header(setup, args.id, k, rng)
    name = f"{cfg.prefix.rstrip('/')}/revocation/seq={seq}"
    _write(Path(cfg.dir) / "revocation" / f"seq={seq}.hdr", header.to_bytes())
    _save_rv_state(cfg, setup, {"seq": seq, "name": name, "k": str(k)})
    print(f"revoke: {', '.join(args.id) or '(none)'} -> {name}")
    return ExitCode.OK


def cmd_bench(cfg: RunConfig, args) -> int:
    suites = benchmod.SUITES if args.suite == "all" else [args.suite or cfg.bench_suite]
    trials = args.trials or cfg.bench_trials
    rows = []
    for suite in suites:
        rows += benchmod.run_suite(suite, trials, cfg.seed or 0, cfg.group)
    if args.out:
        _write(Path(args.out), benchmod.to_csv(rows).encode())
    print(benchmod.to_table(rows))
    return ExitCode.OK


def cmd_sim(cfg: RunConfig, args) -> int:
    topo = load_topology(args.topology or cfg.topology or None)
    overrides = {}
    for attr in ("consumers", "start", "loss_rate", "window", "verify_workers"):
        val = getattr(args, attr)
        if val is not None:
            overrides[attr] = val
    if args.segments is not None:
        overrides["file_size"] = args.segments * cfg.scenario.segment_size
    contents = simmod.SCENARIOS if args.content == "all" else \
        [args.content or cfg.scenario.content]
    out_dir = Path(args.out_dir) if args.out_dir else Path(cfg.dir) / "sim"
    seed = cfg.seed or 0
    means = {}
    for content in contents:
        try:
            if hasattr(args, "group"):
                overrides["group"] = args.group
            scenario = dataclasses.replace(cfg.scenario, content=content, **overrides)
        except ValueError as exc:
            raise CliError(ExitCode.CONFIG, str(exc)) from None
        m = simmod.run_fetch(topo, scenario, seed)
        _write(out_dir / f"consumers_{content}.csv", m.consumer_csv().encode())
        _write(out_dir / f"nodes_{content}.csv", m.node_csv().encode())
        s = m.summary()
        means[content] = m.mean_transfer_time
        print(f"[{content}] consumers={s['consumers']} segments={s['segments']} "
              f"mean_transfer_time={s['mean_transfer_time_s']:.4f}s "
              f"mean_goodput={8 * s['mean_goodput_Bps'] / 1e6:.2f}Mbps "
              f"interests/consumer={s['mean_interests_per_consumer']:.1f} "
              f"producer_egress={s['producer_egress_data']} ok={s['all_content_ok']}")
    if len(means) > 1 and "plain" in means:
        base = means["plain"]
        for content, t in means.items():
            if content != "plain":
                print(f"{content} vs plain: {100 * (t - base) / base:+.2f}%")
    return ExitCode.OK


def cmd_config(cfg: RunConfig, args) -> int:
    text = cfg.to_text()
    if args.write:
        _write(Path(args.write), text.encode())
    else:
        print(text, end="")
    return ExitCode.OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="sectioned key=value file")
    common.add_argument("--dir", default=argparse.SUPPRESS, help="artifact directory")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--group", choices=("SS511", "TOY"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="ndnsub", parents=[common],
                                description="Time-based subscription access control for NDN.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("setup", parents=[common], help="generate producer parameters")
    s.add_argument("--year", type=int, default=argparse.SUPPRESS)
    s.add_argument("--delta-t", dest="delta_t", type=int, default=argparse.SUPPRESS)
    s.add_argument("--prefix", default=argparse.SUPPRESS)
    s.add_argument("--revocation-degree", type=int)
    s.add_argument("--n-max", type=int)
    s.set_defaults(func=cmd_setup)

    s = sub.add_parser("register", parents=[common], help="issue a subscription key")
    s.add_argument("--id", required=True)
    s.add_argument("--start", type=_date, required=True)
    s.add_argument("--end", type=_date, required=True)
    s.set_defaults(func=cmd_register)

    s = sub.add_parser("publish", parents=[common], help="encrypt a file for a date")
    s.add_argument("--input", required=True)
    s.add_argument("--date", type=_date, required=True)
    s.add_argument("--filename")
    s.add_argument("--prefix", default=argparse.SUPPRESS)
    s.add_argument("--out")
    s.set_defaults(func=cmd_publish)

    s = sub.add_parser("sign", parents=[common], help="sign an interest")
    s.add_argument("--key", required=True)
    s.add_argument("--name", required=True, help="content name to request")
    s.add_argument("--ts", type=int, help="timestamp, integer seconds (default now)")
    s.add_argument("--date", type=_date, help="policy date (default from the name)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sign)

    s = sub.add_parser("verify", parents=[common], help="edge-router signature check")
    s.add_argument("--sig", required=True)
    s.add_argument("--now", type=int, help="router clock, integer seconds (default now)")
    s.add_argument("--date", type=_date)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("decrypt", parents=[common], help="decrypt a ciphertext")
    s.add_argument("--key", required=True)
    s.add_argument("--ct", required=True)
    s.add_argument("--share", help="revocation share (default keys/<id>.share)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_decrypt)

    s = sub.add_parser("revoke", parents=[common], help="broadcast a new rekey excluding consumers")
    s.add_argument("--id", action="append", default=[])
    s.add_argument("--prefix", default=argparse.SUPPRESS)
    s.set_defaults(func=cmd_revoke)

    s = sub.add_parser("bench", parents=[common], help="micro-benchmarks")
    s.add_argument("--suite", choices=benchmod.SUITES + ("all",))
    s.add_argument("--trials", type=int)
    s.add_argument("--out", help="CSV output path")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("sim", parents=[common], help="run fetch scenarios in the simulator")
    s.add_argument("--content", choices=simmod.SCENARIOS + ("all",))
    s.add_argument("--consumers", type=int)
    s.add_argument("--segments", type=int)
    s.add_argument("--start", choices=("concurrent", "staggered", "sequential"))
    s.add_argument("--loss-rate", dest="loss_rate", type=float)
    s.add_argument("--window", type=int)
    s.add_argument("--verify-workers", dest="verify_workers", type=int)
    s.add_argument("--topology")
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_sim)

    s = sub.add_parser("config", parents=[common], help="print or write the effective config")
    s.add_argument("--write")
    s.set_defaults(func=cmd_config)
    return p


_ERROR_CODES = [
    (FileNotFoundError, ExitCode.MISSING_INPUT),
    (DecodeError, ExitCode.MALFORMED),
    (ParseError, ExitCode.MALFORMED),
    (DisconnectedGraph, ExitCode.MALFORMED),
    (scheme.NoCoverNode, ExitCode.NOT_COVERED),
    (scheme.AeadFailure, ExitCode.AEAD_FAILURE),
    (scheme.MissingRekey, ExitCode.REVOCATION),
    (rv.TooManyRevoked, ExitCode.REVOCATION),
    (rv.PoolExhausted, ExitCode.REVOCATION),
    (rv.DuplicateConsumer, ExitCode.REVOCATION),
    (simmod.Unsatisfiable, ExitCode.UNSATISFIABLE),
    (YearMismatch, ExitCode.USAGE),
    (InvalidRange, ExitCode.USAGE),
]


def main(argv=None, environ=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args, environ)
        return int(args.func(cfg, args))
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(exc.code)
    except KeyError as exc:
        # unknown consumer id or tree label
        print(f"error: unknown {exc}", file=sys.stderr)
        return int(ExitCode.USAGE)
    except Exception as exc:
        for cls, code in _ERROR_CODES:
            if isinstance(exc, cls):
                print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
                return int(code)
        raise


if __name__ == "__main__":
    sys.exit(main())
