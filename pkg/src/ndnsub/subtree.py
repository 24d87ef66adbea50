"""Time-based subscription policy tree.

The calendar tree has a year at the root, 12 months, 4 weeks per month and
7 days per week (336 leaves).  Real dates are folded onto it by
:func:`date_to_leaf`; days 29-31 saturate onto the last leaf of the month.

Labels are built by concatenating one ``<prefix><index>`` token per level,
e.g. ``m8w3d6``; the root is ``y<year>``.  Labels are also the byte strings
hashed as node identities, so they must stay stable.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

__all__ = [
    "NodeId", "PolicyTree", "YearMismatch", "InvalidRange",
    "date_to_leaf", "min_cover", "policy_path", "covers", "leaf_range",
    "CALENDAR_FANOUT", "CALENDAR_PREFIXES",
]

CALENDAR_FANOUT = (12, 4, 7)
CALENDAR_PREFIXES = ("m", "w", "d")
LEVEL_NAMES = ("root", "month", "week", "day")


class YearMismatch(ValueError):
    pass


class InvalidRange(ValueError):
    pass


@dataclass(frozen=True, order=True)
class NodeId:
    """A tree node; ``index`` is the 1-based child index at each level below the root."""

    index: tuple[int, ...]
    label: str = field(compare=False)

    @property
    def depth(self) -> int:
        return len(self.index)

    @property
    def level(self) -> str:
        if self.depth < len(LEVEL_NAMES):
            return LEVEL_NAMES[self.depth]
        return f"level{self.depth}"

    def __str__(self):
        return self.label


class PolicyTree:
    """A complete tree with a fixed fan-out per level.

    The default shape is the 12/4/7 calendar.  Taller trees (used only for
    benchmarking publication cost) append extra levels with their own
    fan-out and prefix.
    """

    def __init__(self, year: int, fanout: Sequence[int] = CALENDAR_FANOUT,
                 prefixes: Sequence[str] = CALENDAR_PREFIXES):
        if len(fanout) != len(prefixes):
            raise ValueError("fanout and prefixes differ in length")
        if len(set(prefixes)) != len(prefixes):
            raise ValueError("level prefixes must be distinct")
        self.year = year
        self.fanout = tuple(fanout)
        self.prefixes = tuple(prefixes)
        self.root = NodeId((), f"y{year}")
        self._by_label: dict[str, NodeId] = {}

    @classmethod
    def extended(cls, year: int, height: int) -> "PolicyTree":
        """A tree whose root-to-leaf path has ``height`` nodes.

        Heights up to 4 truncate the calendar shape; taller trees add
        binary levels below the days.
        """
        if height < 2:
            raise ValueError("height must be at least 2")
        levels = height - 1
        fanout = list(CALENDAR_FANOUT[:levels])
        prefixes = list(CALENDAR_PREFIXES[:levels])
        for k in range(levels - len(fanout)):
            fanout.append(2)
            prefixes.append(f"s{k}_")
        return cls(year, fanout, prefixes)

    def __repr__(self):
        return f"PolicyTree(year={self.year}, fanout={self.fanout})"

    def __eq__(self, other):
        return (isinstance(other, PolicyTree) and self.year == other.year
                and self.fanout == other.fanout and self.prefixes == other.prefixes)

    def __hash__(self):
        return hash((self.year, self.fanout, self.prefixes))

    @property
    def height(self) -> int:
        """Number of nodes on a root-to-leaf path."""
        return len(self.fanout) + 1

    @cached_property
    def leaf_count(self) -> int:
        n = 1
        for f in self.fanout:
            n *= f
        return n

    def node(self, index: Sequence[int]) -> NodeId:
        index = tuple(index)
        if len(index) > len(self.fanout):
            raise ValueError(f"index {index} deeper than tree")
        for i, f in zip(index, self.fanout):
            if not 1 <= i <= f:
                raise ValueError(f"index {index} out of range")
        if not index:
            return self.root
        label = "".join(f"{p}{i}" for p, i in zip(self.prefixes, index))
        return NodeId(index, label)

    def by_label(self, label: str) -> NodeId:
        if not self._by_label:
            self._by_label = {n.label: n for n in self.nodes()}
        try:
            return self._by_label[label]
        except KeyError:
            raise KeyError(f"no node labelled {label!r} in {self!r}") from None

    def parent(self, n: NodeId) -> Optional[NodeId]:
        if n.depth == 0:
            return None
        return self.node(n.index[:-1])

    def children(self, n: NodeId) -> list[NodeId]:
        if n.depth == len(self.fanout):
            return []
        return [self.node(n.index + (i,)) for i in range(1, self.fanout[n.depth] + 1)]

    def nodes(self) -> Iterable[NodeId]:
        """All nodes, pre-order."""
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(self.children(n)))

    def leaves(self) -> list[NodeId]:
        return [n for n in self.nodes() if n.depth == len(self.fanout)]

    def is_leaf(self, n: NodeId) -> bool:
        return n.depth == len(self.fanout)

    def leaf_position(self, n: NodeId) -> int:
        """0-based left-to-right position of a leaf."""
        if not self.is_leaf(n):
            raise ValueError(f"{n} is not a leaf")
        pos = 0
        for i, f in zip(n.index, self.fanout):
            pos = pos * f + (i - 1)
        return pos

    def leaf_at(self, pos: int) -> NodeId:
        if not 0 <= pos < self.leaf_count:
            raise ValueError("leaf position out of range")
        index = []
        for f in reversed(self.fanout):
            pos, r = divmod(pos, f)
            index.append(r + 1)
        return self.node(reversed(index))

    def leaf_span(self, n: NodeId) -> tuple[int, int]:
        """Inclusive range of leaf positions below ``n``."""
        width = 1
        for f in self.fanout[n.depth:]:
            width *= f
        first = 0
        for i, f in zip(n.index, self.fanout):
            first = first * f + (i - 1)
        first *= width
        return first, first + width - 1


def date_to_leaf(date: dt.date, tree: PolicyTree) -> NodeId:
    """Map a calendar date to its day leaf; days 29-31 clamp to week 4 day 7."""
    if tree.fanout[:3] != CALENDAR_FANOUT:
        raise ValueError("date mapping needs the calendar tree shape")
    if date.year != tree.year:
        raise YearMismatch(f"date {date} outside tree year {tree.year}")
    week = min((date.day + 6) // 7, 4)
    day = min(date.day - 7 * (week - 1), 7)
    index = (date.month, week, day) + (1,) * (len(tree.fanout) - 3)
    return tree.node(index)


def policy_path(date: dt.date, tree: PolicyTree) -> list[NodeId]:
    """``[leaf, parent, ..., root]`` for the leaf of ``date``."""
    return path_to_root(date_to_leaf(date, tree), tree)


def path_to_root(n: NodeId, tree: PolicyTree) -> list[NodeId]:
    out = [n]
    while (p := tree.parent(out[-1])) is not None:
        out.append(p)
    return out


def min_cover(start: NodeId, end: NodeId, tree: PolicyTree) -> list[NodeId]:
    """Canonical minimum cover of the leaves ``start..end`` (left to right)."""
    lo, hi = tree.leaf_position(start), tree.leaf_position(end)
    if lo > hi:
        raise InvalidRange(f"{start} is after {end}")
    out: list[NodeId] = []

    def walk(n: NodeId):
        a, b = tree.leaf_span(n)
        if b < lo or a > hi:
            return
        if lo <= a and b <= hi:
            out.append(n)
            return
        for c in tree.children(n):
            walk(c)

    walk(tree.root)
    return out


def leaf_range(start: dt.date, end: dt.date, tree: PolicyTree) -> tuple[NodeId, NodeId]:
    if start > end:
        raise InvalidRange(f"{start} is after {end}")
    return date_to_leaf(start, tree), date_to_leaf(end, tree)


def covers(cover: Iterable[NodeId], path: Sequence[NodeId]) -> Optional[NodeId]:
    """The node shared by a cover set and a policy path, if any.

    A cover is an antichain and a path is a chain, so at most one node can match.
    """
    on_path = set(path)
    hits = [n for n in cover if n in on_path]
    if len(hits) > 1:
        raise AssertionError("cover set is not an antichain")
    return hits[0] if hits else None
