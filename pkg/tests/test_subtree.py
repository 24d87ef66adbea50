import datetime as dt
import random

import pytest

from oracles import check_cover, greedy_cover
from ndnsub.subtree import (InvalidRange, PolicyTree, YearMismatch, covers, date_to_leaf,
                            leaf_range, min_cover, path_to_root, policy_path)

TREE = PolicyTree(2023)


def labels(nodes):
    return [n.label for n in nodes]


def test_shape():
    assert len(TREE.children(TREE.root)) == 12
    assert all(len(TREE.children(m)) == 4 for m in TREE.children(TREE.root))
    assert TREE.leaf_count == 336 and len(TREE.leaves()) == 336
    assert len(list(TREE.nodes())) == 1 + 12 + 48 + 336
    assert TREE.height == 4
    assert TREE.root.label == "y2023"


def test_labels_unique_and_levels():
    nodes = list(TREE.nodes())
    assert len({n.label for n in nodes}) == len(nodes)
    n = TREE.by_label("m8w3d6")
    assert n.index == (8, 3, 6) and n.level == "day"
    assert TREE.by_label("m8w3").level == "week"
    assert TREE.by_label("m8").level == "month"
    assert TREE.root.level == "root"


@pytest.mark.parametrize("date,label", [
    (dt.date(2023, 1, 7), "m1w1d7"),
    (dt.date(2023, 8, 20), "m8w3d6"),
    (dt.date(2023, 1, 31), "m1w4d7"),
    (dt.date(2023, 1, 29), "m1w4d7"),
    (dt.date(2023, 1, 28), "m1w4d7"),
    (dt.date(2023, 1, 22), "m1w4d1"),
    (dt.date(2023, 2, 1), "m2w1d1"),
])
def test_date_to_leaf(date, label):
    assert date_to_leaf(date, TREE).label == label


def test_date_to_leaf_year_mismatch():
    with pytest.raises(YearMismatch):
        date_to_leaf(dt.date(2024, 1, 1), TREE)


def test_policy_path():
    assert labels(policy_path(dt.date(2023, 1, 7), TREE)) == ["m1w1d7", "m1w1", "m1", "y2023"]
    assert labels(policy_path(dt.date(2023, 8, 20), TREE)) == ["m8w3d6", "m8w3", "m8", "y2023"]
    d = dt.date(2023, 1, 1)
    while d.year == 2023:
        path = policy_path(d, TREE)
        assert len(path) == 4
        for a, b in zip(path, path[1:]):
            assert TREE.parent(a) == b
        d += dt.timedelta(days=1)


def test_min_cover_examples():
    assert labels(min_cover(TREE.by_label("m1w1d1"), TREE.by_label("m1w4d7"), TREE)) == ["m1"]
    assert labels(min_cover(TREE.by_label("m3w2d4"), TREE.by_label("m3w2d4"), TREE)) == ["m3w2d4"]
    assert labels(min_cover(TREE.leaf_at(0), TREE.leaf_at(335), TREE)) == ["y2023"]


def test_min_cover_jan7_to_aug20_matches_oracle():
    lo, hi = TREE.leaf_position(TREE.by_label("m1w1d7")), TREE.leaf_position(TREE.by_label("m8w3d6"))
    cover = min_cover(TREE.leaf_at(lo), TREE.leaf_at(hi), TREE)
    assert set(cover) == greedy_cover(TREE, lo, hi)
    check_cover(TREE, cover, lo, hi)
    assert labels(cover) == ["m1w1d7", "m1w2", "m1w3", "m1w4", "m2", "m3", "m4", "m5", "m6",
                             "m7", "m8w1", "m8w2", "m8w3d1", "m8w3d2", "m8w3d3", "m8w3d4",
                             "m8w3d5", "m8w3d6"]


def test_min_cover_random_ranges_against_oracle():
    rng = random.Random(21)
    for _ in range(200):
        lo = rng.randrange(336)
        hi = rng.randrange(lo, 336)
        cover = min_cover(TREE.leaf_at(lo), TREE.leaf_at(hi), TREE)
        assert set(cover) == greedy_cover(TREE, lo, hi)
        check_cover(TREE, cover, lo, hi)
        assert cover == sorted(cover, key=lambda n: TREE.leaf_span(n)[0])


def test_min_cover_size_bound_exhaustive():
    worst = 0
    for lo in range(336):
        for hi in range(lo, 336):
            worst = max(worst, len(min_cover(TREE.leaf_at(lo), TREE.leaf_at(hi), TREE)))
    assert worst <= 29


def test_min_cover_invalid_range():
    with pytest.raises(InvalidRange):
        min_cover(TREE.leaf_at(5), TREE.leaf_at(4), TREE)
    with pytest.raises(InvalidRange):
        leaf_range(dt.date(2023, 5, 1), dt.date(2023, 4, 1), TREE)


def test_covers_examples():
    m1 = [TREE.by_label("m1")]
    assert covers(m1, policy_path(dt.date(2023, 1, 7), TREE)).label == "m1"
    assert covers(m1, policy_path(dt.date(2023, 2, 1), TREE)) is None


def test_covers_exhaustive_sweep():
    rng = random.Random(22)
    days = [dt.date(2023, 1, 1) + dt.timedelta(days=i) for i in range(365)]
    for _ in range(50):
        a, b = sorted(rng.sample(days, 2))
        cover = min_cover(*leaf_range(a, b, TREE), TREE)
        lo, hi = TREE.leaf_position(date_to_leaf(a, TREE)), TREE.leaf_position(date_to_leaf(b, TREE))
        for pos in range(336):
            hit = covers(cover, path_to_root(TREE.leaf_at(pos), TREE))
            assert (hit is not None) == (lo <= pos <= hi)


def test_extended_tree_heights():
    for h in (2, 3, 4, 5, 9):
        t = PolicyTree.extended(2023, h)
        assert t.height == h
        assert len(path_to_root(t.leaf_at(t.leaf_count - 1), t)) == h
    assert PolicyTree.extended(2023, 4) == TREE
