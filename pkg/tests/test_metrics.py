import numpy as np
import pytest

from affectgrid.metrics import (
    EmptyPopulation,
    cluster_summary,
    emotion_census,
    find_clusters,
    negative_ratio,
    positive_ratio,
    trust_by_group,
)
from affectgrid.model import EMOTIONS, Emotion as E

from conftest import build_world, identity_matrix

M = {"g": identity_matrix(), "h": identity_matrix()}


def brute_force_clusters(specs, width, height, emotion):
    """Pairwise union-find using torus distance, independent of moore_neighbors."""
    idx = [i for i, s in enumerate(specs) if s[2] is emotion]
    parent = {i: i for i in idx}

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for a in idx:
        for b in idx:
            if a >= b:
                continue
            dx = abs(specs[a][0] - specs[b][0])
            dy = abs(specs[a][1] - specs[b][1])
            if min(dx, width - dx) <= 1 and min(dy, height - dy) <= 1:
                parent[find(a)] = find(b)
    sizes = {}
    for i in idx:
        sizes[find(i)] = sizes.get(find(i), 0) + 1
    return sorted(sizes.values(), reverse=True)


def random_specs(rng, width, height, n, palette=EMOTIONS):
    cells = rng.permutation(width * height)[:n]
    return [
        (int(c) % width, int(c) // width, palette[int(rng.integers(len(palette)))], "g")
        for c in cells
    ]


def test_census_examples():
    w = build_world(9, 9, [(i % 9, i // 9, E.SAD, "g") for i in range(40)], M)
    c = emotion_census(w)
    assert c.counts[E.SAD] == 40 and c.total == 40
    assert sum(v for e, v in c.counts.items() if e is not E.SAD) == 0

    empty = build_world(9, 9, [], M)
    assert emotion_census(empty).total == 0

    specs = [(i % 9, i // 9, [E.HAPPY, E.FEAR, E.NEUTRAL][0 if i < 13 else 1 if i < 27 else 2], "g") for i in range(40)]
    c = emotion_census(build_world(9, 9, specs, M))
    assert (c.counts[E.HAPPY], c.counts[E.FEAR], c.counts[E.NEUTRAL]) == (13, 14, 13)


def test_positive_ratio():
    def ratio(emos):
        return positive_ratio(emotion_census(build_world(9, 9, [(i % 9, i // 9, e, "g") for i, e in enumerate(emos)], M)))

    assert ratio([E.HAPPY] * 40) == 1.0
    assert ratio([E.SAD] * 40) == 0.0
    assert ratio([E.HAPPY] * 8 + [E.NEUTRAL] * 2 + [E.ANGRY] * 30) == 0.25
    with pytest.raises(EmptyPopulation):
        positive_ratio(emotion_census(build_world(9, 9, [], M)))


def test_ratios_partition():
    rng = np.random.default_rng(0)
    for _ in range(50):
        c = emotion_census(build_world(9, 9, random_specs(rng, 9, 9, 40), M))
        assert positive_ratio(c) + negative_ratio(c) == pytest.approx(1.0)


def test_cluster_examples():
    w = build_world(9, 9, [(0, 0, E.SAD, "g"), (0, 1, E.SAD, "g"), (0, 2, E.SAD, "g")], M)
    assert find_clusters(w, E.SAD) == [3]
    assert find_clusters(w, E.HAPPY) == []
    w = build_world(9, 9, [(0, 0, E.SAD, "g"), (8, 8, E.SAD, "g")], M)
    assert find_clusters(w, E.SAD) == [2]


def test_clusters_match_brute_force():
    rng = np.random.default_rng(12345)
    for case in range(1000):
        n = int(rng.integers(0, 26))
        specs = random_specs(rng, 5, 5, n, palette=EMOTIONS[:3])
        w = build_world(5, 5, specs, M, n_identities=max(n, 1))
        total = 0
        for e in EMOTIONS:
            got = find_clusters(w, e)
            assert got == brute_force_clusters(specs, 5, 5, e), case
            assert sum(got) == emotion_census(w).counts[e]
            total += sum(got)
        assert total == n


def test_cluster_summary_examples():
    three = build_world(9, 9, [(0, 0, E.SAD, "g"), (0, 1, E.SAD, "g"), (0, 2, E.SAD, "g")], M)
    (row,) = cluster_summary([three])
    assert (row.emotion, row.num_clusters, row.avg_size, row.max_size) == (E.SAD, 1, 3, 3)

    split = build_world(9, 9, [(0, 0, E.SAD, "g"), (4, 4, E.SAD, "g")], M)
    (row,) = cluster_summary([three, split])
    # ((1+2)/2, (3+1)/2, (3+1)/2)
    assert (row.num_clusters, row.avg_size, row.max_size) == (1.5, 2.0, 2.0)


def test_cluster_summary_skips_absent_runs():
    a = build_world(9, 9, [(0, 0, E.SAD, "g"), (4, 4, E.HAPPY, "g")], M)
    b = build_world(9, 9, [(0, 0, E.SAD, "g")], M)
    rows = {r.emotion: r for r in cluster_summary([a, b])}
    assert set(rows) == {E.HAPPY, E.SAD}
    assert rows[E.HAPPY].num_clusters == 1.0  # only run a counts


def test_cluster_summary_invariants():
    rng = np.random.default_rng(7)
    worlds = [build_world(9, 9, random_specs(rng, 9, 9, 40), M) for _ in range(10)]
    for r in cluster_summary(worlds):
        assert r.max_size >= r.avg_size >= 1 and r.num_clusters > 0


def test_trust_by_group():
    w = build_world(9, 9, [(0, 0, E.SAD, "g", 1.0), (3, 3, E.SAD, "g", 0.8), (6, 6, E.SAD, "h", 0.25)], M)
    rep = trust_by_group(w)
    assert rep.means["g"] == pytest.approx(0.9)
    assert rep.means["h"] == 0.25
