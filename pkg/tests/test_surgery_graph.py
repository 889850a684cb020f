import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goodman_lab.exact_algebra import HomologyClass, Mat2Z, twist_matrix
from goodman_lab.surgery_graph import (GVertex, InvalidVertex, branch_valid, edge_target, g1_path, make_edge,
                                       neighbors, random_vertex, reachable, verify_g1_connected,
                                       verify_level_monotone, verify_predecessor, vertex_with, witnesses)

vertices = st.builds(lambda seed, bound: random_vertex(random.Random(seed), bound),
                     st.integers(0, 10 ** 6), st.integers(1, 25))
witness = st.tuples(st.integers(-12, 12), st.integers(-12, 0)).filter(lambda w: w != (0, 0))


def test_vertex_validation():
    with pytest.raises(InvalidVertex):
        GVertex.of(1, 0, 0, 1)
    with pytest.raises(InvalidVertex):
        GVertex(Mat2Z(2, 0, 0, 1, det_constraint=None))
    assert GVertex.g1(3, 4).matrix.rows() == ((3, -11), (-1, 4))


def test_generator_edges():
    v = GVertex.of(0, 1, -1, 0)
    up = make_edge(v, (1, 0), "positive")
    assert up.target.matrix.rows() == ((1, 1), (-1, 0))
    down = make_edge(up.target, (-1, 0), "negative")
    assert down.target == v
    # d moves by one along the (a, -1) witness
    w = GVertex.g1(2, 3)
    e = make_edge(w, (2, -1), "positive")
    assert e.target.matrix.a == 2 and e.target.matrix.d in (2, 4) and e.target.level == 1


def test_ac_witness_shears_b_and_d():
    v = vertex_with(3, -5, 0)
    a, b, c, d = v.matrix.key()
    targets = {make_edge(v, (a, c), br).target.key() for br in ("positive", "negative")
               if branch_valid(v, (a, c), br)}
    assert targets <= {(a, b + a, c, d + c), (a, b - a, c, d - c)}
    assert targets


def test_invalid_witness_rejected():
    v = GVertex.of(0, 1, -1, 0)
    assert not branch_valid(v, (1, 1), "positive")
    with pytest.raises(ValueError):
        make_edge(v, (1, 1), "positive")


@settings(max_examples=300)
@given(vertices, witness, st.sampled_from(["positive", "negative"]))
def test_edge_formula_is_a_twist(v, w, br):
    if not branch_valid(v, w, br) or not HomologyClass(*w).is_primitive:
        return
    n = 1 if br == "positive" else -1
    tgt = edge_target(v, w, br)
    assert tgt == twist_matrix(HomologyClass(*w), n) @ v.matrix
    assert tgt.c <= v.matrix.c  # levels never drop


def test_level_unchanged_along_horizontal_witnesses():
    v = vertex_with(4, -7, 2)
    for w in [(1, 0), (-1, 0)]:
        for br in ("positive", "negative"):
            if branch_valid(v, w, br):
                assert make_edge(v, w, br).target.level == v.level


def test_negative_branch_raises_level():
    v = vertex_with(3, -4, 1)
    a, _, c, _ = v.matrix.key()
    for w in witnesses(4):
        x0, y0 = w
        s = a * y0 - c * x0
        if y0 < 0 and s < 0:
            assert make_edge(v, w, "negative").target.level > v.level


def test_level_monotone_sample():
    rep = verify_level_monotone(2000, 20, 10, seed=3)
    assert rep.passed and rep.edges_checked == 2000


def test_neighbors_unique_and_valid():
    v = GVertex.of(0, 1, -1, 0)
    es = neighbors(v, 2)
    keys = [e.target.key() for e in es]
    assert len(keys) == len(set(keys))
    assert all(e.valid() and e.replay() for e in es)


def test_g1_connected_small_box():
    rep = verify_g1_connected(4)
    assert rep.connected and rep.pairs == rep.vertices ** 2
    assert rep.replay_failures == 0


def test_g1_direct_paths():
    src, tgt = GVertex.g1(-3, 4), GVertex.g1(5, -2)
    path = g1_path(src, tgt)
    cur = src.matrix
    for e in path:
        cur = twist_matrix(e.witness, 1 if e.branch == "positive" else -1) @ cur
    assert cur == tgt.matrix


def test_predecessor_recipe_cases():
    # |d| < |c| with d >= 0: witness (-b, -d)
    v = vertex_with(2, -5, 2)
    ch = verify_predecessor(v)
    assert ch.replays() and ch.head.level < v.level
    a, b, c, d = ch.reduced.matrix.key()
    if d >= 0:
        assert ch.head.matrix.key() == (a + b, b, c + d, d)
    else:
        assert ch.head.matrix.key() == (a - b, b, c - d, d)
    w = vertex_with(3, -7, -2)
    ch = verify_predecessor(w)
    assert ch.replays() and ch.lexicographic_drops()


def test_predecessors_random():
    rng = random.Random(11)
    for _ in range(50):
        v = random_vertex(rng, 20, level=rng.randint(2, 10))
        ch = verify_predecessor(v)
        assert ch.replays() and ch.head.level < v.level


def test_reach():
    a, b = GVertex.of(0, 1, -1, 0), GVertex.of(1, 1, -1, 0)
    assert reachable(a, a, 2, 4).path == []
    for s, t in ((a, b), (b, a)):
        res = reachable(s, t, 2, 4)
        assert res.status == "found" and len(res.path) == 1 and res.replays(s, t)
    long = reachable(GVertex.g1(-3, 4), GVertex.g1(5, -2), 3, 20)
    assert long.status == "found" and long.replays(GVertex.g1(-3, 4), GVertex.g1(5, -2))
    down = reachable(vertex_with(1, -2, 0), a, 4, 8)
    assert down.status == "exhausted"
