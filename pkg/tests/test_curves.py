import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goodman_lab.curves import (MixedSign, NonTransverseOverlap, NotEmbedded, PLCurve, TubeTooWide,
                                check_generic, check_steadiness, classify_sign, enumerate_crossings,
                                insert_braid, point_period)
from goodman_lab.exact_algebra import HomologyClass, NonPrimitiveClass
from goodman_lab.flow_model import SuspensionFlow
from goodman_lab.oracles import rasterized_crossing_count


def oracle(flow, c, K, k_min=1):
    return rasterized_crossing_count(flow.monodromy, c.vertices, tuple(c.homology), c.vertices,
                                     tuple(c.homology), K, k_min=k_min, c1_heights=c.heights,
                                     c2_heights=c.heights)


def test_sign_classification(cat, scene):
    assert classify_sign(cat, PLCurve.straight((0, 1))) == "positive"
    # slope of (1, 0) is -1 in the cat-map frame
    assert classify_sign(cat, PLCurve.straight((1, 0))) == "negative"
    assert classify_sign(cat, scene("mixed_sign").curve("stair")) == "mixed"
    with pytest.raises(MixedSign):
        check_steadiness(cat, scene("mixed_sign").curve("stair"))


def test_curve_validation():
    # a doubled class wraps twice around a closed geodesic
    with pytest.raises((NonPrimitiveClass, NotEmbedded)):
        PLCurve.straight((2, 2))
    with pytest.raises(NotEmbedded):
        PLCurve(((F(0), F(0)), (F(1), F(0))), HomologyClass(1, 1))


def test_image_overlap_flagged(cat):
    c = PLCurve.straight((0, 1))
    with pytest.raises(NonTransverseOverlap):
        enumerate_crossings(cat, c, c.transported(cat.monodromy), 1)


def test_straight_crossings_match_oracle(cat):
    c = PLCurve.straight((0, 1))
    ex = enumerate_crossings(cat, c, c, 3)
    assert len(ex) == oracle(cat, c, 3) == 12
    # (0,1) . A^k (0,1) counts the crossings at each return: 1, 3, 8
    assert [sum(x.k == k for x in ex) for k in (1, 2, 3)] == [1, 3, 8]


@pytest.mark.parametrize("name,curve", [("c1_seeds", "seed_a"), ("c1_seeds", "seed_c"),
                                        ("braid_positive", "braided"), ("generic_period5", "pair")])
def test_crossings_match_oracle_per_k(scene, name, curve):
    sc = scene(name)
    fl = sc.flow()
    c = sc.curve(curve, fl)
    for k in range(1, 5):
        assert len(enumerate_crossings(fl, c, c, k, k_min=k, slopes=False)) == oracle(fl, c, k, k)


def test_constant_slope_steady(scene):
    for i in range(1, 6):
        sc = scene(f"constant_slope_{i}")
        fl = sc.flow()
        for name in sc.curves:
            rep = check_steadiness(fl, sc.curve(name, fl), with_slack=False)
            assert rep.verdict == "steady" and not rep.violations, (i, name)


def test_negative_constant_slope_steady(cat):
    rep = check_steadiness(cat, PLCurve.straight((1, 0)))
    assert rep.sign == "negative" and rep.steady


def test_braids(cat, scene):
    c = PLCurve.straight((0, 1))
    same = insert_braid(cat, c, [])
    assert same.vertices == c.vertices and same.homology == c.homology
    pos = check_steadiness(cat, insert_braid(cat, c, [1]), with_slack=False)
    assert pos.verdict == "unsteady" and len(pos.violations) == 1
    b = insert_braid(cat, c, [1])
    v = pos.violations[0]
    assert b.height_at(v.x_param) != 0 and b.height_at(v.y_param) != 0
    assert check_steadiness(cat, insert_braid(cat, c, [-1]), with_slack=False).verdict == "steady"
    with pytest.raises(TubeTooWide):
        insert_braid(cat, c, [1], width=F(2))
    with pytest.raises(ValueError):
        insert_braid(cat, c, [0])


def test_generic_period5(cat, scene):
    sc = scene("generic_period5")
    pair = sc.curve("pair", cat)
    assert point_period(cat.monodromy, pair.vertex(0), 5) == 5
    rep = check_generic(cat, pair, 5)
    assert not rep.generic and rep.witness == (0, 1, 2)
    assert check_generic(cat, sc.curve("single", cat), 5).generic
    # below the period the orbit is indistinguishable from an infinite one
    assert check_generic(cat, pair, 4).generic


def test_single_turn_generic(cat):
    # two vertices on a class-(1,1) curve, so the second one is the only other turn
    c = PLCurve(((F(88, 97), F(59, 89)), (F(18403, 9700), F(3166, 2225))), HomologyClass(1, 1))
    assert check_generic(cat, c, 10).generic


def test_slack_is_positive_and_sound(cat, scene):
    seed = scene("c1_seeds").curve("seed_a", cat)
    rep = check_steadiness(cat, seed)
    assert rep.steady and rep.delta_star > 0
    rng = random.Random(7)
    q = 2 ** 20
    for _ in range(100):
        verts = [(x + rep.delta_star * F(rng.randint(1 - q, q - 1), q),
                  y + rep.delta_star * F(rng.randint(1 - q, q - 1), q)) for x, y in seed.vertices]
        assert check_steadiness(cat, seed.with_vertices(verts), with_slack=False).steady


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 16 - 1), st.integers(0, 2 ** 16 - 1))
def test_transport_invariance(i, j):
    # steadiness does not depend on where along the flow the curve is drawn
    flow = SuspensionFlow.from_rows([[2, 1], [1, 1]])
    base = (F(i, 2 ** 16), F(j, 2 ** 16))
    c = PLCurve.straight((0, 1), base, pieces=2)
    a = check_steadiness(flow, c, with_slack=False)
    b = check_steadiness(flow, c.transported(flow.monodromy), with_slack=False)
    assert a.verdict == b.verdict == "steady"


def test_seed_transport_invariance(cat, scene):
    for name in ("seed_a", "seed_b", "seed_c"):
        c = scene("c1_seeds").curve(name, cat)
        assert check_steadiness(cat, c.transported(cat.monodromy), with_slack=False).verdict == "steady"
