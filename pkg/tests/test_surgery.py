from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goodman_lab.curves import NotEmbedded, PLCurve
from goodman_lab.exact_algebra import ExtendedSlope, HomologyClass, Mat2Z, QuadExt
from goodman_lab.flow_model import SuspensionFlow
from goodman_lab.surgery import (DegenerateFrame, EpsilonInfeasible, InvalidProfile, QTooSmall, build_annulus,
                                 certify_thinness, compose_return_map, cone_iterate, curve_sign, differential,
                                 identity_profile, primitive_classes, thin_profile, twist_battery)

SQ5 = QuadExt(0, 1, 5)


@pytest.fixture(scope="module")
def ref(cat):
    return build_annulus(cat, PLCurve.straight((0, 1)), F(1, 2), ExtendedSlope.finite(-1))


def _numeric_frame(H, W, K):
    # independent float recomputation: eigenvectors scaled to second coordinate 1
    w, V = np.linalg.eig(np.array([[2.0, 1.0], [1.0, 1.0]]))
    u = V[:, np.argmax(w)] / V[1, np.argmax(w)]
    s = V[:, np.argmin(w)] / V[1, np.argmin(w)]
    basis = np.column_stack([s, u])
    a, b = np.linalg.solve(basis, np.array(H, float))
    v = K * s + u
    v = v / np.max(np.abs(v))
    al, be = np.linalg.solve(basis, v)
    if a < 0:
        a, al = -a, -al
    if b < 0:
        b, be = -b, -be
    if al < 0:
        al, be = -al, -be
    return a, b, al * W, -be * W


def test_reference_frame_frozen(ref, cat):
    a, b, c, d = ref.frame
    # DERIVED: H = (0,1), cat-map frame, W = 1/2, K = -1
    assert a == QuadExt(F(1, 2), F(1, 10), 5)
    assert b == QuadExt(F(1, 2), F(-1, 10), 5)
    assert c == d == QuadExt(0, F(1, 10), 5)
    assert ref.D == QuadExt(0, F(1, 10), 5)
    assert ref.T0 == 1 and ref.sign == "positive"
    assert float(a * b / ref.D) == pytest.approx(0.894427191, abs=1e-9)


def test_reference_frame_matches_float_oracle(ref):
    expect = _numeric_frame((0, 1), 0.5, -1.0)
    assert [float(x) for x in ref.frame] == pytest.approx(list(expect), rel=1e-12)


def test_annulus_errors(cat):
    c = PLCurve.straight((0, 1))
    with pytest.raises(NotEmbedded):
        build_annulus(cat, c, F(1), ExtendedSlope.finite(-1))
    with pytest.raises(DegenerateFrame):
        build_annulus(cat, c, F(1, 2), ExtendedSlope.infinite())
    with pytest.raises(ValueError):
        build_annulus(cat, c, F(1, 2), ExtendedSlope.finite(1))  # K must oppose H


def test_identity_differential(ref):
    dd = differential(ref, identity_profile(), F(1, 3))
    assert (dd.m, dd.n, dd.p, dd.q) == (1, 0, 0, 1)


def test_differential_det_one_over_grid(ref):
    prof = thin_profile(1, F(1, 16), 64)
    for k in [F(i, 64) for i in range(65)]:
        for side in (-1, 1):
            dd = differential(ref, prof, k, side)
            assert dd.det() == 1
            assert dd.S == 0 and dd.U == 0


def test_plateau_entry(ref):
    prof = thin_profile(1, F(1, 16), 64)
    mid = sum(prof.J) / 2
    dd = differential(ref, prof, mid)
    a, b, _, _ = ref.frame
    # rho' = -128 on the plateau
    assert dd.rho_prime == -128
    assert dd.q == 1 + 128 * a * b / ref.D
    assert dd.q > 64 * a * b / ref.D > 1


def test_profile_shape():
    p = thin_profile(1, F(1, 16), 64)
    assert p.coefficient == 1 and p.is_thin()
    length, slope = p.thin_data()
    assert length == F(1, 32) and slope == 128
    assert p.breakpoints[1] == (F(1, 8), 0)
    assert p.rho(1) == -1
    with pytest.raises(InvalidProfile):
        thin_profile(1, F(1, 16), 64, "negative")
    with pytest.raises(InvalidProfile):
        thin_profile(1, F(2), 64)
    assert identity_profile().is_identity()


def test_reference_certifies(ref, cat):
    cert = certify_thinness(ref, thin_profile(1, F(1, 16), 64), F(1, 8))
    assert cert.certified and cert.L == 1 and cert.T0 == 1
    assert cert.q_min > F(7, 8)
    lam_m2 = QuadExt(F(7, 2), F(-3, 2), 5)
    assert cert.width_L_factor_max == pytest.approx(float(lam_m2))
    assert cert.width_L_factor_max < 1
    assert cert.M_T == 0 and cert.m_bar == 0
    big = certify_thinness(ref, thin_profile(1, F(1, 16), 64), F(1, 8), L=2 ** 10)
    assert big.certified and big.L == 2 ** 10


def test_R1_fails(ref):
    with pytest.raises(QTooSmall, match="0.894427"):
        certify_thinness(ref, thin_profile(1, F(1, 16), 1), F(1, 8))


def test_epsilon_infeasible(cat):
    # lambda^-1 = 0.38; (1 - eps)^2 must exceed it
    ann = build_annulus(cat, PLCurve.straight((0, 1)), F(1, 2), ExtendedSlope.finite(-1))
    with pytest.raises(EpsilonInfeasible):
        certify_thinness(ann, thin_profile(1, F(1, 16), 64), F(1, 2))


def test_identity_certifies(ref):
    cert = certify_thinness(ref, identity_profile(), F(1, 8))
    assert cert.certified
    assert cert.width_L_factor_max == pytest.approx(float(QuadExt(F(7, 2), F(-3, 2), 5)))


@pytest.mark.parametrize("delta", [F(1, 32), F(1, 16), F(1, 8), F(1, 4)])
def test_certification_monotone_in_R(ref, delta):
    # once the plateau is steep enough, steeper plateaus stay certified
    verdicts, bounds = [], []
    for R in (1, 2, 4, 8, 16, 32, 64, 128):
        try:
            cert = certify_thinness(ref, thin_profile(1, delta, R), F(1, 8))
            verdicts.append(True)
            bounds.append(cert.plateau_bound)
        except QTooSmall:
            verdicts.append(False)
    assert verdicts == sorted(verdicts)
    assert verdicts[-1] and not verdicts[0]
    assert bounds == sorted(bounds)


def test_cones(ref):
    prof = thin_profile(1, F(1, 16), 64)
    cert = certify_thinness(ref, prof, F(1, 8))
    tr = cone_iterate(ref, prof, cert, 1, 20)
    assert len(tr.widths) == 21 and tr.decreasing and tr.within_bound
    assert tr.ratio < 2 * float(ref.flow.lam) ** -20
    zero = cone_iterate(ref, prof, cert, 0, 5)
    assert zero.widths == [0.0] * 6
    ident = cone_iterate(ref, identity_profile(), certify_thinness(ref, identity_profile(), F(1, 8)), 1, 5)
    assert ident.ratio == pytest.approx(float(ref.flow.lam) ** -10, rel=1e-9)


def test_negative_annulus(cat):
    ann = build_annulus(cat, PLCurve.straight((1, 0)), F(1, 2), ExtendedSlope.finite(1))
    assert ann.sign == "negative"
    prof = thin_profile(-1, F(1, 16), 64, "negative")
    cert = certify_thinness(ann, prof, F(1, 8))
    assert cert.certified
    tr = cone_iterate(ann, prof, cert, 1, 20)
    assert tr.decreasing and tr.within_bound
    with pytest.raises(InvalidProfile):
        certify_thinness(ann, thin_profile(1, F(1, 16), 64), F(1, 8))


def test_compose_return_map(cat):
    assert compose_return_map(cat, HomologyClass(1, 0), 0) == cat.monodromy
    # [[2,1],[1,1]] @ [[1,-1],[0,1]] = [[2,-1],[1,0]]
    assert compose_return_map(cat, HomologyClass(1, 0), 1).rows() == ((2, -1), (1, 0))
    assert compose_return_map(cat, HomologyClass(1, 0), 1).trace == 2


def test_sign_oracle(cat):
    assert curve_sign(cat, HomologyClass(0, 1)) == "positive"
    assert curve_sign(cat, HomologyClass(1, 0)) == "negative"


def test_twist_battery_small():
    rows = twist_battery([Mat2Z.from_rows([[2, 1], [1, 1]]), Mat2Z.from_rows([[3, 1], [2, 1]])], 3, 5)
    pred = [r for r in rows if r.predicted]
    assert len(pred) == 2 * 2 * 3 * 5
    assert all(abs(r.trace) > 2 for r in pred)
    assert any(abs(r.trace) <= 2 for r in rows if not r.predicted)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([[[2, 1], [1, 1]], [[3, 1], [2, 1]], [[1, 1], [1, 2]], [[5, 2], [2, 1]]]),
       st.sampled_from(primitive_classes(5)), st.integers(1, 40))
def test_predicted_sign_is_hyperbolic(rows, c, n):
    flow = SuspensionFlow.from_rows(rows)
    sign = 1 if curve_sign(flow, c) == "positive" else -1
    assert abs(compose_return_map(flow, c, sign * n).trace) > 2
