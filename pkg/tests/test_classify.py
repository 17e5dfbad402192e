import dataclasses
from fractions import Fraction

import pytest

import oracles
from tvarsl2.classify import (AffineRootFamily, build_special, classify_fiber, classify_horizontal, classify_toric,
                              conjugacy_classes, horizontal_descriptor, is_special, verify_sl2_triple)
from tvarsl2.cones import Cone
from tvarsl2.corpus import fiber_divisors, horizontal_divisors, linear_plane
from tvarsl2.curves import INF, QDivisor
from tvarsl2.divisors import PolyhedralDivisor, evaluate, shift
from tvarsl2.errors import DomainError
from tvarsl2.functions import T, divisor_of
from tvarsl2.lnd import FiberLND
from tvarsl2.threefold import build_threefold, table_divisor

HALF = Fraction(1, 2)
QUADRANT = Cone("N", [(1, 0), (0, 1)])


def neg(v):
    return tuple(-x for x in v)


# -- toric -----------------------------------------------------------------


def test_toric_veronese_a2_effective():
    acts = classify_toric(Cone("N", [(1, 0), (2, 3)]))
    assert sorted(a.e for a in acts) == [(-1, 1), (1, -1)]
    assert all(a.effective == "SL2" for a in acts)


def test_toric_quadrant_two_effective_actions():
    acts = classify_toric(QUADRANT)
    assert len(acts) == 2
    assert sorted(a.p for a in acts) == [(-1, 1), (1, -1)]
    for a in acts:
        assert oracles.gcd_all(a.p) == 1 and a.effective == "SL2"


def test_toric_b2_psl2():
    (a,) = [x for x in classify_toric(Cone("N", [(1, 0), (1, 2)])) if x.e == (1, -1)]
    # rho_e = (1,2) and rho_-e = (1,0), so p = (1,0) - (1,2)
    assert a.p == (0, -2) and oracles.dot(a.e, a.p) == 2
    assert oracles.gcd_all(a.p) == 2 and oracles.gcd_all((0, 1)) == 1
    assert a.effective == "PSL2"


def test_toric_pairs_marked_conjugate():
    for a in classify_toric(QUADRANT):
        assert a.conjugate_e == neg(a.e)


def test_toric_affine_family_needs_representative():
    c = Cone("N", [(1, 0, 0), (1, 1, 0)])
    with pytest.raises(AffineRootFamily):
        classify_toric(c)
    (a,) = classify_toric(c, representatives=[(-1, 2, 0)])
    assert a.p == (0, 1, 0)
    assert verify_sl2_triple(a).ok


# -- fiber type ------------------------------------------------------------


def test_fiber_segment_example_accepted():
    D = fiber_divisors()["z3_segment"]
    acts = classify_fiber(D)
    (a,) = [x for x in acts if x.e == (-1, 1, 0)]
    for lnd in (a.plus, a.minus):
        assert lnd.phi.is_constant and lnd.phi.constant_value() == 1


def test_fiber_two_vertices_off_level_rejected():
    D = PolyhedralDivisor("A1", QUADRANT, {0: [(1, 0), (0, 1)]})
    assert len(D.slice(0).vertices) == 2
    assert oracles.dot((1, -1), (1, 0)) != oracles.dot((1, -1), (0, 1))
    assert classify_fiber(D) == []


def test_fiber_special_data_accepted():
    S = build_special(1, QDivisor("P1", {0: 1}))
    acts = classify_fiber(S.divisor)
    (a,) = [x for x in acts if x.e == (1, -1)]
    assert evaluate(S.divisor, a.e).is_zero and evaluate(S.divisor, neg(a.e)).is_zero


def test_fiber_improper_rejected():
    D = PolyhedralDivisor("P1", QUADRANT, {0: [(-1, 0)]})
    with pytest.raises(DomainError):
        classify_fiber(D)


def test_fiber_nonconstant_section():
    D = fiber_divisors()["quadrant_shifted"]
    for a in classify_fiber(D):
        assert (divisor_of(a.plus.phi, D.curve) + evaluate(D, a.e)).is_zero
        assert (evaluate(D, a.e) + evaluate(D, neg(a.e))).is_zero
    assert any(not a.plus.phi.is_constant for a in classify_fiber(D))


# -- horizontal type -------------------------------------------------------


@pytest.mark.parametrize("args", [("A1Homogeneous", 1), ("A1Homogeneous", 3), ("A1Cone", 2),
                                  ("P1Family", 1, 1), ("P1Family", 2, Fraction(3, 2))])
def test_horizontal_table_one_class(args):
    D = table_divisor(*args)
    acts = classify_horizontal(D)
    assert acts
    assert len(conjugacy_classes(acts, D)) == 1
    for a in acts:
        assert a.family == 1
        v0_minus = a.minus.coloring.vertex(0)
        v1_plus = a.plus.coloring.vertex(1)
        assert a.p == tuple(int(x - y) for x, y in zip(v0_minus, v1_plus))


def test_horizontal_second_family_one_class():
    D = horizontal_divisors()["half_vertex"]
    acts = classify_horizontal(D)
    assert len(conjugacy_classes(acts, D)) == 1
    for a in acts:
        assert a.family == 2 and a.plus.d == 2
        v0 = a.plus.v0
        assert all(2 * x == int(2 * x) for x in v0) and any(x.denominator == 2 for x in v0)
        assert 2 * oracles.dot(a.minus.v0, a.e) == 1
        v1_plus = a.plus.coloring.vertex(1)
        assert a.p == tuple(int(-2 * x) for x in v1_plus)


def test_horizontal_three_slices_none():
    D = PolyhedralDivisor("A1", Cone("N", [], rank=2),
                          {0: [(0, 0), (1, 0)], 1: [(0, 0), (0, 1)], 2: [(0, 0), (1, 1)]})
    assert classify_horizontal(D) == []


# -- sl2-triple verification -----------------------------------------------


def test_verify_quadrant_toric():
    for a in classify_toric(QUADRANT):
        rep = verify_sl2_triple(a)
        assert rep.ok, rep.failed()


def test_verify_tampered_phi():
    D = PolyhedralDivisor("A1", QUADRANT, {0: [(1, 1)]})
    (a,) = [x for x in classify_fiber(D) if x.e == (1, -1)]
    bad = dataclasses.replace(a, minus=FiberLND(D.tail, neg(a.e), a.minus.phi * T, D))
    rep = verify_sl2_triple(bad)
    assert not rep["[d+,d-] = delta"].ok
    assert "witness" in rep["[d+,d-] = delta"].detail


def test_verify_threefold_r2():
    a = build_threefold("P1Family", 2, Fraction(3, 2)).action
    assert a.e == (1, -1) and a.p == (0, -2)
    assert oracles.dot(a.e, a.p) == 2
    assert verify_sl2_triple(a).ok


# -- specialness -----------------------------------------------------------


def test_special_fiber_type():
    for a in classify_fiber(fiber_divisors()["z3_segment"]):
        assert is_special(a)[0]


def test_special_threefold_is_not():
    a = build_threefold("P1Family", 1, Fraction(3, 2)).action
    ok, reason = is_special(a)
    assert not ok and "non-trivial" in reason


def test_special_single_slice_on_affine_line():
    D, cp, cm, e = linear_plane()
    assert D.support == [0]
    assert is_special(horizontal_descriptor(cp, cm, e))[0]


# -- special constructor ---------------------------------------------------


def test_build_special_r1_point():
    S = build_special(1, QDivisor("P1", {0: 1}))
    assert set(S.divisor.tail.rays) == {(1, 0), (0, 1)}
    assert S.divisor.support == [0]
    assert S.divisor.slice(0).vertices == ((1, 1),)
    assert S.action.kind == "fiber" and S.action.e == (1, -1)
    assert S.generic_isotropy == "U_(1)"


def test_build_special_r3_half_points():
    S = build_special(3, QDivisor("P1", {0: HALF, 1: HALF}))
    for z in (0, 1):
        assert S.divisor.slice(z).vertices == ((HALF, HALF),)
    val = evaluate(S.divisor, (1, 1))
    for z in (0, 1):
        assert val[z] == oracles.support_value([(HALF, HALF)], (1, 1)) == 1
    assert S.invariant_grading == "B_i t^(3i)"


def test_build_special_mixed_signs():
    S = build_special(2, QDivisor("P1", {0: 1, 1: -1, INF: 1}))
    assert classify_fiber(S.divisor)


def test_build_special_needs_ample():
    with pytest.raises(DomainError):
        build_special(2, QDivisor("P1", {0: 1, 1: -1}))
