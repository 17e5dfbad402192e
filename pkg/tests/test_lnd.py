import itertools
from fractions import Fraction

import pytest

import oracles
from tvarsl2.classify import classify_toric, horizontal_descriptor
from tvarsl2.cones import Cone
from tvarsl2.corpus import horizontal_divisors
from tvarsl2.classify import classify_horizontal
from tvarsl2.divisors import PolyhedralDivisor
from tvarsl2.errors import DomainError
from tvarsl2.functions import RationalFunction
from tvarsl2.lnd import (CoherentPair, Coloring, Downgrading, FiberLND, HorizontalLND, NilpotencyViolation,
                         NotDiagonal, commutator, iterate_to_zero, kernels_intersect_trivially,
                         validate_coherent, validate_coloring)
from tvarsl2.terms import GradedSum, GradedTerm
from tvarsl2.threefold import build_threefold

HALF = Fraction(1, 2)
B2 = Cone("N", [(1, 0), (1, 2)])


def chi(m, t=0):
    return GradedTerm.chi(m, t)


def single(term, k):
    return GradedSum([term.scale(RationalFunction.const(k))])


def half_vertex_action():
    # the two outputs are the +-e pair of one action
    acts = classify_horizontal(horizontal_divisors()["half_vertex"])
    assert len(acts) == 2 and acts[0].e == tuple(-x for x in acts[1].e)
    return acts[0]


def gl2_equivalent(rays1, rays2, bound):
    """Brute force: some integer matrix of determinant +-1 maps one ray set onto the other."""
    target = set(rays2)
    for a, b, c, d in itertools.product(range(-bound, bound + 1), repeat=4):
        if abs(a * d - b * c) != 1:
            continue
        img = {(a * x + b * y, c * x + d * y) for x, y in rays1}
        if img == target:
            return True
    return False


# -- application -----------------------------------------------------------


def test_apply_toric_fiber_formula():
    lnd = FiberLND(B2, (1, -1))
    assert lnd.rho == (1, 2)
    out = lnd(chi((0, 1)))
    assert out == single(chi((1, 0)), oracles.dot((0, 1), (1, 2)))
    assert out == single(chi((1, 0)), 2)


def test_apply_horizontal_kills_constants():
    plus = build_threefold("P1Family", 1, 1).action.plus
    assert plus(chi((0, 0))).is_zero


def test_apply_horizontal_minus_chart_formula():
    X = build_threefold("P1Family", 2, Fraction(3, 2))
    minus = X.action.minus
    e = X.action.e
    v0 = minus.v0
    assert minus.d == 1 and oracles.dot(v0, e) == 1
    assert minus.s == -1 + oracles.dot(v0, e) == 0
    for m in [(1, 0), (0, 1), (2, -1), (1, 1)]:
        for r in range(3):
            k = oracles.dot(v0, m) + r
            expected = minus.twisted(tuple(a - b for a, b in zip(m, e)), r + minus.s)
            assert minus(minus.twisted(m, r)) == single(expected, k)


def test_apply_leibniz_on_product():
    plus = build_threefold("P1Family", 1, 1).action.plus
    x, y = chi((1, 0), 1), chi((0, 1), 2)
    lhs = plus(x * y)
    rhs = plus(x) * GradedSum([y]) + GradedSum([x]) * plus(y)
    assert lhs == rhs


# -- nilpotency ------------------------------------------------------------


def test_iterate_toric_index_three():
    lnd = FiberLND(B2, (1, -1))
    m = (0, 1)
    assert oracles.dot(m, lnd.rho) == 2
    assert iterate_to_zero(lnd, chi(m), 10) == 3 == lnd.predicted_index(m)


def test_iterate_kernel_element():
    lnd = FiberLND(B2, (1, -1))
    assert iterate_to_zero(lnd, chi((2, -1)), 5) == 1


def test_iterate_horizontal_one_step_to_kernel():
    plus = build_threefold("P1Family", 1, 1).action.plus
    m, r = (0, 0), 1
    assert plus.d * (oracles.dot(plus.v0, m) + r) == 1
    assert iterate_to_zero(plus, plus.twisted(m, r), 10) == 2 == plus.predicted_index(m, r)


def test_iterate_bound_exceeded():
    lnd = FiberLND(B2, (1, -1))
    with pytest.raises(NilpotencyViolation):
        iterate_to_zero(lnd, chi((0, 3)), 2)


# -- kernels ---------------------------------------------------------------


def test_kernel_cone_fiber_facet():
    lnd = FiberLND(B2, (1, -1))
    tau, lattice = lnd.kernel_cone()
    assert tau.rays == ((2, -1),) and lattice is None
    scan = {m for m in oracles.dual_points(B2.rays, 2, 6) if oracles.dot(m, (1, 2)) == 0}
    assert {m for m in oracles.box(2, 6) if m in tau} == scan


@pytest.mark.parametrize("r", [1, 2, 3])
def test_kernel_cone_homogeneous_weight_cone(r):
    plus = build_threefold("A1Homogeneous", r).action.plus
    omega = plus.coloring.omega()
    assert gl2_equivalent(omega.rays, [(-1, 0), (r - 1, r)], r + 2)
    for g in plus.kernel_generators():
        assert plus(g).is_zero


def test_kernel_lattice_index_two():
    plus = half_vertex_action().plus
    assert plus.d == 2
    (u, v) = plus.kernel_lattice()
    assert abs(u[0] * v[1] - u[1] * v[0]) == 2


# -- kernel intersections --------------------------------------------------


@pytest.mark.parametrize("args", [("A1Homogeneous", 2), ("A1Cone", 3), ("P1Family", 2, Fraction(3, 2))])
def test_kernels_trivial_on_table(args):
    a = build_threefold(*args).action
    assert kernels_intersect_trivially(a.plus, a.minus)


def test_kernels_meet_second_family():
    a = half_vertex_action()
    assert not kernels_intersect_trivially(a.plus, a.minus)


def test_kernels_same_lnd():
    a = build_threefold("P1Family", 1, 1).action
    assert not kernels_intersect_trivially(a.plus, a.plus)


def test_kernels_different_divisors():
    a = build_threefold("P1Family", 1, 1).action
    b = build_threefold("P1Family", 1, 2).action
    with pytest.raises(DomainError):
        kernels_intersect_trivially(a.plus, b.minus)


# -- validation ------------------------------------------------------------


def test_validate_table_colorings_pass():
    a = build_threefold("P1Family", 1, 1).action
    for lnd in (a.plus, a.minus):
        rep = validate_coherent(lnd.pair)
        assert rep.ok, rep.failed()


def test_validate_two_nonlattice_vertices():
    D = PolyhedralDivisor("A1", Cone("N", [(1, 0), (0, 1)]), {0: [(HALF, 0)], 1: [(0, HALF)]})
    rep = validate_coloring(Coloring(D, {0: (HALF, 0), 1: (0, HALF)}))
    assert not rep["(3) at most one non-lattice vertex"].ok


def test_validate_gap_violation():
    # the other vertex (1,1) of the slice at 1 has the same e-value as the colored vertex
    D = PolyhedralDivisor("A1", Cone("N", [], rank=2), {0: [(0, 0), (1, 0)], 1: [(0, 0), (1, 1)]})
    c = Coloring(D, {0: (0, 0), 1: (0, 0)}, None, 0)
    e = (1, -1)
    assert oracles.dot((1, 1), e) == oracles.dot((0, 0), e)
    rep = validate_coherent(CoherentPair(c, e))
    assert not rep["(2) gap at unmarked points"].ok
    with pytest.raises(DomainError):
        HorizontalLND(CoherentPair(c, e))


# -- commutators -----------------------------------------------------------


def test_commutator_toric_downgrading():
    for a in classify_toric(Cone("N", [(1, 0), (0, 1)])):
        root = a.plus.tail.is_sl2_root(a.e)
        res = commutator(a.plus, a.minus)
        assert res == Downgrading(tuple(root.p.coords))


def test_commutator_first_family():
    a = build_threefold("P1Family", 2, Fraction(3, 2)).action
    v0_minus = a.minus.coloring.vertex(0)
    v1_plus = a.plus.coloring.vertex(1)
    expected = tuple(int(x - y) for x, y in zip(v0_minus, v1_plus))
    assert commutator(a.plus, a.minus) == Downgrading(expected)


def test_commutator_second_family():
    a = half_vertex_action()
    v1_plus = a.plus.coloring.vertex(1)
    assert commutator(a.plus, a.minus) == Downgrading(tuple(int(-2 * x) for x in v1_plus))


def test_commutator_degree_mismatch():
    a = build_threefold("P1Family", 1, 1).action
    with pytest.raises(DomainError):
        commutator(a.plus, a.plus)


def test_commutator_tampered_phi_not_diagonal():
    from tvarsl2.functions import T

    D = PolyhedralDivisor("A1", Cone("N", [(1, 0), (0, 1)]), {0: [(1, 1)]})
    plus = FiberLND(D.tail, (1, -1), RationalFunction.const(1), D)
    minus = FiberLND(D.tail, (-1, 1), T, D)
    assert isinstance(commutator(plus, minus), NotDiagonal)


def test_linear_plane_descriptor():
    from tvarsl2.corpus import linear_plane

    D, cp, cm, e = linear_plane()
    a = horizontal_descriptor(cp, cm, e)
    assert a.p == (1,)
    assert kernels_intersect_trivially(a.plus, a.minus)
