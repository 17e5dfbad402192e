from fractions import Fraction

import pytest

import oracles
from tvarsl2.errors import DimensionError, DomainError
from tvarsl2.lattice import (Family, Inconsistent, LatticeVector, NoIntegralSolution, Unique, VectorQ,
                             is_primitive, pairing, solve_pairings)


def M(*c):
    return VectorQ("M", c)


def N(*c):
    return VectorQ("N", c)


# -- pairing ---------------------------------------------------------------


def test_pairing_orthogonal_pair():
    assert pairing(M(1, -1), N(1, 1)) == 0


def test_pairing_weight_r_of_m1():
    r = 2
    assert pairing(M(0, 1), N(2 - r, r)) == r


def test_pairing_veronese_root():
    a = 1
    assert pairing(M(1, -1), N(a, a + 1)) == -1


def test_pairing_rational_entries():
    assert pairing(M(Fraction(1, 2), 3), N(Fraction(2, 3), Fraction(-1, 6))) == Fraction(1, 3) - Fraction(1, 2)


def test_pairing_rank_mismatch():
    with pytest.raises(DimensionError):
        pairing(M(1, 0), N(1, 0, 0))


def test_pairing_same_side_rejected():
    with pytest.raises(DomainError):
        pairing(M(1, 0), M(1, 0))


# -- primitivity -----------------------------------------------------------


def test_primitive_unit_difference():
    assert is_primitive(LatticeVector("N", (1, -1)))


def test_primitive_doubled():
    assert not is_primitive(LatticeVector("N", (2, -2)))


def test_primitive_consecutive_integers():
    r = 5
    v = (r - 1, r)
    assert oracles.gcd_all(v) == 1
    assert not oracles.is_multiple_brute(v)
    assert is_primitive(LatticeVector("N", v))


def test_primitive_zero_vector():
    with pytest.raises(DomainError):
        is_primitive(LatticeVector("N", (0, 0)))


# -- integral solving ------------------------------------------------------


def test_solve_unique_veronese():
    res = solve_pairings([N(1, 0), N(1, 2)], [1, -1])
    assert res == Unique(LatticeVector("M", (1, -1)))


def test_solve_homogeneous_quadrant():
    res = solve_pairings([N(1, 0), N(0, 1)], [0, 0])
    assert isinstance(res, Unique) and res.solution.coords == (0, 0)


def test_solve_family_matches_box_scan():
    # oracle: every e in the box with <e,(1,0)> = -1 is particular + k * basis
    scan = {e for e in oracles.box(2, 3) if oracles.dot(e, (1, 0)) == -1}
    res = solve_pairings([N(1, 0)], [-1])
    assert isinstance(res, Family)
    assert res.particular.coords == (-1, 0)
    assert [b.coords for b in res.kernel_basis] == [(0, 1)]
    generated = {(-1, k) for k in range(-3, 4)}
    assert scan == generated


def test_solve_no_integral_solution():
    assert isinstance(solve_pairings([N(2, 0)], [1]), NoIntegralSolution)


def test_solve_inconsistent():
    assert isinstance(solve_pairings([N(1, 0), N(2, 0)], [1, 1]), Inconsistent)


def test_solve_rational_rows_are_scaled():
    res = solve_pairings([N(Fraction(1, 2), 0), N(0, 1)], [1, 3])
    assert res == Unique(LatticeVector("M", (2, 3)))
