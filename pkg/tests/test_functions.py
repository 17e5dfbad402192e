from fractions import Fraction

import pytest

import oracles
from tvarsl2.curves import INF, QDivisor
from tvarsl2.errors import DomainError
from tvarsl2.functions import (MobiusMap, RationalFunction, T, derivative, divisor_of, h0_basis,
                               log_derivative_t, mobius_normalize)
from tvarsl2.terms import GradedTerm

ONE = RationalFunction.const(1)


def const(c):
    return RationalFunction.const(c)


# -- divisors of functions -------------------------------------------------


def test_divisor_of_ratio():
    D = divisor_of((T - 1) / T, "P1")
    assert D == QDivisor("P1", {1: 1, 0: -1})
    assert D[INF] == 0


def test_divisor_of_square():
    assert divisor_of(T ** 2, "P1") == QDivisor("P1", {0: 2, INF: -2})


def test_divisor_of_cocycle_factor():
    # phi^e = prod (t - z)^(-v_z(e)) with the single factor v_1(e) = -1
    phi = (T - 1) ** 1
    assert divisor_of(phi, "P1") == QDivisor("P1", {1: 1, INF: -1})


def test_divisor_of_affine_line_drops_infinity():
    assert divisor_of(T ** 2 / (T + 3), "A1") == QDivisor("A1", {0: 2, -3: -1})


def test_divisor_of_zero_function():
    with pytest.raises(DomainError):
        divisor_of(RationalFunction())


def test_irrational_roots_fail_loudly():
    with pytest.raises(DomainError):
        divisor_of(T * T - 2)


# -- section spaces --------------------------------------------------------


def test_h0_zero_on_affine_line():
    mod = h0_basis(QDivisor("A1", {}))
    assert mod.generator == ONE and mod.degree_cap is None


def test_h0_floor_kills_half():
    mod = h0_basis(QDivisor("A1", {0: Fraction(1, 2)}))
    assert mod.generator == ONE


def test_h0_projective_one_dimensional():
    D = QDivisor("P1", {0: 1, 1: 1, INF: -2})
    mod = h0_basis(D)
    assert mod.dimension == D.floor().degree + 1 == 1
    # the generator has simple poles at 0 and 1 and a double zero at infinity
    (f,) = mod.basis()
    assert f == 1 / (T * (T - 1))
    assert (divisor_of(f, "P1") + D).is_effective()
    # direct pole-order check: neither t * f nor a constant is a section
    assert not (divisor_of(T * f, "P1") + D).is_effective()
    assert not (divisor_of(ONE, "P1") + D).is_effective()


def test_h0_negative_degree_is_empty():
    assert h0_basis(QDivisor("P1", {0: -1})).is_empty


# -- Moebius normalization -------------------------------------------------


def test_mobius_standard_points_identity():
    assert mobius_normalize([0, 1, INF]).same_map(MobiusMap.identity())


def test_mobius_affine_translation():
    q = mobius_normalize([5], "A1")
    assert q.as_function() == T - 5


def test_mobius_two_points_projective():
    q = mobius_normalize([2, INF], "P1", [0, INF])
    assert q(2) == 0 and q(INF) is INF
    assert q.as_function() == T - 2


def test_mobius_three_points_generic():
    q = mobius_normalize([2, 5, Fraction(-1, 3)])
    assert (q(2), q(5), q(Fraction(-1, 3))) == (0, 1, INF)


def test_mobius_coincident_points():
    with pytest.raises(DomainError):
        mobius_normalize([1, 1, INF])


# -- derivatives -----------------------------------------------------------


def test_derivative_linear():
    assert derivative(T - 1) == ONE
    assert log_derivative_t(T - 1) == T / (T - 1)


def test_rational_identity_vanishes():
    expr = T / (T - 1) + T / (T - 1) ** 2 - T ** 2 / (T - 1) ** 2
    assert expr.is_zero


def test_log_derivative_square():
    f = (T - 1) ** 2
    alpha = log_derivative_t(f)
    assert alpha == 2 * T / (T - 1)
    # cross-check on sample points with the expanded form t * f'/f = t(2t-2)/(t^2-2t+1)
    for x in [Fraction(2), Fraction(-3, 7), Fraction(5, 2)]:
        expanded = x * oracles.poly_eval([-2, 2], x) / oracles.poly_eval([1, -2, 1], x)
        assert alpha(x) == expanded


def test_log_derivative_zero():
    with pytest.raises(DomainError):
        log_derivative_t(RationalFunction())


# -- graded terms ----------------------------------------------------------


def test_graded_term_product_adds_weights():
    a = GradedTerm(T, (1, 0), Fraction(1, 2), d=2)
    b = GradedTerm(const(3), (0, 2), Fraction(1, 2), d=2)
    c = a * b
    # the factor t in the coefficient is folded into the exponent
    assert c.m == (1, 2) and c.t_exp == 2 and c.coeff == const(3)


def test_graded_term_denominator_must_divide_d():
    with pytest.raises(DomainError):
        GradedTerm(ONE, (1, 0), Fraction(1, 3), d=2)


def test_graded_term_d_mismatch():
    a = GradedTerm(ONE, (1,), Fraction(1, 2), d=2)
    b = GradedTerm(ONE, (1,), Fraction(1, 3), d=3)
    with pytest.raises(DomainError):
        a * b
