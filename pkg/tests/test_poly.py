from fractions import Fraction

import pytest
from hypothesis import given

from oddcourant.poly import Polynomial, PolynomialSyntaxError, const, format_polynomial, parse_polynomial, var
from oddcourant.scalars import I

from conftest import polynomials, rationals

x1, x2 = var(2, 0), var(2, 1)


def test_parse_basic():
    p = parse_polynomial("x1^2 - 3/2*x1*x2 + 4", 2)
    assert p == x1 * x1 - Fraction(3, 2) * x1 * x2 + 4


def test_parse_leading_sign_and_parens():
    assert parse_polynomial("-(x1 + x2)^2", 2) == -(x1 + x2) * (x1 + x2)


def test_parse_error_reports_position():
    with pytest.raises(PolynomialSyntaxError) as exc:
        parse_polynomial("x1 + * 2", 2)
    assert exc.value.pos == 5


def test_parse_rejects_unknown_variable():
    with pytest.raises(PolynomialSyntaxError):
        parse_polynomial("x3", 2)


def test_zero_coefficients_dropped():
    assert Polynomial(2, {(1, 0): 0}).is_zero()
    assert (x1 - x1).is_zero()


def test_gaussian_coefficients():
    p = x1 + I * x2
    assert p * p.conjugate() == x1 * x1 + x2 * x2
    assert p.real() == x1 and p.imag() == x2


@given(polynomials(), polynomials(), polynomials())
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a


@given(polynomials(), polynomials())
def test_leibniz_rule(a, b):
    for i in range(2):
        assert (a * b).diff(i) == a.diff(i) * b + a * b.diff(i)


@given(polynomials(), polynomials())
def test_mixed_partials_commute(a, b):
    p = a * b
    assert p.diff(0).diff(1) == p.diff(1).diff(0)


@given(polynomials(max_terms=6))
def test_format_round_trip(p):
    assert parse_polynomial(format_polynomial(p), 2) == p


@given(polynomials(), polynomials(), rationals, rationals)
def test_evaluation_is_a_ring_map(a, b, s, t):
    pt = (s, t)
    assert (a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt)
    assert (a + b).evaluate(pt) == a.evaluate(pt) + b.evaluate(pt)


def test_constant_helpers():
    assert const(2, 3).is_constant()
    assert const(2, 3).constant_term() == 3
    assert (x1 * x2 * x2).degree() == 3
