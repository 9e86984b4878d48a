from itertools import combinations

from hypothesis import given, strategies as st

from oddcourant.forms import (
    DifferentialForm,
    VectorField,
    exterior_derivative as d,
    interior,
    lie_bracket,
    lie_derivative,
    wedge,
)
from oddcourant.poly import parse_polynomial

from conftest import polynomials

DIM = 3


def vector_fields():
    return st.lists(polynomials(DIM), min_size=DIM, max_size=DIM).map(VectorField)


def forms(degree):
    idx = list(combinations(range(DIM), degree))
    return st.lists(polynomials(DIM), min_size=len(idx), max_size=len(idx)).map(
        lambda cs: DifferentialForm(DIM, degree, dict(zip(idx, cs)))
    )


@given(st.integers(0, 2).flatmap(forms))
def test_d_squared_is_zero(w):
    assert d(d(w)).is_zero()


@given(vector_fields(), st.integers(0, 3).flatmap(forms))
def test_cartan_formula(X, w):
    rhs = interior(X, d(w)) + (d(interior(X, w)) if w.degree else DifferentialForm(DIM, 0))
    assert lie_derivative(X, w) == rhs


@given(vector_fields(), vector_fields(), vector_fields())
def test_jacobi_for_vector_fields(X, Y, Z):
    jac = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
    assert jac.is_zero()


@given(vector_fields(), vector_fields(), forms(1))
def test_interior_of_bracket(X, Y, w):
    # i_[X,Y] = [L_X, i_Y]
    lhs = interior(lie_bracket(X, Y), w)
    rhs = lie_derivative(X, interior(Y, w)) - interior(Y, lie_derivative(X, w))
    assert lhs == rhs


@given(forms(1), forms(1), forms(1))
def test_wedge_graded(a, b, c):
    assert wedge(a, b) == -wedge(b, a)
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@given(forms(1), forms(2))
def test_d_is_a_graded_derivation(a, b):
    assert d(wedge(a, b)) == wedge(d(a), b) - wedge(a, d(b))


def test_closed_two_form_in_three_dimensions():
    w = DifferentialForm(DIM, 2, {(0, 1): parse_polynomial("x3", DIM)})
    assert not d(w).is_zero()
    assert d(DifferentialForm(DIM, 2, {(0, 1): parse_polynomial("x1", DIM)})).is_zero()


def test_from_unsorted_applies_antisymmetry():
    one = parse_polynomial("1", DIM)
    w = DifferentialForm.from_unsorted(DIM, 2, [((1, 0), one), ((0, 1), one)])
    assert w.is_zero()
