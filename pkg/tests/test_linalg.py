from fractions import Fraction

from hypothesis import given, strategies as st

from oddcourant.linalg import is_consistent, linear_kernel, mat_vec, rank, rref, solve
from oddcourant.scalars import I

from conftest import rationals


def matrices(rows=3, cols=4):
    return st.lists(st.lists(rationals, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@given(matrices())
def test_rank_nullity(M):
    ker = linear_kernel(M, ncols=4)
    assert rank(M) + len(ker) == 4
    for v in ker:
        assert all(x == 0 for x in mat_vec(M, v))


@given(matrices(), st.lists(rationals, min_size=4, max_size=4))
def test_solve_consistent_systems(M, x):
    b = mat_vec(M, x)
    assert is_consistent(M, b)
    y = solve(M, b)
    assert mat_vec(M, y) == b


def test_inconsistent_system():
    M = [[Fraction(1), Fraction(1)], [Fraction(2), Fraction(2)]]
    assert not is_consistent(M, [Fraction(1), Fraction(3)])


def test_rref_pivots():
    R, piv = rref([[0, 2, 4], [1, 1, 1]])
    assert piv == [0, 1]
    assert R[1] == [0, 1, 2]


def test_gaussian_rank():
    # (1, i) and (i, -1) are proportional over Q(i)
    assert rank([[1, I], [I, -1]]) == 1
    assert rank([[1, I], [I, 1]]) == 2
