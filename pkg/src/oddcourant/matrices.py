"""Small dense matrices whose entries are polynomials (or exact scalars).

Conventions: a matrix is a list of rows, ``(A v)_i = sum_j A[i][j] v[j]``,
so column ``j`` is the image of the ``j``-th frame vector.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .poly import Polynomial, const

__all__ = [
    "zeros",
    "identity",
    "mat_add",
    "mat_sub",
    "mat_scale",
    "mat_mul",
    "mat_vec",
    "transpose",
    "outer",
    "dot",
    "vec_add",
    "vec_sub",
    "vec_scale",
    "is_zero_matrix",
    "is_zero_vector",
    "mat_map",
    "evaluate_matrix",
    "evaluate_vector",
    "commutator",
    "anticommutator",
]

Vec = List[Polynomial]
Mat = List[List[Polynomial]]


def zeros(nvars: int, rows: int, cols: int | None = None) -> Mat:
    cols = rows if cols is None else cols
    z = const(nvars, 0)
    return [[z] * cols for _ in range(rows)]


def identity(nvars: int, n: int) -> Mat:
    return [[const(nvars, int(i == j)) for j in range(n)] for i in range(n)]


def mat_map(f, A):
    return [[f(a) for a in row] for row in A]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(c, A):
    return [[a * c for a in row] for row in A]


def _sum(items, zero):
    out = zero
    for it in items:
        if it:
            out = out + it
    return out


def mat_mul(A, B):
    zero = _zero_like(A)
    n = len(B[0])
    out = []
    for row in A:
        new = []
        for j in range(n):
            acc = zero
            for k, a in enumerate(row):
                if a:
                    b = B[k][j]
                    if b:
                        acc = acc + a * b
            new.append(acc)
        out.append(new)
    return out


def mat_vec(A, v):
    zero = _zero_like(A)
    out = []
    for row in A:
        acc = zero
        for a, b in zip(row, v):
            if a and b:
                acc = acc + a * b
        out.append(acc)
    return out


def transpose(A):
    return [list(col) for col in zip(*A)]


def outer(u, v):
    """``u v^T``."""
    return [[a * b for b in v] for a in u]


def dot(u, v):
    zero = _zero_like([u])
    acc = zero
    for a, b in zip(u, v):
        if a and b:
            acc = acc + a * b
    return acc


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(c, u):
    return [a * c for a in u]


def commutator(A, B):
    return mat_sub(mat_mul(A, B), mat_mul(B, A))


def anticommutator(A, B):
    return mat_add(mat_mul(A, B), mat_mul(B, A))


def is_zero_matrix(A) -> bool:
    return all(not a for row in A for a in row)


def is_zero_vector(v) -> bool:
    return all(not a for a in v)


def evaluate_matrix(A, point):
    return [[a.evaluate(point) if isinstance(a, Polynomial) else a for a in row] for row in A]


def evaluate_vector(v, point):
    return [a.evaluate(point) if isinstance(a, Polynomial) else a for a in v]


def _zero_like(A):
    for row in A:
        for a in row:
            if isinstance(a, Polynomial):
                return const(a.nvars, 0)
    return Fraction(0)
