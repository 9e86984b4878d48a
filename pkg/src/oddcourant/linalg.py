"""Exact Gaussian elimination over Q and Q(i).

Matrices are lists of rows.  Entries may be ints, ``Fraction`` or
``GaussianRational``; nothing is ever rounded.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

from .scalars import GaussianRational, as_scalar

__all__ = ["rref", "rank", "linear_kernel", "solve", "mat_vec", "is_consistent", "mat_mul"]

Matrix = List[List[object]]


def _inv(x):
    if isinstance(x, GaussianRational):
        return GaussianRational(1) / x
    return Fraction(1) / x


def rref(M: Sequence[Sequence[object]]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns.

    Rows are stored sparsely during elimination; tensor-space matrices here
    are mostly zeros.
    """
    rows = [{j: as_scalar(v) for j, v in enumerate(r) if v != 0} for r in M]
    ncols = len(M[0]) if M else 0
    pivots: List[int] = []
    done: List[dict] = []
    remaining = [r for r in rows if r]
    for col in range(ncols):
        pivot_row = None
        for k, r in enumerate(remaining):
            if col in r:
                pivot_row = remaining.pop(k)
                break
        if pivot_row is None:
            continue
        inv = _inv(pivot_row[col])
        pivot_row = {j: v * inv for j, v in pivot_row.items()}
        nxt = []
        for r in remaining:
            f = r.get(col)
            if f is not None:
                for j, v in pivot_row.items():
                    w = r.get(j, 0) - f * v
                    if w == 0:
                        r.pop(j, None)
                    else:
                        r[j] = w
            if r:
                nxt.append(r)
        remaining = nxt
        for r in done:
            f = r.get(col)
            if f is not None:
                for j, v in pivot_row.items():
                    w = r.get(j, 0) - f * v
                    if w == 0:
                        r.pop(j, None)
                    else:
                        r[j] = w
        done.append(pivot_row)
        pivots.append(col)
        if not remaining:
            break
    dense = [[r.get(j, Fraction(0)) for j in range(ncols)] for r in done]
    return dense, pivots


def rank(M: Sequence[Sequence[object]]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def linear_kernel(M: Sequence[Sequence[object]], ncols: int | None = None) -> List[List[object]]:
    """A basis of ``{x : M x = 0}``, one vector per free column.

    ``ncols`` is needed only when ``M`` has no rows.
    """
    if not M:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    n = len(M[0])
    R, pivots = rref(M)
    pivot_set = set(pivots)
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[free]
        basis.append(v)
    return basis


def mat_vec(M, v):
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in M]


def mat_mul(A, B):
    cols = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in A]


def is_consistent(M, b) -> bool:
    """Whether ``M x = b`` has a solution (rank test on the augmented matrix)."""
    aug = [list(r) + [bi] for r, bi in zip(M, b)]
    return rank(M) == rank(aug)


def solve(M, b):
    """One particular solution of ``M x = b`` or ``None`` if inconsistent."""
    n = len(M[0])
    aug = [list(r) + [bi] for r, bi in zip(M, b)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(R, pivots):
        x[p] = row[n]
    return x
