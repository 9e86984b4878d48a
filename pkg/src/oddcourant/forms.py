"""Vector fields and differential forms on a coordinate patch R^d.

Forms store their coefficients on strictly increasing index tuples
(0-based), so ``{(0, 1): p}`` is ``p dx1^dx2``.
"""
from __future__ import annotations

from itertools import combinations
from typing import Dict, Iterable, Sequence, Tuple

from .poly import Polynomial, const

__all__ = [
    "VectorField",
    "DifferentialForm",
    "exterior_derivative",
    "wedge",
    "interior",
    "lie_derivative",
    "lie_bracket",
]


def _sort_sign(idx: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sign of the sorting permutation, or 0 if an index repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class VectorField:
    __slots__ = ("dim", "comps")

    def __init__(self, comps: Sequence[Polynomial]):
        self.comps = tuple(comps)
        self.dim = len(self.comps)

    @classmethod
    def zero(cls, d: int) -> "VectorField":
        return cls([const(d, 0)] * d)

    @classmethod
    def coordinate(cls, d: int, i: int) -> "VectorField":
        return cls([const(d, int(j == i)) for j in range(d)])

    def __call__(self, f: Polynomial) -> Polynomial:
        """Directional derivative ``X(f)``."""
        out = const(self.dim, 0)
        for i, c in enumerate(self.comps):
            if c:
                out = out + c * f.diff(i)
        return out

    def _check(self, other: "VectorField"):
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "VectorField"):
        self._check(other)
        return VectorField([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "VectorField"):
        self._check(other)
        return VectorField([a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return VectorField([-a for a in self.comps])

    def scale(self, f) -> "VectorField":
        return VectorField([f * a for a in self.comps])

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __repr__(self):
        return "VectorField(" + ", ".join(str(c) for c in self.comps) + ")"


class DifferentialForm:
    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim: int, degree: int, coeffs: Dict[Tuple[int, ...], Polynomial] | None = None):
        if not 0 <= degree:
            raise ValueError("form degree must be non-negative")
        self.dim = dim
        self.degree = degree
        clean = {}
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(not 0 <= i < dim for i in idx):
                raise ValueError(f"bad index tuple {idx} for a {degree}-form on R^{dim}")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing")
            if not isinstance(c, Polynomial):
                c = const(dim, c)
            if c:
                clean[idx] = c
        self.coeffs = clean

    @classmethod
    def from_unsorted(cls, dim: int, degree: int, items: Iterable[Tuple[Sequence[int], Polynomial]]):
        """Build from arbitrary index tuples, applying antisymmetry."""
        acc: Dict[Tuple[int, ...], Polynomial] = {}
        for idx, c in items:
            s, key = _sort_sign(idx)
            if s == 0:
                continue
            acc[key] = acc.get(key, const(dim, 0)) + c * s
        return cls(dim, degree, acc)

    @classmethod
    def function(cls, f: Polynomial) -> "DifferentialForm":
        return cls(f.nvars, 0, {(): f})

    @classmethod
    def one_form(cls, comps: Sequence[Polynomial]) -> "DifferentialForm":
        d = len(comps)
        return cls(d, 1, {(i,): c for i, c in enumerate(comps)})

    def component(self, idx: Sequence[int]) -> Polynomial:
        """Coefficient on an arbitrary (unsorted) index tuple."""
        s, key = _sort_sign(idx)
        if s == 0:
            return const(self.dim, 0)
        c = self.coeffs.get(key)
        if c is None:
            return const(self.dim, 0)
        return c if s > 0 else -c

    def one_form_components(self):
        if self.degree != 1:
            raise ValueError("not a 1-form")
        return [self.component((i,)) for i in range(self.dim)]

    def function_value(self) -> Polynomial:
        if self.degree != 0:
            raise ValueError("not a 0-form")
        return self.component(())

    def _check(self, other: "DifferentialForm"):
        if other.dim != self.dim or other.degree != self.degree:
            raise ValueError(
                f"form mismatch: ({self.dim},{self.degree}) vs ({other.dim},{other.degree})"
            )

    def __add__(self, other: "DifferentialForm"):
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return DifferentialForm(self.dim, self.degree, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return DifferentialForm(self.dim, self.degree, {k: -c for k, c in self.coeffs.items()})

    def scale(self, f) -> "DifferentialForm":
        return DifferentialForm(self.dim, self.degree, {k: f * c for k, c in self.coeffs.items()})

    def __eq__(self, other):
        return (
            isinstance(other, DifferentialForm)
            and self.dim == other.dim
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.dim, self.degree, frozenset(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        if not self.coeffs:
            return f"DifferentialForm(0, degree={self.degree})"
        parts = []
        for k in sorted(self.coeffs):
            basis = "^".join(f"dx{i + 1}" for i in k)
            parts.append(f"({self.coeffs[k]})" + (f"*{basis}" if basis else ""))
        return " + ".join(parts)


def exterior_derivative(w: DifferentialForm) -> DifferentialForm:
    if w.degree >= w.dim:
        return DifferentialForm(w.dim, w.degree + 1)
    items = []
    for idx, c in w.coeffs.items():
        for j in range(w.dim):
            if j in idx:
                continue
            dc = c.diff(j)
            if dc:
                items.append(((j,) + idx, dc))
    return DifferentialForm.from_unsorted(w.dim, w.degree + 1, items)


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    k = a.degree + b.degree
    if k > a.dim:
        return DifferentialForm(a.dim, k)
    items = []
    for i1, c1 in a.coeffs.items():
        for i2, c2 in b.coeffs.items():
            if set(i1) & set(i2):
                continue
            items.append((i1 + i2, c1 * c2))
    return DifferentialForm.from_unsorted(a.dim, k, items)


def interior(X: VectorField, w: DifferentialForm) -> DifferentialForm:
    """Contraction into the first slot: ``(i_X w)(Y,...) = w(X, Y, ...)``."""
    if X.dim != w.dim:
        raise ValueError(f"dimension mismatch: {X.dim} vs {w.dim}")
    if w.degree == 0:
        raise ValueError("cannot contract a vector field into a 0-form")
    items = []
    for idx, c in w.coeffs.items():
        for pos, i in enumerate(idx):
            xi = X.comps[i]
            if xi:
                rest = idx[:pos] + idx[pos + 1:]
                sign = -1 if pos % 2 else 1
                items.append((rest, xi * c * sign))
    return DifferentialForm.from_unsorted(w.dim, w.degree - 1, items)


def lie_derivative(X: VectorField, w: DifferentialForm) -> DifferentialForm:
    """Coordinate formula ``(L_X w)_I = X(w_I) + sum_k w_{I[k->j]} d_{i_k} X^j``.

    Computed directly rather than through Cartan's formula so the two can be
    checked against each other.
    """
    if X.dim != w.dim:
        raise ValueError(f"dimension mismatch: {X.dim} vs {w.dim}")
    d = w.dim
    out = {}
    for idx in combinations(range(d), w.degree):
        acc = X(w.component(idx))
        for k, ik in enumerate(idx):
            for j in range(d):
                dX = X.comps[j].diff(ik)
                if not dX:
                    continue
                swapped = idx[:k] + (j,) + idx[k + 1:]
                acc = acc + w.component(swapped) * dX
        if acc:
            out[idx] = acc
    return DifferentialForm(d, w.degree, out)


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    X._check(Y)
    return VectorField([X(b) - Y(a) for a, b in zip(X.comps, Y.comps)])
