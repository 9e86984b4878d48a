"""The split model E = TM + R + T*M of an odd exact Courant algebroid over R^d.

Frame order is ``(d_1 .. d_d, e, dx_1 .. dx_d)``; a section is stored by its
``2d+1`` polynomial frame components.  The scalar product is

    <X+f+xi, Y+g+eta> = 1/2 (eta(X) + xi(Y)) + f g,

which has constant Gram matrix and signature (d+1, d).  The Dorfman bracket
coefficients of the twist terms are read from ``bracket_constants.json``,
which is produced by :mod:`oddcourant.oracle`.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from . import matrices as mx
from .forms import (
    DifferentialForm,
    VectorField,
    exterior_derivative,
    interior,
    lie_bracket,
    lie_derivative,
    wedge,
)
from .linalg import linear_kernel
from .poly import Polynomial, const
from .report import Stage
from .scalars import GaussianRational

__all__ = [
    "BracketCoefficients",
    "load_bracket_coefficients",
    "OddExactAlgebroid",
    "GeneralizedSection",
    "GeneralizedConnection",
    "TorsionForm",
    "random_polynomial",
    "random_section",
    "check_courant_axioms",
    "dorfman_lie",
    "check_connection_axioms",
    "torsion",
    "torsion_value",
    "cyclic_sum",
    "torsion_anti_part",
]


@dataclass(frozen=True)
class BracketCoefficients:
    """Coefficients of F2 in the twisted bracket, and the H3 closure constant.

    The bracket scalar part carries ``c1 F2(X,Y)``, the form part
    ``c2 g i_X F2 + c3 f i_Y F2``; the Jacobi identity requires
    ``dF2 = 0`` and ``dH3 = k F2^F2``.
    """

    c1: Fraction
    c2: Fraction
    c3: Fraction
    k: Fraction


@lru_cache(maxsize=1)
def load_bracket_coefficients() -> BracketCoefficients:
    data = json.loads(resources.files("oddcourant").joinpath("bracket_constants.json").read_text())
    pinned = data["pinned"]
    return BracketCoefficients(
        Fraction(pinned["c1"]),
        Fraction(pinned["c2"]),
        Fraction(pinned["c3"]),
        Fraction(data["twist_conditions"]["dH3_equals_k_F2_wedge_F2"]),
    )


class GeneralizedSection:
    """A section ``X + f + xi`` given by polynomial frame components."""

    __slots__ = ("dim", "comps")

    def __init__(self, dim: int, comps: Sequence):
        if len(comps) != 2 * dim + 1:
            raise ValueError(f"expected {2 * dim + 1} components, got {len(comps)}")
        self.dim = dim
        self.comps = tuple(c if isinstance(c, Polynomial) else const(dim, c) for c in comps)

    @classmethod
    def from_parts(cls, X: VectorField, f: Polynomial, xi: DifferentialForm) -> "GeneralizedSection":
        d = X.dim
        return cls(d, list(X.comps) + [f] + xi.one_form_components())

    @classmethod
    def frame(cls, dim: int, a: int) -> "GeneralizedSection":
        return cls(dim, [int(i == a) for i in range(2 * dim + 1)])

    @property
    def X(self) -> VectorField:
        return VectorField(self.comps[: self.dim])

    @property
    def f(self) -> Polynomial:
        return self.comps[self.dim]

    @property
    def xi(self) -> DifferentialForm:
        return DifferentialForm.one_form(self.comps[self.dim + 1:])

    def vector(self) -> List[Polynomial]:
        return list(self.comps)

    def __add__(self, other):
        return GeneralizedSection(self.dim, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return GeneralizedSection(self.dim, [a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return GeneralizedSection(self.dim, [-a for a in self.comps])

    def scale(self, f) -> "GeneralizedSection":
        return GeneralizedSection(self.dim, [a * f for a in self.comps])

    def is_zero(self) -> bool:
        return all(not c for c in self.comps)

    def __eq__(self, other):
        return isinstance(other, GeneralizedSection) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def __repr__(self):
        return "GeneralizedSection(" + ", ".join(str(c) for c in self.comps) + ")"


class OddExactAlgebroid:
    """Split model with twist data ``(F2, H3)`` and pinned bracket coefficients."""

    def __init__(
        self,
        dim: int,
        F2: Optional[DifferentialForm] = None,
        H3: Optional[DifferentialForm] = None,
        coefficients: Optional[BracketCoefficients] = None,
    ):
        if dim < 1:
            raise ValueError("base dimension must be at least 1")
        self.dim = dim
        self.F2 = F2 if F2 is not None else DifferentialForm(dim, 2)
        self.H3 = H3 if H3 is not None else DifferentialForm(dim, 3)
        if self.F2.dim != dim or self.F2.degree != 2:
            raise ValueError("F2 must be a 2-form on R^dim")
        if self.H3.dim != dim or self.H3.degree != 3:
            raise ValueError("H3 must be a 3-form on R^dim")
        self.coefficients = coefficients or load_bracket_coefficients()
        self.rank = 2 * dim + 1
        half = Fraction(1, 2)
        g = [[Fraction(0)] * self.rank for _ in range(self.rank)]
        for i in range(dim):
            g[i][dim + 1 + i] = half
            g[dim + 1 + i][i] = half
        g[dim][dim] = Fraction(1)
        self.gram = g
        ginv = [[Fraction(0)] * self.rank for _ in range(self.rank)]
        for i in range(dim):
            ginv[i][dim + 1 + i] = Fraction(2)
            ginv[dim + 1 + i][i] = Fraction(2)
        ginv[dim][dim] = Fraction(1)
        self.gram_inv = ginv
        self._frame_brackets: Dict[Tuple[int, int], GeneralizedSection] = {}

    @property
    def is_twisted(self) -> bool:
        return not (self.F2.is_zero() and self.H3.is_zero())

    def frame_label(self, a: int) -> str:
        d = self.dim
        if a < d:
            return f"d{a + 1}"
        if a == d:
            return "e"
        return f"dx{a - d}"

    def zero(self) -> Polynomial:
        return const(self.dim, 0)

    def section(self, comps) -> GeneralizedSection:
        return comps if isinstance(comps, GeneralizedSection) else GeneralizedSection(self.dim, comps)

    def frame(self, a: int) -> GeneralizedSection:
        return GeneralizedSection.frame(self.dim, a)

    # -- pointwise structure ------------------------------------------------

    def pairing(self, u, v) -> Polynomial:
        uc = u.comps if isinstance(u, GeneralizedSection) else u
        vc = v.comps if isinstance(v, GeneralizedSection) else v
        d = self.dim
        half = Fraction(1, 2)
        acc = uc[d] * vc[d]
        for i in range(d):
            acc = acc + (uc[i] * vc[d + 1 + i] + uc[d + 1 + i] * vc[i]) * half
        return acc if isinstance(acc, Polynomial) else const(d, acc)

    def anchor(self, u) -> VectorField:
        uc = u.comps if isinstance(u, GeneralizedSection) else u
        return VectorField(uc[: self.dim])

    def lower(self, u) -> List:
        """The covector ``<u, .>`` as a row of frame components (``g u``)."""
        uc = u.comps if isinstance(u, GeneralizedSection) else u
        return mx.mat_vec(self.gram, uc)

    def adjoint(self, A):
        """Adjoint for the scalar product: ``g^-1 A^T g``."""
        return mx.mat_mul(mx.mat_mul(self.gram_inv, mx.transpose(A)), self.gram)

    def is_skew(self, A) -> bool:
        gA = mx.mat_mul(self.gram, A)
        return mx.is_zero_matrix(mx.mat_add(gA, mx.transpose(gA)))

    def wedge_endo(self, u, v):
        """``(u^v)(w) = <u,w> v - <v,w> u`` as a matrix."""
        return mx.mat_sub(mx.outer(list(v), self.lower(u)), mx.outer(list(u), self.lower(v)))

    def derivative(self, u, A):
        """Componentwise derivative of a matrix or vector along ``pi(u)``."""
        X = self.anchor(u)
        if A and isinstance(A[0], list):
            return [[X(a) for a in row] for row in A]
        return [X(a) for a in A]

    # -- bracket ------------------------------------------------------------

    def dorfman(self, u: GeneralizedSection, v: GeneralizedSection, coefficients=None) -> GeneralizedSection:
        c = coefficients or self.coefficients
        X, f, xi = u.X, u.f, u.xi
        Y, g, eta = v.X, v.f, v.xi
        vec = lie_bracket(X, Y)
        ixF = interior(X, self.F2)
        iyF = interior(Y, self.F2)
        scal = X(g) - Y(f)
        if not self.F2.is_zero():
            scal = scal + interior(Y, ixF).function_value() * c.c1
        form = lie_derivative(X, eta) - interior(Y, exterior_derivative(xi))
        form = form + exterior_derivative(DifferentialForm.function(f)).scale(g * 2)
        if not self.H3.is_zero():
            form = form + interior(Y, interior(X, self.H3))
        if not self.F2.is_zero():
            form = form + ixF.scale(g * c.c2) + iyF.scale(f * c.c3)
        return GeneralizedSection.from_parts(vec, scal, form)

    def frame_bracket(self, a: int, b: int) -> GeneralizedSection:
        key = (a, b)
        if key not in self._frame_brackets:
            self._frame_brackets[key] = self.dorfman(self.frame(a), self.frame(b))
        return self._frame_brackets[key]

    # -- twist conditions ---------------------------------------------------

    def twist_conditions(self) -> Stage:
        st = Stage("twist-conditions")
        dF = exterior_derivative(self.F2)
        st.add("dF2 = 0", dF.is_zero(), witness=repr(dF))
        lhs = exterior_derivative(self.H3)
        rhs = wedge(self.F2, self.F2).scale(const(self.dim, self.coefficients.k))
        res = lhs - rhs
        st.add(f"dH3 = {self.coefficients.k} F2^F2", res.is_zero(), witness=repr(res))
        return st


# -- random data ----------------------------------------------------------------


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.randint(1, 3))


def random_polynomial(nvars: int, rng: random.Random, degree: int = 2, density: float = 0.5) -> Polynomial:
    from itertools import product

    terms = {}
    for e in product(range(degree + 1), repeat=nvars):
        if sum(e) <= degree and rng.random() < density:
            terms[e] = _random_rational(rng)
    return Polynomial(nvars, terms)


def random_section(alg: OddExactAlgebroid, rng: random.Random, degree: int = 2) -> GeneralizedSection:
    return GeneralizedSection(alg.dim, [random_polynomial(alg.dim, rng, degree) for _ in range(alg.rank)])


# -- axioms ----------------------------------------------------------------------


def _jacobi(alg, u, v, w, c=None):
    br = lambda a, b: alg.dorfman(a, b, c)
    return br(u, br(v, w)) - br(br(u, v), w) - br(v, br(u, w))


def _module_leibniz(alg, u, v, f, c=None):
    return alg.dorfman(u, v.scale(f), c) - alg.dorfman(u, v, c).scale(f) - v.scale(alg.anchor(u)(f))


def _metric(alg, u, v, w, c=None):
    return alg.anchor(u)(alg.pairing(v, w)) - alg.pairing(alg.dorfman(u, v, c), w) - alg.pairing(v, alg.dorfman(u, w, c))


def _symmetrization(alg, u, v, w, c=None):
    s = alg.dorfman(u, v, c) + alg.dorfman(v, u, c)
    return alg.pairing(s, w) - alg.anchor(w)(alg.pairing(u, v))


def _residual_is_zero(r) -> bool:
    return r.is_zero()


AXIOMS = ("jacobi", "leibniz", "metric", "symmetrization")


def axiom_residuals(alg, u, v, w, f, coefficients=None, which=AXIOMS):
    """Residuals of the four bracket axioms for one triple and one function."""
    out = {}
    for name in which:
        if name == "jacobi":
            out[name] = _jacobi(alg, u, v, w, coefficients)
        elif name == "leibniz":
            out[name] = _module_leibniz(alg, u, v, f, coefficients)
        elif name == "metric":
            out[name] = _metric(alg, u, v, w, coefficients)
        elif name == "symmetrization":
            out[name] = _symmetrization(alg, u, v, w, coefficients)
    return out


def check_courant_axioms(
    alg: OddExactAlgebroid,
    sections: Optional[Sequence[Tuple[GeneralizedSection, GeneralizedSection, GeneralizedSection]]] = None,
    seed: int = 0,
    n_random: int = 20,
    degree: int = 2,
) -> Stage:
    """Check the four Courant axioms as polynomial identities.

    The supplied triples are checked first, then ``n_random`` random triples
    drawn from ``random.Random(seed)``.  The first failure of each axiom is
    reported with its witness triple.
    """
    rng = random.Random(seed)
    triples = list(sections or [])
    for _ in range(n_random):
        triples.append(tuple(random_section(alg, rng, degree) for _ in range(3)))
    st = Stage("courant-axioms")
    st.data["triples"] = len(triples)
    failures: Dict[str, object] = {}
    for idx, (u, v, w) in enumerate(triples):
        f = random_polynomial(alg.dim, rng, degree)
        pending = tuple(a for a in AXIOMS if a not in failures)
        if not pending:
            break
        res = axiom_residuals(alg, u, v, w, f, which=pending)
        for name, r in res.items():
            if not r.is_zero():
                failures[name] = {
                    "triple_index": idx,
                    "u": [str(c) for c in u.comps],
                    "v": [str(c) for c in v.comps],
                    "w": [str(c) for c in w.comps],
                    "f": str(f),
                    "residual": [str(c) for c in r.comps] if isinstance(r, GeneralizedSection) else str(r),
                }
    for name in AXIOMS:
        st.add(name, name not in failures, witness=failures.get(name))
    return st


def dorfman_lie(alg: OddExactAlgebroid, u: GeneralizedSection, A) -> List[List[Polynomial]]:
    """The endomorphism ``v -> [u, A v] - A [u, v]``, computed on the frame."""
    cols = []
    for b in range(alg.rank):
        eb = alg.frame(b)
        Aeb = GeneralizedSection(alg.dim, [row[b] for row in A])
        col = mx.vec_sub(alg.dorfman(u, Aeb).vector(), mx.mat_vec(A, alg.dorfman(u, eb).vector()))
        cols.append(col)
    return mx.transpose(cols)


# -- connections -------------------------------------------------------------------


class GeneralizedConnection:
    """``D_u v = D0_u v + eta(u) v`` with ``D0`` the flat frame derivative.

    ``eta[a]`` is the matrix of ``eta(e_a)``; each must be skew for the
    scalar product, which makes ``D`` metric.
    """

    def __init__(self, alg: OddExactAlgebroid, eta=None, check: bool = True):
        self.alg = alg
        N = alg.rank
        if eta is None:
            eta = [mx.zeros(alg.dim, N) for _ in range(N)]
        if len(eta) != N:
            raise ValueError(f"need one correction matrix per frame direction ({N})")
        self.eta = [[[e if isinstance(e, Polynomial) else const(alg.dim, e) for e in row] for row in m] for m in eta]
        if check:
            for a, m in enumerate(self.eta):
                if not alg.is_skew(m):
                    raise ValueError(f"correction along {alg.frame_label(a)} is not skew for <.,.>")

    def eta_at(self, u) -> List[List[Polynomial]]:
        uc = u.comps if isinstance(u, GeneralizedSection) else u
        out = mx.zeros(self.alg.dim, self.alg.rank)
        for a, ua in enumerate(uc):
            if ua:
                out = mx.mat_add(out, mx.mat_scale(ua, self.eta[a]))
        return out

    def apply(self, u, v) -> GeneralizedSection:
        vc = v.comps if isinstance(v, GeneralizedSection) else v
        out = mx.vec_add(self.alg.derivative(u, list(vc)), mx.mat_vec(self.eta_at(u), list(vc)))
        return GeneralizedSection(self.alg.dim, out)

    def derivative_vector(self, u, w) -> List[Polynomial]:
        return self.apply(u, w).vector()

    def derivative_endo(self, u, A):
        """``(D_u A) = pi(u)(A) + [eta(u), A]``."""
        return mx.mat_add(self.alg.derivative(u, A), mx.commutator(self.eta_at(u), A))

    def frame_derivatives_endo(self, A):
        return [self.derivative_endo(self.alg.frame(a), A) for a in range(self.alg.rank)]

    def preserves_endo(self, A) -> bool:
        return all(mx.is_zero_matrix(m) for m in self.frame_derivatives_endo(A))

    def preserves_vector(self, w) -> bool:
        return all(mx.is_zero_vector(self.derivative_vector(self.alg.frame(a), w)) for a in range(self.alg.rank))

    def plus(self, eta) -> "GeneralizedConnection":
        return GeneralizedConnection(self.alg, [mx.mat_add(a, b) for a, b in zip(self.eta, eta)])

    def difference(self, other: "GeneralizedConnection"):
        return [mx.mat_sub(a, b) for a, b in zip(self.eta, other.eta)]


def check_connection_axioms(D: GeneralizedConnection, seed: int = 0, n_random: int = 5, degree: int = 2) -> Stage:
    alg = D.alg
    rng = random.Random(seed)
    st = Stage("connection-axioms")
    leib_fail = metric_fail = None
    for _ in range(n_random):
        u, v, w = (random_section(alg, rng, degree) for _ in range(3))
        f = random_polynomial(alg.dim, rng, degree)
        lhs = D.apply(v, u.scale(f))
        rhs = u.scale(alg.anchor(v)(f)) + D.apply(v, u).scale(f)
        if leib_fail is None and not (lhs - rhs).is_zero():
            leib_fail = {"u": str(u), "v": str(v), "f": str(f)}
        m = alg.anchor(w)(alg.pairing(u, v)) - alg.pairing(D.apply(w, u), v) - alg.pairing(u, D.apply(w, v))
        if metric_fail is None and not m.is_zero():
            metric_fail = {"u": str(u), "v": str(v), "w": str(w), "residual": str(m)}
    st.add("leibniz", leib_fail is None, leib_fail)
    st.add("metricity", metric_fail is None, metric_fail)
    return st


class TorsionForm:
    """Torsion stored by its values on frame triples."""

    def __init__(self, alg: OddExactAlgebroid, values):
        self.alg = alg
        self.values = values

    def __call__(self, u, v, w):
        return self.evaluate(u, v, w)

    def evaluate(self, u, v, w) -> Polynomial:
        uc = u.comps if isinstance(u, GeneralizedSection) else u
        vc = v.comps if isinstance(v, GeneralizedSection) else v
        wc = w.comps if isinstance(w, GeneralizedSection) else w
        N = self.alg.rank
        acc = self.alg.zero()
        for a in range(N):
            if not uc[a]:
                continue
            for b in range(N):
                if not vc[b]:
                    continue
                ub = uc[a] * vc[b]
                row = self.values[a][b]
                for c in range(N):
                    if wc[c] and row[c]:
                        acc = acc + ub * wc[c] * row[c]
        return acc

    def is_zero(self) -> bool:
        return all(not t for plane in self.values for row in plane for t in row)

    def nonzero_entry(self):
        N = self.alg.rank
        for a in range(N):
            for b in range(N):
                for c in range(N):
                    t = self.values[a][b][c]
                    if t:
                        lab = self.alg.frame_label
                        return {"frame": [lab(a), lab(b), lab(c)], "value": str(t)}
        return None

    def is_totally_skew(self) -> bool:
        N = self.alg.rank
        V = self.values
        for a in range(N):
            for b in range(N):
                for c in range(N):
                    t = V[a][b][c]
                    if t + V[b][a][c] or t + V[a][c][b]:
                        return False
        return True

    def __sub__(self, other: "TorsionForm") -> "TorsionForm":
        return TorsionForm(
            self.alg,
            [[[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(p1, p2)] for p1, p2 in zip(self.values, other.values)],
        )


def torsion(D: GeneralizedConnection) -> TorsionForm:
    """Frame values ``T(a,b,c) = <D_a e_b - D_b e_a - [e_a,e_b], e_c> + <D_c e_a, e_b>``."""
    alg = D.alg
    N = alg.rank
    g = alg.gram
    values = []
    for a in range(N):
        plane = []
        for b in range(N):
            br = alg.frame_bracket(a, b).comps
            # vector D_a e_b - D_b e_a - [e_a, e_b]; frame sections are constant
            vec = [D.eta[a][i][b] - D.eta[b][i][a] - br[i] for i in range(N)]
            row = []
            for c in range(N):
                acc = alg.zero()
                for i in range(N):
                    if g[i][c] and vec[i]:
                        acc = acc + vec[i] * g[i][c]
                # <D_c e_a, e_b> = sum_i eta[c][i][a] g[i][b]
                for i in range(N):
                    if g[i][b] and D.eta[c][i][a]:
                        acc = acc + D.eta[c][i][a] * g[i][b]
                row.append(acc)
            plane.append(row)
        values.append(plane)
    return TorsionForm(alg, values)


def torsion_value(D: GeneralizedConnection, u, v, w) -> Polynomial:
    """The torsion on arbitrary sections, straight from the definition."""
    alg = D.alg
    u, v = alg.section(u), alg.section(v)
    first = D.apply(u, v) - D.apply(v, u) - alg.dorfman(u, v)
    return alg.pairing(first, w) + alg.pairing(D.apply(w, u), v)


def cyclic_sum(alg: OddExactAlgebroid, eta) -> TorsionForm:
    """``(d eta)(u,v,w)``: cyclic sum of ``eta(u,v,w) = <eta(u) v, w>`` on frames."""
    N = alg.rank
    g = alg.gram

    def val(a, b, c):
        acc = alg.zero()
        for i in range(N):
            if g[i][c] and eta[a][i][b]:
                acc = acc + eta[a][i][b] * g[i][c]
        return acc

    cache = {}

    def cv(a, b, c):
        k = (a, b, c)
        if k not in cache:
            cache[k] = val(a, b, c)
        return cache[k]

    values = [[[cv(a, b, c) + cv(b, c, a) + cv(c, a, b) for c in range(N)] for b in range(N)] for a in range(N)]
    return TorsionForm(alg, values)


def torsion_anti_part(T: TorsionForm, F, u0, u, v) -> Polynomial:
    """``1/2 (T(Fu, Fv, u0) - T(u, v, u0))``."""
    Fu = mx.mat_vec(F, list(u.comps if isinstance(u, GeneralizedSection) else u))
    Fv = mx.mat_vec(F, list(v.comps if isinstance(v, GeneralizedSection) else v))
    return (T.evaluate(Fu, Fv, u0) - T.evaluate(u, v, u0)) * Fraction(1, 2)


def torsion_shift_difference(D: GeneralizedConnection, eta) -> TorsionForm:
    return torsion(D.plus(eta)) - torsion(D)
