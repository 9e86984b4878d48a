"""B_n-generalized almost complex and almost pseudo-Hermitian structures.

``F`` and ``Gend`` are polynomial matrices in the frame of the split model;
``u0`` is a polynomial section spanning ``ker F``.  Validation is report
based: every invariant becomes a named check with a witness on failure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence

from . import matrices as mx
from .courant import GeneralizedSection, OddExactAlgebroid, dorfman_lie
from .linalg import rank
from .poly import Polynomial, const
from .report import Stage
from .scalars import GaussianRational, I

__all__ = [
    "BnAlmostComplex",
    "BnPseudoHermitian",
    "EigenDecomposition",
    "sample_points",
    "validate_bn_gacs",
    "validate_pseudo_hermitian",
    "eigen_decompose",
    "nijenhuis",
    "is_integrable",
    "perp_projector",
    "perp_frame",
]

SAMPLE_VALUES = (Fraction(0), Fraction(1), Fraction(-1, 2))


def sample_points(d: int) -> List[tuple]:
    """Fixed rational grid used for pointwise rank checks."""
    return list(product(SAMPLE_VALUES, repeat=d))


def _sign(n: int) -> int:
    return 1 if n % 2 == 0 else -1


def _poly_matrix(alg, M):
    return [[e if isinstance(e, Polynomial) else const(alg.dim, e) for e in row] for row in M]


def _poly_vector(alg, v):
    v = v.comps if isinstance(v, GeneralizedSection) else v
    return [e if isinstance(e, Polynomial) else const(alg.dim, e) for e in v]


@dataclass
class BnAlmostComplex:
    alg: OddExactAlgebroid
    F: list
    u0: list

    def __post_init__(self):
        self.F = _poly_matrix(self.alg, self.F)
        self.u0 = _poly_vector(self.alg, self.u0)
        N = self.alg.rank
        if len(self.F) != N or any(len(r) != N for r in self.F) or len(self.u0) != N:
            raise ValueError(f"F must be {N}x{N} and u0 of length {N}")

    @property
    def n(self) -> int:
        return self.alg.dim

    @property
    def sign(self) -> int:
        """``(-1)^n``, the prescribed value of ``<u0, u0>``."""
        return _sign(self.n)

    def apply(self, v) -> List[Polynomial]:
        return mx.mat_vec(self.F, _poly_vector(self.alg, v))

    def section(self, v) -> GeneralizedSection:
        return GeneralizedSection(self.alg.dim, self.apply(v))


@dataclass
class BnPseudoHermitian:
    alg: OddExactAlgebroid
    G: list
    F: list
    u0: list

    def __post_init__(self):
        self.G = _poly_matrix(self.alg, self.G)
        self.F = _poly_matrix(self.alg, self.F)
        self.u0 = _poly_vector(self.alg, self.u0)

    @property
    def complex_structure(self) -> BnAlmostComplex:
        return BnAlmostComplex(self.alg, self.F, self.u0)

    @property
    def companion(self) -> BnAlmostComplex:
        """``Gend F``, again a B_n-generalized almost complex structure."""
        return BnAlmostComplex(self.alg, mx.mat_mul(self.G, self.F), self.u0)

    def projector(self, sign: int):
        """``(Id +- Gend)/2`` onto ``E+`` or ``E-``."""
        N = self.alg.rank
        Id = mx.identity(self.alg.dim, N)
        M = mx.mat_add(Id, self.G) if sign > 0 else mx.mat_sub(Id, self.G)
        return mx.mat_scale(Fraction(1, 2), M)


def perp_projector(alg: OddExactAlgebroid, u0):
    """``P v = v - (-1)^n <v, u0> u0``, the orthogonal projection onto ``U^perp``."""
    u0 = _poly_vector(alg, u0)
    s = _sign(alg.dim)
    Id = mx.identity(alg.dim, alg.rank)
    return mx.mat_sub(Id, mx.mat_scale(s, mx.outer(u0, alg.lower(u0))))


def perp_frame(alg: OddExactAlgebroid, u0) -> List[GeneralizedSection]:
    """Projections of the frame onto ``U^perp``; a spanning set of ``Gamma(U^perp)``."""
    P = perp_projector(alg, u0)
    return [GeneralizedSection(alg.dim, [row[a] for row in P]) for a in range(alg.rank)]


def _first_nonzero(M, alg=None):
    for i, row in enumerate(M):
        for j, a in enumerate(row):
            if a:
                return {"entry": [i + 1, j + 1], "value": str(a)}
    return None


def _square_formula(alg, u0):
    """``-Id + (-1)^n <., u0> u0``."""
    s = _sign(alg.dim)
    return mx.mat_add(mx.mat_scale(-1, mx.identity(alg.dim, alg.rank)), mx.mat_scale(s, mx.outer(u0, alg.lower(u0))))


def validate_bn_gacs(alg: OddExactAlgebroid, F, u0, points: Optional[Sequence] = None, prefix: str = "") -> Stage:
    """All invariants of a B_n-generalized almost complex structure."""
    S = BnAlmostComplex(alg, F, u0)
    F, u0 = S.F, S.u0
    st = Stage(prefix + "bn-almost-complex")
    gF = mx.mat_mul(alg.gram, F)
    skew = mx.mat_add(gF, mx.transpose(gF))
    st.add("F skew for <.,.>", mx.is_zero_matrix(skew), _first_nonzero(skew))
    res = mx.mat_sub(mx.mat_mul(F, F), _square_formula(alg, u0))
    st.add("F^2 = -Id + (-1)^n <.,u0> u0", mx.is_zero_matrix(res), _first_nonzero(res))
    norm = alg.pairing(u0, u0)
    st.add("<u0,u0> = (-1)^n", norm == S.sign, {"value": str(norm), "expected": S.sign})
    Fu0 = mx.mat_vec(F, u0)
    st.add("F u0 = 0", mx.is_zero_vector(Fu0), [str(x) for x in Fu0])
    bad = None
    for p in points if points is not None else sample_points(alg.dim):
        r = rank(mx.evaluate_matrix(F, p))
        if r != 2 * alg.dim:
            bad = {"point": [str(x) for x in p], "rank": r}
            break
    st.add("rank F = 2n on sample grid", bad is None, bad)
    return st


# -- eigen-decomposition ----------------------------------------------------------------


@dataclass
class EigenDecomposition:
    L: list
    Lbar: list
    U: list
    parts: dict = field(default_factory=dict)
    stage: Stage = None


def _complex_l_projector(alg, F):
    """``(-F^2 - i F)/2``: projects onto ``L`` along ``Lbar + U``."""
    F2 = mx.mat_mul(F, F)
    M = mx.mat_sub(mx.mat_scale(-1, F2), mx.mat_scale(I, F))
    return mx.mat_scale(Fraction(1, 2), M)


def _columns(M):
    return [[row[j] for row in M] for j in range(len(M[0]))]


def _select_basis(vectors, points, target):
    """Pick ``target`` vectors independent at the first sample point where that is possible."""
    for p in points:
        vals = [mx.evaluate_vector(v, p) for v in vectors]
        chosen, chosen_vals = [], []
        for v, val in zip(vectors, vals):
            if rank(chosen_vals + [val]) > len(chosen_vals):
                chosen.append(v)
                chosen_vals.append(val)
            if len(chosen) == target:
                return chosen
    return [v for v in vectors if not mx.is_zero_vector(v)][:target]


def _conj_vec(v):
    return [a.conjugate() for a in v]


def _rank_at(vectors, point):
    if not vectors:
        return 0
    return rank([mx.evaluate_vector(v, point) for v in vectors])


def eigen_decompose(alg: OddExactAlgebroid, structure, points=None) -> EigenDecomposition:
    """Complex frames of ``L``, ``Lbar`` and ``U^C``; for pseudo-Hermitian input also
    of the parity-dependent decomposition of ``(E+-)^C``."""
    pts = points if points is not None else sample_points(alg.dim)
    if isinstance(structure, BnPseudoHermitian):
        S = structure.complex_structure
        ph = structure
    else:
        S, ph = structure, None
    n = alg.dim
    PL = _complex_l_projector(alg, S.F)
    L = _select_basis(_columns(PL), pts, n)
    Lbar = [_conj_vec(v) for v in L]
    st = Stage("eigen-decomposition")
    FL = [mx.vec_sub(mx.mat_vec(S.F, v), mx.vec_scale(I, v)) for v in L]
    st.add("F = i on L", all(mx.is_zero_vector(x) for x in FL))
    iso = [alg.pairing(a, b) for a in L for b in L]
    st.add("L isotropic", all(not x for x in iso))
    st.add("rank L = n", all(_rank_at(L, p) == n for p in pts), {"n": n})
    st.add("L cap Lbar = 0", all(_rank_at(L + Lbar, p) == 2 * n for p in pts))
    st.add(
        "E^C = L + Lbar + U^C",
        all(_rank_at(L + Lbar + [S.u0], p) == alg.rank for p in pts),
    )
    dec = EigenDecomposition(L, Lbar, [S.u0], stage=st)
    if ph is not None:
        even = n % 2 == 0
        for sign, name in ((1, "E+"), (-1, "E-")):
            P = ph.projector(sign)
            parts = [mx.mat_vec(P, v) for v in L]
            # P commutes with F, so P(L) spans E_sign ∩ L
            r_l = max(_rank_at(parts, p) for p in pts)
            in_l = _select_basis(parts, pts, r_l) if r_l else []
            in_lbar = [_conj_vec(v) for v in in_l]
            dec.parts[name] = {"L": in_l, "Lbar": in_lbar}
            u0_here = mx.is_zero_vector(mx.vec_sub(mx.mat_vec(P, S.u0), S.u0))
            dec.parts[name]["u0"] = u0_here
            dimE = alg.dim + 1 if sign > 0 else alg.dim
            total = 2 * r_l + (1 if u0_here else 0)
            st.add(f"dim {name} = {dimE} from decomposition", total == dimE, {"rank_L_part": r_l, "u0": u0_here})
            expected_u0 = (sign > 0) == even
            st.add(
                f"u0 in {name}^C iff n {'even' if sign > 0 else 'odd'}",
                u0_here == expected_u0,
                {"n": n, "u0_in": u0_here},
            )
    return dec


# -- Nijenhuis tensor and integrability -------------------------------------------------------


def nijenhuis(alg: OddExactAlgebroid, F, u0, u, v) -> GeneralizedSection:
    """``N_F(u,v) = [Fu,Fv] - [u,v] - F([Fu,v] + [u,Fv])`` for ``u, v`` orthogonal to ``u0``."""
    u = alg.section(u)
    v = alg.section(v)
    u0v = _poly_vector(alg, u0)
    for name, x in (("u", u), ("v", v)):
        if alg.pairing(x, u0v):
            raise ValueError(f"argument {name} is not orthogonal to u0")
    F = _poly_matrix(alg, F)
    Fu = GeneralizedSection(alg.dim, mx.mat_vec(F, u.vector()))
    Fv = GeneralizedSection(alg.dim, mx.mat_vec(F, v.vector()))
    br = alg.dorfman
    inner = br(Fu, v) + br(u, Fv)
    out = br(Fu, Fv) - br(u, v)
    return out - GeneralizedSection(alg.dim, mx.mat_vec(F, inner.vector()))


def nijenhuis_frame_values(alg, F, u0):
    """``N_F`` on all pairs of the projected frame, keyed by frame index pairs."""
    frame = perp_frame(alg, u0)
    out = {}
    for a, fa in enumerate(frame):
        for b, fb in enumerate(frame):
            if b < a:
                continue
            out[(a, b)] = nijenhuis(alg, F, u0, fa, fb)
    return out


def is_integrable(alg: OddExactAlgebroid, F, u0, prefix: str = "") -> Stage:
    """Vanishing of ``N_F`` on the projected frame; on success also checks
    ``L_{u0} F = 0``, closure of ``Gamma(L)`` and the complex-frame form
    ``<[u - iFu, v - iFv], w - iFw> = 0``."""
    S = BnAlmostComplex(alg, F, u0)
    st = Stage(prefix + "integrability")
    values = nijenhuis_frame_values(alg, S.F, S.u0)
    witness = None
    for (a, b), val in values.items():
        if not val.is_zero():
            witness = {
                "u": f"P {alg.frame_label(a)}",
                "v": f"P {alg.frame_label(b)}",
                "N_F(u,v)": [str(c) for c in val.comps],
            }
            break
    integrable = witness is None
    st.add("N_F = 0 on U^perp x U^perp", integrable, witness)
    st.data["integrable"] = integrable
    u0s = GeneralizedSection(alg.dim, S.u0)
    LF = dorfman_lie(alg, u0s, S.F)
    # these hold for every integrable structure; reported as informational otherwise
    st.add("L_u0 F = 0", mx.is_zero_matrix(LF), _first_nonzero(LF), claimed=integrable)
    dec = eigen_decompose(alg, S)
    closure_bad = None
    for i, x in enumerate(dec.L):
        for j, y in enumerate(dec.L):
            br = alg.dorfman(GeneralizedSection(alg.dim, x), GeneralizedSection(alg.dim, y)).vector()
            res = mx.vec_sub(mx.mat_vec(S.F, br), mx.vec_scale(I, br))
            if not mx.is_zero_vector(res):
                closure_bad = {"pair": [i, j], "bracket": [str(c) for c in br]}
                break
        if closure_bad:
            break
    st.add("[Gamma(L), Gamma(L)] in Gamma(L)", closure_bad is None, closure_bad, claimed=integrable)
    frame = perp_frame(alg, S.u0)
    full = [alg.frame(a) for a in range(alg.rank)]

    def lower_l(x):
        xv = x.vector()
        return GeneralizedSection(alg.dim, mx.vec_sub(xv, mx.vec_scale(I, mx.mat_vec(S.F, xv))))

    dorf_bad = None
    for a, x in enumerate(frame):
        for b, y in enumerate(frame):
            br = alg.dorfman(lower_l(x), lower_l(y))
            for c, w in enumerate(full):
                val = alg.pairing(br, lower_l(w))
                if val:
                    dorf_bad = {"frame": [a, b, c], "value": str(val)}
                    break
            if dorf_bad:
                break
        if dorf_bad:
            break
    st.add("<[u-iFu, v-iFv], w-iFw> = 0", dorf_bad is None, dorf_bad, claimed=integrable)
    st.add(
        "complex-frame criterion agrees with N_F",
        (dorf_bad is None) == integrable,
        {"N_F_zero": integrable, "complex_form_zero": dorf_bad is None},
    )
    return st


# -- pseudo-Hermitian structures ----------------------------------------------------------------------


def validate_pseudo_hermitian(alg: OddExactAlgebroid, G, F, u0, points=None) -> Stage:
    ph = BnPseudoHermitian(alg, G, F, u0)
    G, F, u0 = ph.G, ph.F, ph.u0
    pts = points if points is not None else sample_points(alg.dim)
    st = Stage("bn-pseudo-hermitian")
    N = alg.rank
    Id = mx.identity(alg.dim, N)
    orth = mx.mat_sub(mx.mat_mul(mx.mat_mul(mx.transpose(G), alg.gram), G), alg.gram)
    st.add("Gend orthogonal", mx.is_zero_matrix(orth), _first_nonzero(orth))
    gG = mx.mat_mul(alg.gram, G)
    sym = mx.mat_sub(gG, mx.transpose(gG))
    st.add("Gend symmetric", mx.is_zero_matrix(sym), _first_nonzero(sym))
    inv = mx.mat_sub(mx.mat_mul(G, G), Id)
    st.add("Gend^2 = Id", mx.is_zero_matrix(inv), _first_nonzero(inv))
    Pm = ph.projector(-1)
    bad = None
    for p in pts:
        Pv = mx.evaluate_matrix(Pm, p)
        r = rank(Pv)
        r_anchor = rank(Pv[: alg.dim]) if r else 0
        gram_minus = mx.mat_mul(mx.mat_mul(mx.transpose(Pv), alg.gram), Pv)
        r_gram = rank(gram_minus)
        if not (r == alg.dim and r_anchor == alg.dim and r_gram == alg.dim):
            bad = {"point": [str(x) for x in p], "rank_E-": r, "rank_anchor": r_anchor, "rank_gram": r_gram}
            break
    st.add("pi|E- isomorphism and <.,.>|E- non-degenerate", bad is None, bad)
    comm = mx.commutator(G, F)
    st.add("Gend F = F Gend", mx.is_zero_matrix(comm), _first_nonzero(comm))
    s = _sign(alg.dim)
    Gu0 = mx.vec_sub(mx.mat_vec(G, u0), mx.vec_scale(s, u0))
    st.add("Gend u0 = (-1)^n u0", mx.is_zero_vector(Gu0), [str(x) for x in Gu0])
    # G-skewness: A^T (G^T g) + (G^T g) A = 0 with G(u,v) = <Gend u, v>
    Gb = mx.mat_mul(mx.transpose(G), alg.gram)
    for name, A in (("F", F), ("Gend F", mx.mat_mul(G, F))):
        r = mx.mat_add(mx.mat_mul(mx.transpose(A), Gb), mx.mat_mul(Gb, A))
        st.add(f"{name} G-skew", mx.is_zero_matrix(r), _first_nonzero(r))
    for sub in (validate_bn_gacs(alg, F, u0, pts), validate_bn_gacs(alg, mx.mat_mul(G, F), u0, pts, prefix="companion ")):
        for c in sub.postconditions:
            st.postconditions.append(type(c)(f"{sub.stage}: {c.name}", c.passed, c.witness, c.claimed))
    i1 = is_integrable(alg, F, u0)
    i2 = is_integrable(alg, mx.mat_mul(G, F), u0, prefix="companion ")
    joint = i1.data["integrable"] and i2.data["integrable"]
    st.data["F_integrable"] = i1.data["integrable"]
    st.data["GF_integrable"] = i2.data["integrable"]
    st.data["integrable"] = joint
    st.add("F integrable", i1.data["integrable"], i1.check("N_F = 0 on U^perp x U^perp").witness, claimed=False)
    st.add("Gend F integrable", i2.data["integrable"], i2.check("N_F = 0 on U^perp x U^perp").witness, claimed=False)
    LG = dorfman_lie(alg, GeneralizedSection(alg.dim, u0), G)
    st.add("L_u0 Gend = 0", mx.is_zero_matrix(LG), _first_nonzero(LG), claimed=joint)
    return st
