"""Adapted generalized connections: construction and verification.

Every constructor returns a :class:`Construction` holding the connection, the
correction that produced it and a :class:`Stage` of postconditions.  Inputs
outside the hypotheses of a construction (non-integrable structures) still
go through; the affected postconditions are then informational.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from . import matrices as mx
from .courant import (
    GeneralizedConnection,
    GeneralizedSection,
    OddExactAlgebroid,
    TorsionForm,
    cyclic_sum,
    dorfman_lie,
    random_section,
    torsion,
    torsion_value,
)
from .linalg import rank
from .poly import Polynomial, const
from .quadratic import (
    ProlongationSpace,
    QuadraticSpace,
    generalized_first_prolongation,
    sk_parametrization,
    stabilizer_algebra,
    tensor_span_rank,
    tensor_to_endos,
    unitary_prolongation_dimension,
)
from .report import Stage
from .scalars import conj
from .structures import (
    BnPseudoHermitian,
    eigen_decompose,
    nijenhuis,
    perp_frame,
    perp_projector,
)

__all__ = [
    "ConnectionCorrection",
    "Construction",
    "AdaptedSpaceModel",
    "trilinear_to_correction",
    "correction_to_trilinear",
    "torsion_free_connection",
    "make_u0_parallel",
    "nijenhuis_identity_check",
    "build_adapted",
    "gamma_crosscheck",
    "levi_civita",
    "make_metric_u0_parallel",
    "build_bn_kahler_connection",
    "nfl_identity_check",
    "torsion_free_feasibility",
    "integrability_obstruction",
    "adapted_space",
    "random_cocycle",
]

HALF = Fraction(1, 2)


@dataclass
class ConnectionCorrection:
    """``eta[a]`` is the skew endomorphism ``eta(e_a)``."""

    eta: list
    tag: str = ""

    def __add__(self, other: "ConnectionCorrection") -> "ConnectionCorrection":
        return ConnectionCorrection([mx.mat_add(a, b) for a, b in zip(self.eta, other.eta)], f"{self.tag}+{other.tag}")

    def is_zero(self) -> bool:
        return all(mx.is_zero_matrix(m) for m in self.eta)

    def is_skew(self, alg: OddExactAlgebroid) -> bool:
        return all(alg.is_skew(m) for m in self.eta)


@dataclass
class Construction:
    connection: GeneralizedConnection
    stage: Stage
    correction: Optional[ConnectionCorrection] = None
    extras: dict = field(default_factory=dict)


def trilinear_to_correction(alg: OddExactAlgebroid, t, tag: str = "") -> ConnectionCorrection:
    """``eta`` with ``<eta(e_a) e_b, e_c> = t[a][b][c]``."""
    N = alg.rank
    ginv = alg.gram_inv
    eta = []
    for a in range(N):
        m = [[alg.zero() for _ in range(N)] for _ in range(N)]
        for b in range(N):
            for c in range(N):
                x = t[a][b][c]
                if not x:
                    continue
                for i in range(N):
                    if ginv[i][c]:
                        m[i][b] = m[i][b] + x * ginv[i][c]
        eta.append(m)
    return ConnectionCorrection(eta, tag)


def correction_to_trilinear(alg: OddExactAlgebroid, eta) -> list:
    eta = eta.eta if isinstance(eta, ConnectionCorrection) else eta
    g = alg.gram
    N = alg.rank
    out = []
    for m in eta:
        gm = mx.mat_mul(g, m)
        out.append([[gm[c][b] for c in range(N)] for b in range(N)])
    return out


def _pullback(alg, T: TorsionForm, A, B, C) -> TorsionForm:
    """``(a,b,c) -> T(A e_a, B e_b, C e_c)`` by three successive contractions."""
    N = alg.rank
    V = T.values

    def contract(V, M, slot):
        out = [[[alg.zero() for _ in range(N)] for _ in range(N)] for _ in range(N)]
        for a in range(N):
            for b in range(N):
                for c in range(N):
                    idx = [a, b, c]
                    acc = alg.zero()
                    for i in range(N):
                        m = M[i][idx[slot]]
                        if not m:
                            continue
                        j = list(idx)
                        j[slot] = i
                        v = V[j[0]][j[1]][j[2]]
                        if v:
                            acc = acc + v * m
                    out[a][b][c] = acc
        return out

    V = contract(V, A, 0)
    V = contract(V, B, 1)
    V = contract(V, C, 2)
    return TorsionForm(alg, V)


def _columns(M):
    return [[row[j] for row in M] for j in range(len(M[0]))]


def _frame_derivatives(D: GeneralizedConnection, A):
    return [D.derivative_endo(D.alg.frame(a), A) for a in range(D.alg.rank)]


def _combine(coeffs, mats, alg):
    out = mx.zeros(alg.dim, alg.rank)
    for c, m in zip(coeffs, mats):
        if c:
            out = mx.mat_add(out, mx.mat_scale(c, m))
    return out


def _is_symmetric(alg, A) -> bool:
    gA = mx.mat_mul(alg.gram, A)
    return mx.is_zero_matrix(mx.mat_sub(gA, mx.transpose(gA)))


def _torsion_witness(T: TorsionForm):
    return T.nonzero_entry()


def _check_shift(st, D, D_new, eta, T_old=None, T_new=None, claimed=True):
    T_old = T_old or torsion(D)
    T_new = T_new or torsion(D_new)
    diff = (T_new - T_old) - cyclic_sum(D.alg, eta.eta if isinstance(eta, ConnectionCorrection) else eta)
    st.add("torsion shift: T_new - T_old = cyclic sum of correction", diff.is_zero(), diff.nonzero_entry(), claimed)


# -- starting points -----------------------------------------------------------------------------


def torsion_free_connection(alg: OddExactAlgebroid, start: Optional[GeneralizedConnection] = None) -> Construction:
    """``D - T^D / 3``: the totally skew torsion is removed by its own third."""
    D = start or GeneralizedConnection(alg)
    T = torsion(D)
    st = Stage("torsion-free")
    st.add("start torsion totally skew", T.is_totally_skew(), claimed=True)
    t = [[[x * Fraction(-1, 3) for x in row] for row in plane] for plane in T.values]
    eta = trilinear_to_correction(alg, t, "torsion-killer")
    D1 = D.plus(eta.eta)
    T1 = torsion(D1)
    st.add("T = 0", T1.is_zero(), _torsion_witness(T1))
    _check_shift(st, D, D1, eta, T, T1)
    return Construction(D1, st, eta)


def random_cocycle(alg: OddExactAlgebroid, rng: random.Random, preserve=None) -> ConnectionCorrection:
    """A random constant correction with vanishing cyclic sum.

    With ``preserve = Gend`` the correction is first made block diagonal for
    ``E+ + E-``; only then is the totally skew part removed, type by type, so
    the result still commutes with ``Gend``.
    """
    N = alg.rank
    eta = []
    for _ in range(N):
        S = [[Fraction(0)] * N for _ in range(N)]
        for i in range(N):
            for j in range(i + 1, N):
                x = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                S[i][j], S[j][i] = x, -x
        m = mx.mat_mul(alg.gram_inv, S)
        if preserve is not None:
            G = preserve
            m = mx.mat_scale(HALF, mx.mat_add(m, mx.mat_mul(mx.mat_mul(G, m), G)))
        eta.append([[const(alg.dim, x) if not isinstance(x, Polynomial) else x for x in r] for r in m])
    if preserve is None:
        T = cyclic_sum(alg, eta)
        t = [[[x * Fraction(-1, 3) for x in row] for row in plane] for plane in T.values]
        kill = trilinear_to_correction(alg, t)
        return ConnectionCorrection([mx.mat_add(a, b) for a, b in zip(eta, kill.eta)], "cocycle")
    kill = _type_split_killer(alg, cyclic_sum(alg, eta), preserve)
    return ConnectionCorrection([mx.mat_add(a, b) for a, b in zip(eta, kill.eta)], "cocycle")


# -- torsion-free and u0-parallel -------------------------------------------------------------


def make_u0_parallel(D: GeneralizedConnection, u0, strict: bool = True) -> Construction:
    """``D + eta`` with ``eta_u = (-1)^(n+1) u0 ^ D_u u0`` on ``U^perp`` and
    ``eta_u0 = -2 (Du0)^sk``; torsion-free input stays torsion-free."""
    alg = D.alg
    s = 1 if alg.dim % 2 == 0 else -1
    u0 = [x if isinstance(x, Polynomial) else const(alg.dim, x) for x in u0]
    st = Stage("u0-parallel")
    T = torsion(D)
    if strict and not T.is_zero():
        raise ValueError("make_u0_parallel needs a torsion-free connection")
    st.add("input torsion-free", T.is_zero(), _torsion_witness(T), claimed=strict)
    B = mx.transpose([D.derivative_vector(alg.frame(a), u0) for a in range(alg.rank)])  # B v = D_v u0
    eta_u0 = mx.mat_scale(-1, mx.mat_sub(B, alg.adjoint(B)))
    P = perp_projector(alg, u0)
    gu0 = alg.lower(u0)
    eta = []
    for a, pa in enumerate(_columns(P)):
        m = mx.mat_scale(-s, alg.wedge_endo(u0, mx.mat_vec(B, pa)))
        if gu0[a]:
            m = mx.mat_add(m, mx.mat_scale(gu0[a] * s, eta_u0))
        eta.append(m)
    corr = ConnectionCorrection(eta, "u0-parallelizer")
    st.add("correction skew", corr.is_skew(alg))
    st.data["correction_zero"] = corr.is_zero()
    D1 = D.plus(eta)
    T1 = torsion(D1)
    st.add("D u0 = 0", D1.preserves_vector(u0))
    st.add("T = 0", T1.is_zero(), _torsion_witness(T1), claimed=T.is_zero())
    _check_shift(st, D, D1, corr, T, T1)
    return Construction(D1, st, corr, {"Du0": B})


# -- Nijenhuis identity -------------------------------------------------------------------------------


class _FrameCalculus:
    """Cached ``D_x F`` for polynomial vectors ``x`` via linearity in ``x``."""

    def __init__(self, D: GeneralizedConnection, F):
        self.D = D
        self.alg = D.alg
        self.F = F
        self.DF = _frame_derivatives(D, F)

    def DFx(self, x):
        return _combine(x, self.DF, self.alg)

    def gamma(self, x, y, z):
        """``<(D_x F) y, z>``."""
        return self.alg.pairing(mx.mat_vec(self.DFx(x), y), z)

    def Fv(self, x):
        return mx.mat_vec(self.F, x)


def nijenhuis_identity_check(D: GeneralizedConnection, F, u0) -> Stage:
    """``<N_F(u,v), w>`` against its expansion in torsion and ``DF``."""
    alg = D.alg
    F = [[x if isinstance(x, Polynomial) else const(alg.dim, x) for x in r] for r in F]
    if not D.preserves_vector(u0):
        raise ValueError("nijenhuis_identity_check needs D u0 = 0")
    st = Stage("nijenhuis-identity")
    T = torsion(D)
    calc = _FrameCalculus(D, F)
    g = calc.gamma
    frame = [f.vector() for f in perp_frame(alg, u0)]
    full = [alg.frame(a).vector() for a in range(alg.rank)]
    bad = None
    nonzero = 0
    for i, u in enumerate(frame):
        for j, v in enumerate(frame):
            if j < i:
                continue
            N_uv = nijenhuis(alg, F, u0, u, v)
            Fu, Fv = calc.Fv(u), calc.Fv(v)
            for k, w in enumerate(full):
                lhs = alg.pairing(N_uv, w)
                Fw = calc.Fv(w)
                rhs = (
                    -T(Fu, Fv, w) + T(u, v, w) - T(Fu, v, Fw) - T(u, Fv, Fw)
                    + g(Fu, v, w) - g(Fv, u, w)
                    + alg.pairing(calc.Fv(mx.mat_vec(calc.DFx(v), u)), w)
                    - alg.pairing(calc.Fv(mx.mat_vec(calc.DFx(u), v)), w)
                    - alg.pairing(calc.Fv(mx.mat_vec(calc.DFx(w), u)), v)
                    + g(Fw, u, v)
                )
                if lhs:
                    nonzero += 1
                if bad is None and lhs != rhs:
                    bad = {"u": i, "v": j, "w": alg.frame_label(k), "lhs": str(lhs), "rhs": str(rhs)}
    st.add("<N_F(u,v),w> = torsion and DF expansion", bad is None, bad)
    st.data["nonzero_sides"] = nonzero
    return st


# -- adapted connection ------------------------------------------------------------------------


def _a_operators(calc: _FrameCalculus, P):
    """``A_c`` for each frame direction, symmetric and vanishing on ``U``."""
    alg = calc.alg
    N = alg.rank
    g = alg.gram
    cols = _columns(P)
    # S[v][w][c] = <(D_{P e_v} F) e_c, P e_w>
    R = [mx.mat_mul(mx.transpose(P), mx.mat_mul(g, calc.DFx(cols[v]))) for v in range(N)]
    out = []
    for c in range(N):
        M = [[(R[v][w][c] + R[w][v][c]) * HALF for w in range(N)] for v in range(N)]
        out.append(mx.mat_mul(alg.gram_inv, M))
    return out


def build_adapted(D: GeneralizedConnection, F, u0, strict: bool = True) -> Construction:
    """``D - {A_u, F}/4 - F (D_u F)/2`` for torsion-free ``D`` with ``D u0 = 0``."""
    alg = D.alg
    F = [[x if isinstance(x, Polynomial) else const(alg.dim, x) for x in r] for r in F]
    u0 = [x if isinstance(x, Polynomial) else const(alg.dim, x) for x in u0]
    st = Stage("adapted")
    T = torsion(D)
    pre_ok = D.preserves_vector(u0)
    if strict and not (T.is_zero() and pre_ok):
        raise ValueError("build_adapted needs a torsion-free connection with D u0 = 0")
    st.add("input torsion-free", T.is_zero(), _torsion_witness(T), claimed=strict)
    st.add("input D u0 = 0", pre_ok, claimed=strict)
    calc = _FrameCalculus(D, F)
    anti_bad = next(
        (alg.frame_label(a) for a, M in enumerate(calc.DF) if not mx.is_zero_matrix(mx.anticommutator(M, F))), None
    )
    st.add("(D_u F) F + F (D_u F) = 0", anti_bad is None, {"direction": anti_bad}, claimed=pre_ok)
    P = perp_projector(alg, u0)
    A = _a_operators(calc, P)
    st.add("A_u symmetric", all(_is_symmetric(alg, a) for a in A))
    st.add("A_u u0 = 0", all(mx.is_zero_vector(mx.mat_vec(a, u0)) for a in A))
    eta = []
    for c in range(alg.rank):
        m = mx.mat_add(
            mx.mat_scale(Fraction(-1, 4), mx.anticommutator(A[c], F)),
            mx.mat_scale(-HALF, mx.mat_mul(F, calc.DF[c])),
        )
        eta.append(m)
    corr = ConnectionCorrection(eta, "A-term+F-term")
    st.add("correction skew", corr.is_skew(alg))
    Dt = D.plus(eta)
    st.add("D~ F = 0", Dt.preserves_endo(F))
    st.add("D~ u0 = 0", Dt.preserves_vector(u0))
    Tt = torsion(Dt)
    _check_shift(st, D, Dt, corr, T, Tt)
    _torsion_formulas(st, alg, Dt, Tt, F, u0)
    st.data["torsion_zero"] = Tt.is_zero()
    st.add("T~ = 0", Tt.is_zero(), _torsion_witness(Tt), claimed=False)
    return Construction(Dt, st, corr, {"A": A, "torsion": Tt})


def _torsion_formulas(st, alg, Dt, Tt, F, u0):
    """Both torsion formulas; the left sides come from the frame torsion of
    ``Dt`` and are cross-checked against the definition on sections."""
    frame = [f.vector() for f in perp_frame(alg, u0)]
    bad = None
    for i, u in enumerate(frame):
        for j, v in enumerate(frame):
            if j <= i:
                continue
            N_uv = nijenhuis(alg, F, u0, u, v)
            for k, w in enumerate(frame):
                lhs = Tt(u, v, w)
                rhs = alg.pairing(N_uv, w) * Fraction(1, 4)
                if lhs != rhs:
                    bad = {"u": i, "v": j, "w": k, "T": str(lhs), "N/4": str(rhs)}
                    break
            if bad:
                break
        if bad:
            break
    st.add("T~(u,v,w) = <N_F(u,v),w>/4 on U^perp", bad is None, bad)
    LF = dorfman_lie(alg, GeneralizedSection(alg.dim, u0), F)
    full = [alg.frame(a).vector() for a in range(alg.rank)]
    bad = None
    for i, u in enumerate(full):
        for j, v in enumerate(full):
            lhs = Tt(u, v, u0)
            rhs = alg.pairing(mx.mat_vec(LF, u), mx.mat_vec(F, v)) * HALF
            if lhs != rhs:
                bad = {"u": alg.frame_label(i), "v": alg.frame_label(j), "T": str(lhs), "rhs": str(rhs)}
                break
        if bad:
            break
    st.add("T~(u,v,u0) = <(L_u0 F)u, Fv>/2", bad is None, bad)
    # frame-value torsion against the defining formula on two projected frame triples
    probe_bad = None
    for (i, j, k) in ((0, 1, 2), (1, alg.rank - 1, 0)):
        u, v, w = frame[i], frame[j % len(frame)], frame[k]
        a, b = Tt(u, v, w), torsion_value(Dt, u, v, w)
        if a != b:
            probe_bad = {"triple": [i, j, k], "frame_values": str(a), "definition": str(b)}
    st.add("frame torsion agrees with definition", probe_bad is None, probe_bad)


def gamma_crosscheck(D: GeneralizedConnection, F, u0) -> Stage:
    """Torsion of ``D - F(DF)/2`` and of the adapted connection through
    ``gamma(u,v,w) = <(D_u F)v, w>``, on projected frame triples."""
    alg = D.alg
    F = [[x if isinstance(x, Polynomial) else const(alg.dim, x) for x in r] for r in F]
    if not torsion(D).is_zero() or not D.preserves_vector(u0):
        raise ValueError("gamma_crosscheck needs a torsion-free connection with D u0 = 0")
    st = Stage("gamma-crosscheck")
    calc = _FrameCalculus(D, F)
    g, Fv = calc.gamma, calc.Fv
    D1 = D.plus([mx.mat_scale(-HALF, mx.mat_mul(F, M)) for M in calc.DF])
    T1 = torsion(D1)
    Dt = build_adapted(D, F, u0).connection
    Tt = torsion(Dt)
    frame = [f.vector() for f in perp_frame(alg, u0)]
    bad1 = bad2 = bad3 = None
    nonzero = 0
    for i, u in enumerate(frame):
        for j, v in enumerate(frame):
            N_uv = nijenhuis(alg, F, u0, u, v)
            for k, w in enumerate(frame):
                cyc = [(u, v, w), (v, w, u), (w, u, v)]
                r1 = sum((g(a, b, Fv(c)) for a, b, c in cyc), alg.zero()) * HALF
                l1 = T1(u, v, w)
                if bad1 is None and l1 != r1:
                    bad1 = {"triple": [i, j, k], "T1": str(l1), "rhs": str(r1)}
                r2 = sum((g(Fv(a), b, c) + g(a, b, Fv(c)) for a, b, c in cyc), alg.zero()) * Fraction(1, 4)
                l2 = Tt(u, v, w)
                if bad2 is None and l2 != r2:
                    bad2 = {"triple": [i, j, k], "T~": str(l2), "rhs": str(r2)}
                r3 = alg.pairing(N_uv, w) * Fraction(1, 4)
                if bad3 is None and r2 != r3:
                    bad3 = {"triple": [i, j, k], "rhs": str(r2), "N/4": str(r3)}
                nonzero += bool(r2)
    st.add("T(D - F DF/2) = cyclic sum of gamma(u,v,Fw) / 2", bad1 is None, bad1)
    st.add("T~ = cyclic sum of gamma(Fu,v,w) + gamma(u,v,Fw), over 4", bad2 is None, bad2)
    st.add("gamma expansion equals <N_F(u,v),w>/4", bad3 is None, bad3)
    st.data["nonzero_sides"] = nonzero
    return st


def nfl_identity_check(alg: OddExactAlgebroid, F, u0) -> Stage:
    """``<N_F(u,v), u0> = <(L_u0 F) u, F v>`` on the projected frame."""
    F = [[x if isinstance(x, Polynomial) else const(alg.dim, x) for x in r] for r in F]
    st = Stage("nijenhuis-u0-component")
    LF = dorfman_lie(alg, GeneralizedSection(alg.dim, list(u0)), F)
    frame = [f.vector() for f in perp_frame(alg, u0)]
    bad = None
    nonzero = 0
    for i, u in enumerate(frame):
        for j, v in enumerate(frame):
            lhs = alg.pairing(nijenhuis(alg, F, u0, u, v), u0)
            rhs = alg.pairing(mx.mat_vec(LF, u), mx.mat_vec(F, v))
            nonzero += bool(lhs)
            if bad is None and lhs != rhs:
                bad = {"u": i, "v": j, "lhs": str(lhs), "rhs": str(rhs)}
    st.add("<N_F(u,v),u0> = <(L_u0 F)u, Fv>", bad is None, bad)
    st.data["nonzero_sides"] = nonzero
    return st


# -- Levi-Civita and Kaehler connections -----------------------------------------------------------


def _type_split_killer(alg, T: TorsionForm, G) -> ConnectionCorrection:
    """Correction preserving ``E+-`` whose cyclic sum is ``-T``."""
    Id = mx.identity(alg.dim, alg.rank)
    Pp = mx.mat_scale(HALF, mx.mat_add(Id, G))
    Pm = mx.mat_scale(HALF, mx.mat_sub(Id, G))
    mpp = _pullback(alg, T, Pm, Pp, Pp)
    pmm = _pullback(alg, T, Pp, Pm, Pm)
    ppp = _pullback(alg, T, Pp, Pp, Pp)
    mmm = _pullback(alg, T, Pm, Pm, Pm)
    third = Fraction(-1, 3)
    N = alg.rank
    t = [
        [
            [
                -mpp.values[a][b][c] - pmm.values[a][b][c] + (ppp.values[a][b][c] + mmm.values[a][b][c]) * third
                for c in range(N)
            ]
            for b in range(N)
        ]
        for a in range(N)
    ]
    return trilinear_to_correction(alg, t, "type-split torsion-killer")


def _g_skew(alg, G, A) -> bool:
    Gb = mx.mat_mul(mx.transpose(G), alg.gram)
    return mx.is_zero_matrix(mx.mat_add(mx.mat_mul(mx.transpose(A), Gb), mx.mat_mul(Gb, A)))


def levi_civita(alg: OddExactAlgebroid, G, start: Optional[GeneralizedConnection] = None) -> Construction:
    """Torsion-free ``D`` with ``D Gend = 0``: metric correction, then a
    torsion-killer split by the types of ``E+ + E-``."""
    G = [[x if isinstance(x, Polynomial) else const(alg.dim, x) for x in r] for r in G]
    D = start or GeneralizedConnection(alg)
    st = Stage("levi-civita")
    metric = ConnectionCorrection(
        [mx.mat_scale(HALF, mx.mat_mul(G, X)) for X in _frame_derivatives(D, G)], "metric correction"
    )
    st.add("metric correction skew", metric.is_skew(alg))
    D1 = D.plus(metric.eta)
    st.add("D G = 0 after metric correction", D1.preserves_endo(G))
    T1 = torsion(D1)
    kill = _type_split_killer(alg, T1, G)
    st.add("torsion-killer skew", kill.is_skew(alg))
    st.add("torsion-killer preserves E+ and E-", all(mx.is_zero_matrix(mx.commutator(m, G)) for m in kill.eta))
    D2 = D1.plus(kill.eta)
    T2 = torsion(D2)
    _check_shift(st, D1, D2, kill, T1, T2)
    st.add("D G = 0", D2.preserves_endo(G))
    st.add("T = 0", T2.is_zero(), _torsion_witness(T2))
    st.data["corrections_zero"] = metric.is_zero() and kill.is_zero()
    return Construction(D2, st, metric + kill)


def make_metric_u0_parallel(D: GeneralizedConnection, G, u0, strict: bool = True, seed: int = 0) -> Construction:
    """The u0-parallelizer applied to a Levi-Civita connection; checks that it
    keeps ``D G = 0`` together with the identities that make this work."""
    alg = D.alg
    G = [[x if isinstance(x, Polynomial) else const(alg.dim, x) for x in r] for r in G]
    u0 = [x if isinstance(x, Polynomial) else const(alg.dim, x) for x in u0]
    st = Stage("metric-u0-parallel")
    LG = dorfman_lie(alg, GeneralizedSection(alg.dim, u0), G)
    lg_zero = mx.is_zero_matrix(LG)
    is_lc = D.preserves_endo(G) and torsion(D).is_zero()
    if strict and not (lg_zero and is_lc):
        raise ValueError("make_metric_u0_parallel needs a Levi-Civita connection and L_u0 Gend = 0")
    st.add("input Levi-Civita", is_lc, claimed=strict)
    st.add("L_u0 Gend = 0", lg_zero, None, claimed=strict)
    # two-sided identity on frame sections
    bad = None
    Gc = _columns(G)
    full = [alg.frame(a).vector() for a in range(alg.rank)]
    for i, v in enumerate(full):
        for j, w in enumerate(full):
            if j < i:
                continue
            lhs = alg.pairing(D.apply(Gc[i], u0), w) + alg.pairing(D.apply(Gc[j], u0), v)
            rhs = alg.pairing(D.apply(v, u0), Gc[j]) + alg.pairing(D.apply(w, u0), Gc[i])
            if lhs != rhs:
                bad = {"v": alg.frame_label(i), "w": alg.frame_label(j), "lhs": str(lhs), "rhs": str(rhs)}
                break
        if bad:
            break
    st.add("<D_(Gv) u0, w> + <D_(Gw) u0, v> = <D_v u0, Gw> + <D_w u0, Gv>", bad is None, bad, claimed=lg_zero)
    rng = random.Random(seed)
    skew_bad = None
    for _ in range(3):
        u, v = random_section(alg, rng, 1).vector(), random_section(alg, rng, 1).vector()
        W = mx.mat_add(alg.wedge_endo(u, v), alg.wedge_endo(mx.mat_vec(G, u), mx.mat_vec(G, v)))
        if not _g_skew(alg, G, W):
            skew_bad = {"u": [str(x) for x in u], "v": [str(x) for x in v]}
    st.add("u^v + Gu^Gv is G-skew", skew_bad is None, skew_bad)
    inner = make_u0_parallel(D, u0, strict=strict)
    for c in inner.stage.postconditions:
        st.postconditions.append(c)
    D1 = inner.connection
    gskew_bad = next(
        (alg.frame_label(a) for a, m in enumerate(inner.correction.eta) if not _g_skew(alg, G, m)), None
    )
    st.add("correction G-skew", gskew_bad is None, {"direction": gskew_bad}, claimed=lg_zero)
    st.add("D G = 0", D1.preserves_endo(G), claimed=lg_zero)
    return Construction(D1, st, inner.correction)


def build_bn_kahler_connection(
    alg: OddExactAlgebroid, G, F, u0, levi_civita_start: Optional[GeneralizedConnection] = None
) -> Construction:
    """Levi-Civita, then u0-parallel, then adapted; on a pseudo-Kaehler
    structure the result is torsion-free and preserves ``G`` and ``F``."""
    from .structures import is_integrable

    ph = BnPseudoHermitian(alg, G, F, u0)
    G, F, u0 = ph.G, ph.F, ph.u0
    st = Stage("bn-kahler")
    i1 = is_integrable(alg, F, u0).data["integrable"]
    i2 = is_integrable(alg, ph.companion.F, u0).data["integrable"]
    integrable = i1 and i2
    st.data["integrable"] = {"F": i1, "Gend F": i2}
    st.add("input pseudo-Kaehler: F and Gend F integrable", integrable, {"F": i1, "Gend F": i2})
    lc = levi_civita(alg, G, levi_civita_start)
    st.postconditions += [_prefixed("levi-civita", c) for c in lc.stage.postconditions]
    mp = make_metric_u0_parallel(lc.connection, G, u0, strict=False)
    st.postconditions += [
        _prefixed("u0-parallel", c, claimed=c.claimed and (integrable or c.name in ("D u0 = 0", "T = 0")))
        for c in mp.stage.postconditions
        if c.name not in ("input Levi-Civita", "L_u0 Gend = 0", "input torsion-free")
    ]
    st.add("L_u0 Gend = 0", mx.is_zero_matrix(dorfman_lie(alg, GeneralizedSection(alg.dim, u0), G)), claimed=integrable)
    D = mp.connection
    # the DF block structure that makes {A_u, F} preserve E+ and E-
    calc = _FrameCalculus(D, F)
    Id = mx.identity(alg.dim, alg.rank)
    Pp = _columns(mx.mat_scale(HALF, mx.mat_add(Id, G)))
    Pm = _columns(mx.mat_scale(HALF, mx.mat_sub(Id, G)))
    full = [alg.frame(a).vector() for a in range(alg.rank)]
    bad = None
    for plus, minus in ((Pp, Pm), (Pm, Pp)):
        for v in plus:
            DFv = calc.DFx(v)
            for u in full:
                x = mx.mat_vec(DFv, u)
                for w in minus:
                    val = alg.pairing(x, w)
                    if val and bad is None:
                        bad = {"value": str(val)}
    st.add("<(D_v F)u, w> = 0 for v, w of opposite type", bad is None, bad, claimed=integrable)
    st.add(*_fin_check(alg, F, ph), claimed=integrable)
    ad = build_adapted(D, F, u0, strict=False)
    st.postconditions += [_prefixed("adapted", c, claimed=c.claimed) for c in ad.stage.postconditions
                          if c.name not in ("input torsion-free", "input D u0 = 0")]
    Dt = ad.connection
    Tt = ad.extras["torsion"]
    st.add("D~ G = 0", Dt.preserves_endo(G))
    st.add("D~ F = 0", Dt.preserves_endo(F))
    st.add("T~ = 0", Tt.is_zero(), _torsion_witness(Tt))
    return Construction(Dt, st, None, {"levi_civita": lc.connection, "u0_parallel": D, "torsion": Tt})


def _prefixed(prefix, c, claimed=None):
    return type(c)(f"{prefix}: {c.name}", c.passed, c.witness, c.claimed if claimed is None else claimed)


def _fin_check(alg, F, ph: BnPseudoHermitian):
    """``<[v, Fu] - F[v,u], w> = 0`` for ``v`` of one type and ``u, w`` of the
    other, on the complex frames of the eigen-decomposition."""
    dec = eigen_decompose(alg, ph)
    frames = {}
    for name in ("E+", "E-"):
        part = dec.parts[name]
        frames[name] = part["L"] + part["Lbar"] + ([list(ph.u0)] if part["u0"] else [])
    bad = None
    for vt, ot in (("E+", "E-"), ("E-", "E+")):
        for v in frames[vt]:
            vs = GeneralizedSection(alg.dim, v)
            for u in frames[ot]:
                us = GeneralizedSection(alg.dim, u)
                Fu = GeneralizedSection(alg.dim, mx.mat_vec(F, u))
                r = mx.vec_sub(alg.dorfman(vs, Fu).vector(), mx.mat_vec(F, alg.dorfman(vs, us).vector()))
                for w in frames[ot]:
                    val = alg.pairing(r, w)
                    if val and bad is None:
                        bad = {"v_type": vt, "value": str(val)}
    return ("<[v,Fu] - F[v,u], w> = 0 on complex E+-/E- frames", bad is None, bad)


# -- the 'only if' surrogate --------------------------------------------------------------------------


def torsion_free_feasibility(D: GeneralizedConnection, F, u0, point, G=None) -> Stage:
    """Is there ``eta`` in ``E* (x) h`` (``h`` the stabilizer of the structure)
    with ``cyclic sum eta = -T^D`` at ``point``?  Answered by exact ranks."""
    alg = D.alg
    V = QuadraticSpace(alg.gram)
    Fp = mx.evaluate_matrix(F, point)
    ends = [Fp] + ([mx.evaluate_matrix(G, point)] if G is not None else [])
    h = stabilizer_algebra(V, ends, [mx.evaluate_vector(u0, point)])
    N, k = alg.rank, len(h)
    Tp = [[[x.evaluate(point) for x in row] for row in plane] for plane in torsion(D).values]
    slices = [[[(mx.mat_mul(alg.gram, A))[c][b] for c in range(N)] for b in range(N)] for A in h]
    from itertools import combinations

    A_rows, aug = [], []
    for a, b, c in combinations(range(N), 3):
        row = [Fraction(0)] * (N * k)
        for j, s in enumerate(slices):
            row[a * k + j] += s[b][c]
            row[b * k + j] += s[c][a]
            row[c * k + j] += s[a][b]
        A_rows.append(row)
        aug.append(row + [-Tp[a][b][c]])
    rA, rAug = rank(A_rows), rank(aug)
    st = Stage("torsion-free-feasibility")
    st.data.update({"point": [str(x) for x in point], "algebra_dimension": k, "rank": rA, "augmented_rank": rAug})
    st.data["feasible"] = rA == rAug
    return st


def integrability_obstruction(D: GeneralizedConnection, F, u0, G=None) -> Stage:
    """Finite checks behind 'torsion-free and structure-preserving implies
    integrable': a Nijenhuis witness, and at a point where it is nonzero the
    exact rank certificate that no torsion-free preserving connection exists."""
    from .structures import nijenhuis_frame_values, sample_points

    alg = D.alg
    st = Stage("integrability-obstruction")
    values = nijenhuis_frame_values(alg, F, u0)
    witness = next(((k, v) for k, v in values.items() if not v.is_zero()), None)
    LF = dorfman_lie(alg, GeneralizedSection(alg.dim, list(u0)), F)
    lf_zero = mx.is_zero_matrix(LF)
    integrable = witness is None and lf_zero
    st.data["integrable"] = integrable
    point = tuple(Fraction(0) for _ in range(alg.dim))
    if witness is not None:
        (a, b), val = witness
        st.data["nijenhuis_witness"] = {
            "u": f"P {alg.frame_label(a)}", "v": f"P {alg.frame_label(b)}", "N_F(u,v)": [str(c) for c in val.comps]
        }
        point = next(p for p in sample_points(alg.dim) if any(mx.evaluate_vector(val.comps, p)))
    feas = torsion_free_feasibility(D, F, u0, point, G)
    st.data.update(feas.data)
    if G is None:
        st.add(
            "torsion-free F-preserving correction exists iff integrable",
            feas.data["feasible"] == integrable,
            {"rank": feas.data["rank"], "augmented_rank": feas.data["augmented_rank"]},
        )
    else:
        st.add("torsion-free (G,F)-preserving correction exists", feas.data["feasible"], {
            "rank": feas.data["rank"], "augmented_rank": feas.data["augmented_rank"]}, claimed=False)
    return st


# -- the affine space of adapted connections -------------------------------------------------------


@dataclass
class AdaptedSpaceModel:
    prolongation: ProlongationSpace
    parametrization: list
    dimension: int
    expected_dimension: int
    stage: Stage


def _hol_forms(V, vectors):
    return [V.lower([conj(c) for c in v]) for v in vectors]


def _antihol_forms(V, vectors):
    return [V.lower(list(v)) for v in vectors]


def _constant_correction(alg, t):
    V = QuadraticSpace(alg.gram)
    return [[[const(alg.dim, x) for x in row] for row in m] for m in tensor_to_endos(V, t)]


def _is_adapted(D: GeneralizedConnection, F, u0, G=None) -> bool:
    return (
        torsion(D).is_zero()
        and D.preserves_endo(F)
        and D.preserves_vector(u0)
        and (G is None or D.preserves_endo(G))
    )


def _is_adapted_at(D: GeneralizedConnection, F, u0, G, point) -> bool:
    """Fiber version of :func:`_is_adapted`: all conditions evaluated at ``point``."""
    alg = D.alg
    if any(x.evaluate(point) for plane in torsion(D).values for row in plane for x in row):
        return False
    for a in range(alg.rank):
        e = alg.frame(a)
        for A in [F] + ([G] if G is not None else []):
            if any(mx.evaluate_matrix(D.derivative_endo(e, A), point)[i][j] for i in range(alg.rank) for j in range(alg.rank)):
                return False
        if any(mx.evaluate_vector(D.derivative_vector(e, u0), point)):
            return False
    return True


def _is_constant(M) -> bool:
    return all(not isinstance(x, Polynomial) or x.is_constant() for row in M for x in (row if isinstance(row, list) else [row]))


def adapted_space(
    D: GeneralizedConnection,
    F,
    u0,
    G=None,
    others: Optional[List[GeneralizedConnection]] = None,
    n_samples: int = 20,
    seed: int = 0,
    point=None,
) -> AdaptedSpaceModel:
    """Fiber at ``point`` (default the origin) of the space of adapted
    connections, with its ``Re(sk .)`` parametrization and sample checks."""
    alg = D.alg
    F = [[x if isinstance(x, Polynomial) else const(alg.dim, x) for x in r] for r in F]
    u0 = [x if isinstance(x, Polynomial) else const(alg.dim, x) for x in u0]
    if not _is_adapted(D, F, u0, G):
        raise ValueError("adapted_space needs an adapted connection to start from")
    point = point if point is not None else tuple(Fraction(0) for _ in range(alg.dim))
    V = QuadraticSpace(alg.gram)
    Fp = mx.evaluate_matrix(F, point)
    u0p = mx.evaluate_vector(u0, point)
    ends = [Fp]
    if G is not None:
        ends.append(mx.evaluate_matrix(G, point))
    h = stabilizer_algebra(V, ends, [u0p])
    P = generalized_first_prolongation(V, h)
    st = Stage("adapted-space")
    if G is None:
        from .structures import BnAlmostComplex

        dec = eigen_decompose(alg, BnAlmostComplex(alg, F, u0), points=[point])
        Lp = [mx.evaluate_vector(v, point) for v in dec.L]
        param = sk_parametrization(V, _hol_forms(V, Lp), _antihol_forms(V, Lp))
        expected = unitary_prolongation_dimension(alg.dim)
        sizes = [alg.dim]
    else:
        dec = eigen_decompose(alg, BnPseudoHermitian(alg, G, F, u0), points=[point])
        param, sizes = [], []
        for name in ("E+", "E-"):
            Lp = [mx.evaluate_vector(v, point) for v in dec.parts[name]["L"]]
            sizes.append(len(Lp))
            if Lp:
                param += sk_parametrization(V, _hol_forms(V, Lp), _antihol_forms(V, Lp))
        expected = sum(unitary_prolongation_dimension(p) for p in sizes if p)
    st.data["dimension"] = P.dimension
    st.data["expected"] = expected
    st.data["eigen_ranks"] = sizes
    st.add("fiber dimension matches formula", P.dimension == expected, {"computed": P.dimension, "expected": expected})
    prank = tensor_span_rank(param)
    st.add("Re(sk .) parametrization has full rank", prank == P.dimension, {"rank": prank})
    outside = next((i for i, t in enumerate(param) if not P.contains(t)), None)
    st.add("parametrization lies in the prolongation", outside is None, {"index": outside})
    # constant structures: a constant eta keeps D adapted everywhere; otherwise only in the fiber
    constant = _is_constant(F) and _is_constant(u0) and (G is None or _is_constant(G))
    st.data["checked"] = "globally" if constant else "at the base point"
    rng = random.Random(seed)
    bad = None
    base = param if param else P.basis
    for s in range(n_samples):
        coeffs = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in base]
        N = alg.rank
        t = [[[sum((c * e[a][b][x] for c, e in zip(coeffs, base) if c), Fraction(0)) for x in range(N)]
              for b in range(N)] for a in range(N)]
        D2 = D.plus(_constant_correction(alg, t))
        ok = _is_adapted(D2, F, u0, G) if constant else _is_adapted_at(D2, F, u0, G, point)
        if not ok:
            bad = {"sample": s}
            break
    st.add(f"D + Re(sk eta) adapted for {n_samples} random eta", bad is None, bad)
    st.data["samples"] = n_samples
    for j, other in enumerate(others or []):
        diff = other.difference(D)
        Vdiff = [mx.evaluate_matrix(m, point) for m in diff]
        t = [[[(mx.mat_mul(alg.gram, A))[c][b] for c in range(alg.rank)] for b in range(alg.rank)] for A in Vdiff]
        st.add(f"difference with connection {j + 1} lies in the fiber", _is_adapted(other, F, u0, G) and P.contains(t))
        st.data.setdefault("difference_zero", []).append(all(x == 0 for m in Vdiff for r in m for x in r))
    return AdaptedSpaceModel(P, param, P.dimension, expected, st)
