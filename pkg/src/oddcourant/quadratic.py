"""Pointwise multilinear algebra on a quadratic vector space.

Three-tensors are nested lists ``t[a][b][c]`` of exact scalars.  An element
``alpha`` of ``V* (x) so(V)`` is identified with the three-tensor
``alpha(u, v, w) = <alpha_u v, w>``, skew in its last two slots.  Tensor-space
bases are ordered lexicographically by index tuples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations
from typing import List, Optional, Sequence, Tuple

from .linalg import linear_kernel, rank
from .report import Stage
from .scalars import GaussianRational, I, conj, imag_part, real_part

__all__ = [
    "QuadraticSpace",
    "ProlongationSpace",
    "wedge_to_endo",
    "is_skew_endo",
    "sk",
    "cyclic_del",
    "endo_to_tensor",
    "so_basis",
    "stabilizer_algebra",
    "generalized_first_prolongation",
    "unitary_model",
    "kahler_model",
    "u_prolongation_spanning_set",
    "check_exact_sequence",
    "kahler_prolongation",
    "unitary_prolongation_dimension",
    "unitary_prolongation",
    "sk_parametrization",
    "i_eigenspace",
    "tensor_to_endos",
    "even_rank_unitary_prolongation",
    "even_rank_kahler_prolongation",
    "tensor_span_rank",
]

ZERO = Fraction(0)


def _signature(gram) -> Tuple[int, int]:
    """Inertia of a symmetric rational matrix by exact congruence reduction."""
    A = [[Fraction(x) for x in row] for row in gram]
    n = len(A)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if A[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and A[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j makes the diagonal entry 2 A_ij nonzero
            for k in range(n):
                A[i][k] += A[j][k]
            for k in range(n):
                A[k][i] += A[k][j]
            piv = i
        p = A[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for i in active:
            f = A[i][piv] / p
            if f:
                for k in range(n):
                    A[i][k] -= f * A[piv][k]
        for i in active:
            A[piv][i] = A[i][piv] = ZERO
    return pos, neg


@dataclass
class QuadraticSpace:
    gram: List[List[Fraction]]
    signature: Tuple[int, int] = None

    def __post_init__(self):
        self.gram = [[Fraction(x) for x in row] for row in self.gram]
        N = len(self.gram)
        if any(len(r) != N for r in self.gram):
            raise ValueError("Gram matrix must be square")
        if any(self.gram[i][j] != self.gram[j][i] for i in range(N) for j in range(N)):
            raise ValueError("Gram matrix must be symmetric")
        if rank(self.gram) != N:
            raise ValueError("Gram matrix must be invertible")
        sig = _signature(self.gram)
        if self.signature is not None and tuple(self.signature) != sig:
            raise ValueError(f"declared signature {self.signature} but Gram has {sig}")
        self.signature = sig

    @property
    def dim(self) -> int:
        return len(self.gram)

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "QuadraticSpace":
        N = len(entries)
        return cls([[Fraction(entries[i]) if i == j else ZERO for j in range(N)] for i in range(N)])

    def pair(self, u, v):
        g = self.gram
        return sum((u[i] * g[i][j] * v[j] for i in range(self.dim) for j in range(self.dim) if g[i][j]), ZERO)

    def lower(self, u):
        return [sum((self.gram[i][j] * u[j] for j in range(self.dim)), ZERO) for i in range(self.dim)]

    def gram_inverse(self):
        from .linalg import rref

        N = self.dim
        aug = [list(self.gram[i]) + [Fraction(int(i == j)) for j in range(N)] for i in range(N)]
        R, _ = rref(aug)
        return [row[N:] for row in R]


def _matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(m) if A[i][k] and B[k][j]), ZERO) for j in range(p)] for i in range(n)]


def _matvec(A, v):
    return [sum((a * b for a, b in zip(row, v) if a and b), ZERO) for row in A]


def _transpose(A):
    return [list(c) for c in zip(*A)]


def wedge_to_endo(V: QuadraticSpace, u, v):
    """``(u^v)(w) = <u,w> v - <v,w> u``."""
    if len(u) != V.dim or len(v) != V.dim:
        raise ValueError("vector dimension does not match the quadratic space")
    gu, gv = V.lower(u), V.lower(v)
    return [[v[i] * gu[j] - u[i] * gv[j] for j in range(V.dim)] for i in range(V.dim)]


def is_skew_endo(V: QuadraticSpace, A) -> bool:
    gA = _matmul(V.gram, A)
    return all(gA[i][j] + gA[j][i] == 0 for i in range(V.dim) for j in range(V.dim))


def endo_to_tensor(V: QuadraticSpace, endos: Sequence) -> list:
    """``alpha(a, b, c) = <A_a e_b, e_c>`` from one endomorphism per direction."""
    N = V.dim
    out = []
    for A in endos:
        gA = _matmul(V.gram, A)
        out.append([[gA[c][b] for c in range(N)] for b in range(N)])
    return out


def tensor_to_endos(V: QuadraticSpace, t) -> list:
    """Inverse of :func:`endo_to_tensor`."""
    ginv = V.gram_inverse()
    return [_matmul(ginv, _transpose(plane)) for plane in t]


def zero_tensor(N: int):
    return [[[ZERO] * N for _ in range(N)] for _ in range(N)]


def sk(sigma):
    """``(sk s)(u,v,w) = s(u,v,w) - s(u,w,v)``."""
    N = len(sigma)
    return [[[sigma[a][b][c] - sigma[a][c][b] for c in range(N)] for b in range(N)] for a in range(N)]


def cyclic_del(alpha):
    """Cyclic sum ``alpha(u,v,w) + alpha(v,w,u) + alpha(w,u,v)``."""
    N = len(alpha)
    return [
        [[alpha[a][b][c] + alpha[b][c][a] + alpha[c][a][b] for c in range(N)] for b in range(N)]
        for a in range(N)
    ]


def _flatten(t):
    return [x for plane in t for row in plane for x in row]


def tensor_span_rank(tensors) -> int:
    if not tensors:
        return 0
    return rank([_flatten(t) for t in tensors])


def so_basis(V: QuadraticSpace):
    """``g^-1 (E_ij - E_ji)`` for ``i < j``."""
    N = V.dim
    ginv = V.gram_inverse()
    basis = []
    for i, j in combinations(range(N), 2):
        S = [[ZERO] * N for _ in range(N)]
        S[i][j] = Fraction(1)
        S[j][i] = Fraction(-1)
        basis.append(_matmul(ginv, S))
    return basis


def stabilizer_algebra(V: QuadraticSpace, endomorphisms=(), vectors=()):
    """Basis of ``{A in so(V) : [A, T] = 0, A t = 0}`` over the given tensors."""
    so = so_basis(V)
    N = V.dim
    rows = []
    for T in endomorphisms:
        comms = [_sub(_matmul(A, T), _matmul(T, A)) for A in so]
        for i in range(N):
            for j in range(N):
                rows.append([C[i][j] for C in comms])
    for t in vectors:
        imgs = [_matvec(A, t) for A in so]
        for i in range(N):
            rows.append([v[i] for v in imgs])
    rows = [r for r in rows if any(x != 0 for x in r)]
    ker = linear_kernel(rows, ncols=len(so))
    out = []
    for coeffs in ker:
        M = [[ZERO] * N for _ in range(N)]
        for c, A in zip(coeffs, so):
            if c:
                M = [[m + c * a for m, a in zip(mr, ar)] for mr, ar in zip(M, A)]
        out.append(M)
    return out


def _sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


@dataclass
class ProlongationSpace:
    space: QuadraticSpace
    algebra: list
    basis: list = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def contains(self, t) -> bool:
        """Membership by rank: adding ``t`` does not enlarge the span."""
        return tensor_span_rank(self.basis + [t]) == self.dimension

    def verify(self) -> bool:
        """Every basis element has vanishing cyclic sum and slices in the algebra."""
        alg_rank = tensor_span_rank([[A] for A in self.algebra])
        for t in self.basis:
            if any(x != 0 for x in _flatten(cyclic_del(t))):
                return False
            for A in tensor_to_endos(self.space, t):
                if tensor_span_rank([[B] for B in self.algebra] + [[A]]) != alg_rank:
                    return False
        return tensor_span_rank(self.basis) == self.dimension


def generalized_first_prolongation(V: QuadraticSpace, algebra) -> ProlongationSpace:
    """Exact basis of ``{alpha in V* (x) h : cyclic sum of alpha = 0}``."""
    N = V.dim
    k = len(algebra)
    slices = [endo_to_tensor(V, [A])[0] for A in algebra]  # slices[j][b][c] = <A_j e_b, e_c>
    rows = []
    for a, b, c in combinations(range(N), 3):
        row = [ZERO] * (N * k)
        for j in range(k):
            s = slices[j]
            # terms with direction index a, b, c respectively
            row[a * k + j] += s[b][c]
            row[b * k + j] += s[c][a]
            row[c * k + j] += s[a][b]
        rows.append(row)
    rows = [r for r in rows if any(x != 0 for x in r)]
    ker = linear_kernel(rows, ncols=N * k)
    basis = []
    for vec in ker:
        t = zero_tensor(N)
        for a in range(N):
            for j in range(k):
                c = vec[a * k + j]
                if c:
                    s = slices[j]
                    t[a] = [[t[a][x][y] + c * s[x][y] for y in range(N)] for x in range(N)]
        basis.append(t)
    return ProlongationSpace(V, list(algebra), basis)


# -- model spaces ------------------------------------------------------------------


def _default_line_sign(n: int) -> int:
    return 1 if n % 2 == 0 else -1


def _complex_pairs_F(N: int, pair_starts: Sequence[int]):
    F = [[ZERO] * N for _ in range(N)]
    for s in pair_starts:
        F[s + 1][s] = Fraction(1)  # F e_s = e_{s+1}
        F[s][s + 1] = Fraction(-1)  # F e_{s+1} = -e_s
    return F


def unitary_model(m1: int, m2: int, line_sign: Optional[int] = None, line: bool = True):
    """``V = R^{2 m1, 2 m2} (+) R`` with a complex structure ``F`` on the first summand.

    Returns ``(V, F, u0)``; ``u0`` spans the line (``None`` when ``line`` is
    false, which gives the even-rank model).
    """
    if m1 < 0 or m2 < 0 or m1 + m2 < 1:
        raise ValueError("need m1, m2 >= 0 with m1 + m2 >= 1")
    n = m1 + m2
    diag = [1] * (2 * m1) + [-1] * (2 * m2)
    if line:
        diag.append(_default_line_sign(n) if line_sign is None else line_sign)
    V = QuadraticSpace.diagonal(diag)
    F = _complex_pairs_F(V.dim, range(0, 2 * n, 2))
    u0 = None
    if line:
        u0 = [ZERO] * V.dim
        u0[-1] = Fraction(1)
    return V, F, u0


def _kahler_split_consistent(k1, l1, k2, l2) -> bool:
    n = k1 + l1 + k2 + l2
    m = n // 2
    expected = (m, m) if n % 2 == 0 else (m + 1, m)
    return (k1 + k2, l1 + l2) == expected


def kahler_model(split, check: bool = True, line: bool = True):
    """Model ``(V, F, u0, Gend)`` for the splitting ``((k1, l1), (k2, l2))``.

    ``V+ = R^{2k1, 2l1}``, ``V- = R^{2k2, 2l2}``; ``Gend`` is ``+1`` on ``V+``,
    ``-1`` on ``V-`` and ``(-1)^n`` on the line.
    """
    (k1, l1), (k2, l2) = split
    if min(k1, l1, k2, l2) < 0 or k1 + l1 + k2 + l2 < 1:
        raise ValueError(f"invalid splitting {split}")
    n = k1 + l1 + k2 + l2
    if check and line and not _kahler_split_consistent(k1, l1, k2, l2):
        raise ValueError(
            f"splitting {split} is inconsistent with signature (n+1, n) for n = {n}: "
            "need (k1+k2, l1+l2) = (m, m) for n = 2m or (m+1, m) for n = 2m+1"
        )
    diag = [1] * (2 * k1) + [-1] * (2 * l1) + [1] * (2 * k2) + [-1] * (2 * l2)
    gsign = [1] * (2 * (k1 + l1)) + [-1] * (2 * (k2 + l2))
    if line:
        diag.append(_default_line_sign(n))
        gsign.append(1 if n % 2 == 0 else -1)
    V = QuadraticSpace.diagonal(diag)
    N = V.dim
    F = _complex_pairs_F(N, range(0, 2 * n, 2))
    G = [[Fraction(gsign[i]) if i == j else ZERO for j in range(N)] for i in range(N)]
    u0 = None
    if line:
        u0 = [ZERO] * N
        u0[-1] = Fraction(1)
    return V, F, u0, G


def unitary_prolongation_dimension(m: int) -> int:
    """Real dimension of ``S^2 C^m (x) C^m``."""
    return m * m * (m + 1)


# -- spanning set ------------------------------------------------------------------------


def _to_gaussian(M):
    return [[x if isinstance(x, GaussianRational) else GaussianRational(x) for x in row] for row in M]


def i_eigenspace(F):
    """Basis of ``ker(F - i)`` over Q(i)."""
    N = len(F)
    M = _to_gaussian(F)
    for i in range(N):
        M[i][i] = M[i][i] - I
    return linear_kernel(M)


def u_prolongation_spanning_set(V: QuadraticSpace, F) -> list:
    """Real three-tensors ``Re eta``, ``Im eta`` for the generators
    ``eta = a (x) (b ^ c~) + b (x) (a ^ c~)``, ``a, b, c`` in the dual of the
    ``i``-eigenspace, ``c~`` the conjugate form.
    """
    VF = i_eigenspace(F)
    for x in VF:
        for y in VF:
            if V.pair(x, y) != 0:
                raise ValueError("the i-eigenspace of F is not isotropic")
    N = V.dim
    # forms of type (1,0): x -> <x, conj(v)>; of type (0,1): x -> <x, v>
    hol = [V.lower([conj(c) for c in v]) for v in VF]
    antihol = [V.lower(v) for v in VF]
    out = []
    for (ia, a), (ib, b) in combinations_with_replacement(list(enumerate(hol)), 2):
        for cbar in antihol:
            t = [[[ZERO] * N for _ in range(N)] for _ in range(N)]
            for x in range(N):
                for y in range(N):
                    for z in range(N):
                        t[x][y][z] = (
                            a[x] * (b[y] * cbar[z] - cbar[y] * b[z])
                            + b[x] * (a[y] * cbar[z] - cbar[y] * a[z])
                        )
            out.append(_map_tensor(t, real_part))
            out.append(_map_tensor(t, imag_part))
    return out


def _map_tensor(t, f):
    return [[[f(x) for x in row] for row in plane] for plane in t]


def sk_parametrization(V: QuadraticSpace, hol_forms, antihol_forms) -> list:
    """``Re(sk s)``, ``Re(sk (i s))`` for ``s`` running over a spanning set of
    ``S^2 A (x) B`` where ``A``/``B`` are given spanning sets of forms."""
    N = V.dim
    out = []
    for a, b in combinations_with_replacement(hol_forms, 2):
        for c in antihol_forms:
            s = [[[(a[x] * b[y] + b[x] * a[y]) * c[z] for z in range(N)] for y in range(N)] for x in range(N)]
            t = sk(s)
            out.append(_map_tensor(t, real_part))
            out.append(_map_tensor(t, lambda v: -imag_part(v)))
    return out


# -- exact sequence -------------------------------------------------------------------------


def _exact_sequence_matrices(N: int):
    s3 = list(combinations_with_replacement(range(N), 3))
    s2v = [(ab, c) for ab in combinations_with_replacement(range(N), 2) for c in range(N)]
    vl2 = [(x, yz) for x in range(N) for yz in combinations(range(N), 2)]
    l3 = list(combinations(range(N), 3))
    s2v_index = {k: i for i, k in enumerate(s2v)}
    vl2_index = {k: i for i, k in enumerate(vl2)}

    # inclusion S^3 -> S^2 (x) V*: symmetric tensor sum of distinct permutations
    inc = [[ZERO] * len(s3) for _ in s2v]
    for j, m in enumerate(s3):
        for p in set(permutations(m)):
            key = (tuple(sorted(p[:2])), p[2])
            # coordinate of a symmetric tensor on (a<=b, c) is T[a][b][c]
            inc[s2v_index[key]][j] = Fraction(1)
    # sk: basis element s = sym(e^a e^b) (x) e^c with s[x][y][z] = [{x,y}={a,b}] [z=c]
    skm = [[ZERO] * len(s2v) for _ in vl2]
    for j, ((a, b), c) in enumerate(s2v):
        pairs = {(a, b), (b, a)}
        for x, y in pairs:
            # s[x][y][c] = 1 contributes +1 to (x, y, c) and -1 to (x, c, y)
            for (p, q, r), sign in (((x, y, c), 1), ((x, c, y), -1)):
                if q < r:
                    skm[vl2_index[(p, (q, r))]][j] += sign
    # cyclic sum: V* (x) L^2 -> L^3
    dm = [[ZERO] * len(vl2) for _ in l3]
    for i, (a, b, c) in enumerate(l3):
        for (p, q, r) in ((a, b, c), (b, c, a), (c, a, b)):
            if q < r:
                dm[i][vl2_index[(p, (q, r))]] += 1
            else:
                dm[i][vl2_index[(p, (r, q))]] -= 1
    return inc, skm, dm, (len(s3), len(s2v), len(vl2), len(l3))


def check_exact_sequence(V, complexified: bool = False) -> Stage:
    """Exactness of ``0 -> S^3 -> S^2 (x) V* -> V* (x) L^2 -> L^3 -> 0``.

    ``V`` is a :class:`QuadraticSpace` or a plain dimension.
    """
    N = V.dim if isinstance(V, QuadraticSpace) else int(V)
    inc, skm, dm, dims = _exact_sequence_matrices(N)
    if complexified:
        inc, skm, dm = _to_gaussian(inc), _to_gaussian(skm), _to_gaussian(dm)
    d3, d21, d12, d0 = dims
    r_inc = rank(inc) if inc and inc[0] else 0
    r_sk = rank(skm) if skm and skm[0] else 0
    r_d = rank(dm) if dm and dm[0] else 0
    st = Stage(f"exact-sequence dim={N}" + (" complex" if complexified else ""))
    st.data.update({"dims": [d3, d21, d12, d0], "ranks": [r_inc, r_sk, r_d]})
    comp1 = _matmul(skm, inc) if inc and skm and inc[0] else []
    comp2 = _matmul(dm, skm) if dm and skm and skm[0] else []
    st.add("S3 -> S2(x)V injective", r_inc == d3, {"rank": r_inc, "dim": d3})
    st.add("sk o inclusion = 0", all(x == 0 for r in comp1 for x in r))
    st.add("ker sk = im S3", d21 - r_sk == r_inc, {"nullity_sk": d21 - r_sk, "rank_inc": r_inc})
    st.add("d o sk = 0", all(x == 0 for r in comp2 for x in r))
    st.add("ker d = im sk", d12 - r_d == r_sk, {"nullity_d": d12 - r_d, "rank_sk": r_sk})
    st.add("d surjective", r_d == d0, {"rank": r_d, "dim": d0})
    st.add("alternating dimension sum = 0", d3 - d21 + d12 - d0 == 0, {"sum": d3 - d21 + d12 - d0})
    return st


# -- Kaehler and even-rank prolongations -----------------------------------------------------


def _restricted_subalgebra(h, mask):
    """Elements of ``h`` supported on the coordinates in ``mask`` (a linear solve)."""
    N = len(h[0])
    rows = []
    for i in range(N):
        for j in range(N):
            if not (mask[i] and mask[j]):
                rows.append([A[i][j] for A in h])
    rows = [r for r in rows if any(x != 0 for x in r)]
    ker = linear_kernel(rows, ncols=len(h))
    out = []
    for coeffs in ker:
        M = [[sum((c * A[i][j] for c, A in zip(coeffs, h) if c), ZERO) for j in range(N)] for i in range(N)]
        out.append(M)
    return out


def _kahler_prolongation_in(V, F, u0, G, k1, l1, k2, l2):
    vectors = [u0] if u0 is not None else []
    h = stabilizer_algebra(V, [F, G], vectors)
    full = generalized_first_prolongation(V, h)
    N = V.dim
    p1 = 2 * (k1 + l1)
    plus_mask = [i < p1 for i in range(N)]
    minus_mask = [p1 <= i < 2 * (k1 + l1 + k2 + l2) for i in range(N)]
    h1 = _restricted_subalgebra(h, plus_mask)
    h2 = _restricted_subalgebra(h, minus_mask)
    P1 = generalized_first_prolongation(V, h1)
    P2 = generalized_first_prolongation(V, h2)
    r_union = tensor_span_rank(P1.basis + P2.basis)
    r_all = tensor_span_rank(full.basis + P1.basis + P2.basis)
    q1, q2 = k1 + l1, k2 + l2
    expected = unitary_prolongation_dimension(q1) * (q1 > 0) + unitary_prolongation_dimension(q2) * (q2 > 0)
    st = Stage(f"kahler-prolongation ({k1},{l1}),({k2},{l2})" + ("" if u0 is not None else " even-rank"))
    row = {
        "space": f"R^{{{V.signature[0]},{V.signature[1]}}}",
        "algebra": f"u({k1},{l1})+u({k2},{l2})",
        "dimension_expected": expected,
        "dimension_computed": full.dimension,
        "pass": full.dimension == expected,
    }
    st.data["rows"] = [row]
    st.add("algebra dimension", len(h) == q1 * q1 + q2 * q2, {"computed": len(h), "expected": q1 * q1 + q2 * q2})
    st.add("dimension formula", full.dimension == expected, row)
    st.add("direct sum: summands independent", r_union == P1.dimension + P2.dimension)
    st.add("direct sum: spans the prolongation", r_all == full.dimension == r_union)
    st.add("summand dimensions", P1.dimension == unitary_prolongation_dimension(q1) * (q1 > 0)
           and P2.dimension == unitary_prolongation_dimension(q2) * (q2 > 0),
           {"summands": [P1.dimension, P2.dimension]})
    return full, st


def kahler_prolongation(split) -> Tuple[ProlongationSpace, Stage]:
    """Prolongation of ``u(k1,l1) + u(k2,l2)`` inside ``so(V)``, ``V = R^{n+1,n}``."""
    (k1, l1), (k2, l2) = split
    V, F, u0, G = kahler_model(split)
    return _kahler_prolongation_in(V, F, u0, G, k1, l1, k2, l2)


def even_rank_kahler_prolongation(split) -> Tuple[ProlongationSpace, Stage]:
    """``u(E)_G = u(E+) + u(E-)`` on the even-rank space ``R^{2k,2l}`` (no line)."""
    (k1, l1), (k2, l2) = split
    V, F, _, G = kahler_model(split, check=False, line=False)
    return _kahler_prolongation_in(V, F, None, G, k1, l1, k2, l2)


def even_rank_unitary_prolongation(k: int, l: int) -> ProlongationSpace:
    V, F, _ = unitary_model(k, l, line=False)
    return generalized_first_prolongation(V, stabilizer_algebra(V, [F]))


def unitary_prolongation(m1: int, m2: int, line_sign: Optional[int] = None) -> Tuple[ProlongationSpace, Stage]:
    """Prolongation of ``u(m1,m2)`` as the stabilizer of ``(F, u0)``."""
    V, F, u0 = unitary_model(m1, m2, line_sign)
    h = stabilizer_algebra(V, [F], [u0])
    P = generalized_first_prolongation(V, h)
    n = m1 + m2
    expected = unitary_prolongation_dimension(n)
    st = Stage(f"unitary-prolongation ({m1},{m2})")
    row = {
        "space": f"R^{{{V.signature[0]},{V.signature[1]}}}",
        "algebra": f"u({m1},{m2})",
        "dimension_expected": expected,
        "dimension_computed": P.dimension,
        "pass": P.dimension == expected,
    }
    st.data["rows"] = [row]
    st.add("algebra dimension", len(h) == n * n, {"computed": len(h), "expected": n * n})
    st.add("dimension n^2(n+1)", P.dimension == expected, row)
    return P, st
