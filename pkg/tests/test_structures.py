import random
from fractions import Fraction

import pytest

from oddcourant import matrices as mx
from oddcourant.courant import GeneralizedSection, random_polynomial, random_section
from oddcourant.instances import fixture_names, load_fixture
from oddcourant.structures import (
    eigen_decompose,
    is_integrable,
    nijenhuis,
    perp_projector,
    validate_bn_gacs,
    validate_pseudo_hermitian,
)

STRUCTURES = [n for n in fixture_names() if not n.startswith("courant_")]
KAEHLER = [n for n in STRUCTURES if n.startswith("kah")]


@pytest.mark.parametrize("name", STRUCTURES)
def test_fixture_structures_valid(name):
    inst = load_fixture(name)
    st = validate_bn_gacs(inst.algebroid, inst.F, inst.u0)
    assert st.passed, st.first_failure()


def test_either_sign_of_u0_accepted():
    inst = load_fixture("cx_odd")
    assert validate_bn_gacs(inst.algebroid, inst.F, [-x for x in inst.u0]).passed


def test_scaled_f_fails_square_identity():
    inst = load_fixture("cx_even")
    st = validate_bn_gacs(inst.algebroid, mx.mat_scale(2, inst.F), inst.u0)
    c = st.check("F^2 = -Id + (-1)^n <.,u0> u0")
    assert not c.passed and c.witness["value"]
    assert st.check("F skew for <.,.>").passed


def test_wrong_norm_u0_fails():
    inst = load_fixture("cx_even")
    st = validate_bn_gacs(inst.algebroid, inst.F, mx.vec_scale(2, inst.u0))
    assert not st.check("<u0,u0> = (-1)^n").passed


def test_eigen_decomposition_cx_even():
    inst = load_fixture("cx_even")
    dec = eigen_decompose(inst.algebroid, inst.complex_structure())
    assert dec.stage.passed
    assert len(dec.L) == 2 and len(dec.U) == 1


def test_eigen_decomposition_cx_odd():
    inst = load_fixture("cx_odd")
    dec = eigen_decompose(inst.algebroid, inst.complex_structure())
    assert dec.stage.passed
    assert len(dec.L) == 1


@pytest.mark.parametrize("name,u0_in", [("kah", "E+"), ("kah_odd3", "E-"), ("kah_bfield", "E+")])
def test_parity_branch_of_decomposition(name, u0_in):
    inst = load_fixture(name)
    dec = eigen_decompose(inst.algebroid, inst.pseudo_hermitian())
    assert dec.stage.passed, dec.stage.first_failure()
    assert dec.parts[u0_in]["u0"]
    other = "E-" if u0_in == "E+" else "E+"
    assert not dec.parts[other]["u0"]


def _perp_random(inst, rng, degree=1):
    P = perp_projector(inst.algebroid, inst.u0)
    return GeneralizedSection(inst.algebroid.dim, mx.mat_vec(P, random_section(inst.algebroid, rng, degree).vector()))


def test_nijenhuis_rejects_non_orthogonal_arguments():
    inst = load_fixture("cx_even")
    alg = inst.algebroid
    with pytest.raises(ValueError):
        nijenhuis(alg, inst.F, inst.u0, alg.frame(2), alg.frame(0))


@pytest.mark.parametrize("name", ["sp_even_twisted", "sp_odd3_twisted", "kah_bfield"])
def test_nijenhuis_antisymmetric_and_tensorial(name):
    inst = load_fixture(name)
    alg = inst.algebroid
    rng = random.Random(0)
    for _ in range(2):
        u, v = _perp_random(inst, rng), _perp_random(inst, rng)
        f = random_polynomial(alg.dim, rng, 1)
        N = nijenhuis(alg, inst.F, inst.u0, u, v)
        assert (N + nijenhuis(alg, inst.F, inst.u0, v, u)).is_zero()
        assert (nijenhuis(alg, inst.F, inst.u0, u.scale(f), v) - N.scale(f)).is_zero()


@pytest.mark.parametrize(
    "name,expected",
    [("cx_even", True), ("cx_odd", True), ("cx_odd3", True), ("sp_even", True), ("sp_even_twisted", False),
     ("sp_odd3_twisted", False), ("kah_bfield", True)],
)
def test_integrability(name, expected):
    inst = load_fixture(name)
    st = is_integrable(inst.algebroid, inst.F, inst.u0)
    assert st.data["integrable"] is expected
    assert st.check("complex-frame criterion agrees with N_F").passed
    if expected:
        assert st.passed
        assert st.check("L_u0 F = 0").passed
        assert st.check("[Gamma(L), Gamma(L)] in Gamma(L)").passed
    else:
        w = st.check("N_F = 0 on U^perp x U^perp").witness
        assert w["u"].startswith("P ") and any(c != "0" for c in w["N_F(u,v)"])


def test_twisted_cx_even_stays_integrable():
    # F2 = dx1^dx2 is of type (1,1) for J, so the twist does not obstruct J
    inst = load_fixture("cx_even_twisted")
    st = is_integrable(inst.algebroid, inst.F, inst.u0)
    assert st.data["integrable"] and st.check("complex-frame criterion agrees with N_F").passed


@pytest.mark.parametrize("name", KAEHLER)
def test_pseudo_hermitian_fixtures(name):
    inst = load_fixture(name)
    st = validate_pseudo_hermitian(inst.algebroid, inst.Gend, inst.F, inst.u0)
    assert st.passed, st.first_failure()
    assert st.check("F G-skew").passed and st.check("Gend F G-skew").passed


def test_kah_is_pseudo_kaehler():
    inst = load_fixture("kah")
    st = validate_pseudo_hermitian(inst.algebroid, inst.Gend, inst.F, inst.u0)
    assert st.data["integrable"]
    assert st.check("L_u0 Gend = 0").passed


def test_identity_metric_rejected():
    inst = load_fixture("kah")
    alg = inst.algebroid
    st = validate_pseudo_hermitian(alg, mx.identity(alg.dim, alg.rank), inst.F, inst.u0)
    assert not st.check("pi|E- isomorphism and <.,.>|E- non-degenerate").passed


def test_non_commuting_f_rejected():
    inst = load_fixture("kah")
    alg = inst.algebroid
    # conjugate F by the orthogonal map exp(e ^ d1), which does not commute with Gend
    A = alg.wedge_endo(alg.frame(2).vector(), alg.frame(0).vector())
    A2 = mx.mat_mul(A, A)
    assert mx.is_zero_matrix(mx.mat_mul(A2, A))
    Id = mx.identity(alg.dim, alg.rank)
    E = mx.mat_add(mx.mat_add(Id, A), mx.mat_scale(Fraction(1, 2), A2))
    Einv = mx.mat_add(mx.mat_sub(Id, A), mx.mat_scale(Fraction(1, 2), A2))
    assert mx.mat_mul(E, Einv) == Id
    F2 = mx.mat_mul(mx.mat_mul(E, inst.F), Einv)
    u0 = mx.mat_vec(E, inst.u0)
    assert validate_bn_gacs(alg, F2, u0).passed
    st = validate_pseudo_hermitian(alg, inst.Gend, F2, u0)
    c = st.check("Gend F = F Gend")
    assert not c.passed and c.witness is not None
