import json
import random
from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from oddcourant import matrices as mx
from oddcourant.courant import (
    GeneralizedConnection,
    check_connection_axioms,
    check_courant_axioms,
    cyclic_sum,
    dorfman_lie,
    load_bracket_coefficients,
    random_section,
    torsion,
    torsion_value,
)
from oddcourant.forms import lie_bracket
from oddcourant.instances import load_fixture
from oddcourant.oracle import run as run_oracle
from oddcourant.quadratic import QuadraticSpace


def alg(name):
    return load_fixture(name).algebroid


def random_skew_correction(A, rng, degree=1):
    out = []
    for _ in range(A.rank):
        M = [[random_section(A, rng, degree).comps[j] for j in range(A.rank)] for _ in range(A.rank)]
        gM = mx.mat_mul(A.gram, M)
        out.append(mx.mat_mul(A.gram_inv, mx.mat_sub(gM, mx.transpose(gM))))
    return out


def test_scalar_product_signature():
    for d in (1, 2, 3):
        A = alg({1: "cx_odd", 2: "cx_even", 3: "cx_odd3"}[d])
        assert QuadraticSpace(A.gram).signature == (d + 1, d)


def test_pairing_on_frame():
    A = alg("courant_untwisted_d2")
    assert A.pairing(A.frame(0), A.frame(3)) == Fraction(1, 2)
    assert A.pairing(A.frame(2), A.frame(2)) == 1
    assert A.pairing(A.frame(0), A.frame(1)) == 0


def test_pinned_coefficients_match_oracle_file():
    stored = json.loads((resources.files("oddcourant") / "bracket_constants.json").read_text())
    assert run_oracle() == stored
    c = load_bracket_coefficients()
    assert (c.c1, c.c2, c.c3) == tuple(Fraction(stored["pinned"][k]) for k in ("c1", "c2", "c3"))


@pytest.mark.parametrize("name", ["courant_untwisted_d2", "courant_twisted_d2", "courant_twisted_d3"])
def test_axioms_hold(name):
    st = check_courant_axioms(alg(name), seed=0)
    assert st.passed, st.first_failure()
    assert st.data["triples"] == 20


def test_axioms_hold_with_h3_satisfying_twist_condition():
    A = alg("courant_h3_d4")
    assert A.twist_conditions().passed
    assert check_courant_axioms(A, seed=1, n_random=4, degree=1).passed


def test_non_closed_f2_fails_jacobi_with_witness():
    A = alg("courant_nonclosed_f2_d3")
    assert not A.twist_conditions().passed
    st = check_courant_axioms(A, seed=0)
    jac = st.check("jacobi")
    assert not jac.passed
    assert jac.witness["residual"] and "u" in jac.witness


def test_wrong_coefficients_fail():
    A = alg("courant_twisted_d2")
    c = load_bracket_coefficients()
    bad = type(c)(c.c1, c.c2 + 1, c.c3, c.k)
    from oddcourant.courant import axiom_residuals

    rng = random.Random(0)
    u, v, w = (random_section(A, rng, 1) for _ in range(3))
    res = axiom_residuals(A, u, v, w, A.zero() + 1, bad)
    assert any(not r.is_zero() for r in res.values())


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_anchor_is_a_bracket_morphism(seed):
    A = alg("courant_twisted_d2")
    rng = random.Random(seed)
    u, v = random_section(A, rng), random_section(A, rng)
    assert A.anchor(A.dorfman(u, v)) == lie_bracket(A.anchor(u), A.anchor(v))


def test_dorfman_lie_of_identity_vanishes():
    A = alg("courant_twisted_d3")
    u = random_section(A, random.Random(3))
    assert mx.is_zero_matrix(dorfman_lie(A, u, mx.identity(A.dim, A.rank)))


def test_connection_axioms_and_skewness_check():
    A = alg("courant_twisted_d2")
    D = GeneralizedConnection(A, random_skew_correction(A, random.Random(0)))
    assert check_connection_axioms(D).passed
    M = mx.identity(A.dim, A.rank)
    with pytest.raises(ValueError):
        GeneralizedConnection(A, [M] * A.rank)


@pytest.mark.parametrize("name", ["courant_untwisted_d2", "courant_twisted_d2", "courant_twisted_d3"])
def test_torsion_totally_skew_and_matches_definition(name):
    A = alg(name)
    rng = random.Random(1)
    D = GeneralizedConnection(A, random_skew_correction(A, rng))
    T = torsion(D)
    assert T.is_totally_skew()
    for _ in range(3):
        u, v, w = (random_section(A, rng, 1) for _ in range(3))
        assert T(u, v, w) == torsion_value(D, u, v, w)


def test_flat_untwisted_connection_is_torsion_free():
    assert torsion(GeneralizedConnection(alg("courant_untwisted_d2"))).is_zero()


def test_torsion_shift_law():
    A = alg("courant_twisted_d2")
    rng = random.Random(5)
    D = GeneralizedConnection(A, random_skew_correction(A, rng))
    eta = random_skew_correction(A, rng)
    diff = torsion(D.plus(eta)) - torsion(D)
    assert (diff - cyclic_sum(A, eta)).is_zero()
