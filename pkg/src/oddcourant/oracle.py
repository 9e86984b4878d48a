"""Pin the twist coefficients of the split-model bracket by brute force.

Run ``python -m oddcourant.oracle`` to regenerate ``bracket_constants.json``.
The search tries every ``(c1, c2, c3)`` in ``{0, +-1, +-2}^3`` against all
four Courant axioms on random degree-1 sections over a twisted R^3 with a
closed, non-constant F2, then finds the constant ``k`` in ``dH3 = k F2^F2``
on R^4.
"""
from __future__ import annotations

import json
import random
import sys
from fractions import Fraction
from itertools import product
from pathlib import Path

from .courant import (
    BracketCoefficients,
    OddExactAlgebroid,
    axiom_residuals,
    random_polynomial,
    random_section,
)
from .forms import DifferentialForm
from .poly import parse_polynomial

GRID = (0, 1, -1, 2, -2)
K_CANDIDATES = tuple(Fraction(t) for t in ("0", "1", "-1", "2", "-2", "1/2", "-1/2", "1/4", "-1/4"))


def _form(d, deg, entries):
    return DifferentialForm(d, deg, {idx: parse_polynomial(p, d) for idx, p in entries.items()})


def _passes(alg, coeffs, seed=0, triples=3, degree=1, order=("symmetrization", "metric", "leibniz", "jacobi")):
    rng = random.Random(seed)
    for _ in range(triples):
        u, v, w = (random_section(alg, rng, degree) for _ in range(3))
        f = random_polynomial(alg.dim, rng, degree + 1)
        for name in order:
            r = axiom_residuals(alg, u, v, w, f, coeffs, which=(name,))[name]
            if not r.is_zero():
                return False, name
    return True, None


def search_coefficients(seed: int = 0):
    """All coefficient triples on the grid that satisfy the axioms."""
    F2 = _form(3, 2, {(0, 1): "1 + x1", (1, 2): "x2", (0, 2): "x3"})
    H3 = _form(3, 3, {(0, 1, 2): "2 + x1"})
    valid = []
    for c1, c2, c3 in product(GRID, repeat=3):
        coeffs = BracketCoefficients(Fraction(c1), Fraction(c2), Fraction(c3), Fraction(0))
        alg = OddExactAlgebroid(3, F2, H3, coefficients=coeffs)
        ok, _ = _passes(alg, coeffs, seed)
        if ok:
            valid.append((c1, c2, c3))
    return valid


def search_h_condition(coeffs: BracketCoefficients, seed: int = 0):
    """Constants ``k`` (from a small grid) for which ``dH3 = k F2^F2`` passes Jacobi on R^4."""
    F2 = _form(4, 2, {(0, 1): "1", (2, 3): "1"})  # F2^F2 = 2 dx1234
    good = []
    for k in K_CANDIDATES:
        H3 = _form(4, 3, {(1, 2, 3): f"{2 * k}*x1"}) if k else DifferentialForm(4, 3)
        c = BracketCoefficients(coeffs.c1, coeffs.c2, coeffs.c3, k)
        alg = OddExactAlgebroid(4, F2, H3, coefficients=c)
        ok, _ = _passes(alg, c, seed, triples=2, order=("jacobi",))
        if ok:
            good.append(k)
    return good


def non_closed_f2_fails(coeffs: BracketCoefficients, seed: int = 0) -> bool:
    F2 = _form(3, 2, {(0, 1): "x3"})
    alg = OddExactAlgebroid(3, F2, None, coefficients=coeffs)
    ok, failing = _passes(alg, coeffs, seed, order=("jacobi",))
    return (not ok) and failing == "jacobi"


def run(seed: int = 0) -> dict:
    valid = search_coefficients(seed)
    twisting = [c for c in valid if c[0] != 0]
    if not twisting:
        raise RuntimeError(f"no coefficient triple with c1 != 0 passes the axioms; valid={valid}")
    # Canonical representative: c1 > 0.  Its negative is the same algebroid
    # with e -> -e, which leaves <e,e> = 1 unchanged.
    c1, c2, c3 = max(twisting)
    pinned = BracketCoefficients(Fraction(c1), Fraction(c2), Fraction(c3), Fraction(0))
    ks = search_h_condition(pinned, seed)
    if len(ks) != 1:
        raise RuntimeError(f"expected a unique H3 constant, found {ks}")
    return {
        "generated_by": "python -m oddcourant.oracle",
        "seed": seed,
        "grid": list(GRID),
        "valid_triples": [list(c) for c in valid],
        "pinned": {"c1": str(c1), "c2": str(c2), "c3": str(c3)},
        "family_note": (
            "valid nonzero triples form the family t*(c1,c2,c3) with t=+-1 on the grid, "
            "related by the frame change e -> -e (equivalently F2 -> -F2); "
            "both keep <e,e> = 1, the representative with c1 > 0 is pinned"
        ),
        "twist_conditions": {
            "dF2": "0",
            "dH3_equals_k_F2_wedge_F2": str(ks[0]),
            "non_closed_F2_breaks_jacobi": non_closed_f2_fails(pinned, seed),
        },
    }


def main(argv=None) -> int:
    data = run()
    target = Path(__file__).with_name("bracket_constants.json")
    target.write_text(json.dumps(data, indent=2) + "\n")
    print(f"wrote {target}")
    print(json.dumps(data["pinned"]), "k =", data["twist_conditions"]["dH3_equals_k_F2_wedge_F2"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
