import json

import pytest

from oddcourant.cli import run
from oddcourant.instances import fixture_path


def report(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def stage(rep, name):
    return next(s for s in rep["stages"] if s["stage"] == name)


def check(st, name):
    return next(c for c in st["postconditions"] if c["name"] == name)


@pytest.mark.parametrize("name", ["courant_untwisted_d2", "courant_twisted_d2"])
def test_axioms_pass(capsys, name):
    code, rep = report(capsys, ["axioms", "--instance", str(fixture_path(name))])
    assert code == 0 and rep["pass"]
    assert rep["schema"] == "oddcourant-report/1"


def test_axioms_non_closed_twist_fails_with_witness(capsys):
    code, rep = report(capsys, ["axioms", "--instance", str(fixture_path("courant_nonclosed_f2_d3"))])
    assert code == 1
    failed = [c for s in rep["stages"] for c in s["postconditions"] if not c["pass"]]
    assert failed and all(c.get("witness") is not None for c in failed)


def test_malformed_polynomial_exits_2_with_position(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"dim": 2, "twist": {"F2": [[1, 2, "x1 + *x2"]]}}))
    assert run(["axioms", "--instance", str(p)]) == 2
    err = capsys.readouterr().err
    assert "position 5" in err and "twist.F2[0]" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["prolong", "--n", "0"],
        ["prolong"],
        ["prolong", "--n", "2", "--split", "1,0:0,1"],
        ["prolong", "--split", "1,0"],
        ["axioms"],
        ["nonsense"],
        ["axioms", "--instance", "/no/such/file.json"],
        ["structure", "--instance", "FIXTURE:courant_untwisted_d2"],
        ["kahler", "--instance", "FIXTURE:cx_even"],
        ["axioms", "--instance", "FIXTURE:courant_untwisted_d2", "--seed", "-1"],
    ],
)
def test_usage_errors(argv, capsys):
    argv = [str(fixture_path(a[8:])) if a.startswith("FIXTURE:") else a for a in argv]
    assert run(argv) == 2


def test_kahler_fixture(capsys):
    code, rep = report(capsys, ["kahler", "--instance", str(fixture_path("kah"))])
    assert code == 0
    k = stage(rep, "bn-kahler")
    for name in ("T~ = 0", "D~ G = 0", "D~ F = 0"):
        assert check(k, name)["pass"]


def test_integrable_on_non_integrable_fixture(capsys):
    code, rep = report(capsys, ["integrable", "--instance", str(fixture_path("sp_even_twisted"))])
    assert code == 1
    c = check(stage(rep, "integrability"), "N_F = 0 on U^perp x U^perp")
    assert not c["pass"] and c["witness"]["N_F(u,v)"]


def test_integrable_on_twisted_cx_even(capsys):
    # the twist is of type (1,1) for the complex structure, so integrability survives
    code, _ = report(capsys, ["integrable", "--instance", str(fixture_path("cx_even_twisted"))])
    assert code == 0


def test_adapt_cx_odd(capsys):
    code, rep = report(capsys, ["adapt", "--instance", str(fixture_path("cx_odd"))])
    assert code == 0
    ad = stage(rep, "adapted")
    assert check(ad, "T~(u,v,w) = <N_F(u,v),w>/4 on U^perp")["pass"]
    assert check(ad, "T~(u,v,u0) = <(L_u0 F)u, Fv>/2")["pass"]


def test_adapt_non_integrable_still_confirms_formulas(capsys):
    code, rep = report(capsys, ["adapt", "--instance", str(fixture_path("sp_even_twisted"))])
    assert code == 0
    assert not check(stage(rep, "adapted"), "T~ = 0")["pass"]
    assert stage(rep, "integrability-obstruction")["data"]["feasible"] is False


def test_kahler_rejects_non_integrable(capsys):
    code, rep = report(capsys, ["kahler", "--instance", str(fixture_path("kah_sp_twisted"))])
    assert code == 1


@pytest.mark.parametrize("name", ["cx_even", "kah"])
def test_structure(capsys, name):
    code, _ = report(capsys, ["structure", "--instance", str(fixture_path(name))])
    assert code == 0


def test_prolong_n3(capsys):
    code, rep = report(capsys, ["prolong", "--n", "3"])
    assert code == 0
    rows = [r for s in rep["stages"] for r in s.get("data", {}).get("rows", [])]
    assert len(rows) == 4
    assert all(r["dimension_expected"] == r["dimension_computed"] == 36 for r in rows)


def test_prolong_split(capsys):
    code, rep = report(capsys, ["prolong", "--split", "1,0:0,1"])
    assert code == 0
    rows = rep["stages"][0]["data"]["rows"]
    assert rows[0]["dimension_computed"] == 4


def test_reports_are_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert run(["axioms", "--instance", str(fixture_path("courant_twisted_d2")), "--seed", "3", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert capsys.readouterr().out == ""
