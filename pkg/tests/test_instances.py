import json

import pytest

from oddcourant.instances import InstanceError, fixture_names, fixture_path, load_fixture, load_instance, parse_instance


def test_all_fixtures_load():
    names = fixture_names()
    assert {"cx_even", "cx_odd", "kah", "courant_untwisted_d2"} <= set(names)
    for name in names:
        inst = load_fixture(name)
        assert inst.algebroid.rank == 2 * inst.algebroid.dim + 1


def test_twist_is_parsed_with_one_based_indices():
    inst = parse_instance({"dim": 3, "twist": {"F2": [[2, 1, "x3"]], "H3": [[1, 2, 3, "2"]]}})
    alg = inst.algebroid
    assert not inst.has_structure
    # dx2 ^ dx1 = -dx1 ^ dx2
    assert str(alg.F2.component((0, 1))) == "-x3"


def test_structure_block_by_fixture_name():
    raw = json.loads(fixture_path("cx_even").read_text())
    inst = parse_instance({"algebroid": "courant_untwisted_d2", "F": raw["F"], "u0": raw["u0"]})
    assert inst.has_structure and inst.Gend is None


@pytest.mark.parametrize(
    "data,fragment",
    [
        ({"dim": 0}, "dim"),
        ({"dim": 2, "twist": {"F2": [[1, 3, "1"]]}}, "1..2"),
        ({"dim": 2, "twist": {"F2": [[1, 2, "x1 +* 2"]]}}, "twist.F2[0]"),
        ({"algebroid": "courant_untwisted_d2", "F": [[0] * 5] * 5}, "both F and u0"),
        ({"algebroid": "courant_untwisted_d2", "F": [[0] * 4] * 4, "u0": [0] * 5}, "5x5"),
        ({"algebroid": "no_such_fixture"}, "unknown fixture"),
        ([], "JSON object"),
    ],
)
def test_malformed_instances(data, fragment):
    with pytest.raises(InstanceError, match=fragment.replace("+", r"\+").replace("*", r"\*").replace("[", r"\[")):
        parse_instance(data)


def test_invalid_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2,,}')
    with pytest.raises(InstanceError, match="line 1 column"):
        load_instance(p)


def test_load_instance_uses_file_stem(tmp_path):
    p = tmp_path / "mine.json"
    p.write_text(json.dumps({"dim": 2}))
    assert load_instance(p).name == "mine"
