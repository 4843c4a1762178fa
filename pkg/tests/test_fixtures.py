import copy
import json

import pytest

from ksverify.fixtures import BUILTIN, FixtureError, builtin_path, load_fixture


def raw(name):
    return json.loads(builtin_path(name).read_text())


@pytest.mark.parametrize("name", BUILTIN)
def test_builtin_fixtures_load(name):
    fx = load_fixture(name)
    assert fx.name == name
    assert fx.g == fx.field.degree
    assert fx.algebra.is_totally_indefinite()


def test_load_by_path_and_dict(tmp_path):
    data = raw("division_q6")
    path = tmp_path / "fx.json"
    path.write_text(json.dumps(data))
    assert load_fixture(str(path)).name == "division_q6"
    assert load_fixture(data).name == "division_q6"


def _expect(data, match):
    with pytest.raises(FixtureError, match=match):
        load_fixture(data)


def test_mu_square_not_totally_negative():
    data = raw("split_q")
    data["mu"] = ["0", "1", "0", "0"]  # i^2 = 1
    _expect(data, "precondition on mu failed: mu\\^2 is not totally negative")


def test_mu_square_not_central():
    data = raw("split_q")
    data["mu"] = ["1", "0", "0", "1"]  # (1 + ij)^2 = 2 ij
    _expect(data, "precondition on mu failed: mu\\^2 is not in F")


def test_wrong_declared_discriminant():
    data = raw("division_q6")
    data["d_B"] = ["10"]
    _expect(data, "differ as ideals")


def test_discriminant_mismatch_named():
    data = raw("division_q6")
    data["order_basis"] = [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]]
    _expect(data, "reduced discriminant of the order is 12")


def test_definite_algebra_rejected():
    data = raw("division_q6")
    data["algebra"] = {"a": ["-1"], "b": ["-1"]}
    _expect(data, "not totally indefinite")


def test_order_not_closed():
    data = raw("split_q")
    data["order_basis"][1] = ["1/3", "0", "0", "0"]
    with pytest.raises(FixtureError):
        load_fixture(data)


def test_schema_violations():
    data = raw("split_q")
    del data["mu"]
    _expect(data, "schema violation")
    data = raw("split_q")
    data["d_B"] = ["1.5"]
    _expect(data, "schema violation at d_B/0")
    data = raw("split_q")
    data["extra"] = 1
    _expect(data, "schema violation")


def test_wrong_vector_length():
    data = raw("split_q")
    data["mu"] = ["0", "0", "-1"]
    _expect(data, "mu must have 4 coordinates")


def test_a_pure_must_be_pure():
    data = raw("split_q")
    data["a_pure"] = ["1", "0", "0", "1"]
    _expect(data, "a_pure")


def test_multiplier_invertible():
    data = raw("split_qsqrt2")
    data["lattice_multiplier"] = ["0"] * 8
    _expect(data, "lattice_multiplier")


def test_missing_file_and_bad_json(tmp_path):
    _expect(str(tmp_path / "nope.json"), "not found")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    _expect(str(bad), "not valid JSON")


def test_builtin_not_mutated_by_loading():
    data = raw("division_q6")
    snapshot = copy.deepcopy(data)
    load_fixture(data)
    assert data == snapshot
