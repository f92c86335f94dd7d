import json

import pytest

from logicaltensor.errors import SpecFileError
from logicaltensor.graph_core import Universe
from logicaltensor.state_algebra import Ket
from logicaltensor.utils.parse_spec_files import (check_within, dump_ket,
                                                  dump_operator, infer_universe,
                                                  ket_from_records, load_ket,
                                                  load_operator, load_restriction,
                                                  load_trajectory, load_universe,
                                                  dump_trajectory, read_json,
                                                  restriction_from_spec,
                                                  restriction_to_table_spec)

from conftest import G


def test_load_universe(data_dir, u2s2):
    assert load_universe(data_dir / "u2s2.json") == u2s2


def test_broken_json(data_dir):
    with pytest.raises(SpecFileError, match="invalid JSON"):
        read_json(data_dir / "broken.json")


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_json(tmp_path / "absent.json")


def test_ket_files(data_dir):
    psi, universe = load_ket(data_dir / "bell-like.json")
    assert universe is None
    assert psi.norm() == pytest.approx(1.0)
    assert psi[G("b.u", "w.v")] == pytest.approx(2 ** -0.5)


def test_operator_file_with_universe(data_dir, u2s2):
    flip, universe = load_operator(data_dir / "flip.json")
    assert universe == u2s2
    assert len(flip) == 4


def test_duplicate_records_add_up():
    psi = ket_from_records([{"re": 0.5, "graph": ["w.u"]}, {"re": 0.5, "im": 1, "graph": ["w.u"]}])
    assert psi[G("w.u")] == 1 + 1j


@pytest.mark.parametrize("records", [
    [{"re": 1, "graph": "w.u"}],
    [{"re": "one", "graph": ["w.u"]}],
    [{"re": 1, "graph": ["w.u", "b.u"]}],
    [{"re": 1, "graph": ["wu"]}],
])
def test_bad_ket_records(records):
    with pytest.raises(SpecFileError):
        ket_from_records(records)


def test_written_kets_are_rounded(tmp_path, u2s2):
    path = tmp_path / "psi.json"
    dump_ket(Ket({G("w.u"): 0.1 + 0.2 - 1e-17, G("b.v"): -0.0 + 1e-3j}), path, u2s2)
    data = json.loads(path.read_text())
    assert data["universe"] == u2s2.to_dict()
    values = {tuple(r["graph"]): (r["re"], r["im"]) for r in data["entries"]}
    assert values[("w.u",)] == (0.3, 0.0)
    assert values[("b.v",)] == (0.0, 0.001)
    psi, universe = load_ket(path)
    assert universe == u2s2 and len(psi) == 2


def test_operator_written_without_universe(tmp_path, data_dir):
    flip, _ = load_operator(data_dir / "flip.json")
    dump_operator(flip, tmp_path / "flip.json")
    assert isinstance(json.loads((tmp_path / "flip.json").read_text()), list)


def test_trajectory_files(tmp_path):
    trajectory = [Ket({G("right.v1"): 1.0}), Ket({G("left.v1"): 1.0})]
    dump_trajectory(trajectory, tmp_path / "t.json")
    assert load_trajectory(tmp_path / "t.json") == trajectory


def test_infer_and_check_universe(data_dir, u3s2):
    psi, _ = load_ket(data_dir / "product.json")
    assert infer_universe([psi]) == Universe(("u", "v"), ("b", "w"))
    check_within(psi, u3s2, "product.json")
    with pytest.raises(SpecFileError, match="not in the universe"):
        check_within(Ket({G("w.y"): 1.0}), u3s2, "psi")
    with pytest.raises(SpecFileError):
        infer_universe([Ket()])


@pytest.mark.parametrize("name, label", [
    ("zeta_u.json", "zeta_u"),
    ("white.json", "white"),
    ("fig5.json", "fig5"),
    ("zeta_uv.json", "(zeta_u | zeta_v)"),
])
def test_restriction_files(data_dir, u2s2, name, label):
    assert load_restriction(data_dir / name, u2s2).label == label


@pytest.mark.parametrize("spec, message", [
    ({"kind": "by_colour"}, "unknown restriction kind"),
    ({"kind": "by_vertex"}, "needs a 'vertex' field"),
    ({"vertex": "u"}, "kind"),
    ({"kind": "table", "table": [{"graph": [], "part": []}]}, "does not list"),
])
def test_bad_restriction_specs(u2s2, spec, message):
    with pytest.raises(SpecFileError, match=message):
        restriction_from_spec(spec, u2s2)


def test_unknown_kind_file(data_dir, u2s2):
    with pytest.raises(SpecFileError):
        load_restriction(data_dir / "unknown_kind.json", u2s2)


def test_table_form_reproduces_the_restriction(data_dir, u2s2):
    chi = load_restriction(data_dir / "fig5.json", u2s2)
    spec = restriction_to_table_spec(chi, u2s2)
    assert len(spec["table"]) == u2s2.graph_count
    again = restriction_from_spec(spec, u2s2)
    assert again.label == "fig5"
    assert again(G("w.u", "b.v")) == G("w.u")


def test_line_neighbourhood_spec(line3):
    chi = restriction_from_spec({"kind": "line_neighborhood", "vertex": "v1"}, line3.universe)
    assert chi.label == "chi_v1^1"
