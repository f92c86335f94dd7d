import json
from pathlib import Path

import pytest

from logicaltensor.cli import main
from logicaltensor.config import SEED_ENV_VAR
from logicaltensor.errors import EquivalenceViolation, ReconstructionFailure
from logicaltensor.utils.parse_spec_files import load_operator, load_trajectory


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_verify_toolbox(capsys, tmp_path: Path):
    code, out = run(capsys, "verify", "--samples", 2, "--json", tmp_path / "r.json",
                    "--table", tmp_path / "r.csv")
    assert code == 0, out
    assert "== toolbox suite" in out
    payload = json.loads((tmp_path / "r.json").read_text())
    assert payload["reports"][0]["passed"] is True
    assert (tmp_path / "r.csv").read_text().startswith("suite,law,status")


def test_verify_with_a_mutation_fails(capsys):
    code, out = run(capsys, "verify", "--samples", 2, "--mutation", "drop-overlap")
    assert code == 1
    assert "FAIL" in out


def test_verify_unknown_law(capsys):
    code, out = run(capsys, "verify", "--law", "no-such-law")
    assert code == 2
    assert out.startswith("Error: unknown law")


def test_verify_single_theorem_law(capsys):
    code, out = run(capsys, "verify", "--suite", "theorem", "--line-length", 2,
                    "--law", "decompose-M")
    assert code == 0, out
    assert "decompose-M" in out
    assert "toolbox" not in out


def test_check_local(capsys, data_dir):
    code, out = run(capsys, "check-local", "--op", data_dir / "flip.json",
                    "--restriction", data_dir / "fig5.json")
    assert code == 0
    assert "local: yes, strict: no" in out

    code, out = run(capsys, "check-local", "--op", data_dir / "flip.json",
                    "--restriction", data_dir / "zeta_u.json")
    assert code == 1
    assert "counterexample" in out


def test_entropy(capsys, data_dir):
    code, out = run(capsys, "entropy", "--ket", data_dir / "bell-like.json",
                    "--restriction", data_dir / "zeta_u.json")
    assert code == 0
    assert out.strip() == "entropy: 1 bits"

    code, out = run(capsys, "entropy", "--ket", data_dir / "product.json",
                    "--restriction", data_dir / "zeta_u.json")
    assert out.strip() == "entropy: 0 bits"


def test_trace(capsys, data_dir, tmp_path: Path):
    code, _ = run(capsys, "trace", "--op", data_dir / "flip.json",
                  "--restriction", data_dir / "fig5.json", "--out", tmp_path / "reduced.json")
    assert code == 0
    reduced, universe = load_operator(tmp_path / "reduced.json")
    assert universe is not None
    assert len(reduced) > 0


def test_tensor_of_kets(capsys, data_dir, tmp_path: Path):
    left = tmp_path / "left.json"
    right = tmp_path / "right.json"
    left.write_text(json.dumps([{"re": 1, "im": 0, "graph": ["w.u"]}]))
    right.write_text(json.dumps([{"re": 1, "im": 0, "graph": ["b.v"]}]))
    code, out = run(capsys, "tensor", "--left", left, "--right", right,
                    "--restriction", data_dir / "zeta_u.json")
    assert code == 0
    assert json.loads(out) == [{"re": 1.0, "im": 0.0, "graph": ["w.u", "b.v"]}]


def test_tensor_of_mixed_kinds(capsys, data_dir):
    code, out = run(capsys, "tensor", "--left", data_dir / "bell-like.json",
                    "--right", data_dir / "flip.json", "--restriction", data_dir / "zeta_u.json")
    assert code == 2


def test_validate_restriction(capsys, data_dir, tmp_path: Path):
    code, out = run(capsys, "validate-restriction", "--universe", data_dir / "u2s2.json",
                    "--restriction", data_dir / "fig5.json", "--emit-table", tmp_path / "t.json")
    assert code == 0
    assert "axiom holds" in out
    assert json.loads((tmp_path / "t.json").read_text())["kind"] == "table"

    code, out = run(capsys, "validate-restriction", "--universe", data_dir / "u2s2.json",
                    "--restriction", data_dir / "not_axiom.json")
    assert code == 1
    assert "axiom fails" in out


@pytest.mark.parametrize("name", ["unknown_kind.json", "broken.json", "absent.json"])
def test_validate_unusable_restriction(capsys, data_dir, name):
    code, out = run(capsys, "validate-restriction", "--universe", data_dir / "u2s2.json",
                    "--restriction", data_dir / name)
    assert code == 2
    assert out.startswith("Error:")


def test_evolve(capsys, tmp_path: Path):
    code, out = run(capsys, "evolve", "--line-length", 3, "--steps", 4, "--theta", 0.5,
                    "--emit-trajectory", tmp_path / "t.json", "--plot", tmp_path / "t.pdf")
    assert code == 0
    trajectory = load_trajectory(tmp_path / "t.json")
    assert len(trajectory) == 5
    assert all(abs(psi.norm() - 1.0) < 1e-9 for psi in trajectory)
    assert (tmp_path / "t.pdf").exists()


def test_decompose_line(capsys, tmp_path: Path):
    code, out = run(capsys, "decompose", "--line-length", 2, "--theta", 0.785398163397,
                    "--out-dir", tmp_path / "gates")
    assert code == 0, out
    report = json.loads((tmp_path / "gates" / "report.json").read_text())
    assert report["passed"] is True
    assert sorted(p.name for p in (tmp_path / "gates").glob("*.json")) == [
        "K_v1.json", "K_v2.json", "report.json", "tau_v1.json", "tau_v2.json"]


def test_decompose_non_causal(capsys, data_dir):
    code, out = run(capsys, "decompose", "--op", data_dir / "flip.json",
                    "--chi", f"u={data_dir / 'zeta_u.json'}", "--chi", f"v={data_dir / 'zeta_v.json'}")
    assert code == 1
    assert out.startswith("not decomposable:")


def test_decompose_reconstruction_failure(capsys, monkeypatch):
    def failing(*args, **kwargs):
        raise ReconstructionFailure(0.5, "{right.v1}")

    monkeypatch.setattr("logicaltensor.cli.block_decompose", failing)
    code, out = run(capsys, "decompose", "--line-length", 2)
    assert code == 1
    assert out.startswith("reconstruction failed: deviation 0.5 on {right.v1}")


def test_check_local_disagreement_is_a_negative_verdict(capsys, monkeypatch, data_dir):
    def disagreeing(*args, **kwargs):
        raise EquivalenceViolation("schrodinger and heisenberg verdicts differ")

    monkeypatch.setattr("logicaltensor.cli.is_local", disagreeing)
    code, out = run(capsys, "check-local", "--op", data_dir / "flip.json",
                    "--restriction", data_dir / "fig5.json")
    assert code == 1
    assert out.startswith("Error: schrodinger and heisenberg")


def test_bad_seed_environment(capsys, monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "not-a-number")
    code, out = run(capsys, "verify", "--samples", 1, "--law", "idempotence")
    assert code == 2
    assert SEED_ENV_VAR in out
