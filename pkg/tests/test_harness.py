import json

import numpy as np
import pytest

from logicaltensor.config import REPORT_SCHEMA
from logicaltensor.dynamics_examples import LineConfig
from logicaltensor.errors import InvalidRestriction, SpecFileError, UniverseTooLarge
from logicaltensor.graph_core import Basis
from logicaltensor.harness import (FAIL, MUTATIONS, PASS, PROPOSITION_LAWS,
                                   SKIPPED, TOOLBOX_LAWS, LawResult,
                                   SuiteReport, kernels_for, reports_to_frame,
                                   reports_to_json, run_proposition_suite,
                                   run_theorem_suite, run_toolbox_suite)
from logicaltensor.harness.report import run_laws
from logicaltensor.harness.sampling import law_rng, random_consistency_preserving
from logicaltensor.restrictions import by_vertex
from logicaltensor.tensor_trace import dense_consistency_preserving
from logicaltensor.utils.parse_spec_files import load_restriction

SAMPLES = 3


def test_toolbox_passes(u2s2):
    report = run_toolbox_suite(u2s2, samples=SAMPLES, seed=1)
    assert report.passed, report.summary()
    assert [r.law for r in report.laws] == list(TOOLBOX_LAWS)
    assert all(r.status == PASS for r in report.laws)


def test_report_json_is_reproducible(u2s2):
    first = run_toolbox_suite(u2s2, samples=SAMPLES, seed=7).to_json()
    second = run_toolbox_suite(u2s2, samples=SAMPLES, seed=7, threads=3).to_json()
    assert first == second
    payload = json.loads(first)
    assert payload["schema"] == REPORT_SCHEMA
    assert "wall_time" not in first


@pytest.mark.parametrize("mutation", ["drop-overlap", "drop-zeroing"])
def test_broken_kernels_are_caught(u2s2, mutation):
    report = run_toolbox_suite(u2s2, samples=SAMPLES, seed=1, kernels=kernels_for(mutation))
    assert not report.passed
    assert report.failures()


def test_unknown_mutation():
    assert set(MUTATIONS) == {"none", "drop-overlap", "drop-zeroing"}
    with pytest.raises(SpecFileError, match="unknown mutation"):
        kernels_for("drop-everything")


def test_law_subset(u2s2):
    report = run_toolbox_suite(u2s2, samples=SAMPLES, laws=["idempotence", "reconstitution"])
    assert [r.law for r in report.laws] == ["idempotence", "reconstitution"]


def test_invalid_restriction_is_refused(data_dir, u2s2):
    chi = load_restriction(data_dir / "not_axiom.json", u2s2)
    with pytest.raises(InvalidRestriction):
        run_toolbox_suite(u2s2, restrictions=[chi], samples=SAMPLES)


def test_proposition_suite_passes(u2s2):
    report = run_proposition_suite(u2s2, samples=SAMPLES, seed=3)
    assert report.passed, report.summary()
    assert [r.law for r in report.laws] == list(PROPOSITION_LAWS)


def test_proposition_suite_with_line_examples(u2s2, line3):
    report = run_proposition_suite(u2s2, samples=SAMPLES, line=line3, laws=["causality"])
    assert report.passed, report.summary()


def test_theorem_suite_on_two_vertices(line2):
    report = run_theorem_suite(line2)
    assert report.passed, report.summary()
    statuses = {r.law: r.status for r in report.laws}
    assert statuses["decompose-M"] == PASS
    assert statuses["decompose-MC(0.785398163397)"] == PASS
    # the end swap only breaks causality from three vertices on
    assert statuses["swap-rejected"] == SKIPPED


def test_theorem_suite_on_three_vertices(line3):
    report = run_theorem_suite(line3)
    assert report.passed, report.summary()
    statuses = {r.law: r.status for r in report.laws}
    assert statuses["decompose-M"] == PASS
    assert statuses["decompose-MC(0.785398163397)"] == PASS
    assert statuses["swap-rejected"] == PASS


def test_theorem_suite_line_limit():
    with pytest.raises(UniverseTooLarge):
        run_theorem_suite(LineConfig(4))


def test_raising_law_becomes_a_failure(u2s2):
    def bad():
        raise InvalidRestriction("broken on purpose")

    report = run_laws("demo", u2s2, 0, {"ok": lambda: LawResult("ok", PASS), "bad": bad})
    assert [r.status for r in report.laws] == [PASS, FAIL]
    assert report.laws[1].reason == "InvalidRestriction: broken on purpose"
    assert not report.passed


def test_report_tables(u2s2):
    report = SuiteReport("demo", u2s2, 0, [
        LawResult.from_deviation("a", 1e-13, 1e-10, 4),
        LawResult.from_deviation("b", 0.5, 1e-10, 4, counterexample="G"),
        LawResult.skipped("c", "nothing to check"),
    ])
    assert not report.passed
    assert report.max_deviation == 0.5
    frame = reports_to_frame([report])
    assert list(frame["status"]) == [PASS, FAIL, SKIPPED]
    assert "1 passed, 1 failed, 1 skipped" in report.summary()
    payload = json.loads(reports_to_json([report]))
    assert payload["reports"][0]["laws"][1]["counterexample"] == "G"
    assert payload["reports"][0]["laws"][0]["counterexample"] is None


def test_law_generators_are_independent():
    assert law_rng(1, "a").integers(1 << 30) == law_rng(1, "a").integers(1 << 30)
    assert law_rng(1, "a").integers(1 << 30) != law_rng(1, "b").integers(1 << 30)


def test_consistency_preserving_draws_leave_the_support(u2s2):
    basis = Basis.of(u2s2)
    tables = basis.tables(by_vertex("u"))
    supports = basis.supports()
    rng = law_rng(0, "local-action")
    crossing = False
    for _ in range(5):
        a = random_consistency_preserving(rng, tables)
        assert dense_consistency_preserving(a, tables)
        crossing |= any(supports[i] != supports[j] for i, j in np.argwhere(np.abs(a) > 0))
    assert crossing


def test_local_action_law(u2s2):
    report = run_toolbox_suite(u2s2, samples=SAMPLES, seed=5, laws=["local-action"])
    assert report.passed, report.summary()
