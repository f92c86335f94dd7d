from pathlib import Path

import numpy as np
import pytest
from pypdf import PdfReader

from logicaltensor.dynamics_examples import build_M, evolve
from logicaltensor.harness import run_toolbox_suite
from logicaltensor.make_report import (make_verification_pdf, merge_pdfs,
                                      run_footer)
from logicaltensor.state_algebra import basis_ket
from logicaltensor.utils.build_text_section import build_text_section
from logicaltensor.utils.plot_deviation import plot_deviation
from logicaltensor.utils.plot_trajectory import (mean_particle_number,
                                                 plot_trajectory,
                                                 trajectory_profiles)


@pytest.fixture
def toolbox_report(u2s2):
    return run_toolbox_suite(u2s2, samples=2, seed=1, laws=["idempotence", "trace-identities"])


def test_verification_pdf(toolbox_report, tmp_path: Path):
    """The merged report has the text pages and the chart, numbered and footed."""
    out = make_verification_pdf([toolbox_report], tmp_path / "report" / "verify.pdf")
    assert out.exists(), "verify.pdf was not created"
    reader = PdfReader(out)
    assert len(reader.pages) >= 2
    text = reader.pages[0].extract_text()
    assert f"1 / {len(reader.pages)}" in text
    assert "seed 1" in text
    assert reader.metadata.subject == run_footer([toolbox_report])


def test_run_footer(toolbox_report):
    assert run_footer([toolbox_report]) == "toolbox pass (2 vertices, 2 states) | seed 1"
    assert run_footer([]) == "no suites"


def test_sections_are_written(toolbox_report, tmp_path: Path):
    build_text_section([toolbox_report], tmp_path / "text.pdf")
    plot_deviation([toolbox_report], tmp_path / "chart.pdf", 1e-10)
    assert "idempotence" in PdfReader(tmp_path / "text.pdf").pages[0].extract_text()
    merge_pdfs([tmp_path / "text.pdf", tmp_path / "chart.pdf"], tmp_path / "merged.pdf",
               footer="demo run", title="demo")
    merged = PdfReader(tmp_path / "merged.pdf")
    assert len(merged.pages) == 2
    assert merged.metadata.title == "demo"
    assert "demo run" in merged.pages[1].extract_text()


def test_merge_missing_file(tmp_path: Path):
    with pytest.raises(FileNotFoundError):
        merge_pdfs([tmp_path / "absent.pdf"], tmp_path / "merged.pdf")


def test_trajectory_plot(line3, tmp_path: Path):
    psi = basis_ket(line3.graph(["right", "empty", "empty"]))
    trajectory = evolve(psi, [build_M(line3)], 4)
    profiles = trajectory_profiles(trajectory, line3)
    assert profiles.shape == (5, 3)
    assert np.allclose(profiles[1], [0.0, 1.0, 0.0])
    assert mean_particle_number(trajectory[-1]) == pytest.approx(1.0)
    plot_trajectory(trajectory, line3, tmp_path / "t.pdf", title="M")
    assert (tmp_path / "t.pdf").exists()
    meta = PdfReader(tmp_path / "t.pdf").metadata
    assert meta.title == "M"
    assert meta.subject == "3-vertex line, 4 steps"
