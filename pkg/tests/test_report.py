"""Tests for report models and persistence."""
import pytest

from sphkit.models import CheckResult, RunReport, StageResult
from sphkit.report import REPORT_NAME, load_report, load_series, render_report, save_report, series_filename


@pytest.fixture
def sample_report():
    analyze = StageResult(stage="analyze", seconds=0.25)
    analyze.add("spherical_roots", True, "spherical_roots", value=[["4"]])
    analyze.add("rho_Q", True, "rho_q_and_unimodularity", value=["1"])
    cterm = StageResult(stage="cterm", seconds=1.5)
    cterm.add("lambda=1.leading_term", True, "constant_term_ray", value=3e-9, tolerance=1e-6)
    cterm.series["lambda=1"] = {"t": [0.0, 0.5, 1.0], "value": [1.0, 0.1 + 1e-17, 1 / 3]}
    return RunReport(example="sl2_so2", seed=0, stages=[analyze, cterm], settings={"tol": 1e-8})


class TestModels:
    """Tests for the pydantic report models."""

    def test_check_display(self):
        check = CheckResult(name="casimir_central", passed=False, producer="is_central")
        assert check.display_info() == "[FAIL] casimir_central (is_central)"

    def test_stage_passed(self):
        stage = StageResult(stage="fan")
        assert stage.passed
        assert not stage.add("orthant_2", False, "Fan.certify")
        assert not stage.passed

    def test_error_fails_stage(self):
        assert not StageResult(stage="degenerate", error="skipped: analyze failed").passed

    def test_report_lookup(self, sample_report):
        assert sample_report.passed
        assert sample_report.stage("cterm").checks[0].tolerance == 1e-6
        assert sample_report.stage("verify") is None


class TestPersistence:
    """Tests for save_report and load_report."""

    def test_round_trip(self, sample_report, tmp_path):
        path = save_report(sample_report, tmp_path)
        assert path == tmp_path / REPORT_NAME
        loaded = load_report(tmp_path)
        assert loaded.example == "sl2_so2"
        assert [s.stage for s in loaded.stages] == ["analyze", "cterm"]
        assert loaded.stage("analyze").seconds is None
        assert loaded.stage("cterm").series == sample_report.stage("cterm").series

    def test_deterministic_bytes(self, sample_report, tmp_path):
        """Two saves of the same run are byte-identical, timings aside."""
        first = save_report(sample_report, tmp_path / "a").read_bytes()
        sample_report.stages[0].seconds = 9.0
        second = save_report(sample_report, tmp_path / "b").read_bytes()
        assert first == second

    def test_timings_kept_on_request(self, sample_report, tmp_path):
        save_report(sample_report, tmp_path, deterministic=False)
        assert load_report(tmp_path / REPORT_NAME).stage("cterm").seconds == 1.5

    def test_series_csv(self, sample_report, tmp_path):
        save_report(sample_report, tmp_path)
        assert (tmp_path / series_filename("cterm", "lambda=1")).exists()
        frame = load_series(tmp_path, "cterm", "lambda=1")
        assert list(frame.columns) == ["t", "value"]
        assert frame["value"].tolist() == pytest.approx([1.0, 0.1 + 1e-17, 1 / 3], rel=1e-15)

    def test_missing_report(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_report(tmp_path)

    def test_render(self, sample_report):
        lines = render_report(sample_report)
        assert lines[0] == "example sl2_so2 (seed 0): PASSED"
        assert "stage cterm: passed" in lines
        assert "  [ok] rho_Q (rho_q_and_unimodularity)" in lines
