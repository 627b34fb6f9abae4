import json
import logging

import pytest

from tachyon.main import main
from tachyon.schemas.verify_schemas import CheckResult, VerificationReport
from tachyon.services.export_service import ExportService
from tachyon.services.verify_service import VerificationService

FAST = ["--digits", "30", "--max-digits", "120", "--workers", "1"]

BARRIER = {"u_max": 3.0, "x_rise": 2.0, "x_plateau_start": 3.0, "x_plateau_end": 5.0, "x_fall": 6.0}


@pytest.fixture(autouse=True)
def reset_logging():
    """main() installs handlers on the package logger; drop them after each run"""
    yield
    package_logger = logging.getLogger("tachyon")
    package_logger.handlers.clear()
    package_logger.propagate = True


def _write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def _data_rows(path):
    return [line for line in path.read_text().splitlines() if not line.startswith("#")]


class TestUsage:
    @pytest.mark.parametrize("argv", [
        [],
        ["launch"],
        ["singular", "--bogus"],
        ["singular", "--count", "many"],
    ])
    def test_usage_errors_exit_1(self, argv, capsys):
        assert main(argv) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_log_level(self):
        assert main(["singular", "--log-level", "chatty"]) == 1


class TestSingular:
    def test_eigenvalue_file(self, tmp_path):
        path = tmp_path / "eigen.txt"
        assert main(["singular", "--count", "15", "--digits", "30", "-o", str(path)]) == 0
        lines = path.read_text().splitlines()
        assert len(lines) == 15
        assert abs(float(lines[0]) - 4.603338848751701) < 1e-12

    def test_stdout(self, capsys):
        assert main(["singular", "--count", "2", "--digits", "20"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 2

    @pytest.mark.parametrize("argv", [
        ["singular", "--count", "0"],
        ["singular", "--digits", "10"],
    ])
    def test_invalid_values(self, argv):
        assert main(argv) == 1

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["singular", "--count", "1", "--digits", "20", "-o", str(blocker / "eigen.txt")]) == 2

    def test_count_from_config(self, tmp_path):
        config = _write_json(tmp_path / "run.json", {"singular": {"count": 4}, "digits": 20})
        path = tmp_path / "eigen.txt"
        assert main(["singular", "--config", config, "-o", str(path)]) == 0
        assert len(path.read_text().splitlines()) == 4


class TestNroots:
    def test_staircase(self, tmp_path):
        path = tmp_path / "nroots.csv"
        assert main(["nroots", "2", "5", "8", "--digits", "30", "-o", str(path)]) == 0
        assert [row.split(",")[-1] for row in _data_rows(path)] == ["1", "3", "5"]

    def test_needs_a_speed(self):
        assert main(["nroots"]) == 1

    def test_rejects_non_decimal(self):
        assert main(["nroots", "fast"]) == 1


class TestScan:
    def test_small_zscan(self, tmp_path, capsys):
        path = tmp_path / "z.csv"
        argv = ["zscan", "--beta-min", "2", "--beta-max", "3", "--samples", "2", *FAST, "-o", str(path)]
        assert main(argv) == 0
        assert len(_data_rows(path)) == 2
        out = capsys.readouterr().out
        assert "census: positive=0 negative=2" in out
        assert not out.startswith("#")

    def test_subluminal_range(self):
        assert main(["zscan", "--beta-min", "0.5", "--beta-max", "3", "--samples", "2", *FAST]) == 1

    def test_flags_override_config(self, tmp_path):
        config = _write_json(tmp_path / "run.json", {
            "zscan": {"beta_min": "2", "beta_max": "3", "samples": 2},
            "digits": 30,
            "max_digits": 120,
            "workers": 1,
        })
        path = tmp_path / "z.csv"
        assert main(["zscan", "--config", config, "--samples", "3", "-o", str(path)]) == 0
        header = ExportService.read_header(str(path))
        assert header["samples"] == "3"
        assert header["start_digits"] == "30"

    def test_resume_with_different_range(self, tmp_path):
        path = tmp_path / "z.csv"
        base = ["zscan", "--beta-min", "2", "--beta-max", "3", *FAST, "-o", str(path)]
        assert main([*base, "--samples", "2"]) == 0
        assert main([*base, "--samples", "3", "--resume"]) == 1

    def test_resume_completed_run(self, tmp_path):
        path = tmp_path / "z.csv"
        argv = ["zscan", "--beta-min", "2", "--beta-max", "3", "--samples", "2", *FAST, "-o", str(path)]
        assert main(argv) == 0
        first = path.read_bytes()
        assert main([*argv, "--resume"]) == 0
        assert path.read_bytes() == first

    def test_zoom_needs_center(self):
        assert main(["zoom", *FAST]) == 1

    def test_zoom_levels_must_be_positive(self):
        assert main(["zoom", "--center", "3", "--levels", "0", *FAST]) == 1

    def test_zoom_refinement_census(self, capsys):
        assert main(["zoom", "--center", "3", "--width", "0.1", "--samples", "2", "--levels", "2", *FAST]) == 0
        out = capsys.readouterr().out
        assert "level 0 (2 samples)" in out
        assert "level 1 (4 samples)" in out
        assert "alternations non-decreasing: yes" in out

    def test_zoom_narrower_than_start_digits(self, tmp_path):
        path = tmp_path / "zoom.csv"
        argv = [
            "zoom", "--center", "3", "--width", "1e-300", "--samples", "2",
            "--digits", "30", "--max-digits", "1400", "--workers", "1", "-o", str(path),
        ]
        assert main(argv) == 0
        betas = [row.split(",")[0] for row in _data_rows(path)]
        assert len(betas) == 2
        assert betas[0] != betas[1]

    @pytest.mark.slow
    def test_zoom_at_first_singular_speed(self, tmp_path, capsys):
        path = tmp_path / "zoom.csv"
        argv = ["zoom", "--center", "4.603338848751701", "--width", "1e-3", "--samples", "1000", "-o", str(path)]
        assert main(argv) == 0
        assert "census: positive=0 negative=1000 alternations=0 unconverged=0" in capsys.readouterr().out
        assert len(_data_rows(path)) == 1000


class TestTunnel:
    @pytest.fixture
    def config(self, tmp_path):
        return _write_json(tmp_path / "tunnel.json", {
            "e_total": 1.0,
            "barrier": BARRIER,
            "x_start": 0.0,
            "x_end": 8.0,
            "step": 0.05,
        })

    def test_needs_config(self):
        assert main(["tunnel"]) == 1

    def test_missing_config_file(self, tmp_path):
        assert main(["tunnel", "--config", str(tmp_path / "absent.json")]) == 2

    def test_tunneled_run(self, config, tmp_path, capsys):
        path = tmp_path / "traj.csv"
        assert main(["tunnel", "--config", config, "-o", str(path)]) == 0
        out = capsys.readouterr().out
        assert "outcome: tunneled" in out
        assert "entry_time:" in out
        assert not out.startswith("#")
        header = ExportService.read_header(str(path))
        assert header["outcome"] == "tunneled"
        assert header["barrier"] == "3.0 2.0 3.0 5.0 6.0"

    def test_flags_override_config(self, config, capsys):
        assert main(["tunnel", "--config", config, "--e-total", "2", "--p-y", "1.5"]) == 0
        out = capsys.readouterr().out
        assert "# outcome: reflected" in out
        assert "# turning_x:" in out

    def test_start_inside_barrier(self, config):
        assert main(["tunnel", "--config", config, "--x-start", "4"]) == 1

    def test_invalid_barrier(self, tmp_path):
        config = _write_json(tmp_path / "tunnel.json", {
            "e_total": 1.0,
            "barrier": {**BARRIER, "x_plateau_start": 2.0},
            "x_start": 0.0,
            "x_end": 8.0,
        })
        assert main(["tunnel", "--config", config]) == 1

    def test_angle_statistics(self, config, capsys):
        assert main(["tunnel", "--config", config, "--e-total", "2", "--angles", "50", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("angles: 50 seed: 1")
        assert "transmission:" in out

    def test_section_config(self, tmp_path, capsys):
        config = _write_json(tmp_path / "run.json", {
            "tunnel": {"e_total": 2.0, "p_y": 1.5, "barrier": BARRIER, "x_start": 0.0, "x_end": 8.0, "step": 0.05},
            "output": str(tmp_path / "traj.csv"),
        })
        assert main(["tunnel", "--config", config]) == 0
        assert "outcome: reflected" in capsys.readouterr().out
        assert (tmp_path / "traj.csv").exists()


class TestVerify:
    def _report(self, failed):
        return VerificationReport(checks=[
            CheckResult(name="table_reproduction", passed=True),
            CheckResult(name="staircase", passed=not failed, detail="N(5)=3"),
        ])

    def test_failure_exits_3(self, monkeypatch, capsys):
        report = self._report(failed=True)
        monkeypatch.setattr(VerificationService, "run", staticmethod(lambda reference=None, seed=0: report))
        assert main(["verify"]) == 3
        captured = capsys.readouterr()
        assert "[FAIL] staircase: N(5)=3" in captured.out
        assert "staircase" in captured.err

    def test_success_exits_0(self, monkeypatch, capsys):
        report = self._report(failed=False)
        monkeypatch.setattr(VerificationService, "run", staticmethod(lambda reference=None, seed=0: report))
        assert main(["verify"]) == 0
        assert "2/2 checks passed" in capsys.readouterr().out
