import json

import pytest
from mpmath import mpf

from tachyon.core.exceptions import ConfigurationError, OutputError
from tachyon.core.numerics import BigReal
from tachyon.schemas.scan_schemas import ScanConfig
from tachyon.services.export_service import SCAN_COLUMNS, TRAJECTORY_COLUMNS, ExportService
from tachyon.services.nullcone_service import NullconeService
from tachyon.services.scan_service import ScanService
from tachyon.services.tunnel_service import TunnelService


@pytest.fixture
def small_scan(fast_policy):
    config = ScanConfig(
        beta_min=BigReal.of("2", 30),
        beta_max=BigReal.of("3", 30),
        samples=3,
        policy=fast_policy,
    )
    return ScanService.sweep(config, workers=1)


class TestEigenvalues:
    def test_first_line_is_first_singular_speed(self, tmp_path):
        path = tmp_path / "eigen.txt"
        ExportService.write_eigenvalues(NullconeService.singular_velocities(3, 30), 30, str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        assert abs(float(lines[0]) - 4.603338848751701) < 1e-12
        assert not lines[0].startswith("#")

    def test_creates_missing_directories(self, tmp_path):
        path = tmp_path / "nested" / "dir" / "eigen.txt"
        ExportService.write_eigenvalues(NullconeService.singular_velocities(1, 20), 20, str(path))
        assert path.exists()

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OutputError) as exc:
            ExportService.write_eigenvalues(NullconeService.singular_velocities(1, 20), 20, str(blocker / "out.txt"))
        assert exc.value.exit_code == 2


class _UnwritableBeta:
    def serialize(self):
        raise OSError(28, "No space left on device")


class TestInterruptedWrites:
    def test_previous_file_survives(self, tmp_path):
        path = tmp_path / "nroots.csv"
        path.write_text("previous\n")
        rows = [(BigReal.of(2, 20), 1), (_UnwritableBeta(), 3)]
        with pytest.raises(OutputError):
            ExportService.write_staircase(rows, str(path))
        assert path.read_text() == "previous\n"
        assert [p.name for p in tmp_path.iterdir()] == ["nroots.csv"]

    def test_no_file_left_behind(self, tmp_path):
        path = tmp_path / "nroots.csv"
        with pytest.raises(OutputError):
            ExportService.write_staircase([(_UnwritableBeta(), 1)], str(path))
        assert list(tmp_path.iterdir()) == []


class TestScanFiles:
    def test_header_and_rows(self, small_scan, tmp_path):
        path = tmp_path / "scan.csv"
        ExportService.write_scan(small_scan, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "# tool: tachyon-selfforce"
        assert f"# columns: {','.join(SCAN_COLUMNS)}" in lines
        rows = [line for line in lines if not line.startswith("#")]
        assert len(rows) == 3
        assert all(len(row.split(",")) == len(SCAN_COLUMNS) for row in rows)
        assert not any(line.startswith("# timestamp") for line in lines)

    def test_read_back(self, small_scan, tmp_path):
        path = tmp_path / "scan.csv"
        ExportService.write_scan(small_scan, str(path))
        header, samples = ExportService.read_scan(str(path))
        assert header["mode"] == "feynman_wheeler"
        assert header["samples"] == "3"
        assert [s.n_roots for s in samples] == [s.n_roots for s in small_scan.samples]
        for read, written in zip(samples, small_scan.samples):
            assert abs(read.z_value.value - written.z_value.value) <= mpf("1e-20") * abs(written.z_value.value)

    def test_identical_bytes_on_repeat(self, small_scan, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        ExportService.write_scan(small_scan, str(first))
        ExportService.write_scan(small_scan, str(second))
        assert first.read_bytes() == second.read_bytes()

    def test_malformed_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# mode: feynman_wheeler\n2,not-a-number\n")
        with pytest.raises(ConfigurationError):
            ExportService.read_scan(str(path))

    def test_unknown_mode(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("# mode: sideways\n")
        with pytest.raises(ConfigurationError):
            ExportService.read_scan(str(path))


class TestTrajectoryFiles:
    def test_header_and_rows(self, barrier, tmp_path):
        trajectory = TunnelService.integrate_1d(1.0, barrier, 0.0, 8.0, step=0.05)
        path = tmp_path / "traj.csv"
        ExportService.write_trajectory(trajectory, str(path), [("p_y", "0.0")])
        header = ExportService.read_header(str(path))
        assert header["outcome"] == "tunneled"
        assert header["p_y"] == "0.0"
        assert header["columns"] == ",".join(TRAJECTORY_COLUMNS)
        assert float(header["exit_time"]) < float(header["entry_time"])
        rows = [line for line in path.read_text().splitlines() if not line.startswith("#")]
        assert len(rows) == len(trajectory.states)
        assert rows[0].split(",")[-1] == "incident_forward"

    def test_stdout(self, barrier, capsys):
        trajectory = TunnelService.integrate_2d(2.0, 1.5, barrier, 0.0, 8.0, step=0.05)
        ExportService.write_trajectory(trajectory)
        out = capsys.readouterr().out
        assert "# outcome: reflected" in out
        assert out.rstrip().endswith("reflected")


class TestConfigFiles:
    def test_decimals_stay_exact(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text('{"beta_min": 4.603338848751701234567, "samples": 10}')
        data = ExportService.load_config(str(path))
        assert str(data["beta_min"]) == "4.603338848751701234567"
        assert data["samples"] == 10

    def test_missing_file(self, tmp_path):
        with pytest.raises(OutputError):
            ExportService.load_config(str(tmp_path / "absent.json"))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError):
            ExportService.load_config(str(path))

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps([1, 2]))
        with pytest.raises(ConfigurationError):
            ExportService.load_config(str(path))
