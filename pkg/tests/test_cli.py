import json
import math
import subprocess
import sys

import pytest

PI = math.pi


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "loewner.cli", *argv],
        capture_output=True,
        timeout=600,
    )


def write_config(tmp_path, name="config.json", **overrides):
    d = {
        "field": {"kind": "corollary", "schedule": {"segments": [
            {"t0": 0, "t1": 1, "measure": {
                "atoms": [{"angle": PI, "weight": 1.0}], "excluded_angle": 0.0}}]}},
        "integration": {"t0": 0, "t1": 1, "rel_tol": 1e-10, "abs_tol": 1e-12},
        "grid": {"kind": "polar", "radii": [0.3, 0.6], "angles": 4},
        "checks": ["semigroup", "dilation_tracking"],
        "fixed_points": [{"angle": PI, "expected_role": "brfp"},
                         {"angle": 0.0, "expected_role": "dw"}],
    }
    d.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return path


class TestVerifyCommand:
    def test_exit_zero_and_deterministic_bytes(self, tmp_path):
        cfg = write_config(tmp_path)
        first = run_cli("verify", "--config", str(cfg))
        second = run_cli("verify", "--config", str(cfg))
        assert first.returncode == 0
        assert first.stdout == second.stdout
        payload = json.loads(first.stdout)
        assert all(c["pass"] for c in payload["checks"])

    def test_report_file_and_summary(self, tmp_path):
        cfg = write_config(tmp_path)
        report = tmp_path / "report.json"
        res = run_cli("verify", "--config", str(cfg), "--report", str(report))
        assert res.returncode == 0
        assert b"pass semigroup" in res.stdout
        payload = json.loads(report.read_bytes())
        assert [c["name"] for c in payload["checks"]] == ["dilation_tracking", "semigroup"]

    def test_check_failure_exit_code(self, tmp_path):
        cfg = write_config(
            tmp_path,
            field={"kind": "corollary", "schedule": {"segments": [
                {"t0": 0, "t1": 1, "measure": {
                    "atoms": [{"angle": PI, "weight": 1.5}], "excluded_angle": 0.0}}]}},
            checks=["julia", "schwarz_pick"],
            skip_field_validation=True,
        )
        res = run_cli("verify", "--config", str(cfg))
        assert res.returncode == 1
        payload = json.loads(res.stdout)
        by_name = {c["name"]: c for c in payload["checks"]}
        assert by_name["julia"]["pass"] is False
        assert by_name["julia"]["max_residual"] > 0.0

    def test_config_error_exit_code(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        res = run_cli("verify", "--config", str(path))
        assert res.returncode == 2
        assert b"config error" in res.stderr

    def test_semantic_config_error(self, tmp_path):
        cfg = write_config(tmp_path, checks=["frobnicate"])
        res = run_cli("verify", "--config", str(cfg))
        assert res.returncode == 2
        assert b"/checks/0" in res.stderr

    def test_missing_file(self):
        res = run_cli("verify", "--config", "/nonexistent/cfg.json")
        assert res.returncode == 2


class TestSimulateCommand:
    def test_per_point_trajectories(self, tmp_path):
        cfg = write_config(tmp_path, output={"trajectory_csv": str(tmp_path / "out")})
        res = run_cli("simulate", "--config", str(cfg))
        assert res.returncode == 0
        files = sorted((tmp_path / "out").glob("trajectory_z*.csv"))
        assert len(files) == 8
        lines = files[0].read_text().splitlines()
        assert lines[0] == "t,w_re,w_im"
        assert len(lines) > 2

    def test_rows_interpolate_hyperbolic_group(self, tmp_path):
        # grid radius pushed tiny so the first grid point is nearly z = 0
        cfg = write_config(
            tmp_path,
            grid={"kind": "polar", "radii": [1e-12], "angles": 1},
            output={"trajectory_csv": str(tmp_path / "out")},
        )
        res = run_cli("simulate", "--config", str(cfg))
        assert res.returncode == 0
        rows = (tmp_path / "out" / "trajectory_z000.csv").read_text().splitlines()[1:]
        for row in rows:
            t, w_re, w_im = (float(v) for v in row.split(","))
            x = (math.exp(t) - 1.0) / (math.exp(t) + 1.0)
            assert abs(complex(w_re, w_im) - x) < 1e-8

    def test_combined_csv(self, tmp_path):
        out = tmp_path / "combined.csv"
        cfg = write_config(tmp_path, output={"trajectory_csv": str(out), "combined": True})
        res = run_cli("simulate", "--config", str(cfg))
        assert res.returncode == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "z_index,t,w_re,w_im"
        indices = {line.split(",")[0] for line in lines[1:]}
        assert indices == {str(i) for i in range(8)}

    def test_determinism_across_runs(self, tmp_path):
        cfg = write_config(tmp_path, output={"trajectory_csv": str(tmp_path / "a")})
        run_cli("simulate", "--config", str(cfg))
        first = (tmp_path / "a" / "trajectory_z000.csv").read_bytes()
        cfg2 = write_config(tmp_path, name="config2.json",
                            output={"trajectory_csv": str(tmp_path / "b")})
        run_cli("simulate", "--config", str(cfg2))
        assert (tmp_path / "b" / "trajectory_z000.csv").read_bytes() == first

    def test_degenerate_window_single_row(self, tmp_path):
        cfg = write_config(tmp_path,
                           integration={"t0": 0.5, "t1": 0.5},
                           output={"trajectory_csv": str(tmp_path / "out")})
        res = run_cli("simulate", "--config", str(cfg))
        assert res.returncode == 0
        lines = (tmp_path / "out" / "trajectory_z000.csv").read_text().splitlines()
        assert len(lines) == 2  # header + the single w = z row

    def test_missing_output_path(self, tmp_path):
        cfg = write_config(tmp_path)
        res = run_cli("simulate", "--config", str(cfg))
        assert res.returncode == 2

    def test_unreachable_output_path(self, tmp_path):
        cfg = write_config(tmp_path, output={"trajectory_csv": "/proc/nope/out"})
        res = run_cli("simulate", "--config", str(cfg))
        assert res.returncode != 0


class TestDerivativeCommand:
    def test_dilation_curve_output(self, tmp_path):
        cfg = write_config(tmp_path)
        res = run_cli("derivative", "--config", str(cfg), "--sigma", str(PI),
                      "--times", "0.25,0.5,1")
        assert res.returncode == 0
        lines = res.stdout.decode().splitlines()
        assert lines[0] == "t,dilation"
        for line in lines[1:]:
            t, v = (float(x) for x in line.split(","))
            assert v == pytest.approx(math.exp(t), rel=1e-3)

    def test_bad_times(self, tmp_path):
        cfg = write_config(tmp_path)
        res = run_cli("derivative", "--config", str(cfg), "--sigma", "0",
                      "--times", "abc")
        assert res.returncode == 2
