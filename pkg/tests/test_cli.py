import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from hamlattice.cli import main

WAVE_CONFIG = """
[system]
kind = wave
potential = quartic

[mesh]
h = 0.1
n_points = 64

[initial]
family = packet
center = 3.2
width = 1.0
amplitude = 0.1
kappa = 4.0

[integrator]
kind = midpoint
dt = 0.001
t_end = 0.05

[operator]
p = 8
tol = 1e-8

[functionals]
names = H, P2

[output]
directory = {outdir}
stride = 10
"""


@pytest.fixture
def runner():
    return CliRunner()


def _write_config(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text)
    return str(path)


class TestSimulate:
    def test_writes_artifacts(self, runner, tmp_path):
        outdir = tmp_path / "out"
        cfg = _write_config(tmp_path, WAVE_CONFIG.format(outdir=outdir))
        result = runner.invoke(main, ["simulate", "--config", cfg])
        assert result.exit_code == 0, result.output
        assert (outdir / "trajectory.csv").exists()
        assert (outdir / "functionals.csv").exists()
        summary = json.loads((outdir / "summary.json").read_text())
        assert summary["schema_version"] == 1
        assert summary["config"]["system"] == "wave"
        assert all(r["verdict"] == "Conserved" for r in summary["reports"])

    def test_deterministic_output(self, runner, tmp_path):
        outputs = []
        for name in ("a", "b"):
            outdir = tmp_path / name
            cfg = _write_config(tmp_path, WAVE_CONFIG.format(outdir=outdir))
            result = runner.invoke(main, ["simulate", "--config", cfg])
            assert result.exit_code == 0
            outputs.append((outdir / "trajectory.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_config_error_exit_code(self, runner, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[integrator]\ndt = -1\n")
        result = runner.invoke(main, ["simulate", "--config", str(path)])
        assert result.exit_code == 2

    def test_lagrangian_formulation_matches_canonical(self, runner, tmp_path):
        outputs = []
        for name, formulation in (("c", "canonical"), ("l", "lagrangian")):
            outdir = tmp_path / name
            cfg = _write_config(tmp_path, WAVE_CONFIG.format(outdir=outdir))
            result = runner.invoke(
                main, ["simulate", "--config", cfg, "--formulation", formulation]
            )
            assert result.exit_code == 0, result.output
            outputs.append((outdir / "trajectory.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_lagrangian_rejected_for_nls(self, runner, tmp_path):
        text = WAVE_CONFIG.format(outdir=tmp_path / "x").replace(
            "kind = wave", "kind = nls"
        ).replace("potential = quartic", "potential = cubic").replace(
            "kappa = 4.0", "kappa = 1.0"
        )
        cfg = _write_config(tmp_path, text)
        result = runner.invoke(
            main, ["simulate", "--config", cfg, "--formulation", "lagrangian"]
        )
        assert result.exit_code == 2


class TestCertify:
    def test_list(self, runner):
        result = runner.invoke(main, ["certify", "--list"])
        assert result.exit_code == 0
        for suite in ("wave-arbitrary-V", "linear-wave", "nls-cubic"):
            assert suite in result.output

    def test_unknown_suite(self, runner):
        result = runner.invoke(main, ["certify", "nonexistent"])
        assert result.exit_code == 2

    def test_no_arguments(self, runner):
        result = runner.invoke(main, ["certify"])
        assert result.exit_code == 2

    def test_fast_suite_passes(self, runner):
        result = runner.invoke(main, ["certify", "linear-wave", "--fast"])
        assert result.exit_code == 0, result.output
        assert "PASS" in result.output


class TestOperators:
    def test_dump(self, runner):
        result = runner.invoke(main, ["operators", "dump", "--p", "3", "--tol", "1e-8"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "p,c_p,tail_estimate"
        assert len(lines) == 5
        c0 = float(lines[1].split(",")[1])
        assert abs(c0 - 1.2732395) < 1e-4

    def test_dump_bad_arguments(self, runner):
        result = runner.invoke(main, ["operators", "dump", "--p", "-2"])
        assert result.exit_code == 2

    def test_verify(self, runner):
        result = runner.invoke(main, ["operators", "verify", "--p", "8", "--tol", "1e-8"])
        assert result.exit_code == 0, result.output
        assert "skew-adjointness on n=64: ok" in result.output
