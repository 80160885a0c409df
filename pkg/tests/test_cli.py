"""Command-line driver: exit codes, report shape, determinism, config files."""

import json

import pytest

from slly import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


class TestBetheCommands:
    def test_collision_passes_with_expected_energy(self, capsys):
        code, out = run(
            ["bethe", "collision", "--n", "3", "--k", "1.5,0.2,-0.9", "--c", "2"], capsys
        )
        assert code == 0
        report = json.loads(out)
        assert report["pass"] is True
        assert report["results"]["energy"] == pytest.approx(3.10)

    def test_trimer_ground_energy(self, capsys):
        code, out = run(["bethe", "trimer", "--p", "0", "--c", "-1"], capsys)
        assert code == 0
        assert json.loads(out)["results"]["energy"] == pytest.approx(-2.0)

    def test_missing_coupling_is_config_error(self, capsys):
        code, _ = run(["bethe", "collision", "--n", "2", "--k", "1.0,-1.0"], capsys)
        assert code == 2

    def test_unknown_command_is_config_error(self, capsys):
        code, _ = run(["bethe", "pentamer", "--c", "-1"], capsys)
        assert code == 2


class TestSusyCommands:
    def test_census(self, capsys):
        code, out = run(["susy", "census", "--n", "3", "--c", "1"], capsys)
        assert code == 0
        results = json.loads(out)["results"]
        assert (results["n_b"], results["n_f"], results["index"]) == (1, 1, 0)

    def test_algebra_requires_seed(self, capsys):
        code, _ = run(["susy", "algebra", "--n", "2", "--c", "0.7", "--trials", "3"], capsys)
        assert code == 2

    def test_algebra_fuzz_passes(self, capsys):
        code, out = run(
            ["susy", "algebra", "--n", "3", "--c", "0.7", "--trials", "5", "--seed", "7"],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["results"]["max_anticommutator_residual"] < 1e-12

    def test_sector_blocks_emitted(self, capsys):
        code, out = run(["susy", "sector", "--n", "3", "--grade", "1", "--c", "1"], capsys)
        assert code == 0
        results = json.loads(out)["results"]
        assert results["couplings"]["1,2"] == [[0.0, 2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 2.0]]

    def test_zero_modes(self, capsys):
        code, out = run(["susy", "zero-modes", "--n", "3", "--c", "1.2"], capsys)
        assert code == 0
        results = json.loads(out)["results"]
        assert results["top"]["q_residual"] == 0.0

    def test_partner_roundtrip(self, capsys):
        code, out = run(
            ["susy", "partner", "--n", "2", "--c", "1.0", "--k", "1.3,-0.4"], capsys
        )
        assert code == 0
        assert json.loads(out)["results"]["partner_grade"] == 1


class TestLatticeCommands:
    def test_spectrum(self, capsys):
        code, out = run(
            [
                "lattice", "spectrum", "--n", "2", "--sector", "2", "--c", "2",
                "--box", "8", "--points", "24", "--eigs", "3", "--seed", "1",
            ],
            capsys,
        )
        assert code == 0
        spec = json.loads(out)["results"]["spectrum"]
        assert spec["eigenvalues"] == sorted(spec["eigenvalues"])
        assert max(spec["residuals"]) < 1e-8

    def test_unsupported_particle_count(self, capsys):
        code, _ = run(
            [
                "lattice", "spectrum", "--n", "4", "--sector", "0", "--c", "2",
                "--box", "8", "--points", "20", "--eigs", "2", "--seed", "1",
            ],
            capsys,
        )
        assert code == 2

    def test_converge_writes_csv(self, capsys, tmp_path):
        csv_path = tmp_path / "table.csv"
        code, out = run(
            [
                "lattice", "converge", "--n", "2", "--sector", "2", "--c", "2",
                "--box", "12", "--points-list", "59,119", "--seed", "1",
                "--csv", str(csv_path),
            ],
            capsys,
        )
        assert code == 0
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "h,L,sector,lambda_1,res_1"
        assert len(lines) == 3

    def test_diagnostic(self, capsys):
        code, out = run(
            [
                "lattice", "diagnostic", "--n", "2", "--c", "2",
                "--box", "8", "--points", "24", "--seed", "3",
            ],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["results"]["band_width"] <= 1


class TestReportPlumbing:
    def test_byte_identical_reports(self, capsys):
        argv = ["susy", "algebra", "--n", "2", "--c", "0.9", "--trials", "4", "--seed", "11"]
        _, first = run(argv, capsys)
        _, second = run(argv, capsys)
        assert first == second

    def test_byte_identical_lattice_reports(self, capsys):
        argv = [
            "lattice", "spectrum", "--n", "2", "--sector", "1", "--c", "1.5",
            "--box", "8", "--points", "20", "--eigs", "3", "--seed", "5",
        ]
        _, first = run(argv, capsys)
        _, second = run(argv, capsys)
        assert first == second

    def test_output_file_written_atomically(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out = run(
            ["bethe", "dimer", "--p", "0.5", "--c", "-2", "--output", str(out_path)], capsys
        )
        assert code == 0
        assert out_path.read_text() == out

    def test_config_file_supplies_defaults_and_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# sweep defaults\nc = -1\np = 0.25\n")
        code, out = run(["bethe", "trimer", "--config", str(cfg)], capsys)
        assert code == 0
        assert json.loads(out)["config"]["p"] == 0.25
        code, out = run(["bethe", "trimer", "--config", str(cfg), "--p", "0"], capsys)
        assert code == 0
        assert json.loads(out)["results"]["energy"] == pytest.approx(-2.0)

    def test_verification_failure_exit_code(self, capsys):
        # rounding noise in the fuzz residuals sits far above 1e-18, so an
        # impossibly tight (but valid) tolerance flips the pass flag
        code, out = run(
            ["susy", "algebra", "--n", "3", "--c", "0.7", "--trials", "3",
             "--seed", "1", "--tol", "1e-18"],
            capsys,
        )
        assert code == 1
        assert json.loads(out)["pass"] is False

    def test_nonpositive_tolerance_is_config_error(self, capsys):
        code, _ = run(
            ["bethe", "collision", "--n", "2", "--k", "1.0,-0.25", "--c", "1.5",
             "--tol", "-1"],
            capsys,
        )
        assert code == 2

    def test_report_carries_version_and_config_echo(self, capsys):
        _, out = run(["susy", "census", "--n", "2", "--c", "1"], capsys)
        report = json.loads(out)
        assert report["artifact"] == "slly"
        assert report["version"]
        assert report["config"]["n"] == 2

    def test_solver_non_convergence_exit_code(self, capsys, monkeypatch):
        from slly import lattice
        from slly.errors import ConvergenceError

        def explode(*args, **kwargs):
            raise ConvergenceError("stalled", {"converged": 0})

        monkeypatch.setattr(lattice, "lowest_eigenvalues", explode)
        code, _ = run(
            [
                "lattice", "spectrum", "--n", "2", "--sector", "0", "--c", "1",
                "--box", "8", "--points", "20", "--eigs", "2", "--seed", "1",
            ],
            capsys,
        )
        assert code == 3
