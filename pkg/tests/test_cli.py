import json
import subprocess
import sys

import numpy as np
import pytest

from kappa_isotonic.cli import main


def read_csv(path):
    header = {}
    notes = []
    rows = []
    columns = None
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# "):
                if " = " in line:
                    key, val = line[2:].split(" = ", 1)
                    header[key] = val
                else:
                    notes.append(line[2:])
            elif columns is None:
                columns = line.split(",")
            else:
                rows.append(line.split(","))
    return header, columns, rows


class TestPotentialCommand:
    def test_one_column_per_kappa(self, tmp_path):
        out = tmp_path / "pot.csv"
        rc = main(["potential", "--kappa", "0", "0.2", "0.5", "--kg", "1",
                   "--x-min", "0.1", "--x-max", "1.4", "--points", "50",
                   "--out", str(out)])
        assert rc == 0
        header, columns, rows = read_csv(out)
        assert len(columns) == 4
        assert columns[0] == "x"
        assert len(rows) == 50
        assert header["tool"] == "kappa-isotonic"
        assert header["command"] == "potential"

    def test_bad_kappa_skipped_with_note(self, tmp_path):
        # x-range crosses the kappa = 2 barrier; that series is dropped
        out = tmp_path / "pot.csv"
        rc = main(["potential", "--kappa", "0", "2.0", "--kg", "1",
                   "--x-min", "0.2", "--x-max", "1.4", "--points", "10",
                   "--out", str(out)])
        assert rc == 0
        _, columns, rows = read_csv(out)
        assert len(columns) == 2
        with open(out) as fh:
            assert "skipped" in fh.read()

    def test_values_match_library(self, tmp_path):
        from kappa_isotonic.model import potential, SystemParams
        out = tmp_path / "pot.csv"
        main(["potential", "--kappa", "-0.25", "--kg", "1",
              "--x-min", "2.0", "--x-max", "2.0", "--points", "1",
              "--out", str(out)])
        _, _, rows = read_csv(out)
        assert float(rows[0][1]) == pytest.approx(
            potential(2.0, SystemParams(kappa=-0.25, k_g=1.0)), rel=1e-16)


class TestClassicalCommand:
    def test_trajectory_columns_and_energy_constancy(self, tmp_path):
        out = tmp_path / "traj.csv"
        rc = main(["classical", "--kappa", "0.1", "--kg", "1",
                   "--family", "trig", "--amplitude", "2", "--t-max", "12",
                   "--points", "200", "--out", str(out)])
        assert rc == 0
        _, columns, rows = read_csv(out)
        assert columns == ["t", "x", "v", "E"]
        energies = np.array([float(r[3]) for r in rows])
        assert np.max(np.abs(energies - energies[0])) < 1e-10

    def test_integrated_source_agrees_with_closed_form(self, tmp_path):
        args = ["classical", "--kappa", "-0.3", "--kg", "1", "--family",
                "hyperbolic", "--amplitude", "2.5", "--t-max", "3",
                "--points", "100"]
        out_a = tmp_path / "closed.csv"
        out_b = tmp_path / "num.csv"
        assert main(args + ["--source", "closed-form", "--out", str(out_a)]) == 0
        assert main(args + ["--source", "integrated", "--tol", "1e-10",
                            "--out", str(out_b)]) == 0
        _, _, rows_a = read_csv(out_a)
        _, _, rows_b = read_csv(out_b)
        xa = np.array([float(r[1]) for r in rows_a])
        xb = np.array([float(r[1]) for r in rows_b])
        np.testing.assert_allclose(xb, xa, rtol=1e-6)

    def test_inadmissible_inputs_fail_cleanly(self, tmp_path, capsys):
        rc = main(["classical", "--kappa", "0.5", "--family", "trig",
                   "--amplitude", "9", "--out", str(tmp_path / "x.csv")])
        assert rc == 1
        assert "error" in capsys.readouterr().err


class TestSpectrumCommand:
    def test_finite_table_with_decreasing_gaps(self, tmp_path):
        out = tmp_path / "levels.csv"
        rc = main(["spectrum", "--kappa", "-0.1", "--n-max", "10",
                   "--out", str(out)])
        assert rc == 0
        header, columns, rows = read_csv(out)
        assert len(rows) == 5
        assert header["finite"] == "True"
        gaps = [float(r[3]) for r in rows[:-1]]
        assert gaps == pytest.approx([1.6, 1.2, 0.8, 0.4])
        assert all(a > b for a, b in zip(gaps, gaps[1:]))

    def test_growing_gaps_for_positive_kappa(self, tmp_path):
        out = tmp_path / "levels.csv"
        main(["spectrum", "--kappa", "0.1", "--n-max", "10", "--out", str(out)])
        _, _, rows = read_csv(out)
        assert len(rows) == 10
        gaps = [float(r[3]) for r in rows[:-1]]
        assert all(b > a for a, b in zip(gaps, gaps[1:]))
        assert gaps[0] == pytest.approx(2.4)

    def test_equidistant_undeformed(self, tmp_path):
        out = tmp_path / "levels.csv"
        main(["spectrum", "--kappa", "0", "--kg", "6", "--n-max", "4",
              "--out", str(out)])
        _, _, rows = read_csv(out)
        gaps = [float(r[3]) for r in rows[:-1]]
        assert gaps == pytest.approx([2.0, 2.0, 2.0])

    def test_json_format(self, tmp_path):
        out = tmp_path / "levels.json"
        main(["spectrum", "--kappa", "0.2", "--kg", "2", "--n-max", "3",
              "--format", "json", "--out", str(out)])
        payload = json.loads(out.read_text())
        assert payload["meta"]["command"] == "spectrum"
        assert payload["columns"][0] == "n"
        assert len(payload["data"]) == 3


class TestWavefunctionCommand:
    def test_samples_emitted(self, tmp_path):
        out = tmp_path / "wf.csv"
        rc = main(["wavefunction", "--kappa", "0.5", "--kg", "2", "--n", "1",
                   "--points", "40", "--out", str(out)])
        assert rc == 0
        _, columns, rows = read_csv(out)
        assert columns == ["x", "psi"]
        assert len(rows) == 40


class TestFiguresCommand:
    def test_two_files(self, tmp_path):
        rc = main(["figures", "--points", "20", "--out", str(tmp_path)])
        assert rc == 0
        for name, ncols in (("figure1.csv", 4), ("figure2.csv", 4)):
            header, columns, rows = read_csv(tmp_path / name)
            assert len(columns) == ncols
            assert len(rows) == 20
            assert header["k_g"] == "1.0"


class TestVerifyCommand:
    def test_classical_quick_suite_passes(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        rc = main(["verify", "--suite", "classical", "--quick",
                   "--out", str(out)])
        assert rc == 0
        report = json.loads(out.read_text())
        assert report["passed"] is True
        assert all(c["passed"] for c in report["checks"])
        text = capsys.readouterr().out
        assert "PASS" in text


class TestDeterminism:
    def test_identical_configs_identical_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["spectrum", "--kappa", "-0.07", "--kg", "1.3", "--n-max", "6"]
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestModuleEntry:
    def test_python_dash_m(self, tmp_path):
        out = tmp_path / "pot.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "kappa_isotonic.cli", "potential",
             "--kappa", "0.1", "--points", "5", "--x-min", "0.5",
             "--x-max", "1.0", "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert out.exists()

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("KAPPA_ISOTONIC_OUT", str(tmp_path))
        rc = main(["spectrum", "--kappa", "0.1", "--n-max", "2"])
        assert rc == 0
        assert (tmp_path / "spectrum.csv").exists()
