"""Command-line interface: outputs, exit codes, determinism."""

import json
import math
import subprocess
import sys

import pytest

from spacetime_dual.circuit import Circuit
from spacetime_dual.cli import CSV_COLUMNS, main


def run_cli(*argv):
    return main(list(argv))


def read_rows(path):
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    return [dict(zip(CSV_COLUMNS, line.split(","))) for line in lines[1:]]


class TestPrepare:
    def test_ghz_chain_report_verifies_all_generators(self, tmp_path):
        out = tmp_path / "prep.json"
        assert run_cli("prepare", "--model", "ghz1d", "--n", "4",
                       "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["n_qubits"] == 4
        assert doc["circuit"]["version"] == 1
        assert len(doc["stabilizer_report"]) == 4
        assert all(r["status"] == "verified" for r in doc["stabilizer_report"])
        assert doc["all_verified"] is True

    def test_circuit_json_round_trips(self, tmp_path):
        out = tmp_path / "prep.json"
        run_cli("prepare", "--model", "cluster1d", "--n", "5", "--out", str(out))
        doc = json.loads(out.read_text())
        circ = Circuit.from_json_dict(doc["circuit"])
        assert circ.to_json_dict() == doc["circuit"]

    def test_toric_lattice_qubit_count(self, tmp_path):
        out = tmp_path / "prep.json"
        assert run_cli("prepare", "--model", "toric2d", "--nx", "3",
                       "--ny", "3", "--out", str(out)) == 0
        assert json.loads(out.read_text())["n_qubits"] == 18

    def test_invalid_size_exits_2(self, capsys):
        assert run_cli("prepare", "--model", "ghz1d", "--n", "1") == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "UnsupportedModel"

    def test_missing_size_exits_2(self):
        assert run_cli("prepare", "--model", "ghz1d") == 2


class TestRotate:
    def test_ghz_chain_round_trip_passes(self, tmp_path):
        out = tmp_path / "dual.json"
        assert run_cli("rotate", "--model", "ghz1d", "--n", "5",
                       "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["round_trip"] == "PASS"
        dual = doc["dual"]
        assert dual["cell_width"] == 1
        assert dual["circuit"]["version"] == 1
        assert dual["projections"]

    def test_bare_swap_staircase_passes(self, tmp_path):
        seq = Circuit(4)
        for k in range(1, 4):
            seq.add("SWAP", 0, k)
        src = tmp_path / "swap.json"
        src.write_text(seq.to_json())
        out = tmp_path / "dual.json"
        assert run_cli("rotate", "--circuit", str(src), "--cell-width", "1",
                       "--out", str(out)) == 0
        assert json.loads(out.read_text())["round_trip"] == "PASS"

    def test_nonsequential_circuit_exits_2(self, tmp_path, capsys):
        seq = Circuit(4)
        seq.add("CZ", 1, 3)
        src = tmp_path / "bad.json"
        src.write_text(seq.to_json())
        assert run_cli("rotate", "--circuit", str(src), "--cell-width", "1") == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "MalformedSequentialCircuit"

    def test_nonunitary_circuit_exits_2(self, tmp_path):
        seq = Circuit(3)
        seq.add("M_P", 0, pauli=None)
        src = tmp_path / "meas.json"
        src.write_text(json.dumps({"version": 1, "n_qubits": 3,
                                   "instructions": [{"op": "RESET",
                                                     "targets": [0]}]}))
        assert run_cli("rotate", "--circuit", str(src), "--cell-width", "1") == 2

    def test_diagonal_interaction_staircase_passes(self, tmp_path):
        seq = Circuit(4)
        for k in range(1, 4):
            seq.add("CZ", 0, k).add("SWAP", 0, k)
        src = tmp_path / "cz.json"
        src.write_text(seq.to_json())
        out = tmp_path / "dual.json"
        assert run_cli("rotate", "--circuit", str(src), "--cell-width", "1",
                       "--initial", "++++", "--out", str(out)) == 0
        assert json.loads(out.read_text())["round_trip"] == "PASS"

    def test_malformed_json_exits_2(self, tmp_path):
        src = tmp_path / "junk.json"
        src.write_text("not json")
        assert run_cli("rotate", "--circuit", str(src), "--cell-width", "1") == 2


class TestProbe:
    def test_disorder_sweep_emits_one_row_per_length(self, tmp_path):
        out = tmp_path / "dis.csv"
        assert run_cli("probe", "--probe", "disorder", "--model",
                       "deformed_ghz", "--n", "8", "--beta", "0.5",
                       "--lengths", "1-6", "--shots", "400", "--seed", "7",
                       "--out", str(out)) == 0
        rows = read_rows(out)
        assert [int(r["param2"]) for r in rows] == [1, 2, 3, 4, 5, 6]
        for row in rows:
            assert row["probe"] == "disorder"
            assert float(row["sigma_dist"]) <= 4.0
            expected = math.tanh(1.0) ** int(row["param2"])
            assert float(row["oracle"]) == pytest.approx(expected, abs=1e-12)

    def test_milro_mean_is_exactly_one_with_zero_stderr(self, tmp_path):
        out = tmp_path / "mil.csv"
        assert run_cli("probe", "--probe", "milro", "--model", "cluster1d",
                       "--n", "10", "--sites", "2,8", "--shots", "200",
                       "--seed", "3", "--out", str(out)) == 0
        row = read_rows(out)[0]
        assert row["mean"] == "1.0"
        assert row["stderr"] == "0.0"
        assert row["sigma_dist"] == "0.0"

    def test_strange_ratio_row_within_tolerance(self, tmp_path):
        out = tmp_path / "str.csv"
        assert run_cli("probe", "--probe", "strange", "--model", "cluster1d",
                       "--n", "8", "--sites", "2,6", "--shots", "8000",
                       "--seed", "11", "--out", str(out)) == 0
        rows = read_rows(out)
        assert [r["probe"] for r in rows] == ["strange_num", "strange_den",
                                              "strange"]
        ratio = rows[2]
        assert float(ratio["oracle"]) == 1.0
        assert float(ratio["sigma_dist"]) <= 4.0

    def test_correlator_rows_match_closed_form(self, tmp_path):
        out = tmp_path / "corr.csv"
        assert run_cli("probe", "--probe", "correlator", "--model",
                       "deformed_ghz", "--n", "8", "--sites", "2,5",
                       "--betas", "0.0,0.25,0.5,1.0", "--seed", "1",
                       "--out", str(out)) == 0
        rows = read_rows(out)
        assert [float(r["beta"]) for r in rows] == [0.0, 0.25, 0.5, 1.0]
        for row in rows:
            beta = float(row["beta"])
            expected = 1.0 / math.cosh(2 * beta) ** 2
            assert float(row["mean"]) == pytest.approx(expected, abs=1e-10)
            assert row["stderr"] == "0.0"

    def test_correlator_rejects_boundary_sites(self):
        assert run_cli("probe", "--probe", "correlator", "--model",
                       "deformed_ghz", "--n", "8", "--sites", "0,7",
                       "--seed", "1") == 2

    def test_workers_do_not_change_bytes(self, tmp_path):
        outs = []
        for workers in ("1", "4"):
            out = tmp_path / f"w{workers}.csv"
            assert run_cli("probe", "--probe", "disorder", "--model",
                           "deformed_ghz", "--n", "8", "--beta", "0.5",
                           "--lengths", "1-3", "--shots", "500", "--seed", "5",
                           "--workers", workers, "--out", str(out)) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_same_seed_same_bytes(self, tmp_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            run_cli("probe", "--probe", "strange", "--model", "cluster1d",
                    "--n", "6", "--sites", "0,4", "--shots", "300",
                    "--seed", "9", "--out", str(out))
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_json_format(self, tmp_path):
        out = tmp_path / "m.json"
        assert run_cli("probe", "--probe", "milro", "--model", "cluster1d",
                       "--n", "6", "--sites", "0,4", "--shots", "50",
                       "--seed", "1", "--format", "json",
                       "--out", str(out)) == 0
        doc = json.loads(out.read_text())
        assert doc["version"] == 1
        assert doc["rows"][0]["mean"] == 1.0
        assert set(doc["rows"][0]) == set(CSV_COLUMNS)

    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPACETIME_DUAL_SEED", "42")
        out = tmp_path / "env.csv"
        run_cli("probe", "--probe", "milro", "--model", "cluster1d",
                "--n", "6", "--sites", "0,4", "--shots", "20",
                "--out", str(out))
        assert read_rows(out)[0]["seed"] == "42"

    def test_invalid_sites_exit_2(self):
        assert run_cli("probe", "--probe", "milro", "--model", "cluster1d",
                       "--n", "6", "--sites", "1,4", "--shots", "10",
                       "--seed", "1") == 2

    def test_missing_beta_exits_2(self):
        assert run_cli("probe", "--probe", "disorder", "--model",
                       "deformed_ghz", "--n", "8", "--lengths", "1",
                       "--shots", "10", "--seed", "1") == 2

    def test_io_failure_exits_4(self):
        assert run_cli("probe", "--probe", "milro", "--model", "cluster1d",
                       "--n", "6", "--sites", "0,4", "--shots", "10",
                       "--seed", "1", "--out", "/nonexistent/dir/x.csv") == 4


class TestEntryPoint:
    def test_console_script_runs(self, tmp_path):
        out = tmp_path / "prep.json"
        proc = subprocess.run(
            [sys.executable, "-m", "spacetime_dual.cli", "prepare", "--model",
             "ghz1d", "--n", "3", "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(out.read_text())["all_verified"] is True
