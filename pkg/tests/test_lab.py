# test_lab.py
"""Console front end: exit codes, written outputs, sweeps and the operation ledger."""

import csv
import json
import os

import pytest

from rdlab.lab import EXIT_FAILED, EXIT_OK, SWEEP_COLUMNS, Lab, build_parser, main, sweep_row
from rdlab.ledger import ledger
from rdlab.networks import polynomial_network, write_network
from rdlab.run_config import RunConfig

SQUARES = polynomial_network("squares", ("X", "Y"), [[(1.0, (2, 0))], [(1.0, (0, 2))]], growth_constant=1.0)
PRODUCT = polynomial_network("product", ("X", "Y"), [[(1.0, (1, 1))], [(1.0, (1, 1))]], growth_constant=1.0)


def run(tmp_path, command, config=None, *flags):
    """main() with a config file written from `config`, output under tmp_path/out."""
    argv = [command, "--out", str(tmp_path / "out"), "--quiet", "--no-color"]
    if config is not None:
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"command": command, **config}))
        argv += ["--config", str(path)]
    return main(argv + list(flags))


@pytest.fixture
def squares_file(tmp_path):
    path = str(tmp_path / "squares.json")
    write_network(SQUARES, path)
    return path


BLOWUP = {"profile": "constant", "levels": [2.0, 2.0], "diffusivities": [1.0, 1.0], "points": 16, "t_end": 1.0}


class TestCheck:
    def test_four_species_holds(self, tmp_path, capsys):
        assert run(tmp_path, "check", {"search_budget": 4000}) == EXIT_OK
        assert "Global existence conditions (3), (4), (8), (9) hold" in capsys.readouterr().out
        with open(tmp_path / "out" / "check.json", encoding="utf-8") as fh:
            report = json.load(fh)
        assert report["network"] == "four_species"

    def test_violating_network_file(self, tmp_path):
        path = str(tmp_path / "product.json")
        write_network(PRODUCT, path)
        assert run(tmp_path, "check", {"search_budget": 4000}, "--network", path) == EXIT_FAILED

    def test_malformed_network_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"species": []}')
        assert run(tmp_path, "check", None, "--network", str(bad)) == 2
        assert "NetworkFormatError" in capsys.readouterr().err

    def test_unknown_network(self, tmp_path):
        assert run(tmp_path, "check", None, "--network", "no_such_network") == 2

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        code = main(["check", "--out", str(blocker / "out"), "--quiet", "--no-color",
                     "--network", "exchange"])
        assert code == 3


class TestSimulate:
    def test_outputs(self, tmp_path):
        assert run(tmp_path, "simulate", {"points": 16, "t_end": 0.05}) == EXIT_OK
        out = tmp_path / "out"
        for name in ("diagnostics.csv", "snapshots.csv", "summary.json", "mass.svg", "entropy.svg", "sup_norm.svg"):
            assert (out / name).exists(), name

    def test_npz_without_plots(self, tmp_path):
        config = {"points": 16, "t_end": 0.05, "snapshot_format": "npz", "write_plots": False}
        assert run(tmp_path, "simulate", config) == EXIT_OK
        assert sorted(os.listdir(tmp_path / "out")) == ["diagnostics.csv", "snapshots.npz", "summary.json"]

    def test_zero_horizon(self, tmp_path):
        assert run(tmp_path, "simulate", {"points": 16}, "--t-end", "0") == 2

    def test_invalid_config(self, tmp_path):
        assert run(tmp_path, "simulate", {"points": "many"}) == 2

    def test_blowup_keeps_partial_outputs(self, tmp_path, squares_file):
        assert run(tmp_path, "simulate", {**BLOWUP, "network": squares_file}) == 4
        with open(tmp_path / "out" / "summary.json", encoding="utf-8") as fh:
            summary = json.load(fh)
        assert summary["completed"] is False
        assert "error" in summary

    def test_flags_override_config(self, tmp_path):
        assert run(tmp_path, "simulate", {"points": 16, "t_end": 1.0}, "--t-end", "0.02", "--resolution", "8") == 0
        with open(tmp_path / "out" / "summary.json", encoding="utf-8") as fh:
            summary = json.load(fh)
        assert summary["t_final"] == pytest.approx(0.02)
        assert summary["grid"]["points"] == [8]


class TestVerifyProof:
    def test_quarter_K_is_reported(self, tmp_path):
        config = {"points": 32, "t_end": 0.1, "write_plots": False}
        code = run(tmp_path, "verify-proof", config, "--network", "cross_activation", "--k-scale", "0.25")
        assert code == EXIT_FAILED
        with open(tmp_path / "out" / "proof.json", encoding="utf-8") as fh:
            report = json.load(fh)
        assert report["k_scale"] == 0.25
        assert report["passes"] is False
        assert report["amplitude_scan"]["network"] == "cross_activation"
        assert report["amplitude_scan"]["threshold"] is not None

    @pytest.mark.slow
    def test_benchmark_passes(self, tmp_path):
        assert run(tmp_path, "verify-proof", {}) == EXIT_OK
        assert (tmp_path / "out" / "phi.svg").exists()


@pytest.mark.slow
class TestVerifyInterpolation:
    def test_all_checks_hold(self, tmp_path):
        assert run(tmp_path, "verify-lemma2", None, "--resolution", "64") == EXIT_OK
        with open(tmp_path / "out" / "lemma2.json", encoding="utf-8") as fh:
            report = json.load(fh)
        assert all(report["checks"].values())
        assert (tmp_path / "out" / "smoothing.csv").exists()


class TestSweep:
    def test_empty_sweep(self, tmp_path):
        assert run(tmp_path, "sweep", {"sweep": []}) == EXIT_OK
        with open(tmp_path / "out" / "sweep.csv", encoding="utf-8") as fh:
            assert list(csv.reader(fh)) == [list(SWEEP_COLUMNS)]

    def test_failing_row_is_flagged(self, tmp_path, squares_file):
        entries = [{"points": 16, "t_end": 0.05}, {**BLOWUP, "network": squares_file},
                   {"points": 16, "t_end": 0.05, "amplitude": 2.0}]
        assert run(tmp_path, "sweep", {"sweep": entries}) == EXIT_FAILED
        with open(tmp_path / "out" / "sweep.csv", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["index"] for r in rows] == ["0", "1", "2"]
        assert [r["status"] for r in rows] == ["ok", "error", "ok"]
        assert rows[1]["exit_code"] == "4"
        assert rows[0]["error"] == "" and rows[1]["error"]

    def test_sweep_row_reports_invalid_entry(self):
        row = sweep_row((5, {"command": "simulate", "points": 16, "t_end": -1.0}))
        assert row["index"] == 5
        assert row["status"] == "error" and row["exit_code"] == 2

    def test_verify_proof_rows(self):
        data = RunConfig(command="verify-proof", network="cross_activation", points=32, t_end=0.1,
                         k_scale=0.25).to_dict()
        row = sweep_row((0, data))
        assert row["proof_passes"] is False
        assert row["status"] == "failed"


class TestLab:
    def test_ledger_tracks_runs(self, tmp_path):
        lab = Lab(colored=False, progress=False)
        try:
            code = lab.execute(RunConfig(command="simulate", points=16, t_end=0.05, out=str(tmp_path),
                                         write_plots=False))
        finally:
            lab.close()
        assert code == EXIT_OK
        assert lab.total_runs == 1
        records = ledger.get_all_records()
        assert [r["kind"] for r in records] == ["simulate"]
        assert records[0]["status"] == "success"
        assert "simulate four_species" in lab.get_report()

    def test_empty_report(self):
        lab = Lab(colored=False, progress=False)
        lab.close()
        assert lab.get_report() == "Nothing was run."

    def test_parser_requires_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])
