import json

import pytest

from simplex_hoeffding import __version__
from simplex_hoeffding.utils.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBound:

    def test_general(self, capsys):
        code, out, _ = run(capsys, "bound", "general", "--mu", "0.5", "--z", "0.3", "--n", "10", "--dir", "lower")
        record = json.loads(out)
        assert code == 0
        assert record["precondition_ok"] is True
        assert record["bound"] == pytest.approx(0.4392, abs=1e-4)
        assert record["direction"] == "lower"
        assert len(record["exponent_terms"]) == 2
        assert "timestamp" in record

    def test_multinomial_at_mean(self, capsys):
        code, out, _ = run(capsys, "bound", "multinomial", "--n", "10", "--p", "0.5,0.5", "--z", "5,5", "--dir",
                           "lower")
        assert code == 0
        assert json.loads(out)["bound"] == 1.0

    def test_multinomial_thresholds(self, capsys):
        code, out, _ = run(capsys, "bound", "multinomial", "--n", "10", "--p", "0.5,0.5", "--z", "3", "--dir",
                           "lower", "--no-timestamp")
        record = json.loads(out)
        assert record["inputs"]["z"] == [7, 3]
        assert record["bound"] == pytest.approx(0.4392, abs=1e-4)

    def test_dirichlet(self, capsys):
        code, out, _ = run(capsys, "bound", "dirichlet", "--alpha", "1,1", "--z", "0.25", "--n", "2", "--dir",
                           "lower")
        assert code == 0
        assert json.loads(out)["inputs"]["alpha"] == [1.0, 1.0]

    def test_precondition_violation(self, capsys):
        code, out, _ = run(capsys, "bound", "general", "--mu", "0.3", "--z", "0.4", "--n", "5", "--dir", "lower")
        record = json.loads(out)
        assert code == 2
        assert record["precondition_ok"] is False
        assert record["bound"] is None

    def test_malformed_vector(self, capsys):
        code, out, err = run(capsys, "bound", "general", "--mu", "0.5,x", "--z", "0.3", "--n", "10", "--dir",
                             "lower")
        assert code == 1
        assert out == ""
        assert "error" in err

    def test_invalid_point(self, capsys):
        code, _, err = run(capsys, "bound", "general", "--mu", "0.6,0.6", "--z", "0.3,0.3", "--n", "10", "--dir",
                           "lower")
        assert code == 1
        assert err

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["bound", "general", "--mu", "0.5", "--z", "0.3", "--n", "10", "--dir", "sideways"])
        assert excinfo.value.code == 1

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "bound", "general", "--mu", "0.5", "--z", "0.3", "--n", "10", "--dir", "lower",
                           "--format", "csv", "--no-timestamp")
        header, row = out.splitlines()
        assert code == 0
        assert "bound" in header.split(",")
        assert "inputs.mu" in header.split(",")

    def test_deterministic_output(self, capsys):
        argv = ["bound", "dirichlet", "--alpha", "2,1,1", "--z", "0.1,0.2", "--n", "7", "--dir", "lower",
                "--no-timestamp"]
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second
        assert "timestamp" not in json.loads(first[1])


class TestOracle:

    def test_exact(self, capsys):
        code, out, _ = run(capsys, "oracle", "multinomial", "--n", "2", "--p", "0.5,0.5", "--z", "2", "--dir",
                           "upper")
        record = json.loads(out)
        assert code == 0
        assert record["exact"] == pytest.approx(0.25, rel=1e-12)
        assert record["bound"] == pytest.approx(0.25, rel=1e-12)
        assert record["margin"] == pytest.approx(0.0, abs=1e-12)

    def test_budget_exceeded(self, capsys):
        code, out, err = run(capsys, "oracle", "multinomial", "--n", "2000", "--p", "0.2,0.2,0.2,0.2,0.2", "--z",
                             "400,400,400,400", "--dir", "lower", "--budget", "1000")
        assert code == 3
        assert out == ""
        assert "budget" in err

    def test_monte_carlo_dirichlet(self, capsys):
        code, out, _ = run(capsys, "oracle", "mc", "--family", "dirichlet", "--alpha", "1,1", "--n", "1", "--z",
                           "0.5", "--dir", "lower", "--trials", "100000", "--seed", "7", "--quiet")
        record = json.loads(out)
        assert code == 0
        assert abs(record["p_hat"] - 0.5) < 0.01
        assert record["ci_low"] <= record["p_hat"] <= record["ci_high"]
        assert record["block_size"] == 1000
        assert record["seed"] == 7
        assert record["bound"] == 1.0

    def test_mc_alias_is_reproducible(self, capsys):
        argv = ["mc", "--family", "general", "--mu", "0.2,0.3", "--z", "0.1,0.2", "--n", "5", "--dir", "lower",
                "--trials", "5000", "--seed", "3", "--no-timestamp", "--quiet"]
        first = run(capsys, *argv)
        second = run(capsys, *argv, "--workers", "4")
        assert first == second
        assert json.loads(first[1])["precondition_ok"] is True

    def test_point_mass(self, capsys):
        code, out, _ = run(capsys, "mc", "--family", "general", "--mu", "0.2,0.3", "--z", "0.2,0.3", "--n", "5",
                           "--dir", "upper", "--model", "point_mass", "--trials", "1000", "--seed", "1")
        assert code == 0
        assert json.loads(out)["p_hat"] == 1.0

    def test_missing_family_parameters(self, capsys):
        code, _, err = run(capsys, "mc", "--family", "dirichlet", "--n", "5", "--z", "0.5", "--dir", "lower",
                           "--seed", "1")
        assert code == 1
        assert "--alpha" in err


class TestSweep:

    def test_sweep(self, capsys, tmp_path):
        config = tmp_path / "small.json"
        config.write_text(json.dumps({"name": "small", "family": "multinomial", "directions": ["lower", "upper"],
                                      "grid": {"n": [4, 6], "p": [[0.2, 0.3, 0.5]], "z": "all"}}))
        code, out, _ = run(capsys, "sweep", str(config), "--out-dir", str(tmp_path / "out"), "--quiet")
        assert code == 0
        assert "0 FAIL" in out
        assert (tmp_path / "out" / "small.json").exists()
        assert (tmp_path / "out" / "small.csv").exists()

    def test_empty_grid(self, capsys, tmp_path):
        config = tmp_path / "empty.json"
        config.write_text(json.dumps({"name": "empty"}))
        code, out, _ = run(capsys, "sweep", str(config), "--out-dir", str(tmp_path / "out"), "--format", "json")
        assert code == 0
        assert not (tmp_path / "out" / "empty.csv").exists()
        assert json.loads((tmp_path / "out" / "empty.json").read_text()) == []

    def test_skip_on_violation(self, capsys, tmp_path):
        config = tmp_path / "skip.json"
        config.write_text(json.dumps({"name": "skip", "family": "general", "directions": ["lower"],
                                      "skip_on_violation": True, "grid": {"n": [5], "mu": [[0.3]], "z": [[0.4]]}}))
        code, out, _ = run(capsys, "sweep", str(config), "--out-dir", str(tmp_path / "out"))
        assert code == 0
        assert "1 SKIP" in out

    def test_config_error(self, capsys, tmp_path):
        config = tmp_path / "broken.json"
        config.write_text(json.dumps({"family": "general", "directions": ["lower"],
                                      "grid": {"n": [5], "mu": [[0.3]], "z": [[0.4]]}}))
        code, _, err = run(capsys, "sweep", str(config), "--out-dir", str(tmp_path))
        assert code == 1
        assert "skip_on_violation" in err


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert __version__ in capsys.readouterr().out
