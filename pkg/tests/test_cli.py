import json
import subprocess
import sys

import pytest

from oiglab.cli import OUTPUT_DIR_ENV, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    assert "simulate" in capsys.readouterr().out


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "oiglab.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "usage" in proc.stdout


def test_missing_n_names_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--rule", "closure", "--trials", "5"])
    assert info.value.code == 2
    assert "--n" in capsys.readouterr().err


def test_unknown_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["vt", "residue", "0110", "--bogus"])
    assert info.value.code == 2


def test_bad_number(capsys):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--n", "4", "--rule", "closure", "--trials", "5", "--delta", "half"])
    assert info.value.code == 2
    assert "--delta" in capsys.readouterr().err


def test_config_error_is_exit_2(capsys):
    code, _, err = run(capsys, "simulate", "--n", "4", "--rule", "closure", "--trials", "0")
    assert code == 2 and "--trials" in json.loads(err)["message"]


class TestVt:
    def test_residue(self, capsys):
        assert run(capsys, "vt", "residue", "1010") == (0, "4\n", "")

    def test_counts(self, capsys):
        assert run(capsys, "vt", "counts", "--m", "4", "--k", "2")[1] == "2,1,1,1,1\n"

    def test_bad_bits(self, capsys):
        code, _, err = run(capsys, "vt", "residue", "10x")
        assert code == 2 and "bit string" in err

    def test_check_unique(self, capsys):
        code, out, _ = run(capsys, "vt", "check-unique", "--m", "10")
        assert code == 0 and records(out)[0]["result"]["ok"] is True


def test_verify_unique(capsys):
    code, out, _ = run(capsys, "verify", "unique", "--m", "12")
    (rec,) = records(out)
    assert code == 0
    assert rec["check"] == "unique" and rec["params"] == {"m": 12}
    assert rec["result"]["ok"] is True and rec["result"]["max_covered"] == 1
    assert set(rec) == {"check", "params", "result", "accepted_seed"}


class TestOrient:
    @pytest.fixture
    def star_file(self, tmp_path):
        path = tmp_path / "star.txt"
        path.write_text("# indicator class on 4 points\n4 5\n0000\n1000\n0100\n0010\n0001\n", encoding="utf-8")
        return path

    def test_closure_listing(self, capsys, star_file):
        code, out, _ = run(capsys, "orient", "--class", str(star_file), "--subset", "1110", "--mode", "closure")
        assert code == 0
        assert out.splitlines() == [
            "edge(000,001,3) -> 000",
            "edge(000,010,2) -> 000",
            "edge(000,100,1) -> 000",
            "max_out_degree: 1",
        ]

    def test_flow(self, capsys, star_file):
        code, out, _ = run(capsys, "orient", "--class", str(star_file), "--mode", "flow")
        assert code == 0 and out.splitlines()[-1] == "max_out_degree: 1"
        assert len(out.splitlines()) == 5

    def test_parse_error_has_line(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("2 2\n00\n0a\n", encoding="utf-8")
        code, _, err = run(capsys, "orient", "--class", str(bad), "--mode", "flow")
        assert code == 2 and "line 3" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "orient", "--class", str(tmp_path / "nope"), "--mode", "flow")
        assert code == 2 and "nope" in err


class TestVerify:
    def test_matching_accepts(self, capsys):
        code, out, _ = run(capsys, "verify", "matching", "--n", "4", "--delta", "0.2", "--d", "1", "--seed", "0")
        recs = records(out)
        assert code == 0 and len(recs) == 4
        assert all(r["accepted_seed"] == 0 and r["result"]["accepted"] for r in recs)
        assert recs[0]["params"]["mode"] == "exhaustive" and recs[0]["params"]["seed"] == 0

    def test_matching_reports_failure(self, capsys):
        code, out, _ = run(
            capsys, "verify", "matching", "--n", "4", "--delta", "0.3", "--k", "4", "--max-attempts", "3"
        )
        (rec,) = records(out)
        assert code == 1 and rec["accepted_seed"] is None and rec["result"]["attempts"] == 3

    def test_matching_capacity(self, capsys):
        code, _, err = run(capsys, "verify", "matching", "--n", "30", "--delta", "0.1", "--mode", "exhaustive", "--k", "15")
        assert code == 3 and json.loads(err)["error"] == "capacity"

    def test_validity(self, capsys):
        code, out, _ = run(capsys, "verify", "validity", "--n", "5", "--delta", "0.3", "--samples", "200")
        (rec,) = records(out)
        assert code == 0 and rec["result"]["ok"] and rec["result"]["max_out_degree"] <= 2


class TestSimulate:
    def test_writes_to_env_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
        code, out, _ = run(capsys, "simulate", "--n", "4", "--rule", "closure", "--trials", "20", "--seed", "3")
        path = tmp_path / "simulate_n4_closure_seed3.json"
        assert code == 0 and json.loads(out)["out"] == str(path)
        assert json.loads(path.read_text(encoding="utf-8"))["config"]["seed"] == 3

    def test_byte_identical_reruns(self, capsys, tmp_path):
        outputs = []
        for name, jobs in (("a.csv", "1"), ("b.csv", "2")):
            argv = ["simulate", "--n", "4", "--delta", "0.3", "--rule", "adversarial", "--trials", "12000",
                    "--out", str(tmp_path / name), "--format", "csv", "--jobs", jobs]
            assert run(capsys, *argv)[0] == 0
            outputs.append((tmp_path / name).read_bytes())
        assert outputs[0] == outputs[1]
        assert outputs[0].count(b"\n") == 12001


class TestExact:
    def test_stdout(self, capsys):
        code, out, _ = run(capsys, "exact", "--n", "2", "--rule", "closure")
        data = json.loads(out)
        assert code == 0 and data["size_law"] == {"1": "1/4", "2": "3/4"} and data["mean"] == "0"

    def test_capacity_exit(self, capsys):
        code, _, err = run(capsys, "exact", "--n", "7", "--rule", "flow")
        assert code == 3 and "n=7" in err
