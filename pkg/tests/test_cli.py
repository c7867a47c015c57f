import csv
import io
import json
import subprocess
import sys

import pytest

from convexshape.harness.cli import main


@pytest.fixture
def square_json(tmp_path):
    path = tmp_path / "square.json"
    path.write_text(json.dumps({"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}))
    return path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCompute:
    def test_square_file(self, capsys, square_json):
        code, out, _ = run(capsys, "compute", "--shape", str(square_json))
        doc = json.loads(out)
        assert code == 0
        assert doc["shape"] == "square"
        assert doc["measurements"]["beta"] == pytest.approx(1.0, rel=1e-12)
        assert doc["functionals"]["torsion"] == pytest.approx(0.0351444, rel=1e-3)
        assert doc["bounds"]["web_torsion"] == pytest.approx(1 / 32, rel=1e-12)
        assert set(doc["suite"]) >= {"F1", "F2", "F3", "F4", "alpha", "beta"}

    def test_family(self, capsys):
        code, out, _ = run(capsys, "compute", "--shape", "family:regular_polygon:6:1")
        assert code == 0
        assert json.loads(out)["measurements"]["inradius"] == pytest.approx(3**0.5 / 2)

    def test_closed_form(self, capsys):
        code, out, _ = run(capsys, "compute", "--shape", "family:thinning_box:3:0.1")
        doc = json.loads(out)
        assert code == 0
        assert doc["closed_form"]["dim"] == 3
        assert doc["suite"]["beta"] == pytest.approx(0.2)


class TestVerify:
    def test_rectangle_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--shape", "family:rectangle:1:0.1")
        doc = json.loads(out)
        assert code == 0
        assert all(e["pass"] for e in doc["entries"])

    def test_failure_exit_code(self, capsys, monkeypatch, square_json):
        import convexshape.harness.cli as cli
        from convexshape.inequalities import InequalityEntry, InequalityReport

        failing = InequalityReport("square", (InequalityEntry("Q1-LO", 0.0, 1.0, -1.0, False, 1e-9),))
        monkeypatch.setattr(cli, "verify", lambda *a, **k: failing)
        code, out, _ = run(capsys, "verify", "--shape", str(square_json))
        assert code == 1
        assert json.loads(out)["entries"][0]["pass"] is False

    def test_negative_tolerance(self, capsys, square_json):
        code, _, err = run(capsys, "verify", "--shape", str(square_json), "--tol", "-1")
        assert code == 2 and "tolerance" in err

    def test_closed_form_box(self, capsys):
        code, out, _ = run(capsys, "verify", "--shape", "family:thinning_box:4:0.05")
        assert code == 0
        assert {e["id"] for e in json.loads(out)["entries"]} >= {"Q1-LO", "Q2-LO", "Q4"}


class TestSweep:
    def test_csv_to_file(self, capsys, tmp_path):
        out_path = tmp_path / "rect.csv"
        code, out, _ = run(
            capsys, "sweep", "--family", "rectangle:1:{}", "--param", "0.4,0.2",
            "--ratio", "gap1/alpha", "--out", str(out_path),
        )
        assert code == 0 and out == ""
        raw = out_path.read_bytes()
        assert b"\r" not in raw
        rows = list(csv.DictReader(io.StringIO(raw.decode())))
        assert [float(r["param"]) for r in rows] == [0.2, 0.4]
        assert "gap1/alpha" in rows[0]

    def test_stdout_and_determinism(self, capsys):
        first = run(capsys, "sweep", "--family", "ellipse", "--param", "0.3 0.2")[1]
        second = run(capsys, "sweep", "--family", "ellipse", "--param", "0.3 0.2")[1]
        assert first == second
        assert first.splitlines()[0].startswith("param,alpha,beta,F1")

    def test_failing_row(self, capsys):
        code, _, err = run(capsys, "sweep", "--family", "sector", "--param", "0.5,3.5")
        assert code == 1
        assert "3.5" in err


class TestErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "compute", "--shape", str(tmp_path / "nope.json"))
        assert code == 2 and err.startswith("error:")

    def test_malformed_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "verify", "--shape", str(bad))
        assert code == 2 and err

    def test_nonconvex_polygon(self, capsys, tmp_path):
        bad = tmp_path / "dart.json"
        bad.write_text(json.dumps({"vertices": [[0, 0], [2, 0], [1, 0.2], [1, 2]]}))
        code, _, err = run(capsys, "compute", "--shape", str(bad))
        assert code == 2 and "convex" in err

    def test_bad_family(self, capsys):
        code, _, err = run(capsys, "verify", "--shape", "family:blob:1")
        assert code == 2 and "unknown family" in err

    def test_bad_ratio(self, capsys):
        code, _, _ = run(capsys, "sweep", "--family", "rectangle:1:{}", "--param", "0.1,0.2", "--ratio", "x/y")
        assert code == 2

    def test_single_param(self, capsys):
        code, _, _ = run(capsys, "sweep", "--family", "rectangle:1:{}", "--param", "0.1")
        assert code == 2

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["frobnicate"])
        assert info.value.code == 2

    def test_negative_seeds(self, capsys):
        code, _, _ = run(capsys, "suite", "--seeds", "-1")
        assert code == 2


def test_table2_writes_json(capsys, tmp_path):
    out_path = tmp_path / "t2.json"
    code, _, _ = run(capsys, "table2", "--out", str(out_path))
    doc = json.loads(out_path.read_text())
    assert code == 0 and doc["pass"]
    assert {c["family"] for c in doc["comparisons"]} == {"thinning_box", "sector", "ellipse"}


def test_suite_small(capsys, tmp_path):
    out_path = tmp_path / "suite.json"
    code, _, _ = run(capsys, "suite", "--seeds", "2", "--no-fixed", "--out", str(out_path))
    assert code == 0
    assert json.loads(out_path.read_text())["pass"]


def test_console_script_module():
    proc = subprocess.run(
        [sys.executable, "-m", "convexshape.harness.cli", "verify", "--shape", "family:thinning_box:3:0.1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["shape"] == "thinning_box:3:0.1"
