import json
import subprocess
import sys
from pathlib import Path

import pytest

from destackify import cli

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_table(capsys):
    code, out, _ = run(capsys, "analyze", DATA / "z6.json")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "chart 0: M = Z/6, characters (2) (3) (0), divisors -"
    assert lines[2].split() == ["{}", "Z/6", "2", "2"]
    assert lines[3].split() == ["{0}", "Z/2", "1", "1"]
    assert lines[4].split() == ["{1}", "Z/3", "1", "1"]
    assert lines[-1].strip() == "divisorial: no"


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "--json", "analyze", DATA / "line.json")
    assert code == 0
    report = json.loads(out)
    assert report["0"]["divisorial"] is True
    assert all(r["divisorial_index"] == 0 for r in report["0"]["rows"])


def test_run_a1(capsys, tmp_path):
    emit = tmp_path / "out.json"
    code, out, _ = run(capsys, "run", DATA / "a1.json", "--trace", "--emit", emit)
    assert code == 0
    assert out.startswith("rounds: 1 (dimension 2)\ncharts: 2\n")
    assert "certificate: Divisorial holds" in out
    saved = json.loads(emit.read_text())
    assert saved["trace"] == [{"centers": {"0": [0, 1]}, "kind": "blowup", "label": "E1", "order": 1}]
    assert saved["atlas"]["chart_order"] == ["0/0", "0/1"]


def test_run_rigidify_json(capsys):
    code, out, _ = run(capsys, "--json", "run", DATA / "a2.json", "--rigidify")
    assert code == 0
    data = json.loads(out)
    assert data["rounds"] == 1
    assert data["certificate"]["kind"] == "Rigidified" and data["certificate"]["holds"]


def test_run_output_is_byte_identical(capsys):
    outs = {run(capsys, "--json", "run", DATA / "z6.json", "--rigidify")[1] for _ in range(3)}
    assert len(outs) == 1


def test_run_max_steps(capsys):
    code, out, _ = run(capsys, "run", DATA / "a1.json", "--max-steps", "0")
    assert code == 0 and out.startswith("rounds: 0")
    code, _, err = run(capsys, "run", DATA / "a1.json", "--max-steps", "-1")
    assert code == 2 and "max-steps" in err


def test_rigidify_precondition(capsys):
    code, _, err = run(capsys, "rigidify", DATA / "a1.json")
    assert code == 2 and "not divisorial" in err
    code, out, _ = run(capsys, "rigidify", DATA / "line.json")
    assert code == 0 and json.loads(out)["certificate"]["holds"]


def test_root(capsys):
    code, out, _ = run(capsys, "root", DATA / "line.json", "--divisor", "D", "--order", "3")
    assert code == 0
    data = json.loads(out)
    assert data["atlas"]["charts"]["0"]["group"]["invariant_factors"] == [6]
    assert data["step"] == {"centers": {"0": [0]}, "kind": "root", "label": "D", "order": 3}


def test_root_errors(capsys):
    assert run(capsys, "root", DATA / "line.json", "--divisor", "X", "--order", "2")[0] == 2
    assert run(capsys, "root", DATA / "line.json", "--divisor", "D", "--order", "1")[0] == 2


def test_coarse(capsys):
    code, out, _ = run(capsys, "coarse", DATA / "a2.json")
    assert code == 0
    assert "hilbert basis: (3,0) (1,1) (0,3)" in out
    assert "coarse space: singular" in out
    code, out, _ = run(capsys, "--json", "coarse", DATA / "line.json")
    assert json.loads(out)["0"] == {"hilbert_basis": [[2, 0], [0, 1]], "smooth": True}


def test_tor_wild(capsys):
    code, out, _ = run(capsys, "tor", DATA / "wild.json")
    assert code == 0
    assert "t0 (Tor_0): [[1,0], [0,1]]" in out
    assert "t1 (Tor_1): [[1,0], [1,1]]" in out
    assert "verdict: not isomorphic" in out


def test_tor_certify_json(capsys):
    code, out, _ = run(capsys, "--json", "tor", DATA / "wild.json", "--certify")
    data = json.loads(out)
    assert code == 0
    assert data["t0"] == [[1, 0], [0, 1]] and data["t1"] == [[1, 0], [1, 1]]
    assert data["k0_certificate"]["trivial"] is True


def test_check_functorial(capsys):
    for twist in ["trivial:1", "trivial:2", "gerbe:5", "gerbe:2,4"]:
        code, out, _ = run(capsys, "check-functorial", DATA / "a2.json", "--twist", twist)
        assert code == 0 and out.strip().endswith("yes")
    assert run(capsys, "check-functorial", DATA / "a2.json", "--twist", "weird:3")[0] == 2


def test_check_functorial_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "functoriality_check", lambda *a, **k: False)
    code, out, _ = run(capsys, "check-functorial", DATA / "a2.json", "--twist", "trivial:1")
    assert code == 4 and out.strip().endswith("NO")


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", DATA / "bad.json")
    assert code == 2 and "line 2" in err
    assert run(capsys, "analyze", tmp_path / "missing.json")[0] == 2
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"group": {"invariant_factors": [2]}, "coordinates": [{"character": [1, 1]}]}))
    assert run(capsys, "analyze", wrong)[0] == 2


def test_resource_cap_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("DESTACKIFY_CAPS", "max_group_order=2")
    code, _, err = run(capsys, "analyze", DATA / "a2.json")
    assert code == 3 and "max_group_order" in err
    monkeypatch.setenv("DESTACKIFY_CAPS", "bogus=1")
    assert run(capsys, "analyze", DATA / "a2.json")[0] == 2


@pytest.mark.parametrize("argv", [["--help"], ["run", "--help"]])
def test_help(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "destackify.cli", "coarse", str(DATA / "a1.json")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert "(2,0) (1,1) (0,2)" in proc.stdout
