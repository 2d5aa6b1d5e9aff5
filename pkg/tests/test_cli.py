import json
import subprocess
import sys

import pytest

from spheremax.cli import run


def test_count(capsys):
    assert run(["count", "--d", "5", "--lambda", "5"]) == 0
    assert capsys.readouterr().out.strip() == "112"


def test_count_json(capsys):
    assert run(["--json", "count", "--d", "4", "--lambda", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"d": 4, "lambda": 4, "sphere": "24", "ball": "89"}


def test_count_row_csv(tmp_path, capsys):
    path = tmp_path / "row.csv"
    assert run(["count", "--d", "2", "--lambda", "5", "--row-csv", str(path)]) == 0
    assert path.read_bytes().endswith(b"2,5,8\r\n")


def test_profile(capsys):
    assert run(["count", "--d", "4", "--lambda", "4", "--profile"]) == 0
    assert "4,16\r\n" in capsys.readouterr().out


def test_series(capsys):
    assert run(["series", "--d", "16", "--lambda", "10"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert 0.5 <= out["value"] <= 1.5 and out["tail_bound"] <= 1e-10


def test_specfun(capsys):
    assert run(["specfun", "krawtchouk", "--n", "2"]) == 0
    assert capsys.readouterr().out.startswith("n,k,x,num,den\r\n2,0,0,1,1\r\n")
    assert run(["specfun", "fourier", "--r", "3", "--points", "3"]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "3,0,1"


def test_multiplier(capsys):
    assert run(["--json", "multiplier", "--d", "5", "--lambda", "64", "--xi", "0,0,0,0,0", "--n", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["m_exact"][0] - 1) < 1e-12


def test_errors_exit_nonzero(capsys):
    assert run(["count", "--d", "99", "--lambda", "5"]) == 1
    assert "error" in capsys.readouterr().err
    assert run(["series", "--d", "4", "--lambda", "5"]) == 1


def test_sweep_regression_exit_code(tmp_path, capsys):
    desc = tmp_path / "s.json"
    desc.write_text(json.dumps({"family": "prop41", "pairs": [[5, 16]], "samples": 200, "output": "o.csv"}))
    assert run(["sweep", str(desc)]) == 0
    text = (tmp_path / "o.csv").read_bytes()
    assert text.startswith(b"# tool=spheremax") and b"\r\nprop41,5,16,0," in text


def test_maximal(capsys):
    assert run(["maximal", "--d", "2", "--M", "12", "--trials", "2", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "# periodic-box estimate" in out and '2,12,"{1,2,4}",ones,1' in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "spheremax", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("spheremax ")


@pytest.mark.parametrize("argv", [["count", "--d", "5"], ["bogus"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        run(argv)
    assert exc.value.code == 2
