import json

import pytest

from conftest import GENUS3_BRANCHES
from hyperjac.cli import main

G3 = ",".join(str(x) for x in GENUS3_BRANCHES)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def tau_file(tmp_path):
    p = tmp_path / "tau.json"
    p.write_text(json.dumps([[[0, 1.1], [0.2, 0.1]], [[0.2, 0.1], [0, 0.9]]]))
    return str(p)


def test_eval_theta(capsys, tau_file):
    code, out, _ = run(capsys, "eval-theta", "--tau", tau_file, "--z", "0,0", "--char", "[00;00]")
    data = json.loads(out)
    assert code == 0 and len(data["value"]) == 2 and data["term_count"] > 0
    assert not data["vanishing"]


def test_eval_theta_odd_vanishes(capsys, tau_file):
    code, out, _ = run(capsys, "eval-theta", "--tau", tau_file, "--z", "0,0", "--char", "[10;10]")
    assert code == 0 and json.loads(out)["vanishing"]


def test_eval_theta_errors(capsys, tau_file, tmp_path):
    code, _, err = run(capsys, "eval-theta", "--tau", str(tmp_path / "missing.json"), "--z", "0,0")
    assert code == 2 and "missing.json" in err
    code, _, err = run(capsys, "eval-theta", "--tau", tau_file, "--z", "0,0", "--char", "[0;12]")
    assert code == 2 and "characteristic" in err
    bad = tmp_path / "bad.json"
    bad.write_text("[[1, 2], [3, 4]]")
    code, _, err = run(capsys, "eval-theta", "--tau", str(bad), "--z", "0,0")
    assert code == 2 and "malformed" in err


def test_period_matrix(capsys):
    code, out, _ = run(capsys, "period-matrix", "--branches", "-5,-3,-1,1,3,5")
    data = json.loads(out)
    assert code == 0 and data["genus"] == 2 and data["symmetry_error"] < 1e-8
    code, out, _ = run(capsys, "period-matrix", "--branches", G3)
    assert json.loads(out)["R"] == [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0]]


def test_period_matrix_usage_error(capsys):
    code, _, _ = run(capsys, "period-matrix", "--branches", "1,2,3,4,5,6,7")
    assert code == 2


def test_gen_cubics(capsys, tmp_path):
    out_file = tmp_path / "g2.json"
    code, _, _ = run(capsys, "gen-cubics", "--genus", "2", "-o", str(out_file))
    fam = json.loads(out_file.read_text())
    assert code == 0 and len(fam) == 4 and all(not c["monomials"] for c in fam)
    code, out, err = run(capsys, "gen-cubics", "--genus", "4", "--check-fixtures")
    assert code == 0 and "fixtures match" in err
    assert run(capsys, "gen-cubics", "--genus", "7")[0] == 2


def test_fixture_mismatch(capsys, monkeypatch):
    import hyperjac.cli as cli
    fixtures = cli.load_fixtures()
    fixtures["genus3"]["000"] = "000.101.101 + 011.101.111 = 010.101.111 + 001.100.101"
    monkeypatch.setattr(cli, "load_fixtures", lambda: fixtures)
    code, _, err = run(capsys, "gen-cubics", "--genus", "3", "--check-fixtures")
    assert code == 1 and "monomial" in err


def test_verify_expectations(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "secant", "--branches", G3, "--samples", "2")
    rep = json.loads(out)
    assert code == 0 and rep["reports"][0]["samples"][0]["decided_rank"] == 4
    assert rep["config"]["genus"] == 3 and "threads" not in rep["config"]
    code, _, _ = run(capsys, "verify", "--suite", "cubics", "--random-tau", "--genus", "3",
                     "--seed", "7", "--samples", "2", "--expect", "fail")
    assert code == 0
    code, _, err = run(capsys, "verify", "--suite", "cubics", "--random-tau", "--genus", "3",
                       "--seed", "7", "--samples", "2")
    assert code == 1 and "mismatch" in err


def test_verify_usage_errors(capsys):
    assert run(capsys, "verify", "--suite", "bogus", "--random-tau", "--genus", "3")[0] == 2
    assert run(capsys, "verify", "--suite", "cubics", "--random-tau")[0] == 2
    assert run(capsys, "verify", "--suite", "cubics", "--branches", G3, "--genus", "4")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "cubics"])
    assert exc.value.code == 2


def test_verify_thread_env(capsys, monkeypatch):
    args = ("verify", "--suite", "fact1", "--random-tau", "--genus", "3", "--seed", "1",
            "--samples", "3", "--expect", "fail")
    monkeypatch.setenv("THETA_SECANT_THREADS", "3")
    a = run(capsys, *args)[1]
    monkeypatch.setenv("THETA_SECANT_THREADS", "1")
    b = run(capsys, *args)[1]
    assert a == b
    monkeypatch.setenv("THETA_SECANT_THREADS", "x")
    assert run(capsys, *args)[0] == 2
