import json

import pytest

from energygames.cli import main


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def game(tmp_path):
    return _write(tmp_path, "game.json", {"K": 3, "N": 16, "M": 10, "sigma2": 0.5,
                                          "rates": [1, 2, 3], "h2": [0.5, 1.0, 2.0]})


def test_constants(capsys):
    assert main(["constants", "--M", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["beta_star"] == pytest.approx(1.2564312086261697)
    assert main(["constants", "--M", "100", "--K", "10", "--N", "64"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["gamma_star"] == pytest.approx(5.7990830186376502444, rel=1e-10)
    assert doc["se_conditions"]["passed"]


def test_constants_ill_posed(capsys):
    assert main(["constants", "--M", "100", "--K", "10", "--N", "4"]) == 1
    assert "infeasible" in capsys.readouterr().err


@pytest.mark.parametrize("args", [
    ["--receiver", "sud"],
    ["--receiver", "sic", "--order", "2,0,1"],
    ["--receiver", "stackelberg", "--leader", "1"],
])
def test_equilibrium_verify(game, capsys, args):
    assert main(["equilibrium", "--config", game, "--verify", *args]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["regime"] == "non-saturated"
    checks = doc["verification"]
    if args[1] == "stackelberg":
        assert checks["followers"]["passed"] and checks["leader"]["passed"]
        assert checks["leader_power_rel_error"] < 1e-6
    else:
        assert checks["best_response"]["converged"] and checks["no_deviation"]["passed"]


def test_equilibrium_infeasible_exit(tmp_path, capsys):
    path = _write(tmp_path, "g.json", {"K": 2, "N": 1, "M": 2, "h2": [1, 1]})
    assert main(["equilibrium", "--receiver", "sud", "--config", path]) == 1
    assert json.loads(capsys.readouterr().out)["regime"] == "nonexistent"


@pytest.mark.parametrize("args", [
    ["equilibrium", "--receiver", "sic", "--order", "0,1"],
    ["equilibrium", "--receiver", "sic", "--order", "a,b,c"],
    ["equilibrium", "--receiver", "stackelberg", "--leader", "3"],
])
def test_equilibrium_input_errors(game, args):
    assert main([*args, "--config", game]) == 2


def test_missing_and_bad_config(tmp_path):
    assert main(["equilibrium", "--receiver", "sud", "--config", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["equilibrium", "--receiver", "sud", "--config", str(bad)]) == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["equilibrium", "--receiver", "mmse", "--config", "x"])
    assert exc.value.code == 2


def test_best(game, capsys):
    assert main(["best", "--metric", "evmn", "--choice", "leader", "--config", game, "--brute-force"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["oracle_agrees"] and doc["chosen"] in (0, 1, 2)
    assert main(["best", "--metric", "welfare", "--choice", "order", "--config", game]) == 0
    assert json.loads(capsys.readouterr().out)["chosen"] == [0, 1, 2]


def _sweep(tmp_path, seed_env, monkeypatch, name):
    spec = _write(tmp_path, "spec.json", {"K": 3, "M": 10, "snr_db": [0, 10], "realizations": 15, "seed": 1})
    if seed_env is None:
        monkeypatch.delenv("ENERGYGAMES_SEED", raising=False)
    else:
        monkeypatch.setenv("ENERGYGAMES_SEED", seed_env)
    out = tmp_path / name
    assert main(["sweep", "snr", "--spec", spec, "--out", str(out), "--format", "csv"]) == 0
    return out.read_text()


def test_sweep_and_seed_override(tmp_path, monkeypatch):
    plain = _sweep(tmp_path, None, monkeypatch, "a.csv")
    same = _sweep(tmp_path, "1", monkeypatch, "b.csv")
    other = _sweep(tmp_path, "2", monkeypatch, "c.csv")
    assert plain == same and plain != other
    assert ",2\n" in other
    monkeypatch.setenv("ENERGYGAMES_SEED", "x")
    spec = _write(tmp_path, "spec.json", {"K": 3, "realizations": 2})
    assert main(["sweep", "snr", "--spec", spec, "--out", str(tmp_path / "d.csv")]) == 2


def test_sweep_kind_mismatch(tmp_path, monkeypatch):
    monkeypatch.delenv("ENERGYGAMES_SEED", raising=False)
    spec = _write(tmp_path, "spec.json", {"kind": "load", "N": 16, "realizations": 2})
    assert main(["sweep", "snr", "--spec", spec, "--out", str(tmp_path / "x.csv")]) == 2


def test_sweep_load_infeasible(tmp_path, monkeypatch):
    monkeypatch.delenv("ENERGYGAMES_SEED", raising=False)
    spec = _write(tmp_path, "spec.json", {"K": 8, "N": [2], "M": 100, "realizations": 2})
    assert main(["sweep", "load", "--spec", spec, "--out", str(tmp_path / "x.csv")]) == 1


def test_module_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "energygames", "constants", "--M", "5"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["beta_star"] == pytest.approx(2.6603990584636849904)
