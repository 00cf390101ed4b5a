import subprocess
import sys

import pytest

from ridgerate.cli import main


def _write(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_predict(capsys):
    assert main(["predict", "4", "0", "1", "1", "reluk_greedy"]) == 0
    assert capsys.readouterr().out.strip() == "t=2 q=1"


def test_predict_outside_hypotheses(capsys):
    assert main(["predict", "0.25", "0", "1", "1", "reluk_greedy"]) == 2
    assert "outside theorem hypotheses" in capsys.readouterr().err


def test_targets_list(capsys):
    assert main(["targets", "list", "--dim", "2"]) == 0
    out = capsys.readouterr().out
    assert "gaussian\tdim=2" in out
    assert "cossum" in out


def test_targets_bad_dimension(capsys):
    assert main(["targets", "list", "--dim", "5"]) == 2


def test_free_knot(capsys):
    assert main(["oracle", "free-knot", "--target", "cossum", "--k", "0", "--n", "1", "--dp-grid", "64"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("breakpoints=")
    assert out[1].startswith("l2_error=")


def test_run_to_file(tmp_path):
    out = tmp_path / "r.csv"
    cfg = _write(tmp_path, f"target=expwave\ndim=1\nmethod=cosine\nn_list=1,2\nR=4\ncandidates=1\noutput={out}\n")
    assert main(["run", cfg]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,error_l2,error_hm,ell1_mass,wall_ms"
    assert len(lines) == 4


def test_run_to_stdout(tmp_path, capsys):
    cfg = _write(tmp_path, "target=cossum\ndim=1\nmethod=free_knot\nn_list=2,4\nk=1\ndp_grid=64\n")
    assert main(["run", cfg, "--output", "-"]) == 0
    assert capsys.readouterr().out.startswith("n,error_l2")


def test_config_error_exit(tmp_path, capsys):
    cfg = _write(tmp_path, "target=gaussian\ndim=1\nmethod=cosine\nn_list=8,4\n")
    assert main(["run", cfg]) == 2
    assert "strictly increasing" in capsys.readouterr().err


def test_missing_config_exit(tmp_path):
    assert main(["run", str(tmp_path / "absent.cfg")]) == 2


def test_numerical_failure_exit(monkeypatch, capsys):
    from ridgerate import cli
    from ridgerate.errors import NumericalError

    def boom(*args, **kwargs):
        raise NumericalError("rank loss")

    monkeypatch.setattr(cli, "free_knot_fit", boom)
    assert main(["oracle", "free-knot", "--n", "2"]) == 3
    assert "numerical failure: rank loss" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "ridgerate", "predict", "2", "0", "1", "2", "cosine"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert res.stdout.strip() == "t=1.5 q=0"


def test_usage_error_exit():
    with pytest.raises(SystemExit) as exc:
        main(["predict", "1"])
    assert exc.value.code == 2
