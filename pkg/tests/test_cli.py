import os
import subprocess
import sys

import pytest

from ggbm.cli import main
from ggbm.pathio import read_path_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_specfun_eval(capsys):
    code, out, _ = run(capsys, "specfun", "eval", "--beta", "1", "--x", "-1")
    assert code == 0 and out == "0.36787944117144233\n"
    code, out, _ = run(capsys, "specfun", "eval", "--fn", "mu", "--beta", "0.8", "--alpha", "1.5")
    assert code == 0 and float(out) == pytest.approx(0.84488388579008252, rel=1e-13)
    code, out, _ = run(capsys, "specfun", "eval", "--fn", "mwright", "--beta", "0.5", "--x", "0", "1")
    assert code == 0 and len(out.split()) == 2


def test_specfun_errors_exit_2(capsys):
    assert run(capsys, "specfun", "eval", "--fn", "ml")[0] == 2
    code, _, err = run(capsys, "specfun", "eval", "--beta", "1.5", "--x", "-1")
    assert code == 2 and "beta" in err
    assert run(capsys, "specfun", "eval", "--fn", "mu", "--beta", "1", "--alpha", "2")[0] == 2


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sample"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_sample_stdout_and_files(capsys, tmp_path):
    code, out, _ = run(capsys, "sample", "--process", "ggbm", "--level", "4", "--seed", "7")
    assert code == 0 and out.splitlines()[0] == "t,value" and len(out.splitlines()) == 18
    d = tmp_path / "paths"
    code, _, _ = run(capsys, "sample", "--process", "tcbm", "--level", "6", "--replicas", "3",
                     "--start", "5", "--seed", "7", "--threads", "2", "--out", str(d))
    assert code == 0
    assert sorted(os.listdir(d)) == [f"path_{i:06d}.csv{s}" for i in (5, 6, 7) for s in ("", ".meta")]
    p = read_path_csv(d / "path_000006.csv")
    assert p.process.kind == "TCBM" and p.meta["stream"] == "6"
    assert run(capsys, "sample", "--process", "bm", "--replicas", "2")[0] == 2
    assert run(capsys, "sample", "--process", "bm", "--threads", "0")[0] == 2


def test_sample_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("GGBM_SEED", "7")
    a = run(capsys, "sample", "--process", "bm", "--level", "3")[1]
    b = run(capsys, "sample", "--process", "bm", "--level", "3", "--seed", "7")[1]
    assert a == b
    monkeypatch.setenv("GGBM_SEED", "x")
    assert run(capsys, "sample", "--process", "bm", "--level", "3")[0] == 2


def test_variation_and_discriminate(capsys, tmp_path):
    d = tmp_path / "p"
    run(capsys, "sample", "--process", "ggbm", "--level", "12", "--replicas", "2", "--seed", "3",
        "--out", str(d))
    f0, f1 = str(d / "path_000000.csv"), str(d / "path_000001.csv")
    code, out, _ = run(capsys, "variation", f0, "--p", "2", "--p", "1.3333", "--levels", "8..12")
    rows = out.splitlines()
    assert code == 0 and rows[0] == "p,level,sum" and len(rows) == 11
    code, out, _ = run(capsys, "variation", f0, "--p", "2", "--levels", "4,6", "--max")
    assert code == 0 and len(out.splitlines()) == 3
    code, out, _ = run(capsys, "variation", f0, f1, "--index")
    assert code == 0 and out.startswith("file,v_hat\n") and len(out.splitlines()) == 3
    assert run(capsys, "variation", f0)[0] == 2
    assert run(capsys, "variation", f0, f1, "--p", "2")[0] == 2
    code, out, _ = run(capsys, "discriminate", f0, f1, "--alpha", "1.5")
    lines = out.splitlines()
    assert code == 0 and lines[1].split(",")[1:3] == ["GGBM", "GGBM"]
    assert run(capsys, "discriminate", f0, "--alpha", "2.5")[0] == 2
    assert run(capsys, "discriminate", str(tmp_path / "missing.csv"), "--alpha", "1.5")[0] == 2


def test_sde(capsys, tmp_path):
    code, out, _ = run(capsys, "sde", "--driver", "ggbm", "--coef", "linear:0.5", "--level", "6",
                       "--seed", "3")
    assert code == 0 and out.splitlines()[1] == "0,1"
    code, out, _ = run(capsys, "sde", "--driver", "tcbm", "--coef", "affine:0.5,0.1",
                       "--drift", "constant:0", "--level", "6", "--seed", "3")
    assert code == 0 and len(out.splitlines()) == 66
    tab = tmp_path / "g.csv"
    tab.write_text("x,y\n0,0\n1,1\n2,1\n")
    args = ["sde", "--driver", "fbm", "--H", "0.75", "--coef", f"table:{tab}:1", "--level", "6"]
    assert run(capsys, *args)[0] == 2
    code, _, err = run(capsys, *args, "--allow-outside-regime")
    assert code == 0 and "outside proven regime" in err
    with pytest.raises(SystemExit):
        main(["sde", "--driver", "ggbm", "--coef", "cubic:1"])
    assert run(capsys, "sde", "--driver", "fbm", "--H", "0.25", "--coef", "linear:1")[0] == 2


def test_experiment_run(capsys, tmp_path):
    cfg = tmp_path / "e.cfg"
    cfg.write_text("kind = fpp\nbeta = 0.6\nreplicas = 20000\n")
    out = tmp_path / "res"
    code, text, _ = run(capsys, "experiment", "run", str(cfg), "--out", str(out), "--seed", "2")
    assert code == 0 and "fpp: PASS" in text
    assert {"report.md", "checks.csv", "pmf.csv"} <= set(os.listdir(out))
    # an unattainable bound fails with exit 1
    cfg.write_text("kind = fpp\nbeta = 0.6\nsigmas = 1e-9\nreplicas = 20000\n")
    assert run(capsys, "experiment", "run", str(cfg), "--out", str(out))[0] == 1
    cfg.write_text("kind = fpp\nbeta = 7\n")
    code, _, err = run(capsys, "experiment", "run", str(cfg))
    assert code == 2 and "field 'beta'" in err
    assert run(capsys, "experiment", "run", str(tmp_path / "none.cfg"))[0] == 2
    cfg.write_text("kind = fpp\n")
    assert run(capsys, "experiment", "run", str(cfg), "--replicas", "0", "--out", str(out))[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ggbm", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "ggbm" in r.stdout
