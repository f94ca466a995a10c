import subprocess
import sys

import pytest

from oseenlab.cli import main
from oseenlab.config import RunConfig, parse_config, parse_n_list
from oseenlab.errors import ConfigError

ELLIPSE = """
[domain]
family = ellipse
a = 2
b = 1

[params]
f = auto

[data]
F1 = 1 + x2
F2 = sin(x1)
G = 0.5*x1
B = 0.2

[run]
N = 12
seed = 7
"""


def read_report(path):
    out = {}
    for line in path.read_text().splitlines():
        k, _, v = line.partition(" = ")
        out[k] = v
    return out


def test_minimal_config_defaults():
    cfg = parse_config("[domain]\nfamily = disk\n")
    ref = RunConfig()
    assert cfg == ref
    assert cfg.f is None and cfg.N == (16,)


@pytest.mark.parametrize("text, msg", [
    ("[params]\nnu = -3\nmu = 1\n", "nu \\+ 2 mu"),
    ("[run]\nN = 16, 8\n", "strictly increasing"),
    ("[domain]\nfamily = torus\n", "family"),
    ("[domain]\nfamily = power\n", "needs q"),
    ("[data]\nF1 = 1 + foo(x1)\n", "not allowed"),
    ("[bogus]\nx = 1\n", "unknown section"),
    ("[run]\nseed = -1\n", "seed"),
    ("[params]\nmu = abc\n", "not a number"),
    ("[domain]\nfamily = power\nq = 2.5\n[data]\nmanufactured = yes\n", "quadratic|disk or ellipse"),
])
def test_config_rejections(text, msg):
    with pytest.raises(ConfigError, match=msg):
        cfg = parse_config(text)
        cfg.domain.build()


def test_parse_n_list():
    assert parse_n_list("8, 16 32") == (8, 16, 32)
    with pytest.raises(ConfigError):
        parse_n_list("8, x")


def test_cli_run_ellipse(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text(ELLIPSE)
    out = tmp_path / "out"
    status = main(["run", "--config", str(cfg), "--out", str(out)])
    assert status == 0
    summary = read_report(out / "summary.txt")
    assert summary["exit_status"] == "0"
    assert summary["flatness"] == "Admissible"
    assert summary["regularity"] == "regular"
    assert summary["checks_failed"] == "none"
    for name in ("u.csv", "w.csv", "psi.csv", "A.csv", "lambda.csv", "checks.csv", "flatness.txt"):
        assert (out / name).exists()
    assert "exit_status = 0" in capsys.readouterr().out


def test_cli_q3_cap_inadmissible(tmp_path):
    cfg = tmp_path / "cap.ini"
    cfg.write_text("[domain]\nfamily = power\nq = 3\n[run]\nN = 8\n")
    out = tmp_path / "out"
    assert main(["classify", "--config", str(cfg), "--out", str(out)]) == 2
    assert read_report(out / "flatness.txt")["verdict"] == "Inadmissible"


def test_cli_bad_expression(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[domain]\nfamily = disk\n[data]\nF1 = 1 + foo(x1)\n")
    out = tmp_path / "out"
    assert main(["solve", "--config", str(cfg), "--out", str(out)]) == 1
    err = capsys.readouterr().err
    assert "foo" in err and "column" in err
    assert read_report(out / "summary.txt")["exit_status"] == "1"


def test_cli_missing_config(tmp_path):
    out = tmp_path / "out"
    assert main(["solve", "--config", str(tmp_path / "nope.ini"), "--out", str(out)]) == 1
    assert (out / "summary.txt").exists()


def test_cli_seed_and_override(tmp_path):
    cfg = tmp_path / "mms.ini"
    cfg.write_text("[domain]\nfamily = ellipse\n[params]\nf = 10\n[data]\nmanufactured = yes\n[run]\nN = 8\n")
    out = tmp_path / "out"
    assert main(["solve", "--config", str(cfg), "--out", str(out), "--n-override", "12", "--seed", "3"]) == 0
    assert read_report(out / "solve.txt")["N"] == "12"
    assert main(["solve", "--config", str(cfg), "--out", str(out), "--n-override", "12,8"]) == 1


def test_console_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "oseenlab", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("classify", "solve", "decompose", "regularity", "verify", "study", "run"):
        assert cmd in res.stdout
