import json

import numpy as np
import pytest

from touchdown.cli import main
from touchdown.config import ConfigError, parse_config

R1 = """
[model]
operator = power
alpha = 2
beta = 0
gamma = 2
gap = mems
p = 2
source = weighted
C = 1

[numerics]
M = {M}
grading = 2

[output]
dir = {out}
svg = {svg}
"""

SPHERE = """
[model]
operator = sphere
N = 3
rho = 1
gap = mems
p = 2
source = sphere
C = 1

[numerics]
M = 256

[output]
dir = {out}
"""


def write_cfg(tmp_path, text=R1, name="run.ini", M=2048, svg="false"):
    out = tmp_path / "out"
    path = tmp_path / name
    path.write_text(text.format(M=M, out=out, svg=svg))
    return str(path), out


def read_csv(path):
    return np.genfromtxt(path, delimiter=",", names=True)


def test_validate_ok(tmp_path, capsys):
    cfg, _ = write_cfg(tmp_path)
    assert main(["validate", "--config", cfg]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_validate_p1_fails(tmp_path):
    cfg, _ = write_cfg(tmp_path, R1.replace("p = 2", "p = 1"))
    assert main(["validate", "--config", cfg, "--shooter"]) == 1


@pytest.mark.parametrize("text", ["[model\nalpha = 2", "[numerics]\nM = 4", "[model]\noperator = cone",
                                  R1.replace("alpha = 2", "alpha = two")])
def test_malformed_exit_2(tmp_path, text, capsys):
    cfg, _ = write_cfg(tmp_path, text.replace("{", "{{").replace("}", "}}") if "{M}" not in text else text)
    assert main(["validate", "--config", cfg]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "nope.ini")]) == 2


def test_unknown_numerics_key():
    with pytest.raises(ConfigError) as exc:
        parse_config("[model]\nalpha=2\nbeta=0\ngamma=2\np=2\n[numerics]\nbogus=1\n")
    assert "[numerics]" in str(exc.value)


def test_solve_zero(tmp_path):
    cfg, out = write_cfg(tmp_path)
    assert main(["solve", "--config", cfg, "--lambda", "0"]) == 0
    assert np.all(read_csv(out / "solution.csv")["u"] == 0)


def test_solve_small(tmp_path):
    cfg, out = write_cfg(tmp_path, svg="true")
    assert main(["solve", "--config", cfg, "--lambda", "0.1"]) == 0
    rep = json.loads((out / "solve.json").read_text())
    assert rep["report"]["status"] == "Converged"
    assert rep["report"]["residual"] <= 1e-6
    assert rep["config"]["model"]["alpha"] == "2"
    assert (out / "solution.svg").read_text().startswith("<?xml")


def test_solve_touchdown(tmp_path):
    cfg, out = write_cfg(tmp_path, M=256)
    assert main(["solve", "--config", cfg, "--lambda", "100"]) == 1
    assert json.loads((out / "solve.json").read_text())["report"]["status"] == "TouchdownDetected"


def test_solve_needs_lambda(tmp_path):
    cfg, _ = write_cfg(tmp_path)
    assert main(["solve", "--config", cfg]) == 2


def test_pullin_r1(tmp_path):
    cfg, out = write_cfg(tmp_path)
    assert main(["pullin", "--config", cfg]) == 0
    rep = json.loads((out / "pullin.json").read_text())
    assert rep["lower"] == pytest.approx(25 / 36, rel=1e-12)
    assert rep["upper"] == pytest.approx(48, rel=1e-12)
    assert 25 / 36 < rep["bracket_lo"] < rep["bracket_hi"] < 48
    trace = (out / "pullin_trace.csv").read_text().splitlines()
    assert trace[0] == "lambda,classification" and len(trace) > 10
    assert [t["M"] for t in rep["refinement"]] == [512, 1024, 2048]


def test_pullin_bounds_only(tmp_path):
    cfg, out = write_cfg(tmp_path)
    assert main(["pullin", "--config", cfg, "--width", "100"]) == 0
    rep = json.loads((out / "pullin.json").read_text())
    assert (rep["bracket_lo"], rep["bracket_hi"]) == (rep["lower"], rep["upper"])
    assert (out / "pullin_trace.csv").read_text() == "lambda,classification\n"


def test_pullin_sphere(tmp_path):
    cfg, out = write_cfg(tmp_path, SPHERE)
    assert main(["pullin", "--config", cfg, "--width", "1e-2"]) == 0
    rep = json.loads((out / "pullin.json").read_text())
    assert rep["lower"] < rep["bracket_lo"] < rep["bracket_hi"] < rep["upper"]


def test_branch_empty(tmp_path):
    cfg, out = write_cfg(tmp_path)
    assert main(["branch", "--config", cfg, "--lambdas", ""]) == 0
    assert (out / "branch.csv").read_text() == "lambda,u0,norm_sup,status\n"


def test_branch_crossing(tmp_path):
    cfg, out = write_cfg(tmp_path, M=256, svg="true")
    assert main(["branch", "--config", cfg, "--lambdas", "0:2:9", "--jobs", "3"]) == 0
    rows = (out / "branch.csv").read_text().splitlines()[1:]
    status = [r.split(",")[-1] for r in rows]
    assert status[0] == "Converged" and status[-1] == "TouchdownDetected"
    first_td = status.index("TouchdownDetected")
    assert set(status[first_td:]) == {"TouchdownDetected"}
    assert (out / "branch.svg").exists()


def test_bad_lambdas(tmp_path):
    cfg, _ = write_cfg(tmp_path)
    assert main(["branch", "--config", cfg, "--lambdas", "a:b"]) == 2


def test_asymptotics(tmp_path):
    cfg, out = write_cfg(tmp_path)
    assert main(["asymptotics", "--config", cfg, "--lambda", "1.1111111111111112"]) == 0
    rep = json.loads((out / "asymptotics.json").read_text())
    assert rep["constants"]["theta"] == 2
    assert rep["coef"] == pytest.approx(1.0, rel=1e-12)


def test_shoot_r1(tmp_path):
    cfg, out = write_cfg(tmp_path, svg="true")
    assert main(["shoot", "--config", cfg]) == 0
    rep = json.loads((out / "shoot.json").read_text())
    c = rep["constants"]
    assert c["theta"] == 2 and c["sigma"] == pytest.approx(2 / 3)
    assert c["kappa"] == pytest.approx(0.93217, abs=1e-5)
    assert abs(rep["fit"]["exponent_hat"] / (2 / 3) - 1) < 0.02
    traj = read_csv(out / "trajectory.csv")
    assert traj.dtype.names == ("t", "v", "w")
    prof = read_csv(out / "touchdown.csv")
    assert prof["u"][-1] == 0.0


def test_shoot_sphere_exit_1(tmp_path, capsys):
    cfg, _ = write_cfg(tmp_path, SPHERE)
    assert main(["shoot", "--config", cfg]) == 1


def test_crosscheck_threshold(tmp_path):
    cfg, out = write_cfg(tmp_path, M=256)
    assert main(["crosscheck", "--config", cfg, "--threshold", "1.0", "--width", "1e-2"]) == 0
    rep = json.loads((out / "crosscheck.json").read_text())
    assert rep["pass"] and rep["threshold"] == 1.0
    assert rep["relative_discrepancy"] >= 0


def test_crosscheck_coarse_fails(tmp_path):
    cfg, out = write_cfg(tmp_path, M=64)
    assert main(["crosscheck", "--config", cfg]) == 1
    assert json.loads((out / "crosscheck.json").read_text())["pass"] is False


def test_determinism(tmp_path):
    cfg, out = write_cfg(tmp_path, M=512, svg="true")
    files = {}
    for k in range(2):
        assert main(["solve", "--config", cfg, "--lambda", "0.5"]) == 0
        assert main(["shoot", "--config", cfg]) == 0
        files[k] = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    assert files[0] == files[1]
    assert "solution.svg" in files[0] and "shoot.json" in files[0]


def test_force_bypasses_gate(tmp_path):
    cfg, _ = write_cfg(tmp_path, R1.replace("p = 2", "p = 1"), M=128)
    assert main(["solve", "--config", cfg, "--lambda", "0.1"]) == 1
    assert main(["solve", "--config", cfg, "--lambda", "0.1", "--force"]) == 0
