import json
import math

import numpy as np
import pytest

from afsmc import artifacts, cli, fuzzy, scenario, sim


@pytest.fixture(scope="module")
def verify_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("verify")
    code = cli.main(["verify", "--out", str(out)])
    return code, json.loads((out / "verify.json").read_text())


def test_simulate_shipped_setpoint(tmp_path, capsys):
    out = tmp_path / "run"
    assert cli.main(["simulate", "--config", "constant_setpoint", "--out", str(out)]) == 0
    header, data = artifacts.read_trace_csv(out / "trace.csv")
    assert header == list(sim.TRACE_COLUMNS)
    assert ",".join(header) == "t,q1,q2,q3,qd1,qd2,qd3,e1,e2,e3,s1,s2,s3,tau1,tau2,tau3,lam1,lam2,lam3,V"
    assert data.shape == (5001, 20)
    for line in (out / "trace.csv").read_text().splitlines():
        assert len(line.split(",")) == 20
    assert data[-1, 2] == pytest.approx(math.pi / 2, abs=1e-3)
    metrics = (out / "metrics.csv").read_text().splitlines()
    assert metrics[0].split(",") == ["joint", *sim.METRIC_NAMES]
    assert len(metrics) == 4
    assert sorted(p.name for p in out.glob("*.svg")) == sorted(
        f"{kind}_joint{j}.svg" for kind in ("response", "error") for j in (1, 2, 3)
    )
    assert (out / "response_joint2.svg").read_text().startswith("<svg")
    assert "trace:" in capsys.readouterr().out


def test_config_echo_round_trip(tmp_path):
    out = tmp_path / "run"
    cli.cmd_simulate("disturbed_afsmc", out, ["sim.duration=0.2", "disturbance.seed=9"])
    echoed = scenario.load_scenario(out / "config.toml")
    original = scenario.load_scenario("disturbed_afsmc", ["sim.duration=0.2", "disturbance.seed=9"])
    assert echoed == original
    assert sim.config_hash(echoed) == sim.config_hash(original)
    # rerunning from the echo alone reproduces the trace byte for byte
    again = tmp_path / "again"
    cli.cmd_simulate(out / "config.toml", again)
    assert (again / "trace.csv").read_bytes() == (out / "trace.csv").read_bytes()


def test_override_controller_type(tmp_path):
    out = tmp_path / "smc"
    code = cli.main(["simulate", "--out", str(out), "--override", "controller.type=smc", "--duration", "0.2"])
    assert code == 0
    _, data = artifacts.read_trace_csv(out / "trace.csv")
    np.testing.assert_array_equal(data[:, 16:19], 14.0)
    assert scenario.load_scenario(out / "config.toml").controller.type.value == "smc"


def test_flags_map_to_overrides(tmp_path):
    out = tmp_path / "flags"
    args = ["simulate", "--out", str(out), "--dt", "0.002", "--duration", "0.1", "--controller", "pd", "--seed", "4"]
    assert cli.main(args) == 0
    cfg = scenario.load_scenario(out / "config.toml")
    assert (cfg.dt, cfg.duration, cfg.controller.type.value, cfg.disturbance.seed) == (0.002, 0.1, "pd", 4)
    assert len(artifacts.read_trace_csv(out / "trace.csv")[1]) == 51


def test_unknown_key_exit_2(tmp_path, capsys):
    code = cli.main(["simulate", "--out", str(tmp_path), "--override", "controler.type=smc"])
    assert code == cli.EXIT_CONFIG == 2
    assert "controler" in capsys.readouterr().err


def test_unknown_key_in_file(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('[controller]\ntype = "smc"\ngain = 3\n')
    assert cli.main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "controller.gain" in capsys.readouterr().err


def test_bad_value_exit_2(tmp_path, capsys):
    assert cli.main(["simulate", "--out", str(tmp_path), "--override", "controller.k=[1, -2, 3]"]) == 2
    assert "controller" in capsys.readouterr().err


def test_missing_scenario_exit_2(tmp_path):
    assert cli.main(["simulate", "--config", str(tmp_path / "nope.toml"), "--out", str(tmp_path)]) == 2


def test_io_failure_exit_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["simulate", "--out", str(blocker), "--duration", "0.1"]) == cli.EXIT_IO == 4


def test_diverged_exit_3(tmp_path, capsys):
    assert cli.main(["simulate", "--out", str(tmp_path), "--strict-paper", "--duration", "2"]) == 3
    assert "diverged" in capsys.readouterr().err


def test_compare_identical(tmp_path, capsys):
    a = tmp_path / "a.toml"
    a.write_text(scenario.dumps(scenario.load_scenario("constant_setpoint", ["sim.duration=0.3"])))
    assert cli.main(["compare", str(a), str(a), "--out", str(tmp_path / "cmp")]) == 0
    rows = (tmp_path / "cmp" / "comparison.csv").read_text().splitlines()
    assert rows[0] == "metric,joint,a,a,ratio_a_over_b"
    assert len(rows) == 1 + 3 * len(sim.METRIC_NAMES) + 1
    assert all(r.split(",")[-1] == "1.0" for r in rows[1:])
    assert "total ISE ratio A/B: 1" in capsys.readouterr().out


def test_compare_names_diverging_side(tmp_path, capsys):
    args = ["compare", "constant_setpoint", "constant_setpoint", "--out", str(tmp_path), "--strict-paper", "--duration", "2"]
    assert cli.main(args) == 3
    assert "(side A)" in capsys.readouterr().err


def test_fuzzy_eval(tmp_path):
    path = cli.cmd_fuzzy_eval("constant_setpoint", 101, tmp_path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (10201, 3)
    cfg = fuzzy.default_fuzzy_configs()[0]
    center = data[(data[:, 0] == 0) & (data[:, 1] == 0)]
    assert center.shape == (1, 3) and center[0, 2] == cfg.singletons.m
    assert data[:, 2].min() >= cfg.singletons.s and data[:, 2].max() <= cfg.singletons.l
    assert data[:, 0].max() == cfg.e_partition.half_width


def test_fuzzy_eval_bad_resolution(tmp_path):
    assert cli.main(["fuzzy-eval", "--out", str(tmp_path), "--resolution", "1"]) == 2


def test_verify_pristine(verify_run):
    code, report = verify_run
    assert code == 0
    by_name = {r["name"]: r for r in report}
    assert by_name["table_fidelity"]["status"] == "pass"
    for name in ("defuzzification_oracle", "dynamics_roundtrip", "rk4_order", "gravity_constant",
                 "lyapunov_constant_setpoint", "lyapunov_disturbed_afsmc"):
        assert by_name[name]["status"] == "pass", by_name[name]
    strict = by_name["lyapunov_constant_setpoint_strict_paper"]
    assert strict["status"] in ("warn", "pass")


def test_verify_detects_mutated_table(tmp_path, monkeypatch, capsys):
    rows = [list(r) for r in fuzzy.PUBLISHED_RULES]
    rows[2][2] = "L"
    monkeypatch.setattr(fuzzy, "PUBLISHED_RULES", tuple(tuple(r) for r in rows))
    from afsmc import verify

    # only the fidelity check reads the table; skip the slow simulations
    monkeypatch.setattr(verify, "check_setpoint_convergence", lambda: verify.CheckResult("setpoint", "pass", ""))
    monkeypatch.setattr(verify, "check_lyapunov", lambda *a, **k: verify.CheckResult("lyapunov", "pass", ""))
    assert cli.main(["verify", "--out", str(tmp_path)]) == cli.EXIT_VERIFY
    report = json.loads((tmp_path / "verify.json").read_text())
    fidelity = next(r for r in report if r["name"] == "table_fidelity")
    assert fidelity["status"] == "fail" and "ZE/ZE" in fidelity["detail"]
    assert "FAIL table_fidelity" in capsys.readouterr().out
