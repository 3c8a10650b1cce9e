import csv
import json
from fractions import Fraction

import numpy as np
import pytest

from metastability import harness
from metastability.cli import main
from metastability.harness import ConfigError, ExperimentConfig, cmd_bounds, cmd_metastable, cmd_simulate, cmd_verify
from metastability.rates import BoundValue, DigitBudgetError


def strip_clock(d):
    return {k: v for k, v in d.items() if k != "wall_clock"}


def test_bounds_examples():
    r = cmd_bounds(ExperimentConfig(d=1, eps=2, g="const 0"))
    assert r.theta == {"mode": "exact", "exact_value": "0"}
    r = cmd_bounds(ExperimentConfig(d=1, eps=1, g="const 1", u_override="const 2"))
    assert r.theta["exact_value"] == "2448"
    r = cmd_bounds(ExperimentConfig(d=1, eps=1, g="const 1", mode="log2"))
    assert r.theta["mode"] == "log2-upper" and Fraction(r.theta["log2_upper"]) >= 0


def test_bounds_budget_without_log_mode():
    with pytest.raises(DigitBudgetError):
        cmd_bounds(ExperimentConfig(eps=1, g="const 1"))


def test_bounds_norm_bound_rescales_eps():
    scaled = cmd_bounds(ExperimentConfig(eps=3, g="const 1", norm_bound=2))
    plain = cmd_bounds(ExperimentConfig(eps=Fraction(3, 2), g="const 1"))
    assert scaled.theta == plain.theta


def test_metastable_examples():
    r = cmd_metastable(ExperimentConfig(recipe="identity", d=2, eps=Fraction(1, 3), g="affine 1 1",
                                        u_override="const 1"))
    assert (r.witness, r.verdict) == (0, "CONFIRMED")
    r = cmd_metastable(ExperimentConfig(recipe="neg", eps=Fraction(1, 2), g="const 1", u_override="const 2"))
    assert (r.witness, r.verdict, r.theta["exact_value"]) == (1, "CONFIRMED", "2448")
    r = cmd_metastable(ExperimentConfig(recipe="neg", eps=1, g="const 1"))
    assert r.witness is not None and r.theta["mode"] == "log2-upper" and r.verdict == "CONSISTENT"


def test_metastable_with_norm_bound():
    cfg = ExperimentConfig(recipe="neg", x="vec:3,0", eps=Fraction(3, 2), g="const 1", u_override="const 2")
    with pytest.raises(ConfigError):
        cmd_metastable(cfg)
    cfg.norm_bound = Fraction(3)
    r = cmd_metastable(cfg)
    # x/3 with eps/3 = 1/2 is the -identity example again
    assert (r.witness, r.verdict) == (1, "CONFIRMED")


def test_verdicts():
    assert harness.verdict_for(BoundValue.exact(5), 3, 10) == "CONFIRMED"
    assert harness.verdict_for(BoundValue.exact(5), 6, 10) == "FAIL"
    assert harness.verdict_for(BoundValue.exact(5), None, 10) == "FAIL"
    assert harness.verdict_for(BoundValue.exact(50), None, 10) == "INCONCLUSIVE"
    assert harness.verdict_for(BoundValue.log2(3), 8, 10) == "CONSISTENT"
    assert harness.verdict_for(BoundValue.log2(3), 9, 10) == "FAIL"


def test_simulate_identity_and_rotation(tmp_path):
    out = tmp_path / "id.csv"
    cmd_simulate(ExperimentConfig(recipe="identity", d=2, x="vec:0.6,0.8", n_cap=15, out=str(out)))
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 16
    assert all(float(r["norm_xn"]) == pytest.approx(1.0) for r in rows)
    out = tmp_path / "rot.csv"
    r = cmd_simulate(ExperimentConfig(recipe="rotation:90", x="e0", n_cap=40, g="const 2", out=str(out)))
    rows = list(csv.DictReader(out.open()))
    assert r.outputs["rows"] == len(rows) == 41
    assert list(rows[0]) == ["n", "norm_xn", "pairwise_osc"]
    norms = [float(row["norm_xn"]) for row in rows]
    for n in (3, 7, 11, 39):
        assert norms[n] == pytest.approx(0.0, abs=1e-12)
    assert max(norms[30:]) < 0.05


def test_simulate_needs_out():
    with pytest.raises(ConfigError):
        cmd_simulate(ExperimentConfig())


@pytest.mark.parametrize("field, value", [("d", 0), ("n_cap", -1), ("eps", 0), ("mode", "fast"),
                                          ("g", "const"), ("u_override", "const -1"), ("trials", 0),
                                          ("digit_budget", 0)])
def test_config_validation(field, value):
    cfg = ExperimentConfig()
    setattr(cfg, field, value)
    with pytest.raises(ConfigError):
        cfg.validate()


def test_verify_trials_zero():
    with pytest.raises(ConfigError):
        cmd_verify("rates", 0, 7)


def test_verify_small_run_passes():
    r = cmd_verify("all", 5, 7)
    assert r.verdict == "PASS"
    assert set(r.checks) == set(harness.RATES_PROPERTIES) | set(harness.SPACES_PROPERTIES)
    assert all(c == {"passed": 5, "failed": 0} for c in r.checks.values())


def test_verify_serializes_failures(monkeypatch):
    monkeypatch.setitem(harness.RATES_PROPERTIES, "pairing", lambda rng: (False, {"m": 1}))
    r = cmd_verify("rates", 3, 1)
    assert r.verdict == "FAIL" and not r.ok
    assert r.checks["pairing"] == {"passed": 0, "failed": 3}
    assert r.failures[0]["instance"] == {"m": 1} and r.failures[0]["seed"] == [1, 0, 0]


@pytest.mark.parametrize("cfg", [
    ExperimentConfig(recipe="poly:random", d=2, x="random", eps=Fraction(3, 2), g="affine 1 2", seed=4),
    ExperimentConfig(space="lp:3:3", recipe="perm:random", d=2, x="random", eps=Fraction(1, 4),
                     g="const 2", u_override="const 1", seed=9),
])
def test_reports_rerun_identically(cfg, tmp_path):
    r1 = cmd_metastable(cfg)
    r2 = harness.rerun(json.loads(r1.to_json()))
    assert strip_clock(r1.to_dict()) == strip_clock(r2.to_dict())
    cfg.out = str(tmp_path / "t.csv")
    s1 = cmd_simulate(cfg)
    first = (tmp_path / "t.csv").read_text()
    s2 = harness.rerun(s1.to_dict())
    assert (tmp_path / "t.csv").read_text() == first
    assert strip_clock(s1.to_dict()) == strip_clock(s2.to_dict())
    v1 = cmd_verify("rates", 3, 5)
    assert strip_clock(harness.rerun(v1.to_dict()).to_dict()) == strip_clock(v1.to_dict())


def test_modulus_file(tmp_path):
    path = tmp_path / "eta.json"
    path.write_text(json.dumps({"coefficient": "1/16", "exponent": 2, "factorized": True}))
    space = harness.parse_space("l2:3", f"file:{path}")
    assert space.modulus(Fraction(1)) == Fraction(1, 16)
    path.write_text(json.dumps({"coefficient": "3", "exponent": 2}))
    with pytest.raises(ValueError):
        harness.parse_space("l2:3", f"file:{path}")
    with pytest.raises(ConfigError):
        harness.parse_space("l2:3", "hilbert:x")
    with pytest.raises(ConfigError):
        harness.parse_space("lp:3:2", "hilbert")


def test_random_instances_replay_from_descriptors():
    rng = np.random.default_rng(3)
    for _ in range(50):
        desc = harness.random_sequence_desc(rng)
        a = harness.sequence_from_desc(json.loads(json.dumps(desc)))
        assert all(0 <= a(n) <= 1 for n in range(60))
        spec2 = harness.random_double_desc(rng)
        b = harness.double_sequence_from_desc(spec2)
        assert all(0 <= b(m, n) <= 1 for m in range(8) for n in range(8))


# --- CLI --------------------------------------------------------------------

def test_cli_bounds(capsys):
    assert main(["bounds", "--d", "1", "--eps", "2", "--g", "const 0", "--modulus", "hilbert"]) == 0
    assert json.loads(capsys.readouterr().out)["theta"]["exact_value"] == "0"
    assert main(["bounds", "--eps", "1", "--g", "const 1", "--mode", "log2"]) == 0
    assert json.loads(capsys.readouterr().out)["theta"]["mode"] == "log2-upper"
    assert main(["bounds", "--eps", "1", "--g", "const 1"]) == 2


def test_cli_usage_errors(capsys):
    assert main(["verify", "--trials", "0"]) == 2
    assert main(["bounds", "--g", "affine 1"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["bounds", "--eps", "half"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_cli_metastable_and_simulate(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["metastable", "--recipe", "neg", "--eps", "1/2", "--g", "const 1",
                 "--u-override", "const 2", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["witness"] == 1 and report["verdict"] == "CONFIRMED"
    csv_path = tmp_path / "traj.csv"
    assert main(["simulate", "--recipe", "rotation:90", "--n-cap", "11", "--out", str(csv_path)]) == 0
    assert len(csv_path.read_text().splitlines()) == 13


def test_cli_verify_failure_exit(monkeypatch, capsys):
    monkeypatch.setitem(harness.SPACES_PROPERTIES, "claim1", lambda rng: (False, {}))
    assert main(["verify", "--suite", "spaces", "--trials", "2"]) == 1
    assert main(["verify", "--suite", "rates", "--trials", "2"]) == 0
