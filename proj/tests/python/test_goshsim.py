import json
import math

import pytest

import goshsim

HOSTS = {
    "hosts": [
        {
            "ips": 2000,
            "ram": 4096,
            "disk": 1e5,
            "bw": 100,
            "latency_class": "edge",
            "power_profile": [
                {"utilization": 0.0, "watts": 60},
                {"utilization": 0.5, "watts": 100},
                {"utilization": 1.0, "watts": 140},
            ],
        },
        {
            "ips": 8000,
            "ram": 16384,
            "disk": 1e5,
            "bw": 100,
            "latency_class": "cloud",
            "power_profile": [
                {"utilization": 0.0, "watts": 150},
                {"utilization": 0.5, "watts": 280},
                {"utilization": 1.0, "watts": 400},
            ],
        },
    ]
}


@pytest.fixture
def config(tmp_path):
    hosts_file = tmp_path / "hosts.json"
    hosts_file.write_text(json.dumps(HOSTS))
    return {
        "hosts_file": str(hosts_file),
        "scheduler": "random",
        "allow_cold_start": True,
        "intervals": 5,
        "max_task_slots": 4,
        "lambda": 1.0,
        "seeds": [1],
    }


def test_value_at_risk_closed_form():
    assert goshsim.value_at_risk(10.0, 2.0) == pytest.approx(13.3)
    assert goshsim.value_at_risk(0.0, 0.0) == 0.0


def test_objective_score_closed_form():
    assert goshsim.objective_score(0.5, 0.3) == pytest.approx(0.4)
    assert goshsim.objective_score(0.5, 0.3, alpha=1.0, beta=0.0) == 0.5


def test_update_exploration_dead_zone():
    # above the band: k grows and the moving average tracks xi
    k, xi_ma = goshsim.update_exploration(5.0, 0.1, 0.5, psi=0.9, delta=0.1)
    assert xi_ma == pytest.approx(0.9 * 0.1 + 0.1 * 0.5)
    assert k == pytest.approx(5.5)
    # inside the band: k unchanged
    k, _ = goshsim.update_exploration(5.0, 0.1, 0.1, psi=0.9, delta=0.1)
    assert k == 5.0
    # below the band: k shrinks
    k, _ = goshsim.update_exploration(5.0, 1.0, 0.01, psi=0.9, delta=0.1)
    assert k == pytest.approx(4.5)


def test_scheduler_names():
    names = goshsim.scheduler_names()
    assert "gosh" in names and "gobi" in names and "random" in names


def test_run_experiment_summary(config, tmp_path):
    out = tmp_path / "run"
    summary = goshsim.run_experiment(config, seed=1, out_dir=str(out))
    assert summary["intervals"] == 5
    obj = summary["metrics"]["objective"]["mean"]
    assert math.isfinite(obj) and obj >= 0.0
    assert (out / "metrics.csv").exists()
    assert (out / "summary.json").exists()


def test_run_experiment_byte_deterministic(config, tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    goshsim.run_experiment(config, seed=1, out_dir=str(a))
    goshsim.run_experiment(config, seed=1, out_dir=str(b))
    assert (a / "metrics.csv").read_bytes() == (b / "metrics.csv").read_bytes()
