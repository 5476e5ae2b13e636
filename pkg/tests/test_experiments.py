import csv
import json

import numpy as np
import pytest

from twotier import ConfigError, Deployment, ScenarioError
from twotier.experiments import (ExperimentSpec, load_experiment_spec, read_deployment_csv,
                                 run_experiment, summary_rows, sweep_beta, write_deployment_csv)


def small(out=None, **kw):
    base = dict(scenario="wsn1", betas=(0.25,), seeds=(1, 2), algorithms=("httl",), out_dir=out,
                max_iters=4, grid=48)
    base.update(kw)
    return ExperimentSpec(**base)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_writes_traces_and_summary(tmp_path):
    results = run_experiment(small(tmp_path))
    assert len(results) == 2
    rows = read_rows(tmp_path / "summary.csv")
    assert [r["seed"] for r in rows] == ["1", "2", "mean"]
    mean = np.mean([float(r["final_distortion"]) for r in rows[:2]])
    assert float(rows[2]["final_distortion"]) == pytest.approx(mean, rel=1e-15)
    trace = read_rows(tmp_path / "trace_httl_beta0.25_seed1.csv")
    assert list(trace[0]) == ["iter", "distortion", "sensor_power", "ap_power",
                              "max_ap_res", "max_fc_res"]
    assert trace[0]["iter"] == "0"
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["scenario"] == "wsn1" and manifest["grid"] == 48


def test_default_seeds_give_ten_runs():
    spec = ExperimentSpec("wsn1", (0.25,))
    assert spec.seeds == tuple(range(1, 11))
    assert spec.max_iters == 100 and spec.epsilon == 1e-5


def test_wsn2_spec_has_four_fcs():
    s = small(scenario="wsn2").base_scenario()
    assert (s.n_aps, s.n_fcs) == (20, 4)


@pytest.mark.parametrize("kw, match", [
    (dict(betas=()), "betas"),
    (dict(seeds=()), "seeds"),
    (dict(algorithms=("kmeans",)), "unknown algorithms"),
    (dict(betas=(-0.1,)), "nonnegative"),
])
def test_spec_validation(kw, match):
    with pytest.raises(ScenarioError, match=match):
        small(**kw)


def test_bad_preset_name_fails_early():
    with pytest.raises(ConfigError):
        small(scenario="wsn9")


def test_summary_labels_both_algorithms(tmp_path):
    results = run_experiment(small(tmp_path, algorithms=("httl", "nearest_fc_lloyd"), seeds=(1,)))
    rows = summary_rows(results)
    assert {r[0] for r in rows} == {"httl", "nearest_fc_lloyd"}
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["algorithms"]["nearest_fc_lloyd"] == "baseline (simplified)"


def test_reruns_are_byte_identical(tmp_path):
    run_experiment(small(tmp_path / "a"))
    run_experiment(small(tmp_path / "b"))
    for name in ("summary.csv", "trace_httl_beta0.25_seed2.csv",
                 "deployment_httl_beta0.25_seed2.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sweep_writes_table(tmp_path):
    rows, results = sweep_beta(small(tmp_path, betas=(0.05, 0.45), seeds=(1,)))
    assert [r[0] for r in rows] == [0.05, 0.45]
    assert len(results) == 2
    table = read_rows(tmp_path / "sweep.csv")
    assert [t["beta"] for t in table] == ["0.05", "0.45"]
    assert (tmp_path / "beta_0.05" / "summary.csv").exists()


def test_spec_from_yaml(tmp_path):
    text = "preset: wsn2\nbetas: [0.05, 0.25]\nseeds: [3]\nalgorithms: [httl, nearest_fc_lloyd]\n" \
           "grid: 64\nout: results\n"
    spec = load_experiment_spec(text, tmp_path)
    assert spec.scenario == "wsn2" and spec.betas == (0.05, 0.25) and spec.seeds == (3,)
    assert spec.out_dir == tmp_path / "results" and spec.grid == 64
    with pytest.raises(ConfigError, match="preset"):
        load_experiment_spec("betas: [1]\n")
    with pytest.raises(ConfigError, match="betas"):
        load_experiment_spec("preset: wsn1\n")


def test_spec_with_config_file(tmp_path):
    (tmp_path / "s.yaml").write_text(
        "omega: {vertices: [[0, 0], [1, 0], [1, 1], [0, 1]]}\nn_aps: 2\nn_fcs: 1\n"
        "a: [1, 2]\nb: [1, 1]\nbeta: 0.1\n")
    spec = load_experiment_spec("config: s.yaml\nbetas: [0.1]\n", tmp_path)
    assert spec.base_scenario().n_aps == 2


def test_deployment_csv_round_trip(tmp_path):
    d = Deployment([[0.1, 0.2], [1 / 3, 2 / 3], [5.0, 5.0]], [[1.0, 1.0], [7.0, 7.5]], [1, 0, 1])
    path = tmp_path / "dep.csv"
    write_deployment_csv(d, [0.2, 0.3, 0.5], path)
    back = read_deployment_csv(path)
    np.testing.assert_array_equal(back.p, d.p)
    np.testing.assert_array_equal(back.q, d.q)
    np.testing.assert_array_equal(back.t, d.t)
    rows = read_rows(path)
    assert rows[0]["assigned_fc"] == "2"
    assert [float(r["volume"]) for r in rows[3:]] == [0.3, 0.7]


def test_deployment_csv_rejects_gaps(tmp_path):
    path = tmp_path / "dep.csv"
    path.write_text("kind,index,x,y,assigned_fc,volume\nAP,2,0,0,1,1\nFC,1,0,0,,1\n")
    with pytest.raises(ConfigError):
        read_deployment_csv(path)
