"""Seeded multi-run experiments, beta sweeps and their CSV records.

CSV files use ``.`` as decimal separator and Python's shortest round-trip
float repr, so identical runs give identical bytes. AP/FC indices are
1-based in every file.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
import yaml

from .baselines import LABEL as BASELINE_LABEL
from .baselines import nearest_fc_lloyd
from .integrate import grid
from .model import ConfigError, Deployment, Scenario, ScenarioError, load_preset
from .optimizer import HttlConfig, RunTrace, httl_run

ALGORITHMS = {"httl": httl_run, "nearest_fc_lloyd": nearest_fc_lloyd}
LABELS = {"httl": "httl", "nearest_fc_lloyd": BASELINE_LABEL}
TRACE_FIELDS = ["iter", "distortion", "sensor_power", "ap_power", "max_ap_res", "max_fc_res"]
DEPLOYMENT_FIELDS = ["kind", "index", "x", "y", "assigned_fc", "volume"]
SUMMARY_FIELDS = ["algorithm", "beta", "seed", "final_distortion", "iters", "converged"]


def fmt(x) -> str:
    return repr(float(x))


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue())


def write_trace_csv(trace: RunTrace, path):
    rows = [[r.iteration, fmt(r.distortion), fmt(r.sensor_power), fmt(r.ap_power),
             fmt(r.max_ap_res), fmt(r.max_fc_res)] for r in trace.iterations]
    _write_csv(path, TRACE_FIELDS, rows)


def write_deployment_csv(d: Deployment, v, path):
    """One row per AP then per FC; an FC's volume is the mass of its APs' cells."""
    v = np.asarray(v, dtype=float)
    rows = [["AP", n + 1, fmt(x), fmt(y), int(d.t[n]) + 1, fmt(v[n])]
            for n, (x, y) in enumerate(d.p)]
    fc_mass = np.bincount(d.t, weights=v, minlength=len(d.q))
    rows += [["FC", m + 1, fmt(x), fmt(y), "", fmt(fc_mass[m])]
             for m, (x, y) in enumerate(d.q)]
    _write_csv(path, DEPLOYMENT_FIELDS, rows)


def read_deployment_csv(path) -> Deployment:
    aps, fcs = {}, {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            idx = int(row["index"]) - 1
            pt = (float(row["x"]), float(row["y"]))
            if row["kind"] == "AP":
                aps[idx] = (pt, int(row["assigned_fc"]) - 1)
            elif row["kind"] == "FC":
                fcs[idx] = pt
            else:
                raise ConfigError(f"{path}: unknown row kind {row['kind']!r}")
    if sorted(aps) != list(range(len(aps))) or sorted(fcs) != list(range(len(fcs))):
        raise ConfigError(f"{path}: AP/FC indices must run 1..N and 1..M")
    return Deployment(p=[aps[n][0] for n in range(len(aps))],
                      q=[fcs[m] for m in range(len(fcs))],
                      t=[aps[n][1] for n in range(len(aps))])


# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSpec:
    """What to run: a scenario (or preset name) over betas, seeds and algorithms."""

    scenario: Union[Scenario, str]
    betas: tuple
    seeds: tuple = tuple(range(1, 11))
    algorithms: tuple = ("httl",)
    out_dir: Path = None
    epsilon: float = 1e-5
    max_iters: int = 100
    grid: int = 512

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "seeds", tuple(int(x) for x in self.seeds))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not self.betas:
            raise ScenarioError("betas must not be empty")
        if not self.seeds:
            raise ScenarioError("seeds must not be empty")
        if not self.algorithms:
            raise ScenarioError("algorithms must not be empty")
        if any(b < 0 for b in self.betas):
            raise ScenarioError("betas must be nonnegative")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ScenarioError(f"unknown algorithms {unknown}; choose from {sorted(ALGORITHMS)}")
        if isinstance(self.scenario, str):
            load_preset(self.scenario)  # fail early on a bad preset name

    def base_scenario(self) -> Scenario:
        if isinstance(self.scenario, str):
            return load_preset(self.scenario)[0]
        return self.scenario

    def config(self, seed: int) -> HttlConfig:
        return HttlConfig(epsilon=self.epsilon, max_iters=self.max_iters, seed=seed,
                          integrator=grid(self.grid))


def load_experiment_spec(text: str, base_dir: Path = Path(".")) -> ExperimentSpec:
    """Build a spec from YAML with keys preset|config, betas, seeds, algorithms, out,
    epsilon, max_iters, grid."""
    from .model import parse_scenario

    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"experiment spec is not valid YAML: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("experiment spec must be a mapping")
    if "preset" in cfg:
        scenario = str(cfg["preset"])
    elif "config" in cfg:
        scenario = parse_scenario((base_dir / cfg["config"]).read_text())
    else:
        raise ConfigError("experiment spec needs 'preset' or 'config'")
    if "betas" not in cfg:
        raise ConfigError("betas: missing")
    out = cfg.get("out")
    return ExperimentSpec(
        scenario=scenario, betas=tuple(cfg["betas"] or ()),
        seeds=tuple(cfg.get("seeds", range(1, 11))),
        algorithms=tuple(cfg.get("algorithms", ("httl",))),
        out_dir=None if out is None else base_dir / out,
        epsilon=float(cfg.get("epsilon", 1e-5)), max_iters=int(cfg.get("max_iters", 100)),
        grid=int(cfg.get("grid", 512)))


@dataclass(frozen=True)
class RunResult:
    algorithm: str
    beta: float
    seed: int
    trace: RunTrace = field(repr=False)

    @property
    def final_distortion(self) -> float:
        return self.trace.final_distortion


def _stem(algorithm, beta, seed):
    return f"{algorithm}_beta{fmt(beta)}_seed{seed}"


def summary_rows(results) -> list:
    """Per-run rows followed by one ``seed=mean`` row per (algorithm, beta)."""
    rows = [[r.algorithm, fmt(r.beta), r.seed, fmt(r.final_distortion),
             r.trace.n_iters, str(r.trace.converged).lower()] for r in results]
    for alg, beta, mean in group_means(results):
        rows.append([alg, fmt(beta), "mean", fmt(mean), "", ""])
    return rows


def group_means(results):
    groups = {}
    for r in results:
        groups.setdefault((r.algorithm, r.beta), []).append(r.final_distortion)
    return [(alg, beta, float(np.mean(vals))) for (alg, beta), vals in groups.items()]


def run_experiment(spec: ExperimentSpec) -> list:
    """Run every (algorithm, beta, seed) cell; write traces and ``summary.csv`` if ``out_dir``."""
    base = spec.base_scenario()
    results = []
    for alg in spec.algorithms:
        for beta in spec.betas:
            s = base.replace(beta=beta)
            for seed in spec.seeds:
                trace = ALGORITHMS[alg](s, spec.config(seed))
                results.append(RunResult(alg, beta, seed, trace))
    if spec.out_dir is not None:
        out = Path(spec.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            write_trace_csv(r.trace, out / f"trace_{_stem(r.algorithm, r.beta, r.seed)}.csv")
            write_deployment_csv(r.trace.final, r.trace.moments.v,
                                 out / f"deployment_{_stem(r.algorithm, r.beta, r.seed)}.csv")
        _write_csv(out / "summary.csv", SUMMARY_FIELDS, summary_rows(results))
        manifest = {"scenario": base.name or "custom", "betas": list(spec.betas),
                    "seeds": list(spec.seeds), "epsilon": spec.epsilon,
                    "max_iters": spec.max_iters, "grid": spec.grid,
                    "algorithms": {a: LABELS[a] for a in spec.algorithms}}
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return results


def sweep_beta(spec: ExperimentSpec):
    """Run each beta as its own experiment and tabulate mean final distortion.

    Returns ``(rows, results)`` with rows ``(beta, algorithm, mean)``; writes
    ``sweep.csv`` plus one sub-directory per beta when ``out_dir`` is set.
    """
    rows, results = [], []
    for beta in spec.betas:
        sub = None if spec.out_dir is None else Path(spec.out_dir) / f"beta_{fmt(beta)}"
        part = run_experiment(ExperimentSpec(spec.scenario, (beta,), spec.seeds, spec.algorithms,
                                             sub, spec.epsilon, spec.max_iters, spec.grid))
        results += part
        rows += [(b, alg, mean) for alg, b, mean in group_means(part)]
    if spec.out_dir is not None:
        _write_csv(Path(spec.out_dir) / "sweep.csv", ["beta", "algorithm", "mean_final_distortion"],
                   [[fmt(b), alg, fmt(mean)] for b, alg, mean in rows])
    return rows, results
