"""Command line front end.

Exit codes: 0 success, 1 validation error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .baselines import LABEL as BASELINE_LABEL
from .baselines import nearest_fc_lloyd
from .geometry import membership_agreement
from .integrate import cell_moments, grid
from .model import (ConfigError, RunSettings, ScenarioError, load_preset, parse_config)
from .optimizer import HttlConfig, httl_run, random_deployment
from .oracle import OracleRefusal, brute_force_1d, fc_increment_check, strip_scenario
from .render import emit_deployment_svg

log = logging.getLogger("twotier")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _scenario_args(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=("wsn1", "wsn2"))
    src.add_argument("--config", type=Path, help="scenario YAML file")
    p.add_argument("--beta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--grid", type=int, help="midpoint grid cells per axis")
    p.add_argument("--out", type=Path, default=Path("."))


def _load(args):
    if args.config is not None:
        s, settings = parse_config(args.config.read_text())
    else:
        s, settings = load_preset(args.preset or "wsn1")
    if args.beta is not None:
        s = s.replace(beta=args.beta)
    settings = RunSettings(
        seed=settings.seed if args.seed is None else args.seed,
        epsilon=settings.epsilon if args.epsilon is None else args.epsilon,
        max_iters=settings.max_iters if args.max_iters is None else args.max_iters,
        grid=settings.grid if args.grid is None else args.grid)
    return s, settings


def _config(settings):
    return HttlConfig(epsilon=settings.epsilon, max_iters=settings.max_iters,
                      seed=settings.seed, integrator=grid(settings.grid))


def _emit_run(trace, args, stem, label):
    args.out.mkdir(parents=True, exist_ok=True)
    ex.write_trace_csv(trace, args.out / f"trace_{stem}.csv")
    ex.write_deployment_csv(trace.final, trace.moments.v, args.out / f"deployment_{stem}.csv")
    print(f"{label}: final distortion {trace.final_distortion:.6g} after {trace.n_iters} "
          f"iterations ({'converged' if trace.converged else 'iteration cap'})")


def cmd_run(args):
    s, settings = _load(args)
    trace = httl_run(s, _config(settings))
    _emit_run(trace, args, "httl", "httl")


def cmd_baseline(args):
    s, settings = _load(args)
    trace = nearest_fc_lloyd(s, _config(settings))
    _emit_run(trace, args, "nearest_fc_lloyd", BASELINE_LABEL)


def cmd_experiment(args):
    spec = ex.load_experiment_spec(args.spec.read_text(), args.spec.parent)
    if spec.out_dir is None:
        spec = ex.ExperimentSpec(spec.scenario, spec.betas, spec.seeds, spec.algorithms, args.out,
                                 spec.epsilon, spec.max_iters, spec.grid)
    results = ex.run_experiment(spec)
    for alg, beta, mean in ex.group_means(results):
        print(f"{ex.LABELS[alg]} beta={beta:g}: mean final distortion {mean:.6g}")


def cmd_sweep(args):
    s, settings = _load(args)
    spec = ex.ExperimentSpec(s, tuple(args.betas), tuple(args.seeds),
                             tuple(args.algorithms.split(",")), args.out,
                             settings.epsilon, settings.max_iters, settings.grid)
    rows, _ = ex.sweep_beta(spec)
    print("beta,algorithm,mean_final_distortion")
    for beta, alg, mean in rows:
        print(f"{ex.fmt(beta)},{alg},{ex.fmt(mean)}")


def cmd_oracle(args):
    if args.config is not None:
        s, _ = parse_config(args.config.read_text())
    else:
        n = len(args.a)
        if len(args.b) % n:
            raise ScenarioError("b must hold N*M entries (row-major)")
        s = strip_scenario(args.a, np.reshape(args.b, (n, -1)), args.beta)
    args.out.mkdir(parents=True, exist_ok=True)
    if args.add_fc:
        inc = fc_increment_check(s, args.step)
        rows = [["M", ex.fmt(inc.d_with_m)], ["M+1", ex.fmt(inc.d_with_m_plus_1)]]
        ex._write_csv(args.out / "oracle_increment.csv", ["fcs", "distortion"], rows)
        print(f"M FCs: {inc.d_with_m:.6g}  M+1 FCs: {inc.d_with_m_plus_1:.6g}  "
              f"FC volumes at M+1: {', '.join(f'{v:.4g}' for v in inc.fc_volumes)}")
        return
    r = brute_force_1d(s, args.step)
    ex._write_csv(args.out / "oracle_summary.csv", ["distortion", "grid_step", "evaluations"],
                  [[ex.fmt(r.distortion), ex.fmt(r.grid_step), r.evaluations]])
    ex.write_deployment_csv(r.best, r.volumes, args.out / "oracle_deployment.csv")
    print(f"optimum distortion {r.distortion:.6g} over {r.evaluations} candidates")


def cmd_selftest(args):
    s, settings = _load(args)
    rng = np.random.default_rng(settings.seed)
    worst = 1.0
    for k in range(args.deployments):
        d = random_deployment(s, rng)
        xmin, ymin, xmax, ymax = s.bbox
        pts = np.column_stack([rng.uniform(xmin, xmax, args.samples),
                               rng.uniform(ymin, ymax, args.samples)])
        frac = membership_agreement(s, d, pts)
        worst = min(worst, frac)
        print(f"deployment {k + 1}: membership agreement {frac:.6f}")
    if worst < 0.999:
        print(f"FAIL: worst agreement {worst:.6f} < 0.999")
        raise RuntimeError("membership self-test failed")
    print(f"ok: worst agreement {worst:.6f}")


def cmd_render(args):
    s, settings = _load(args)
    if args.deployment is not None:
        d = ex.read_deployment_csv(args.deployment)
    else:
        d = httl_run(s, _config(settings)).final
    m = cell_moments(s, d, grid(settings.grid))
    args.out.mkdir(parents=True, exist_ok=True)
    path = emit_deployment_svg(s, d, m, args.out / args.name)
    print(f"wrote {path}")


def build_parser():
    parser = argparse.ArgumentParser(prog="twotier", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one HTTL run")
    _scenario_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("baseline", help="one nearest-FC Lloyd run (simplified baseline)")
    _scenario_args(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("experiment", help="run an experiment spec file")
    p.add_argument("spec", type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sweep", help="mean final distortion over a beta sweep")
    _scenario_args(p)
    p.add_argument("--betas", type=_floats, required=True)
    p.add_argument("--seeds", type=_ints, default=list(range(1, 11)))
    p.add_argument("--algorithms", default="httl,nearest_fc_lloyd")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="brute-force optimum of a 1-D strip instance")
    p.add_argument("--config", type=Path)
    p.add_argument("--a", type=_floats, default=[1.0, 100.0])
    p.add_argument("--b", type=_floats, default=[1.0, 100.0], help="row-major N x M")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--add-fc", action="store_true", help="compare M and M+1 FCs")
    p.add_argument("--out", type=Path, default=Path("."))
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("selftest", help="pairwise-region vs direct membership check")
    _scenario_args(p)
    p.add_argument("--deployments", type=int, default=5)
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("render", help="SVG of a deployment")
    _scenario_args(p)
    p.add_argument("--deployment", type=Path, help="deployment CSV; default runs HTTL")
    p.add_argument("--name", default="deployment.svg")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, ScenarioError, OracleRefusal) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
