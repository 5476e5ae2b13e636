"""Simplified comparison baselines.

These are stand-ins, not reproductions of the published MER, agglomerative
or divisive clustering methods: routing and clustering trees are omitted.
Outputs are labeled "baseline (simplified)".
"""
from __future__ import annotations

import time

import numpy as np

from .geometry import _argmin_cost
from .integrate import (DEFAULT_INTEGRATOR, Integrator, gradient_residual,
                        moments_from_labels, power_report, quadrature)
from .model import Deployment, Scenario
from .optimizer import (HttlConfig, Init, IterationRecord, RunTrace, StopReason,
                        random_deployment)

LABEL = "baseline (simplified)"


def _argmin_weighted(pts, sites, weights):
    """Index of the site minimizing ``weights[n] * |site_n - pt|^2``, ties to the smaller index."""
    return _argmin_cost(np.ascontiguousarray(sites[:, 0]), np.ascontiguousarray(sites[:, 1]),
                        np.ascontiguousarray(weights, dtype=float), np.zeros(len(sites)),
                        np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]))


def mw_voronoi_partition_baseline(s: Scenario, d: Deployment,
                                  g: Integrator = DEFAULT_INTEGRATOR) -> np.ndarray:
    """Quadrature labels under ``argmin_n a_n |p_n - w|^2`` (no additive link term)."""
    return _argmin_weighted(quadrature(s, g).points, d.p, s.a)


def nearest_fc_lloyd(s: Scenario, cfg: HttlConfig = HttlConfig(), init: Deployment = None) -> RunTrace:
    """Weight-blind two-tier Lloyd.

    APs take unweighted nearest-AP cells and move to the cell centroid, each
    AP connects to its nearest FC, and each FC moves to the plain mean of its
    APs (an FC without APs stays put). Iteration stops on the relative drop
    of the unweighted sensor distortion. Records hold the two-tier distortion
    of the deployment operated as built, i.e. with these cells and links.
    """
    g = cfg.integrator
    quad = quadrature(s, g)
    d = init if cfg.init is Init.PROVIDED else random_deployment(s, np.random.default_rng(cfg.seed))
    if d is None:
        raise ValueError("init deployment required when cfg.init is PROVIDED")
    ones_n, ones_m = np.ones(s.n_aps), np.ones(s.n_fcs)

    def settle(d):
        t = _argmin_weighted(d.p, d.q, ones_m)
        labels = _argmin_weighted(quad.points, d.p, ones_n)
        d = d.replace(t=t)
        m = moments_from_labels(s, labels, g)
        off = quad.points - d.p[labels]
        own = float(np.sum(quad.weights * np.einsum("ij,ij->i", off, off)))
        return d, labels, m, own

    def record(k, d, labels, m, seconds):
        rep = power_report(s, d, labels, g)
        ap_res, fc_res = gradient_residual(s, d, m)
        return IterationRecord(k, rep.distortion, rep.sensor_power, rep.ap_power,
                               float(ap_res.max()), float(fc_res.max()), seconds)

    d, labels, m, own = settle(d)
    records = [record(0, d, labels, m, 0.0)]
    converged = False
    for k in range(1, cfg.max_iters + 1):
        t0 = time.perf_counter()
        p = np.where(np.isnan(m.c), d.p, m.c)
        q = d.q.copy()
        counts = np.bincount(d.t, minlength=s.n_fcs)
        sums = np.zeros_like(q)
        np.add.at(sums, d.t, p)
        live = counts > 0
        q[live] = sums[live] / counts[live, None]
        own_old = own
        d, labels, m, own = settle(Deployment(p, q, d.t))
        records.append(record(k, d, labels, m, time.perf_counter() - t0))
        if own_old <= 0 or (own_old - own) / own_old < cfg.epsilon:
            converged = True
            break
    reason = StopReason.RELATIVE_DROP if converged else StopReason.MAX_ITERS
    return RunTrace(records, d, m, converged, reason, algorithm="nearest_fc_lloyd")
