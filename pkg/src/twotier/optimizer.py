"""Heterogeneous two-tier Lloyd (HTTL) iteration.

Each pass updates, in order, the AP-to-FC index map, the generalized Voronoi
partition with its cell moments, the FC positions and the AP positions.
None of the four updates can raise the distortion, so the recorded sequence
is non-increasing up to quadrature round-off.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass

import numpy as np

from .geometry import point_segment_distance
from .integrate import (DEFAULT_INTEGRATOR, EMPTY_MASS, Integrator, gradient_residual,
                        moments_from_labels, partition, power_report)
from .model import CellMoments, Deployment, Scenario, inside_polygon


class Init(enum.Enum):
    UNIFORM_RANDOM = "uniform"
    PROVIDED = "provided"


class StopReason(enum.Enum):
    RELATIVE_DROP = "relative-drop"
    MAX_ITERS = "max-iters"


@dataclass(frozen=True)
class HttlConfig:
    epsilon: float = 1e-5
    max_iters: int = 100
    seed: int = 1
    init: Init = Init.UNIFORM_RANDOM
    integrator: Integrator = DEFAULT_INTEGRATOR

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    distortion: float
    sensor_power: float
    ap_power: float
    max_ap_res: float
    max_fc_res: float
    seconds: float = 0.0


@dataclass
class RunTrace:
    iterations: list
    final: Deployment
    moments: CellMoments
    converged: bool
    stop_reason: StopReason
    algorithm: str = "httl"

    @property
    def distortions(self) -> np.ndarray:
        return np.array([r.distortion for r in self.iterations])

    @property
    def final_distortion(self) -> float:
        return self.iterations[-1].distortion

    @property
    def n_iters(self) -> int:
        return len(self.iterations) - 1


# --------------------------------------------------------------------------
# the four steps

def update_index_map(s: Scenario, d: Deployment) -> np.ndarray:
    """Connect each AP to the FC with the smallest weighted squared distance."""
    diff = d.p[:, None, :] - d.q[None, :, :]
    cost = s.b * np.einsum("nmk,nmk->nm", diff, diff)
    return np.argmin(cost, axis=1)


def update_fc_positions(s: Scenario, d: Deployment, m: CellMoments) -> np.ndarray:
    """Move each FC to the ``b * v``-weighted mean of its APs.

    An FC whose APs carry no mass keeps its position.
    """
    w = s.b[np.arange(s.n_aps), d.t] * m.v
    num = np.zeros_like(d.q)
    np.add.at(num, d.t, w[:, None] * d.p)
    den = np.bincount(d.t, weights=w, minlength=s.n_fcs)
    q = d.q.copy()
    live = den > 0
    q[live] = num[live] / den[live, None]
    return q


def update_ap_positions(s: Scenario, d: Deployment, m: CellMoments) -> np.ndarray:
    """Place each AP on the segment from its cell centroid to its FC.

    The split is ``a_n : beta * b_{n,T(n)}``; an AP with an empty cell moves
    onto its FC.
    """
    bw = s.beta * s.b[np.arange(s.n_aps), d.t]
    fc = d.q[d.t]
    p = (s.a[:, None] * np.nan_to_num(m.c) + bw[:, None] * fc) / (s.a + bw)[:, None]
    empty = m.v < EMPTY_MASS
    p[empty] = fc[empty]
    return p


# --------------------------------------------------------------------------

def random_deployment(s: Scenario, rng: np.random.Generator) -> Deployment:
    """Uniform positions on the target area (rejection from its bounding box)."""
    xmin, ymin, xmax, ymax = s.bbox
    lo, hi = np.array([xmin, ymin]), np.array([xmax, ymax])

    def draw(k):
        out = np.empty((0, 2))
        while len(out) < k:
            pts = lo + (hi - lo) * rng.random((k, 2))
            out = np.vstack([out, pts[inside_polygon(s.omega, pts)]])
        return out[:k]

    p = draw(s.n_aps)
    q = draw(s.n_fcs)
    d = Deployment(p, q, np.zeros(s.n_aps, dtype=int))
    return d.replace(t=update_index_map(s, d))


@dataclass
class _Pass:
    d: Deployment
    labels: np.ndarray
    moments: CellMoments


def _partition_step(s, d, g):
    """Steps (i) and (ii): optimal index map, then the generalized Voronoi cells."""
    d = d.replace(t=update_index_map(s, d))
    labels = partition(s, d, g)
    return _Pass(d, labels, moments_from_labels(s, labels, g))


def _record(s, state, g, k, seconds):
    rep = power_report(s, state.d, state.labels, g)
    ap_res, fc_res = gradient_residual(s, state.d, state.moments)
    return IterationRecord(k, rep.distortion, rep.sensor_power, rep.ap_power,
                           float(ap_res.max()), float(fc_res.max()), seconds)


def httl_run(s: Scenario, cfg: HttlConfig = HttlConfig(), init: Deployment = None) -> RunTrace:
    """Run HTTL from ``init`` or a seeded uniform draw.

    Distortions are evaluated on the partition built in the same pass, after
    the FC and AP moves, and the returned moments belong to that partition.
    Record 0 is the starting deployment with its optimal index map and cells.
    """
    g = cfg.integrator
    if cfg.init is Init.PROVIDED:
        if init is None:
            raise ValueError("init deployment required when cfg.init is PROVIDED")
        d = init
    else:
        d = random_deployment(s, np.random.default_rng(cfg.seed))

    state = _partition_step(s, d, g)
    records = [_record(s, state, g, 0, 0.0)]
    converged = False
    for k in range(1, cfg.max_iters + 1):
        t0 = time.perf_counter()
        d_old = records[-1].distortion
        state = _partition_step(s, state.d, g)
        d = state.d.replace(q=update_fc_positions(s, state.d, state.moments))
        d = d.replace(p=update_ap_positions(s, d, state.moments))
        state = _Pass(d, state.labels, state.moments)
        records.append(_record(s, state, g, k, time.perf_counter() - t0))
        d_new = records[-1].distortion
        if d_old <= 0 or (d_old - d_new) / d_old < cfg.epsilon:
            converged = True
            break
    reason = StopReason.RELATIVE_DROP if converged else StopReason.MAX_ITERS
    return RunTrace(records, state.d, state.moments, converged, reason)


def step_monotonicity_probe(s: Scenario, d: Deployment, g: Integrator = DEFAULT_INTEGRATOR):
    """Distortion change caused by each of the four HTTL steps applied to ``d``.

    The index map is updated with the partition of ``d`` held fixed, then the
    partition is refreshed, then FCs and APs move with that partition held
    fixed. Returns ``(deltas, details)``; each delta should be <= 0.
    """
    labels = partition(s, d, g)
    d0 = power_report(s, d, labels, g).distortion
    d1_dep = d.replace(t=update_index_map(s, d))
    d1 = power_report(s, d1_dep, labels, g).distortion
    labels = partition(s, d1_dep, g)
    m = moments_from_labels(s, labels, g)
    d2 = power_report(s, d1_dep, labels, g).distortion
    d3_dep = d1_dep.replace(q=update_fc_positions(s, d1_dep, m))
    d3 = power_report(s, d3_dep, labels, g).distortion
    d4_dep = d3_dep.replace(p=update_ap_positions(s, d3_dep, m))
    d4 = power_report(s, d4_dep, labels, g).distortion

    # closed-form decreases of the two move steps at fixed cells
    n = np.arange(s.n_aps)
    w = s.b[n, d1_dep.t] * m.v
    mass = np.bincount(d1_dep.t, weights=w, minlength=s.n_fcs)
    shift_q = d1_dep.q - d3_dep.q
    fc_identity = -s.beta * float(np.sum(mass * np.einsum("ij,ij->i", shift_q, shift_q)))
    shift_p = d3_dep.p - d4_dep.p
    ap_identity = -float(np.sum((s.a + s.beta * s.b[n, d1_dep.t]) * m.v
                                * np.einsum("ij,ij->i", shift_p, shift_p)))
    deltas = np.array([d1 - d0, d2 - d1, d3 - d2, d4 - d3])
    details = {"distortions": np.array([d0, d1, d2, d3, d4]),
               "fc_identity": fc_identity, "ap_identity": ap_identity,
               "deployment": d4_dep}
    return deltas, details


def collinearity_gaps(s: Scenario, d: Deployment, m: CellMoments) -> np.ndarray:
    """Distance of each AP from the segment joining its centroid and its FC (0 for empty cells)."""
    out = np.zeros(s.n_aps)
    for n in range(s.n_aps):
        if m.v[n] >= EMPTY_MASS:
            out[n] = point_segment_distance(d.p[n], m.c[n], d.q[d.t[n]])
    return out
