"""Quadrature over implicit cells and the two-tier power/distortion measures.

The density is discretized once per (scenario geometry, integrator) into a
weighted point set whose weights sum to one. Every measure below is a
weighted sum over that set grouped by cell label, so the direct and
parallel-axis forms of the distortion are evaluated on identical data.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import owners
from .model import MIN_RESOLUTION, CellMoments, Deployment, Scenario, inside_polygon

EMPTY_MASS = 1e-12


class Mode(enum.Enum):
    MIDPOINT_GRID = "grid"
    MONTE_CARLO = "mc"


@dataclass(frozen=True)
class Integrator:
    """Midpoint grid with ``resolution`` cells per axis of the bounding box,
    or ``resolution`` seeded uniform samples."""

    mode: Mode = Mode.MIDPOINT_GRID
    resolution: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.resolution < MIN_RESOLUTION:
            raise ValueError(f"integrator resolution must be at least {MIN_RESOLUTION}")


DEFAULT_INTEGRATOR = Integrator()


def grid(resolution: int) -> Integrator:
    return Integrator(Mode.MIDPOINT_GRID, resolution)


@dataclass(frozen=True, eq=False)
class Quadrature:
    points: np.ndarray   # (K, 2)
    weights: np.ndarray  # (K,), sums to 1


@lru_cache(maxsize=16)
def _build_quadrature(omega_key, density, integrator):
    omega = np.array(omega_key)
    lo, hi = omega.min(axis=0), omega.max(axis=0)
    bbox = (lo[0], lo[1], hi[0], hi[1])
    x = omega[:, 0]
    area = 0.5 * abs(np.dot(x, np.roll(omega[:, 1], -1)) - np.dot(np.roll(x, -1), omega[:, 1]))
    res = integrator.resolution
    if integrator.mode is Mode.MIDPOINT_GRID:
        xs = lo[0] + (hi[0] - lo[0]) * (np.arange(res) + 0.5) / res
        ys = lo[1] + (hi[1] - lo[1]) * (np.arange(res) + 0.5) / res
        gx, gy = np.meshgrid(xs, ys)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
    else:
        rng = np.random.default_rng(integrator.seed)
        pts = lo + (hi - lo) * rng.random((res, 2))
    pts = pts[inside_polygon(omega, pts)]
    w = density.evaluate(pts, bbox, area)
    w = w / w.sum()
    pts.setflags(write=False)
    w.setflags(write=False)
    return Quadrature(pts, w)


def quadrature(s: Scenario, g: Integrator = DEFAULT_INTEGRATOR) -> Quadrature:
    key = tuple(map(tuple, s.omega.tolist()))
    return _build_quadrature(key, s.density, g)


def partition(s: Scenario, d: Deployment, g: Integrator = DEFAULT_INTEGRATOR) -> np.ndarray:
    """Owner label of every quadrature point."""
    return owners(s, d, quadrature(s, g).points)


def moments_from_labels(s: Scenario, labels, g: Integrator = DEFAULT_INTEGRATOR) -> CellMoments:
    quad = quadrature(s, g)
    n = s.n_aps
    w, pts = quad.weights, quad.points
    v = np.bincount(labels, weights=w, minlength=n)
    with np.errstate(invalid="ignore", divide="ignore"):
        cx = np.bincount(labels, weights=w * pts[:, 0], minlength=n) / v
        cy = np.bincount(labels, weights=w * pts[:, 1], minlength=n) / v
    c = np.column_stack([cx, cy])
    c[v < EMPTY_MASS] = np.nan
    off = pts - np.nan_to_num(c)[labels]
    inertia = np.bincount(labels, weights=w * np.einsum("ij,ij->i", off, off), minlength=n)
    return CellMoments(v=v, c=c, inertia=inertia)


def cell_moments(s: Scenario, d: Deployment, g: Integrator = DEFAULT_INTEGRATOR) -> CellMoments:
    """Volumes, centroids and central second moments of the generalized Voronoi cells."""
    return moments_from_labels(s, partition(s, d, g), g)


@dataclass(frozen=True)
class PowerReport:
    sensor_power: float
    ap_power: float
    distortion: float
    per_cell: np.ndarray


def power_report(s: Scenario, d: Deployment, labels, g: Integrator = DEFAULT_INTEGRATOR) -> PowerReport:
    """Sensor power, AP power and distortion for a given cell labeling.

    ``labels`` need not be the generalized Voronoi partition; this is the
    route used to evaluate perturbed or baseline partitions.
    """
    quad = quadrature(s, g)
    n = s.n_aps
    diff = quad.points - d.p[labels]
    sq = np.einsum("ij,ij->i", diff, diff)
    sensor = np.bincount(labels, weights=quad.weights * s.a[labels] * sq, minlength=n)
    v = np.bincount(labels, weights=quad.weights, minlength=n)
    gap = d.p - d.q[d.t]
    ap = s.b[np.arange(n), d.t] * np.einsum("ij,ij->i", gap, gap) * v
    per_cell = sensor + s.beta * ap
    sp, apw = float(sensor.sum()), float(ap.sum())
    return PowerReport(sp, apw, sp + s.beta * apw, per_cell)


def distortion(s: Scenario, d: Deployment, g: Integrator = DEFAULT_INTEGRATOR) -> PowerReport:
    """Two-tier distortion on the generalized Voronoi partition of ``d``."""
    return power_report(s, d, partition(s, d, g), g)


def sensor_power(s: Scenario, d: Deployment, g: Integrator = DEFAULT_INTEGRATOR) -> float:
    return distortion(s, d, g).sensor_power


def ap_power(s: Scenario, d: Deployment, g: Integrator = DEFAULT_INTEGRATOR) -> float:
    return distortion(s, d, g).ap_power


def _checked_centroids(m: CellMoments) -> np.ndarray:
    bad = np.isnan(m.c[:, 0]) & (m.v >= EMPTY_MASS)
    if bad.any():
        raise RuntimeError(f"undefined centroid for non-empty cells {np.flatnonzero(bad).tolist()}")
    return np.nan_to_num(m.c)


def distortion_parallel_axis(s: Scenario, d: Deployment, m: CellMoments) -> float:
    """Distortion rebuilt from cell moments via the parallel-axis theorem."""
    c = _checked_centroids(m)
    n = np.arange(s.n_aps)
    off = d.p - c
    gap = d.p - d.q[d.t]
    terms = (s.a * m.inertia
             + s.a * np.einsum("ij,ij->i", off, off) * m.v
             + s.beta * s.b[n, d.t] * np.einsum("ij,ij->i", gap, gap) * m.v)
    return float(terms.sum())


def gradients(s: Scenario, d: Deployment, m: CellMoments):
    """Partial derivatives of the distortion in p (N, 2) and q (M, 2) at fixed cells."""
    c = _checked_centroids(m)
    n = np.arange(s.n_aps)
    bw = s.beta * s.b[n, d.t]
    grad_p = 2 * (s.a[:, None] * (d.p - c) + bw[:, None] * (d.p - d.q[d.t])) * m.v[:, None]
    grad_q = np.zeros_like(d.q)
    np.add.at(grad_q, d.t, 2 * (bw[:, None] * (d.q[d.t] - d.p)) * m.v[:, None])
    return grad_p, grad_q


def gradient_residual(s: Scenario, d: Deployment, m: CellMoments):
    """Norms of the stationarity residuals: (per-AP, per-FC)."""
    grad_p, grad_q = gradients(s, d, m)
    return np.linalg.norm(grad_p, axis=1), np.linalg.norm(grad_q, axis=1)
