"""Generalized Voronoi geometry.

A point w belongs to the cell of the AP minimizing

    a_n |p_n - w|^2 + beta * b_{n,T(n)} |p_n - q_{T(n)}|^2

with ties going to the smaller index. Cells are never built explicitly; they
can be non-convex or disconnected, so everything downstream works from the
membership predicate evaluated on sample points.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np

from .model import Deployment, Scenario, inside_polygon


def link_cost(s: Scenario, d: Deployment) -> np.ndarray:
    """Additive AP-tier term ``beta * b_{n,T(n)} |p_n - q_{T(n)}|^2`` per AP."""
    n = np.arange(s.n_aps)
    gap = d.p - d.q[d.t]
    return s.beta * s.b[n, d.t] * np.einsum("ij,ij->i", gap, gap)


def cost_matrix(s: Scenario, d: Deployment, pts) -> np.ndarray:
    """Cell costs of every AP at every point, shape (N, K)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    k = link_cost(s, d)
    dx = pts[None, :, 0] - d.p[:, 0, None]
    dy = pts[None, :, 1] - d.p[:, 1, None]
    return s.a[:, None] * (dx * dx + dy * dy) + k[:, None]


def cell_cost(n: int, w, s: Scenario, d: Deployment):
    """Cost of serving point(s) ``w`` from AP ``n``."""
    if not 0 <= n < s.n_aps:
        raise IndexError(f"AP index {n} out of range")
    w = np.asarray(w, dtype=float)
    m = d.t[n]
    gap = d.p[n] - d.q[m]
    diff = w - d.p[n]
    out = s.a[n] * np.sum(diff * diff, axis=-1) + s.beta * s.b[n, m] * float(gap @ gap)
    return float(out) if np.ndim(out) == 0 else out


@numba.njit(cache=True)
def _argmin_cost(px, py, a, k, wx, wy):
    out = np.empty(len(wx), dtype=np.int64)
    for j in range(len(wx)):
        best = np.inf
        arg = 0
        for n in range(len(a)):
            dx = wx[j] - px[n]
            dy = wy[j] - py[n]
            c = a[n] * (dx * dx + dy * dy) + k[n]
            # strict comparison keeps the smaller index on ties
            if c < best:
                best = c
                arg = n
        out[j] = arg
    return out


def owners(s: Scenario, d: Deployment, pts) -> np.ndarray:
    """Owning AP of each point, ties to the smaller index."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return _argmin_cost(np.ascontiguousarray(d.p[:, 0]), np.ascontiguousarray(d.p[:, 1]),
                        np.ascontiguousarray(s.a), link_cost(s, d),
                        np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]))


def owner(w, s: Scenario, d: Deployment) -> int:
    return int(owners(s, d, np.asarray(w, dtype=float).reshape(1, 2))[0])


# --------------------------------------------------------------------------
# pairwise regions

class RegionKind(enum.Enum):
    HALF_SPACE = "half-space"
    DISK = "disk"
    DISK_COMPLEMENT = "disk-complement"
    EMPTY = "empty"
    WHOLE_PLANE = "whole-plane"


@dataclass(frozen=True)
class PairwiseRegion:
    """Set of points where AP i does at least as well as AP j.

    HALF_SPACE is ``{w : A.w + B <= 0}``; DISK and DISK_COMPLEMENT are the
    closed disk of ``radius`` about ``center`` and its complement.
    """

    kind: RegionKind
    A: np.ndarray = None
    B: float = None
    center: np.ndarray = None
    radius: float = None
    L: float = None

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind is RegionKind.HALF_SPACE:
            return pts @ self.A + self.B <= 0
        if self.kind is RegionKind.EMPTY:
            return np.zeros(len(pts), dtype=bool)
        if self.kind is RegionKind.WHOLE_PLANE:
            return np.ones(len(pts), dtype=bool)
        r2 = np.sum((pts - self.center) ** 2, axis=1)
        if self.kind is RegionKind.DISK:
            return r2 <= self.L
        return r2 >= self.L


def pairwise_region(i: int, j: int, s: Scenario, d: Deployment) -> PairwiseRegion:
    """Classify the region where AP ``i`` beats AP ``j``.

    Equal ``a`` gives a half-space. Otherwise the region is a disk (a_i > a_j)
    or a disk complement (a_i < a_j) about ``c_ij = (a_i p_i - a_j p_j)/(a_i - a_j)``
    with squared radius ``L_ij``; a negative ``L_ij`` collapses it to the
    empty set or the whole plane respectively.
    """
    if i == j:
        raise ValueError("pairwise region needs two distinct APs")
    a_i, a_j = float(s.a[i]), float(s.a[j])
    p_i, p_j = d.p[i], d.p[j]
    k = link_cost(s, d)
    if a_i == a_j:
        A = a_j * p_j - a_i * p_i
        B = 0.5 * (a_i * p_i @ p_i - a_j * p_j @ p_j + k[i] - k[j])
        return PairwiseRegion(RegionKind.HALF_SPACE, A=A, B=float(B))
    da = a_i - a_j
    center = (a_i * p_i - a_j * p_j) / da
    gap = p_i - p_j
    L = a_i * a_j * float(gap @ gap) / da ** 2 - (k[i] - k[j]) / da
    radius = float(np.sqrt(L)) if L >= 0 else 0.0
    if da > 0:
        kind = RegionKind.DISK if L >= 0 else RegionKind.EMPTY
    else:
        kind = RegionKind.DISK_COMPLEMENT if L >= 0 else RegionKind.WHOLE_PLANE
    return PairwiseRegion(kind, center=center, radius=radius, L=float(L))


def cell_membership(k: int, s: Scenario, d: Deployment, pts) -> np.ndarray:
    """Membership of points in the cell of AP ``k`` built from pairwise regions."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    mask = inside_polygon(s.omega, pts)
    for i in range(s.n_aps):
        if i != k:
            mask &= pairwise_region(k, i, s, d).contains(pts)
    return mask


def membership_agreement(s: Scenario, d: Deployment, samples) -> float:
    """Fraction of samples whose pairwise-region membership matches :func:`owners`.

    A sample agrees when it lies in exactly one pairwise-built cell and that
    cell is its owner. Disagreement can only happen on cell boundaries.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.size == 0:
        raise ValueError("empty sample set")
    direct = owners(s, d, samples)
    member = np.stack([cell_membership(k, s, d, samples) for k in range(s.n_aps)])
    hits = member.sum(axis=0)
    agree = (hits == 1) & member[direct, np.arange(len(samples))]
    return float(agree.mean())


def point_segment_distance(pt, a, b) -> float:
    pt, a, b = (np.asarray(x, dtype=float) for x in (pt, a, b))
    ab = b - a
    denom = float(ab @ ab)
    u = 0.0 if denom == 0 else min(1.0, max(0.0, float((pt - a) @ ab) / denom))
    return float(np.linalg.norm(pt - (a + u * ab)))
