"""Exhaustive search for optimal deployments on a line segment.

Instances are thin strips ``[x0, x0 + L] x [y0, y0 + h]`` with uniform
density, treated as the segment they approximate. AP and FC positions range
over the grid ``x0 + L * {0, step, 2 step, ..., 1}`` on the strip axis.

For fixed AP positions and index map, an FC outside the span of its own
APs is beaten by the nearest span endpoint (every link gets shorter and the
distortion is monotone in each link cost), an FC with one AP is best placed
on it, and an FC with none is irrelevant. The search therefore enumerates
every AP tuple and every index map, and FC positions only within those spans.
The result is the exact minimum over the position grid.

Cell integrals are exact: on the segment each AP's cost is a parabola in w
and the distortion is the integral of their lower envelope.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .integrate import DEFAULT_INTEGRATOR, Integrator, cell_moments, distortion
from .model import Deployment, Density, Scenario

MAX_APS = 3
MAX_FCS = 2
MIN_STEP = 0.005
MAX_EVALUATIONS = 2e10


class OracleRefusal(ValueError):
    """Instance is outside the brute-force envelope."""


@dataclass(frozen=True)
class BruteForceResult:
    best: Deployment
    distortion: float
    grid_step: float
    evaluations: int
    volumes: np.ndarray
    fc_volumes: np.ndarray


def strip_scenario(a, b, beta, length=1.0, height=1e-3) -> Scenario:
    """Segment ``[0, length]`` embedded as a thin rectangle with uniform density."""
    omega = [[0.0, 0.0], [length, 0.0], [length, height], [0.0, height]]
    return Scenario(omega=omega, a=a, b=np.asarray(b, dtype=float).reshape(len(a), -1),
                    beta=beta, density=Density())


@numba.njit(cache=True)
def _envelope(a, x, k, vol, pts):
    """Integral over [0, 1] of min_n a_n (w - x_n)^2 + k_n; per-AP mass goes to ``vol``.

    ``pts`` is scratch space of length at least ``2 + n (n - 1)``.
    """
    n = len(a)
    pts[0] = 0.0
    pts[1] = 1.0
    npts = 2
    for i in range(n):
        for j in range(i + 1, n):
            qa = a[i] - a[j]
            qb = -2.0 * (a[i] * x[i] - a[j] * x[j])
            qc = a[i] * x[i] * x[i] - a[j] * x[j] * x[j] + k[i] - k[j]
            if qa == 0.0:
                if qb != 0.0:
                    r = -qc / qb
                    if 0.0 < r < 1.0:
                        pts[npts] = r
                        npts += 1
            else:
                disc = qb * qb - 4.0 * qa * qc
                if disc >= 0.0:
                    sq = np.sqrt(disc)
                    for r in ((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)):
                        if 0.0 < r < 1.0:
                            pts[npts] = r
                            npts += 1
    # insertion sort: a handful of breakpoints
    for s in range(1, npts):
        r = pts[s]
        j = s - 1
        while j >= 0 and pts[j] > r:
            pts[j + 1] = pts[j]
            j -= 1
        pts[j + 1] = r
    for i in range(n):
        vol[i] = 0.0
    total = 0.0
    for s in range(npts - 1):
        u = pts[s]
        v = pts[s + 1]
        if v <= u:
            continue
        mid = 0.5 * (u + v)
        arg = 0
        best = np.inf
        for i in range(n):
            c = a[i] * (mid - x[i]) ** 2 + k[i]
            if c < best:
                best = c
                arg = i
        xi = x[arg]
        total += a[arg] * ((v - xi) ** 3 - (u - xi) ** 3) / 3.0 + k[arg] * (v - u)
        vol[arg] += v - u
    return total


@numba.njit(cache=True)
def _search(a, b, beta, g):
    n = len(a)
    m = b.shape[1]
    xs = np.linspace(0.0, 1.0, g)
    pidx = np.zeros(n, dtype=np.int64)
    t = np.zeros(n, dtype=np.int64)
    lo = np.zeros(m, dtype=np.int64)
    hi = np.zeros(m, dtype=np.int64)
    qidx = np.zeros(m, dtype=np.int64)
    x = np.empty(n)
    k = np.empty(n)
    vol = np.empty(n)
    scratch = np.empty(2 + n * (n - 1))
    best = np.inf
    best_p = np.zeros(n, dtype=np.int64)
    best_q = np.zeros(m, dtype=np.int64)
    best_t = np.zeros(n, dtype=np.int64)
    evals = 0
    n_p = g ** n
    n_t = m ** n
    for pf in range(n_p):
        rem = pf
        for i in range(n - 1, -1, -1):
            pidx[i] = rem % g
            rem //= g
        for i in range(n):
            x[i] = xs[pidx[i]]
        for tf in range(n_t):
            rem = tf
            for i in range(n - 1, -1, -1):
                t[i] = rem % m
                rem //= m
            for j in range(m):
                lo[j] = g
                hi[j] = -1
            for i in range(n):
                j = t[i]
                lo[j] = min(lo[j], pidx[i])
                hi[j] = max(hi[j], pidx[i])
            for j in range(m):
                if hi[j] < 0:
                    lo[j] = 0
                    hi[j] = 0
                qidx[j] = lo[j]
            while True:
                for i in range(n):
                    dq = x[i] - xs[qidx[t[i]]]
                    k[i] = beta * b[i, t[i]] * dq * dq
                val = _envelope(a, x, k, vol, scratch)
                evals += 1
                if val < best:
                    best = val
                    best_p[:] = pidx
                    best_q[:] = qidx
                    best_t[:] = t
                # odometer over FC positions, last FC fastest
                j = m - 1
                while j >= 0:
                    if qidx[j] < hi[j]:
                        qidx[j] += 1
                        break
                    qidx[j] = lo[j]
                    j -= 1
                if j < 0:
                    break
    return best, best_p, best_q, best_t, evals


def _strip_geometry(s: Scenario):
    omega = s.omega
    lo, hi = omega.min(axis=0), omega.max(axis=0)
    rect = {(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])}
    if len(omega) != 4 or {tuple(v) for v in omega} != rect:
        raise OracleRefusal("brute force needs an axis-aligned rectangular strip")
    length, height = hi - lo
    if height > 1e-2 * length:
        raise OracleRefusal("strip is not thin: height must be at most 1% of its length")
    if s.density.kind != "uniform":
        raise OracleRefusal("brute force supports uniform density only")
    return float(lo[0]), float(lo[1] + height / 2), float(length)


def enumeration_bound(n_aps: int, n_fcs: int, step: float) -> float:
    g = round(1 / step) + 1
    return float(g) ** n_aps * float(n_fcs) ** n_aps * g


def brute_force_1d(s: Scenario, step: float = 0.01) -> BruteForceResult:
    """Globally optimal deployment of a strip scenario over the position grid.

    Ties between candidates go to the first in lexicographic order of
    (AP grid indices, index map, FC grid indices).
    """
    n, m = s.n_aps, s.n_fcs
    bound = enumeration_bound(n, m, step)
    if n > MAX_APS or m > MAX_FCS or step < MIN_STEP or bound > MAX_EVALUATIONS:
        raise OracleRefusal(
            f"instance too large: N={n} (max {MAX_APS}), M={m} (max {MAX_FCS}), "
            f"step={step} (min {MIN_STEP}); about {bound:.3g} candidate evaluations")
    g = round(1 / step) + 1
    if abs((g - 1) * step - 1) > 1e-9:
        raise OracleRefusal(f"step {step} does not divide the unit interval")
    x0, y_mid, length = _strip_geometry(s)
    a = np.ascontiguousarray(s.a)
    b = np.ascontiguousarray(s.b)
    val, bp, bq, bt, evals = _search(a, b, s.beta, g)

    xs = np.linspace(0.0, 1.0, g)
    vol = np.empty(n)
    k = s.beta * s.b[np.arange(n), bt] * (xs[bp] - xs[bq[bt]]) ** 2
    _envelope(a, xs[bp].copy(), k, vol, np.empty(2 + n * (n - 1)))
    best = Deployment(p=np.column_stack([x0 + length * xs[bp], np.full(n, y_mid)]),
                      q=np.column_stack([x0 + length * xs[bq], np.full(m, y_mid)]),
                      t=bt)
    fc_vol = np.bincount(bt, weights=vol, minlength=m)
    return BruteForceResult(best, float(val) * length ** 2, step, int(evals), vol, fc_vol)


@dataclass(frozen=True)
class FcIncrement:
    d_with_m: float
    d_with_m_plus_1: float
    fc_volumes: np.ndarray
    results: tuple


def fc_increment_check(s: Scenario, step: float = 0.01, extra_b=None) -> FcIncrement:
    """Brute-force optima with the scenario's M FCs and with one FC added.

    ``extra_b`` holds the new FC's weights per AP (default: copy of the last
    FC column). ``fc_volumes`` is the mass served by each FC at the larger
    optimum.
    """
    if s.n_fcs >= s.n_aps:
        raise OracleRefusal("adding an FC requires M < N")
    col = s.b[:, -1] if extra_b is None else np.asarray(extra_b, dtype=float)
    bigger = s.replace(b=np.column_stack([s.b, col]))
    r_m = brute_force_1d(s, step)
    r_m1 = brute_force_1d(bigger, step)
    return FcIncrement(r_m.distortion, r_m1.distortion, r_m1.fc_volumes, (r_m, r_m1))


def grid_check(s: Scenario, result: BruteForceResult, g: Integrator = DEFAULT_INTEGRATOR):
    """Distortion and cell volumes of the brute-force optimum under the 2-D quadrature."""
    return distortion(s, result.best, g).distortion, cell_moments(s, result.best, g).v
