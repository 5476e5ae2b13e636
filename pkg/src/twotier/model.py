"""Domain types, configuration I/O and physical-layer weight derivation.

Indices are 0-based throughout the Python API. Configuration files, CSV
output and the command line use 1-based AP/FC indices.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

log = logging.getLogger(__name__)

MIN_RESOLUTION = 16


class ConfigError(ValueError):
    """Configuration text does not follow the schema."""


class ScenarioError(ValueError):
    """A scenario or deployment violates a model invariant."""


def _frozen(x, dtype=float):
    arr = np.array(x, dtype=dtype)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------
# polygon helpers

def polygon_area(vertices) -> float:
    """Signed shoelace area; positive for counter-clockwise vertex order."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def is_convex_ccw(vertices) -> bool:
    v = np.asarray(vertices, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    return bool(np.all(cross > 0))


def inside_polygon(vertices, pts) -> np.ndarray:
    """Boolean mask of points lying in a convex CCW polygon (boundary included)."""
    v = np.asarray(vertices, dtype=float)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    mask = np.ones(len(pts), dtype=bool)
    for k in range(len(v)):
        x0, y0 = v[k]
        x1, y1 = v[(k + 1) % len(v)]
        side = (x1 - x0) * (pts[:, 1] - y0) - (y1 - y0) * (pts[:, 0] - x0)
        mask &= side >= 0
    return mask


# --------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class Density:
    """Data-rate density over the target area.

    ``uniform`` is the constant 1/area. ``table`` is piecewise constant on an
    ``nx`` by ``ny`` grid laid over the polygon's bounding box; ``values`` are
    row-major with the first row at the smallest y.
    """

    kind: str = "uniform"
    nx: int = 0
    ny: int = 0
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("uniform", "table"):
            raise ConfigError(f"density.kind: unknown kind {self.kind!r}")
        if self.kind == "table":
            if self.nx < 1 or self.ny < 1 or len(self.values) != self.nx * self.ny:
                raise ConfigError("density.table: values must hold nx*ny entries")
            if any(not math.isfinite(x) or x < 0 for x in self.values):
                raise ScenarioError("density.table: values must be finite and nonnegative")

    def evaluate(self, pts, bbox, area):
        """Density at ``pts`` (K, 2); ``bbox`` is (xmin, ymin, xmax, ymax)."""
        pts = np.atleast_2d(pts)
        if self.kind == "uniform":
            return np.full(len(pts), 1.0 / area)
        xmin, ymin, xmax, ymax = bbox
        table = np.asarray(self.values, dtype=float).reshape(self.ny, self.nx)
        ix = np.clip(((pts[:, 0] - xmin) / (xmax - xmin) * self.nx).astype(int), 0, self.nx - 1)
        iy = np.clip(((pts[:, 1] - ymin) / (ymax - ymin) * self.ny).astype(int), 0, self.ny - 1)
        return table[iy, ix]


@dataclass(frozen=True, eq=False)
class Scenario:
    """Target area, density and heterogeneous weights of a two-tier network.

    ``a[n]`` weights the sensor-to-AP link of AP n and ``b[n, m]`` the
    AP-to-FC link from AP n to FC m; ``beta`` trades the two tiers.
    ``strong_aps``/``strong_fcs`` are presentation metadata only.
    """

    omega: np.ndarray
    a: np.ndarray
    b: np.ndarray
    beta: float
    density: Density = field(default_factory=Density)
    name: str = ""
    strong_aps: tuple = ()
    strong_fcs: tuple = ()

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        a = np.asarray(self.a, dtype=float).ravel()
        b = np.asarray(self.b, dtype=float)
        if b.ndim == 1:
            b = b.reshape(len(a), -1)
        object.__setattr__(self, "omega", _frozen(omega))
        object.__setattr__(self, "a", _frozen(a))
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "strong_aps", tuple(int(i) for i in self.strong_aps))
        object.__setattr__(self, "strong_fcs", tuple(int(i) for i in self.strong_fcs))
        self._validate()

    def _validate(self):
        omega, a, b = self.omega, self.a, self.b
        if omega.ndim != 2 or omega.shape[1] != 2 or len(omega) < 3:
            raise ScenarioError("omega needs at least 3 vertices")
        if not np.all(np.isfinite(omega)):
            raise ScenarioError("omega vertices must be finite")
        if not is_convex_ccw(omega):
            raise ScenarioError("omega must be a convex, counter-clockwise polygon")
        n, m = len(a), (b.shape[1] if b.ndim == 2 else 0)
        if n < 1:
            raise ScenarioError("N must be positive")
        if m < 1:
            raise ScenarioError("M must be positive")
        if n < m:
            raise ScenarioError(f"N < M ({n} < {m})")
        if b.shape != (n, m):
            raise ScenarioError(f"b must be {n}x{m}, got {b.shape}")
        if not (np.all(np.isfinite(a)) and np.all(a > 0)):
            raise ScenarioError("all a_n must be positive")
        if not (np.all(np.isfinite(b)) and np.all(b > 0)):
            raise ScenarioError("all b_nm must be positive")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ScenarioError("beta must be nonnegative")
        if self.density.kind == "table":
            mass = _density_mass(self)
            if abs(mass - 1.0) > 1e-2:
                raise ScenarioError(f"density integrates to {mass:.6g} over omega, expected 1")

    @property
    def n_aps(self) -> int:
        return len(self.a)

    @property
    def n_fcs(self) -> int:
        return self.b.shape[1]

    @property
    def area(self) -> float:
        return polygon_area(self.omega)

    @property
    def bbox(self) -> tuple:
        lo, hi = self.omega.min(axis=0), self.omega.max(axis=0)
        return (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))

    @property
    def diameter(self) -> float:
        d = self.omega[:, None, :] - self.omega[None, :, :]
        return float(np.sqrt((d ** 2).sum(-1)).max())

    def replace(self, **changes) -> "Scenario":
        kw = dict(omega=self.omega, a=self.a, b=self.b, beta=self.beta,
                  density=self.density, name=self.name,
                  strong_aps=self.strong_aps, strong_fcs=self.strong_fcs)
        kw.update(changes)
        return Scenario(**kw)


def _density_mass(s: Scenario, res: int = 256) -> float:
    xmin, ymin, xmax, ymax = s.bbox
    dx, dy = (xmax - xmin) / res, (ymax - ymin) / res
    xs = xmin + dx * (np.arange(res) + 0.5)
    ys = ymin + dy * (np.arange(res) + 0.5)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    pts = pts[inside_polygon(s.omega, pts)]
    return float(s.density.evaluate(pts, s.bbox, s.area).sum() * dx * dy)


@dataclass(frozen=True, eq=False)
class Deployment:
    """AP positions ``p`` (N, 2), FC positions ``q`` (M, 2), index map ``t`` (N,)."""

    p: np.ndarray
    q: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _frozen(np.asarray(self.p, dtype=float).reshape(-1, 2)))
        object.__setattr__(self, "q", _frozen(np.asarray(self.q, dtype=float).reshape(-1, 2)))
        object.__setattr__(self, "t", _frozen(np.asarray(self.t).ravel(), dtype=np.int64))

    def replace(self, **changes) -> "Deployment":
        kw = dict(p=self.p, q=self.q, t=self.t)
        kw.update(changes)
        return Deployment(**kw)


@dataclass(frozen=True)
class CellMoments:
    """Mass ``v`` and centroid ``c`` of each generalized Voronoi cell.

    ``inertia[n]`` is the second moment of cell n about its own centroid,
    ``sum_w f(w) |w - c_n|^2``. Empty cells carry NaN centroids.
    """

    v: np.ndarray
    c: np.ndarray
    inertia: np.ndarray

    @property
    def empty(self) -> np.ndarray:
        return np.isnan(self.c[:, 0])


@dataclass(frozen=True)
class PhysicalLayerParams:
    g_t: float
    g_r: float
    wavelength: float
    snr: float
    noise: float
    rate: float


def derive_weight(params: PhysicalLayerParams) -> float:
    """Link weight eta/zeta for a free-space link.

    eta is the transmit power per squared meter that meets the SNR threshold
    under the Friis equation, 16 pi^2 gamma N0 / (G_t G_r lambda^2); dividing by
    the instantaneous data rate gives the average-power weight per unit of
    collected data.
    """
    vals = (params.g_t, params.g_r, params.wavelength, params.snr, params.noise, params.rate)
    if not all(math.isfinite(x) and x > 0 for x in vals):
        raise ValueError("physical-layer parameters must be strictly positive")
    eta = 16 * math.pi ** 2 * params.snr * params.noise / (
        params.g_t * params.g_r * params.wavelength ** 2)
    return eta / params.rate


def validate_deployment(s: Scenario, d: Deployment) -> list:
    """Return the list of violated constraints; empty when consistent."""
    errors = []
    n, m = s.n_aps, s.n_fcs
    if len(d.p) != n:
        errors.append(f"dimension: expected {n} AP positions, got {len(d.p)}")
    if len(d.q) != m:
        errors.append(f"dimension: expected {m} FC positions, got {len(d.q)}")
    if len(d.t) != n:
        errors.append(f"dimension: expected index map of length {n}, got {len(d.t)}")
    bad = [int(k) for k, x in enumerate(d.t) if not 0 <= x < m]
    if bad:
        errors.append(f"range: index map entries outside 1..{m} at APs "
                      + ", ".join(str(k + 1) for k in bad))
    xmin, ymin, xmax, ymax = s.bbox
    for label, pts in (("AP", d.p), ("FC", d.q)):
        if not np.all(np.isfinite(pts)):
            errors.append(f"position: non-finite {label} coordinates")
            continue
        out = (pts[:, 0] < xmin) | (pts[:, 0] > xmax) | (pts[:, 1] < ymin) | (pts[:, 1] > ymax)
        if out.any():
            errors.append(f"position: {label}s outside bounding box: "
                          + ", ".join(str(k + 1) for k in np.flatnonzero(out)))
    return errors


# --------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class RunSettings:
    """Experiment settings carried alongside a scenario in config files."""

    seed: int = 1
    epsilon: float = 1e-5
    max_iters: int = 100
    grid: int = 512

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ScenarioError("epsilon must be positive")
        if self.max_iters < 1:
            raise ScenarioError("max_iters must be at least 1")
        if self.grid < MIN_RESOLUTION:
            raise ScenarioError(f"grid.resolution must be at least {MIN_RESOLUTION}")


def _get(cfg, path, default=KeyError):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is KeyError:
                raise ConfigError(f"{path}: missing")
            return default
        node = node[part]
    return node


def _number(value, path, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if kind is int:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _number_list(value, path):
    if not isinstance(value, list):
        raise ConfigError(f"{path}: expected a list")
    return [_number(x, f"{path}[{k}]") for k, x in enumerate(value)]


def _load_mapping(text):
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a mapping")
    return cfg


def _scenario_from_mapping(cfg) -> Scenario:
    verts = _get(cfg, "omega.vertices")
    if not isinstance(verts, list) or not all(isinstance(v, list) and len(v) == 2 for v in verts):
        raise ConfigError("omega.vertices: expected a list of [x, y] pairs")
    omega = [[_number(x, "omega.vertices") for x in v] for v in verts]

    kind = _get(cfg, "density.kind", "uniform")
    if kind == "uniform":
        density = Density()
    elif kind == "table":
        nx = _number(_get(cfg, "density.table.nx"), "density.table.nx", int)
        ny = _number(_get(cfg, "density.table.ny"), "density.table.ny", int)
        values = _number_list(_get(cfg, "density.table.values"), "density.table.values")
        density = Density("table", nx, ny, tuple(values))
    else:
        raise ConfigError(f"density.kind: expected uniform or table, got {kind!r}")

    n = _number(_get(cfg, "n_aps"), "n_aps", int)
    m = _number(_get(cfg, "n_fcs"), "n_fcs", int)
    if n < 1:
        raise ScenarioError("n_aps must be positive")
    if m < 1:
        raise ScenarioError("n_fcs must be positive")
    a = _number_list(_get(cfg, "a"), "a")
    b = _number_list(_get(cfg, "b"), "b")
    if len(a) != n:
        raise ConfigError(f"a: expected {n} entries, got {len(a)}")
    if len(b) != n * m:
        raise ConfigError(f"b: expected {n * m} entries (row-major N x M), got {len(b)}")
    beta = _number(_get(cfg, "beta"), "beta")

    if kind == "uniform" and "value" in (cfg.get("density") or {}):
        value = _number(cfg["density"]["value"], "density.value")
        area = polygon_area(omega)
        if abs(value * area - 1.0) > 1e-9:
            raise ScenarioError(f"density.value {value} does not integrate to 1 over omega")
    if "rho" in cfg:
        log.info("rho=%s ignored: receiver power is constant in the objective", cfg["rho"])

    groups = cfg.get("groups") or {}
    strong_aps = [int(i) - 1 for i in groups.get("strong_aps", [])]
    strong_fcs = [int(i) - 1 for i in groups.get("strong_fcs", [])]
    return Scenario(omega=omega, a=a, b=np.array(b).reshape(n, m), beta=beta,
                    density=density, name=str(cfg.get("name", "")),
                    strong_aps=strong_aps, strong_fcs=strong_fcs)


def _settings_from_mapping(cfg) -> RunSettings:
    return RunSettings(
        seed=_number(cfg.get("seed", 1), "seed", int),
        epsilon=_number(cfg.get("epsilon", 1e-5), "epsilon"),
        max_iters=_number(cfg.get("max_iters", 100), "max_iters", int),
        grid=_number(_get(cfg, "grid.resolution", 512), "grid.resolution", int),
    )


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a YAML scenario config."""
    return _scenario_from_mapping(_load_mapping(text))


def parse_config(text: str):
    """Parse a config into ``(Scenario, RunSettings)``."""
    cfg = _load_mapping(text)
    return _scenario_from_mapping(cfg), _settings_from_mapping(cfg)


def serialize_scenario(s: Scenario, settings: RunSettings = None) -> str:
    """Inverse of :func:`parse_config`; floats are written with ``repr`` precision."""
    cfg = {"name": s.name,
           "omega": {"vertices": [[float(x), float(y)] for x, y in s.omega]}}
    if s.density.kind == "uniform":
        cfg["density"] = {"kind": "uniform"}
    else:
        cfg["density"] = {"kind": "table", "table": {
            "nx": s.density.nx, "ny": s.density.ny,
            "values": [float(x) for x in s.density.values]}}
    cfg["n_aps"] = s.n_aps
    cfg["n_fcs"] = s.n_fcs
    cfg["a"] = [float(x) for x in s.a]
    cfg["b"] = [float(x) for x in s.b.ravel()]
    cfg["beta"] = float(s.beta)
    if s.strong_aps or s.strong_fcs:
        cfg["groups"] = {"strong_aps": [i + 1 for i in s.strong_aps],
                         "strong_fcs": [i + 1 for i in s.strong_fcs]}
    if settings is not None:
        cfg.update(seed=settings.seed, epsilon=float(settings.epsilon),
                   max_iters=settings.max_iters, grid={"resolution": settings.grid})
    return yaml.safe_dump(cfg, sort_keys=False, default_flow_style=None)


PRESETS = ("wsn1", "wsn2")


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return resources.files("twotier.presets").joinpath(f"{name}.yaml").read_text()


def load_preset(name: str, beta: float = None):
    """Return ``(Scenario, RunSettings)`` for a bundled preset."""
    s, settings = parse_config(preset_text(name))
    if beta is not None:
        s = s.replace(beta=beta)
    return s, settings
