"""JSON model configuration: parsing with path-qualified errors, and serialisation.

Every variant carries an explicit ``"type"`` tag. A minimal config::

    {
      "window": {"lower": [0], "upper": [1]},
      "triplet": {"gaussian": {"type": "constant", "value": 1.0}},
      "kernel": {"type": "box", "halfwidth": [0.5]},
      "points": [[0.5]]
    }

Unknown keys are rejected so typos surface as errors.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .basis import (
    CharacteristicTriplet, ConstantDensity, ExponentialDensity, JumpComponent,
    LinearDensity, SpatialIntensity, Window,
)
from .charfn import SpatialQuadrature
from .errors import ConfigurationError, IdFieldError
from .kernels import Box, ExpDecay, GaussianBump, Tabulated
from .levy import CompoundDensity, DiscreteJumps, GammaType, JumpLaw
from .simulate import GridDiscretization, SimulationConfig
from .verify import VerificationSettings

_MISSING = object()


@dataclass(frozen=True)
class ModelConfig:
    window: Window
    triplet: CharacteristicTriplet
    kernel: object
    points: tuple
    simulation: SimulationConfig
    cf_arguments: tuple
    gamma: float = 1.0
    quadrature: SpatialQuadrature = field(default_factory=SpatialQuadrature)
    verification: VerificationSettings = field(default_factory=VerificationSettings)


class _Node:
    """A dict under a dotted path; tracks which keys were consumed."""

    def __init__(self, data, path):
        if not isinstance(data, dict):
            raise ConfigurationError(path, f"expected an object, got {type(data).__name__}")
        self.data = data
        self.path = path
        self.used = set()

    def sub(self, key):
        return f"{self.path}.{key}" if self.path else key

    def get(self, key, default=_MISSING):
        self.used.add(key)
        if key not in self.data:
            if default is _MISSING:
                raise ConfigurationError(self.sub(key), "missing required field")
            return default
        return self.data[key]

    def number(self, key, default=_MISSING, *, positive=False, nonneg=False):
        val = self.get(key, default)
        try:
            out = float(val)
        except (TypeError, ValueError):
            raise ConfigurationError(self.sub(key), f"expected a number, got {val!r}") from None
        if positive and not out > 0:
            raise ConfigurationError(self.sub(key), f"must be > 0, got {out}")
        if nonneg and not out >= 0:
            raise ConfigurationError(self.sub(key), f"must be >= 0, got {out}")
        return out

    def integer(self, key, default=_MISSING, *, minimum=None):
        val = self.get(key, default)
        if isinstance(val, bool) or not isinstance(val, (int, float)) or int(val) != val:
            raise ConfigurationError(self.sub(key), f"expected an integer, got {val!r}")
        if minimum is not None and val < minimum:
            raise ConfigurationError(self.sub(key), f"must be >= {minimum}, got {val}")
        return int(val)

    def vector(self, key, default=_MISSING, length=None):
        val = self.get(key, default)
        if val is None:
            return None
        try:
            arr = np.asarray(val, dtype=float).ravel()
        except (TypeError, ValueError):
            raise ConfigurationError(self.sub(key), f"expected a list of numbers, got {val!r}") from None
        if length is not None and arr.size != length:
            raise ConfigurationError(self.sub(key), f"expected {length} entries, got {arr.size}")
        return tuple(arr.tolist())

    def done(self):
        extra = sorted(set(self.data) - self.used)
        if extra:
            raise ConfigurationError(self.sub(extra[0]), "unknown field")


def _wrap(path, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except ConfigurationError:
        raise
    except (IdFieldError, ValueError, TypeError) as exc:
        raise ConfigurationError(path, str(exc)) from None


# ---------------------------------------------------------------------------
# parsing


def _parse_window(data, path):
    node = _Node(data, path)
    lower = node.vector("lower")
    upper = node.vector("upper", length=len(lower))
    node.done()
    return _wrap(path, Window, lower, upper)


def _parse_term(data, path, d, allow_signed):
    node = _Node(data, path)
    kind = node.get("type")
    signed = bool(node.get("signed", False))
    if signed and not allow_signed:
        raise ConfigurationError(node.sub("signed"), "signed densities are only allowed for the drift")
    if kind == "constant":
        value = node.number("value")
        term = (value, ConstantDensity())
    elif kind == "linear":
        term = (node.number("scale", 1.0), _wrap(path, LinearDensity, node.number("offset", 0.0),
                                                  node.vector("slope", length=d)))
    elif kind == "exponential":
        term = (node.number("scale", 1.0), _wrap(path, ExponentialDensity, node.vector("rate", length=d)))
    else:
        raise ConfigurationError(node.sub("type"), f"unknown intensity type {kind!r}")
    node.done()
    return term, signed


def _parse_intensity(data, path, d, allow_signed=False):
    items = data if isinstance(data, list) else [data]
    terms, signed = [], False
    for i, item in enumerate(items):
        term, s = _parse_term(item, f"{path}[{i}]" if isinstance(data, list) else path, d, allow_signed)
        terms.append(term)
        signed = signed or s
    return SpatialIntensity(tuple(terms), signed=signed)


def _parse_levy(data, path):
    node = _Node(data, path)
    kind = node.get("type")
    if kind == "discrete":
        pairs = node.get("jumps")
        if not isinstance(pairs, list) or not pairs:
            raise ConfigurationError(node.sub("jumps"), "expected a non-empty list of [size, rate] pairs")
        for i, p in enumerate(pairs):
            if not isinstance(p, (list, tuple)) or len(p) != 2:
                raise ConfigurationError(f"{node.sub('jumps')}[{i}]", "expected [size, rate]")
            if not float(p[1]) > 0:
                raise ConfigurationError(f"{node.sub('jumps')}[{i}]", "rate must be > 0")
        nu = _wrap(path, DiscreteJumps.from_pairs, [(float(a), float(b)) for a, b in pairs])
    elif kind == "gamma":
        nu = _wrap(path, GammaType, node.number("c", positive=True), node.number("beta", positive=True))
    elif kind == "compound":
        law = _Node(node.get("law"), node.sub("law"))
        name = law.get("name")
        params = law.get("params", {})
        if not isinstance(params, dict):
            raise ConfigurationError(law.sub("params"), "expected an object")
        law.done()
        jl = _wrap(law.path, JumpLaw, name, params)
        nu = _wrap(path, CompoundDensity, node.number("rate", positive=True), jl)
    else:
        raise ConfigurationError(node.sub("type"), f"unknown Lévy measure type {kind!r}")
    node.done()
    return nu


def _parse_triplet(data, path, window):
    node = _Node(data, path)
    d = window.dim
    drift = node.get("drift", [])
    gauss = node.get("gaussian", [])
    drift = _parse_intensity(drift, node.sub("drift"), d, allow_signed=True)
    gauss = _parse_intensity(gauss, node.sub("gaussian"), d)
    jumps = []
    raw = node.get("jumps", [])
    if not isinstance(raw, list):
        raise ConfigurationError(node.sub("jumps"), "expected a list")
    for i, item in enumerate(raw):
        jpath = f"{node.sub('jumps')}[{i}]"
        jn = _Node(item, jpath)
        nu = _parse_levy(jn.get("levy"), jn.sub("levy"))
        inten = _parse_intensity(jn.get("intensity", {"type": "constant", "value": 1.0}), jn.sub("intensity"), d)
        jn.done()
        jumps.append(JumpComponent(nu, inten))
    node.done()
    return _wrap(path, CharacteristicTriplet, window, drift, gauss, tuple(jumps))


def _parse_kernel(data, path, d):
    node = _Node(data, path)
    kind = node.get("type")
    emb = node.get("embedding", None)
    if kind == "box":
        k = _wrap(path, Box, node.vector("halfwidth", length=d), node.number("amplitude", 1.0), emb)
    elif kind == "gaussian_bump":
        k = _wrap(path, GaussianBump, node.number("sigma", positive=True), node.number("amplitude", 1.0), emb)
    elif kind == "exp_decay":
        k = _wrap(path, ExpDecay, node.number("rate", positive=True), node.number("amplitude", 1.0), emb)
    elif kind == "tabulated":
        axes = node.get("axes")
        values = node.get("values")
        bound = node.get("bound", None)
        if isinstance(bound, str):
            bound = _wrap(node.sub("bound"), float, bound)
        k = _wrap(path, Tabulated, axes, np.asarray(values, dtype=float).ravel().tolist(), bound, emb)
        if len(k.axes) != d:
            raise ConfigurationError(node.sub("axes"), f"expected {d} axes")
    else:
        raise ConfigurationError(node.sub("type"), f"unknown kernel type {kind!r}")
    node.done()
    return k


def _parse_points(data, path, q):
    if not isinstance(data, list) or not data:
        raise ConfigurationError(path, "expected a non-empty list of field points")
    pts = []
    for i, p in enumerate(data):
        arr = np.atleast_1d(np.asarray(p, dtype=float))
        if arr.size != q:
            raise ConfigurationError(f"{path}[{i}]", f"expected {q} coordinates, got {arr.size}")
        pts.append(tuple(arr.tolist()))
    return tuple(pts)


def _parse_cf(data, path, n):
    node = _Node(data, path)
    gamma = node.number("gamma", 1.0, positive=True)
    args = node.get("arguments", None)
    grid = node.get("grid", None)
    if args is not None and grid is not None:
        raise ConfigurationError(path, "give either 'arguments' or 'grid', not both")
    if args is None:
        if grid is None:
            grid = {"min": -3.0, "max": 3.0, "num": 11}
        g = _Node(grid, node.sub("grid"))
        axis = np.linspace(g.number("min"), g.number("max"), g.integer("num", minimum=1))
        g.done()
        out = []
        for j in range(n):
            for s in axis:
                x = [0.0] * n
                x[j] = float(s)
                out.append(tuple(x))
        args = out
    parsed = []
    for i, a in enumerate(args):
        arr = np.atleast_1d(np.asarray(a, dtype=float))
        if arr.size != n:
            raise ConfigurationError(f"{node.sub('arguments')}[{i}]", f"expected {n} weights, got {arr.size}")
        parsed.append(tuple(arr.tolist()))
    node.done()
    return tuple(parsed), gamma


def _parse_simulation(data, path, window):
    node = _Node(data, path)
    cells = node.get("cells_per_dim", [8] * window.dim)
    if isinstance(cells, (int, float)):
        cells = [cells] * window.dim
    if len(cells) != window.dim or any(int(c) != c or c < 1 for c in cells):
        raise ConfigurationError(node.sub("cells_per_dim"), f"expected {window.dim} positive integers")
    grid = GridDiscretization(window, tuple(int(c) for c in cells))
    eps = node.number("epsilon", 1e-3, positive=True)
    mode = node.get("small_jump_mode", "gaussian_substitute")
    reps = node.integer("replicates", 1000, minimum=1)
    seed = node.integer("seed", 0)
    node.done()
    try:
        return SimulationConfig(grid, eps, mode, reps, seed)
    except ConfigurationError as exc:
        raise ConfigurationError(f"{path}.{exc.path.split('.')[-1]}", str(exc).split(": ", 1)[-1]) from None


def _parse_quadrature(data, path):
    node = _Node(data, path)
    width = node.get("max_panel_width", None)
    q = _wrap(path, SpatialQuadrature,
              node.integer("order", 16, minimum=2),
              np.inf if width is None else float(width),
              node.number("atol", 1e-10, positive=True),
              node.number("rtol", 1e-8, positive=True))
    node.done()
    return q


def _parse_verification(data, path):
    node = _Node(data, path)
    defaults = VerificationSettings()
    m = node.get("m", list(defaults.m_values))
    if not isinstance(m, list) or not m or any(isinstance(v, bool) or int(v) != v or v < 1 for v in m):
        raise ConfigurationError(node.sub("m"), "expected a non-empty list of positive integers")
    grid = node.vector("cf_grid", list(defaults.cf_grid))
    out = VerificationSettings(
        m_values=tuple(int(v) for v in m),
        replicates=node.integer("replicates", defaults.replicates, minimum=1),
        alpha=node.number("alpha", defaults.alpha, positive=True),
        cf_threshold=node.number("cf_threshold", defaults.cf_threshold, positive=True),
        cf_grid=grid,
        psd_points=node.integer("psd_points", defaults.psd_points, minimum=1),
        psd_gammas=node.vector("psd_gammas", list(defaults.psd_gammas)),
        psd_tolerance=node.number("psd_tolerance", defaults.psd_tolerance, nonneg=True),
        psd_range=node.number("psd_range", defaults.psd_range, positive=True),
        sum_scale=node.number("sum_scale", defaults.sum_scale, positive=True),
    )
    if any(g <= 0 for g in out.psd_gammas):
        raise ConfigurationError(node.sub("psd_gammas"), "every gamma must be > 0")
    if out.psd_points > 25:
        raise ConfigurationError(node.sub("psd_points"), "at most 25 points")
    node.done()
    return out


def parse_config(data) -> ModelConfig:
    """Build a :class:`ModelConfig` from decoded JSON, validating every field."""
    root = _Node(data, "")
    window = _parse_window(root.get("window"), "window")
    triplet = _parse_triplet(root.get("triplet"), "triplet", window)
    kernel = _parse_kernel(root.get("kernel"), "kernel", window.dim)
    q = len(kernel.embedding[0]) if getattr(kernel, "embedding", None) else window.dim
    points = _parse_points(root.get("points"), "points", q)
    simulation = _parse_simulation(root.get("simulation", {}), "simulation", window)
    cf_args, gamma = _parse_cf(root.get("cf", {}), "cf", len(points))
    quadrature = _parse_quadrature(root.get("quadrature", {}), "quadrature")
    verification = _parse_verification(root.get("verification", {}), "verification")
    root.done()
    return ModelConfig(window, triplet, kernel, points, simulation, cf_args, gamma, quadrature, verification)


def load_config(path) -> ModelConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError("", f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError("", f"invalid JSON: {exc}") from None
    return parse_config(data)


# ---------------------------------------------------------------------------
# serialisation


def _intensity_to_json(g: SpatialIntensity):
    out = []
    for c, d in g.terms:
        if isinstance(d, ConstantDensity):
            item = {"type": "constant", "value": c}
        elif isinstance(d, LinearDensity):
            item = {"type": "linear", "offset": d.offset, "slope": list(d.slope), "scale": c}
        elif isinstance(d, ExponentialDensity):
            item = {"type": "exponential", "rate": list(d.rate), "scale": c}
        else:
            raise ConfigurationError("triplet", f"{type(d).__name__} densities cannot be serialised")
        if g.signed:
            item["signed"] = True
        out.append(item)
    return out


def _levy_to_json(nu):
    if isinstance(nu, DiscreteJumps):
        return {"type": "discrete", "jumps": [list(p) for p in nu.pairs]}
    if isinstance(nu, GammaType):
        return {"type": "gamma", "c": nu.c, "beta": nu.beta}
    return {"type": "compound", "rate": nu.rate, "law": {"name": nu.law.name, "params": dict(nu.law.params)}}


def _kernel_to_json(k):
    emb = None if k.embedding is None else [list(r) for r in k.embedding]
    if isinstance(k, Box):
        out = {"type": "box", "halfwidth": list(k.halfwidth), "amplitude": k.amplitude}
    elif isinstance(k, GaussianBump):
        out = {"type": "gaussian_bump", "sigma": k.sigma, "amplitude": k.amplitude}
    elif isinstance(k, ExpDecay):
        out = {"type": "exp_decay", "rate": k.rate, "amplitude": k.amplitude}
    elif isinstance(k, Tabulated):
        out = {"type": "tabulated", "axes": [list(a) for a in k.axes], "values": list(k.values),
               "bound": k.bound if np.isfinite(k.bound) else "inf"}
    else:
        raise ConfigurationError("kernel", f"{type(k).__name__} kernels cannot be serialised")
    if emb is not None:
        out["embedding"] = emb
    return out


def config_to_dict(cfg: ModelConfig) -> dict:
    """Inverse of :func:`parse_config` (up to defaults being written out)."""
    T = cfg.triplet
    q = cfg.quadrature
    v = asdict(cfg.verification)
    return {
        "window": {"lower": list(cfg.window.lower), "upper": list(cfg.window.upper)},
        "triplet": {
            "drift": _intensity_to_json(T.drift),
            "gaussian": _intensity_to_json(T.gaussian),
            "jumps": [{"levy": _levy_to_json(c.levy), "intensity": _intensity_to_json(c.intensity)}
                      for c in T.jumps],
        },
        "kernel": _kernel_to_json(cfg.kernel),
        "points": [list(p) for p in cfg.points],
        "simulation": {
            "cells_per_dim": list(cfg.simulation.grid.cells_per_dim),
            "epsilon": cfg.simulation.epsilon,
            "small_jump_mode": cfg.simulation.small_jump_mode,
            "replicates": cfg.simulation.replicates,
            "seed": cfg.simulation.seed,
        },
        "cf": {"arguments": [list(a) for a in cfg.cf_arguments], "gamma": cfg.gamma},
        "quadrature": {
            "order": q.order,
            "max_panel_width": None if not np.isfinite(q.max_panel_width) else q.max_panel_width,
            "atol": q.atol, "rtol": q.rtol,
        },
        "verification": {
            "m": list(v["m_values"]), "replicates": v["replicates"], "alpha": v["alpha"],
            "cf_threshold": v["cf_threshold"], "cf_grid": list(v["cf_grid"]),
            "psd_points": v["psd_points"], "psd_gammas": list(v["psd_gammas"]),
            "psd_tolerance": v["psd_tolerance"], "psd_range": v["psd_range"], "sum_scale": v["sum_scale"],
        },
    }


def dumps_config(cfg: ModelConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2)
