"""Kernel families ``f_t(x)`` and their weighted combinations.

Parametric kernels are translates ``f_t(x) = phi(x - P t)`` of a profile ``phi``;
``P`` is a fixed ``d x q`` embedding of field locations into space (identity when
omitted). Besides pointwise evaluation every kernel reports the per-axis
locations where it is not smooth, which the spatial quadrature uses as panel
edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .basis import CharacteristicTriplet, Window, control_measure
from .errors import DivergenceError, DomainError

__all__ = [
    "Box", "GaussianBump", "ExpDecay", "Tabulated", "Discretized",
    "WeightedCombination", "IntegrabilityResult",
    "eval_kernel", "combo_eval", "kernel_matrix", "integrability_check",
]


def _as_points(x):
    x = np.asarray(x, dtype=float)
    single = x.ndim <= 1
    return np.atleast_2d(x) if x.ndim > 0 else x.reshape(1, 1), single


class _Translated:
    """Shared machinery for kernels of the form ``phi(x - P t)``."""

    embedding: Optional[tuple]

    def shift(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.embedding is None:
            return t
        return np.array(self.embedding) @ t

    def __call__(self, t, x):
        pts, single = _as_points(x)
        vals = self.profile(pts - self.shift(t)[None, :])
        return float(vals[0]) if single else vals

    def breakpoints(self, t):
        return [np.empty(0) for _ in self.shift(t)]

    @property
    def length_scale(self):
        return np.inf


def _embedding(value):
    if value is None:
        return None
    rows = tuple(tuple(float(v) for v in row) for row in np.atleast_2d(value))
    return rows


@dataclass(frozen=True)
class Box(_Translated):
    """``amplitude * 1{|x_i - (Pt)_i| <= halfwidth_i for all i}``."""

    halfwidth: tuple
    amplitude: float = 1.0
    embedding: Optional[tuple] = None

    def __post_init__(self):
        hw = tuple(float(v) for v in np.atleast_1d(self.halfwidth))
        if any(not (v > 0 and np.isfinite(v)) for v in hw):
            raise DomainError("box halfwidths must be positive")
        object.__setattr__(self, "halfwidth", hw)
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "embedding", _embedding(self.embedding))

    @property
    def bound(self):
        return abs(self.amplitude)

    def profile(self, z):
        inside = np.all(np.abs(z) <= np.array(self.halfwidth), axis=-1)
        return np.where(inside, self.amplitude, 0.0)

    def breakpoints(self, t):
        c = self.shift(t)
        hw = np.array(self.halfwidth)
        return [np.array([ci - h, ci + h]) for ci, h in zip(c, hw)]


@dataclass(frozen=True)
class GaussianBump(_Translated):
    """``amplitude * exp(-|x - Pt|^2 / (2 sigma^2))``."""

    sigma: float
    amplitude: float = 1.0
    embedding: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "embedding", _embedding(self.embedding))
        if not (self.sigma > 0 and np.isfinite(self.sigma)):
            raise DomainError("GaussianBump sigma must be positive")

    @property
    def bound(self):
        return abs(self.amplitude)

    def profile(self, z):
        return self.amplitude * np.exp(-0.5 * np.sum(z * z, axis=-1) / self.sigma ** 2)

    @property
    def length_scale(self):
        return self.sigma


@dataclass(frozen=True)
class ExpDecay(_Translated):
    """``amplitude * exp(-rate * |x - Pt|)`` (Euclidean norm)."""

    rate: float
    amplitude: float = 1.0
    embedding: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "embedding", _embedding(self.embedding))
        if not (self.rate > 0 and np.isfinite(self.rate)):
            raise DomainError("ExpDecay rate must be positive")

    @property
    def bound(self):
        return abs(self.amplitude)

    def profile(self, z):
        return self.amplitude * np.exp(-self.rate * np.sqrt(np.sum(z * z, axis=-1)))

    def breakpoints(self, t):
        return [np.array([c]) for c in self.shift(t)]

    @property
    def length_scale(self):
        return 1.0 / self.rate


@dataclass(frozen=True)
class Tabulated(_Translated):
    """Multilinear interpolation of ``values`` on the tensor grid ``axes``; zero off-grid.

    ``values`` is stored flat in C order. ``bound`` defaults to ``max |values|`` and
    may be declared larger (or infinite, which fails the integrability check).
    """

    axes: tuple
    values: tuple
    bound: Optional[float] = None
    embedding: Optional[tuple] = None

    def __post_init__(self):
        axes = tuple(tuple(float(v) for v in np.atleast_1d(a)) for a in self.axes)
        vals = np.asarray(self.values, dtype=float)
        shape = tuple(len(a) for a in axes)
        if vals.size != int(np.prod(shape)):
            raise DomainError(f"tabulated values need {int(np.prod(shape))} entries, got {vals.size}")
        if any(len(a) < 2 or np.any(np.diff(a) <= 0) for a in axes):
            raise DomainError("tabulated axes must be strictly increasing with >= 2 nodes")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", tuple(vals.ravel().tolist()))
        bound = float(np.max(np.abs(vals))) if self.bound is None else float(self.bound)
        object.__setattr__(self, "bound", bound)
        object.__setattr__(self, "embedding", _embedding(self.embedding))

    @cached_property
    def _interp(self):
        shape = tuple(len(a) for a in self.axes)
        return RegularGridInterpolator(
            [np.array(a) for a in self.axes],
            np.array(self.values).reshape(shape),
            method="linear", bounds_error=False, fill_value=0.0,
        )

    def profile(self, z):
        return self._interp(z)

    def breakpoints(self, t):
        return [np.array(a) + c for a, c in zip(self.axes, self.shift(t))]


@dataclass(frozen=True)
class Discretized:
    """Piecewise-constant surrogate: ``base`` evaluated at the centre of the grid cell holding ``x``.

    This is the simple-function approximation used by the simulator, exposed as a
    kernel so that the exact law of the discretised field can be computed like any other.
    Points outside ``window`` map to 0.
    """

    base: object
    window: Window
    cells_per_dim: tuple

    def __post_init__(self):
        cells = tuple(int(c) for c in np.atleast_1d(self.cells_per_dim))
        if len(cells) != self.window.dim or any(c < 1 for c in cells):
            raise DomainError("cells_per_dim must hold one positive count per axis")
        object.__setattr__(self, "cells_per_dim", cells)

    @property
    def bound(self):
        return self.base.bound

    @property
    def length_scale(self):
        return np.inf

    def _centres(self, pts):
        lo, hi = self.window.lo, self.window.hi
        n = np.array(self.cells_per_dim)
        h = (hi - lo) / n
        idx = np.clip(np.floor((pts - lo) / h), 0, n - 1)
        inside = np.all((pts >= lo) & (pts <= hi), axis=-1)
        return lo + (idx + 0.5) * h, inside

    def __call__(self, t, x):
        pts, single = _as_points(x)
        centres, inside = self._centres(pts)
        vals = np.where(inside, self.base(t, centres), 0.0)
        return float(vals[0]) if single else vals

    def breakpoints(self, t):
        return [np.linspace(l, u, n + 1) for l, u, n in zip(self.window.lower, self.window.upper, self.cells_per_dim)]


def eval_kernel(k, t, x):
    """``f_t(x)``; ``x`` may be one point or an ``(N, d)`` array."""
    return k(t, x)


@dataclass(frozen=True)
class WeightedCombination:
    """``sum_j weights[j] * f_{points[j]}`` for a fixed kernel."""

    kernel: object
    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(tuple(float(v) for v in np.atleast_1d(p)) for p in self.points)
        w = tuple(float(v) for v in np.atleast_1d(self.weights))
        if len(pts) == 0:
            raise DomainError("a combination needs at least one field point")
        if len(w) != len(pts):
            raise DomainError(f"{len(w)} weights for {len(pts)} field points")
        if not all(np.isfinite(w)):
            raise DomainError("weights must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return len(self.points)

    def with_weights(self, weights):
        return WeightedCombination(self.kernel, self.points, tuple(np.atleast_1d(weights)))


def kernel_matrix(kernel, points, s):
    """``K[j, i] = f_{points[j]}(s[i])`` for an ``(M, d)`` array ``s``."""
    s = np.atleast_2d(np.asarray(s, dtype=float))
    return np.stack([np.asarray(kernel(t, s), dtype=float).reshape(len(s)) for t in points])


def weighted_sum(weights, kmat):
    # Index-ascending accumulation, shared by combo_eval and the quadrature code.
    out = np.zeros(kmat.shape[1:])
    for w, row in zip(weights, kmat):
        out = out + w * row
    return out


def combo_eval(w: WeightedCombination, s):
    """``sum_j x_j f_{t_j}(s)``, summed in index order."""
    pts, single = _as_points(s)
    vals = weighted_sum(w.weights, kernel_matrix(w.kernel, w.points, pts))
    return float(vals[0]) if single else vals


class IntegrabilityResult(NamedTuple):
    passed: bool
    reason: str

    def __bool__(self):
        return self.passed


def integrability_check(k, T: CharacteristicTriplet, W: Window) -> IntegrabilityResult:
    """Sufficient condition for the midpoint simple-function scheme to converge.

    Passes when the kernel has a finite declared bound and the control measure of
    ``W`` is finite. Failure is returned, never raised.
    """
    bound = getattr(k, "bound", np.inf)
    if bound is None or not np.isfinite(bound):
        return IntegrabilityResult(False, "unbounded: kernel has no finite declared bound")
    if not T.window.contains(W):
        return IntegrabilityResult(False, "window is not contained in the triplet's window")
    try:
        lam = control_measure(T, W)
    except DivergenceError as exc:
        return IntegrabilityResult(False, f"infinite control measure: {exc}")
    if not np.isfinite(lam):
        return IntegrabilityResult(False, "infinite control measure")
    return IntegrabilityResult(True, f"bounded kernel (|f| <= {bound:g}), control measure {lam:.6g}")
