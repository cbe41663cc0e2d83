"""Infinitely divisible random measures described by their characteristic triplet.

A triplet ``(a, b, F)`` lives on a bounded box :class:`Window`. The drift ``a`` and
Gaussian variance ``b`` have densities with respect to Lebesgue measure, and the
generalized Lévy measure is a finite sum of product measures
``F(dr, dx) = nu_p(dr) g_p(x) dx``.

Set-level quantities are evaluated on cells, i.e. axis-aligned sub-boxes of the
window. All objects are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DivergenceError, DomainError
from .levy import CompoundDensity, DiscreteJumps, GammaType, LevyMeasure1D, levy_integral, lk_integral
from .quadrature import DEFAULT_ATOL, DEFAULT_RTOL, integrate_box

__all__ = [
    "Window", "SpatialIntensity", "JumpComponent", "CharacteristicTriplet",
    "drift_of_set", "gaussian_of_set", "levy_of_set", "control_measure",
    "scale", "cumulant_marginal", "levy_integral",
]

_CONTAIN_TOL = 1e-12


@dataclass(frozen=True)
class Window:
    """Axis-aligned box ``[lower, upper]`` in ``R^d``; also used for cells."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        up = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) == 0 or len(lo) != len(up):
            raise DomainError("window bounds must be non-empty and of equal length")
        if not all(np.isfinite(lo + up)):
            raise DomainError("window bounds must be finite")
        if any(l >= u for l, u in zip(lo, up)):
            raise DomainError(f"window needs lower < upper on every axis, got {lo} / {up}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @classmethod
    def unit(cls, d=1):
        return cls((0.0,) * d, (1.0,) * d)

    @property
    def dim(self):
        return len(self.lower)

    @property
    def lo(self):
        return np.array(self.lower)

    @property
    def hi(self):
        return np.array(self.upper)

    @property
    def volume(self):
        return float(np.prod(self.hi - self.lo))

    def contains(self, other: "Window"):
        if other.dim != self.dim:
            return False
        slack = _CONTAIN_TOL * np.maximum(1.0, np.abs(self.hi - self.lo))
        return bool(np.all(other.lo >= self.lo - slack) and np.all(other.hi <= self.hi + slack))

    def corners(self):
        grids = np.meshgrid(*[(l, u) for l, u in zip(self.lower, self.upper)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def lattice(self, per_axis=9):
        axes = [np.linspace(l, u, per_axis) for l, u in zip(self.lower, self.upper)]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


# ---------------------------------------------------------------------------
# spatial densities


@dataclass(frozen=True)
class ConstantDensity:
    def __call__(self, x):
        return np.ones(len(x))

    def integral(self, box):
        return box.volume

    def bound(self, box):
        return 1.0


@dataclass(frozen=True)
class LinearDensity:
    """``offset + slope . x``."""

    offset: float
    slope: tuple

    def __post_init__(self):
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "slope", tuple(float(v) for v in np.atleast_1d(self.slope)))

    def __call__(self, x):
        return self.offset + np.asarray(x) @ np.array(self.slope)

    def integral(self, box):
        centroid = 0.5 * (box.lo + box.hi)
        return box.volume * float(self.offset + centroid @ np.array(self.slope))

    def bound(self, box):
        return float(np.max(np.abs(self(box.corners()))))


@dataclass(frozen=True)
class ExponentialDensity:
    """``exp(-rate . x)``."""

    rate: tuple

    def __post_init__(self):
        object.__setattr__(self, "rate", tuple(float(v) for v in np.atleast_1d(self.rate)))

    def __call__(self, x):
        return np.exp(-(np.asarray(x) @ np.array(self.rate)))

    def integral(self, box):
        total = 1.0
        for k, l, u in zip(self.rate, box.lower, box.upper):
            if k == 0.0:
                total *= u - l
            else:
                total *= (np.exp(-k * l) - np.exp(-k * u)) / k
        return float(total)

    def bound(self, box):
        return float(np.max(self(box.corners())))


@dataclass(frozen=True)
class CallableDensity:
    """A user-supplied vectorised density with a declared sup-norm bound."""

    fn: Callable
    sup: float = np.inf

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x)), dtype=float).reshape(len(x))

    def integral(self, box, atol=DEFAULT_ATOL, rtol=DEFAULT_RTOL):
        return integrate_box(self, box.lo, box.hi, atol=atol, rtol=rtol)[0]

    def bound(self, box):
        return float(self.sup)


@dataclass(frozen=True)
class SpatialIntensity:
    """A density on the window, stored as a sum ``sum_i coef_i * density_i(x)``.

    Keeping the coefficients apart from the base densities lets scaling and
    summation act on coefficients only, so quadrature always sees the same
    base integrands.
    """

    terms: tuple = ()
    signed: bool = False

    def __post_init__(self):
        terms = tuple((float(c), d) for c, d in self.terms if float(c) != 0.0)
        object.__setattr__(self, "terms", terms)
        if any(not np.isfinite(c) for c, _ in terms):
            raise DomainError("intensity coefficients must be finite")

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, value, signed=False):
        return cls(((value, ConstantDensity()),), signed=signed)

    @classmethod
    def linear(cls, offset, slope, signed=False):
        return cls(((1.0, LinearDensity(offset, slope)),), signed=signed)

    @classmethod
    def exponential(cls, rate, scale=1.0):
        return cls(((scale, ExponentialDensity(rate)),))

    @classmethod
    def from_callable(cls, fn, bound, signed=False):
        return cls(((1.0, CallableDensity(fn, float(bound))),), signed=signed)

    @property
    def is_zero(self):
        return len(self.terms) == 0

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros(len(x))
        for c, d in self.terms:
            out += c * d(x)
        return out

    def __add__(self, other):
        return SpatialIntensity(self.terms + other.terms, signed=self.signed or other.signed)

    def scaled(self, factor):
        return SpatialIntensity(tuple((c * factor, d) for c, d in self.terms), signed=self.signed)

    def integral(self, box):
        """``int_box g(x) dx``; closed form for parametric terms."""
        return float(sum(c * d.integral(box) for c, d in self.terms))

    def abs_integral(self, box):
        """``int_box |g(x)| dx``."""
        if self.is_zero:
            return 0.0
        if len(self.terms) == 1 and isinstance(self.terms[0][1], (ConstantDensity, ExponentialDensity)):
            return abs(self.integral(box))
        if self.min_on(box) >= 0:
            return self.integral(box)
        affine = self._affine()
        if affine is not None:
            exact = _abs_affine_integral(*affine, box)
            if exact is not None:
                return exact
        return integrate_box(lambda x: np.abs(self(x)), box.lo, box.hi)[0]

    def _affine(self):
        """``(a, s)`` with ``g(x) = a + s . x`` when every term is constant or linear."""
        a, slope = 0.0, None
        for c, d in self.terms:
            if isinstance(d, ConstantDensity):
                a += c
            elif isinstance(d, LinearDensity):
                a += c * d.offset
                slope = c * np.array(d.slope) if slope is None else slope + c * np.array(d.slope)
            else:
                return None
        return (a, slope) if slope is not None else None

    def bound(self, box):
        return float(sum(abs(c) * d.bound(box) for c, d in self.terms))

    def min_on(self, box, per_axis=9):
        """Minimum over the box corners and a ``per_axis``-point lattice."""
        if self.is_zero:
            return 0.0
        pts = np.vstack([box.corners(), box.lattice(per_axis)])
        return float(np.min(self(pts)))


def _abs_affine_integral(a, slope, box, max_cancellation=1e6):
    """Exact ``int_box |a + s . x| dx`` from mixed differences of ``L_+^(d+1)``.

    Returns ``None`` when the vertex sum would lose more than about six digits.
    """
    lo, w = box.lo, box.hi - box.lo
    a0 = a + float(slope @ lo)
    s = np.asarray(slope, dtype=float) * w  # local coordinates y in [0, 1]^d
    # Negligible slopes are replaced by their mean over the box.
    active = np.abs(s) > 1e-13 * (abs(a0) + float(np.sum(np.abs(s))))
    a0 += 0.5 * float(np.sum(s[~active]))
    k = int(active.sum())
    s = s[active]
    if k == 0:
        return abs(a0) * box.volume
    corners = np.array(np.meshgrid(*[[0.0, 1.0]] * k, indexing="ij")).reshape(k, -1).T
    vals = a0 + corners @ s
    signs = (-1.0) ** (k - corners.sum(axis=1))
    denom = math.factorial(k + 1) * float(np.prod(s))
    pos = float(np.sum(signs * np.maximum(vals, 0.0) ** (k + 1))) / denom
    mean = a0 + 0.5 * float(np.sum(s))
    total = 2.0 * pos - mean  # |L| = 2 L_+ - L
    scale_ = float(np.max(np.abs(vals))) ** (k + 1) / abs(denom)
    if total <= 0 or scale_ > max_cancellation * total:
        return None
    return total * box.volume


@dataclass(frozen=True)
class JumpComponent:
    """One product term ``nu(dr) g(x) dx`` of the generalized Lévy measure."""

    levy: LevyMeasure1D
    intensity: SpatialIntensity = field(default_factory=lambda: SpatialIntensity.constant(1.0))


@dataclass(frozen=True)
class CharacteristicTriplet:
    """``(a, b, F)`` on ``window``: drift density, Gaussian density, jump components."""

    window: Window
    drift: SpatialIntensity = field(default_factory=SpatialIntensity.zero)
    gaussian: SpatialIntensity = field(default_factory=SpatialIntensity.zero)
    jumps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "jumps", tuple(self.jumps))
        w = self.window
        if self.gaussian.signed or self.gaussian.min_on(w) < 0:
            raise DomainError("gaussian density must be non-negative on the window")
        for i, comp in enumerate(self.jumps):
            if not isinstance(comp.levy, (DiscreteJumps, GammaType, CompoundDensity)):
                raise DomainError(f"jumps[{i}]: unsupported Lévy measure {type(comp.levy).__name__}")
            if comp.intensity.signed or comp.intensity.min_on(w) < 0:
                raise DomainError(f"jumps[{i}]: spatial intensity must be non-negative on the window")
        for name, g in (("drift", self.drift), ("gaussian", self.gaussian)):
            if not np.isfinite(g.bound(w)):
                raise DivergenceError(name, "density has no finite bound on the window")
        for i, comp in enumerate(self.jumps):
            if not np.isfinite(comp.intensity.bound(w)):
                raise DivergenceError(f"jumps[{i}]", "intensity has no finite bound on the window")

    @property
    def dim(self):
        return self.window.dim

    @property
    def is_zero(self):
        return self.drift.is_zero and self.gaussian.is_zero and not self.jumps

    def __add__(self, other):
        if other.window != self.window:
            raise DomainError("triplets live on different windows")
        return CharacteristicTriplet(
            self.window,
            self.drift + other.drift,
            self.gaussian + other.gaussian,
            self.jumps + other.jumps,
        )


def _check_cell(T, A):
    if not isinstance(A, Window):
        A = Window(*A)
    if not T.window.contains(A):
        raise DomainError(f"cell {A.lower}..{A.upper} is not inside the window {T.window.lower}..{T.window.upper}")
    return A


def drift_of_set(T: CharacteristicTriplet, A) -> float:
    """``a(A) = int_A g_a(x) dx``."""
    return T.drift.integral(_check_cell(T, A))


def gaussian_of_set(T: CharacteristicTriplet, A) -> float:
    """``b(A) = int_A g_b(x) dx`` (non-negative)."""
    return max(0.0, T.gaussian.integral(_check_cell(T, A)))


def levy_of_set(T: CharacteristicTriplet, A) -> tuple:
    """The Lévy measure ``F(., A)``: one scaled catalog measure per jump component."""
    A = _check_cell(T, A)
    return tuple(comp.levy.scaled(comp.intensity.integral(A)) for comp in T.jumps)


def _min1_r2(r):
    return np.minimum(1.0, r * r)


def control_measure(T: CharacteristicTriplet, A) -> float:
    """``lambda(A) = |a|(A) + b(A) + int min(1, r^2) F(dr, A)``."""
    A = _check_cell(T, A)
    out = T.drift.abs_integral(A)
    if not np.isfinite(out):
        raise DivergenceError("drift", "|a|(A) is not finite")
    b = gaussian_of_set(T, A)
    if not np.isfinite(b):
        raise DivergenceError("gaussian", "b(A) is not finite")
    out += b
    for i, nu in enumerate(levy_of_set(T, A)):
        try:
            val = float(levy_integral(nu, _min1_r2).value)
        except DivergenceError as exc:
            raise DivergenceError(f"jumps[{i}]", str(exc)) from None
        if not np.isfinite(val):
            raise DivergenceError(f"jumps[{i}]", "int min(1, r^2) F(dr, A) is not finite")
        out += val
    return out


def scale(T: CharacteristicTriplet, gamma: float) -> CharacteristicTriplet:
    """The triplet ``(gamma a, gamma b, gamma F)``.

    Jump components are scaled on the Lévy-measure side; spatial intensities are left alone.
    """
    gamma = float(gamma)
    if not (np.isfinite(gamma) and gamma > 0):
        raise DomainError(f"scale factor must be positive, got {gamma}")
    jumps = tuple(JumpComponent(c.levy.scaled(gamma), c.intensity) for c in T.jumps)
    return CharacteristicTriplet(T.window, T.drift.scaled(gamma), T.gaussian.scaled(gamma), jumps)


def cumulant_marginal(T: CharacteristicTriplet, A, u):
    """Lévy-Khintchine cumulant ``log E exp(i u Lambda(A))``.

    ``u`` may be a scalar or an array; the result has the same shape.
    """
    A = _check_cell(T, A)
    u_arr = np.asarray(u, dtype=float)
    a = drift_of_set(T, A)
    b = gaussian_of_set(T, A)
    out = 1j * u_arr * a - 0.5 * u_arr * u_arr * b
    out = np.asarray(out, dtype=complex)
    for nu in levy_of_set(T, A):
        out = out + lk_integral(nu, u_arr).value.reshape(u_arr.shape)
    return out[()] if out.ndim == 0 else out
