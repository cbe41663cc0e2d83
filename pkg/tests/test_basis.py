import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from idfield.basis import (
    CharacteristicTriplet, JumpComponent, SpatialIntensity, Window, control_measure,
    cumulant_marginal, drift_of_set, gaussian_of_set, levy_of_set, scale,
)
from idfield.catalog import catalog, discrete_triplet, gaussian_triplet, gamma_triplet, zero_triplet
from idfield.errors import DivergenceError, DomainError
from idfield.levy import DiscreteJumps, GammaType, levy_integral

from oracles import gamma_cumulant_unit


def test_window_validation():
    with pytest.raises(DomainError):
        Window((0.0,), (0.0,))
    with pytest.raises(DomainError):
        Window((), ())
    assert Window.unit(3).volume == 1.0


def test_drift_examples(unit):
    assert drift_of_set(zero_triplet(), ((0.0,), (1.0,))) == 0.0
    T = CharacteristicTriplet(unit, drift=SpatialIntensity.constant(1.0))
    assert drift_of_set(T, unit) == 1.0
    T = CharacteristicTriplet(unit, drift=SpatialIntensity.linear(0.0, (1.0,), signed=True))
    quad = integrate.quad(lambda x: x, 0, 1)[0]
    assert drift_of_set(T, unit) == pytest.approx(0.5) == pytest.approx(quad)


def test_gaussian_examples():
    W2 = Window.unit(2)
    assert gaussian_of_set(CharacteristicTriplet(W2, gaussian=SpatialIntensity.constant(2.0)), W2) == 2.0
    T = CharacteristicTriplet(Window.unit(1), gaussian=SpatialIntensity.exponential((1.0,)))
    ref = integrate.quad(lambda x: np.exp(-x), 0, 1)[0]
    assert gaussian_of_set(T, Window.unit(1)) == pytest.approx(ref, rel=1e-14)
    assert ref == pytest.approx(0.63212, abs=1e-5)


def test_cell_outside_window():
    with pytest.raises(DomainError):
        drift_of_set(zero_triplet(), Window((0.5,), (1.5,)))


def test_negative_gaussian_density_rejected(unit):
    with pytest.raises(DomainError):
        CharacteristicTriplet(unit, gaussian=SpatialIntensity.linear(-0.5, (1.0,)))


def test_levy_of_set_examples(unit):
    T = discrete_triplet()
    assert levy_of_set(T, unit) == (DiscreteJumps.from_pairs([(2.0, 1.0)]),)
    assert levy_of_set(T, Window((0.0,), (0.5,))) == (DiscreteJumps.from_pairs([(2.0, 0.5)]),)
    T3 = CharacteristicTriplet(unit, jumps=(JumpComponent(GammaType(1, 1), SpatialIntensity.constant(3.0)),))
    (nu,) = levy_of_set(T3, unit)
    assert nu.c == 3.0
    direct = 3.0 * integrate.quad(lambda r: min(1, r * r) * np.exp(-r) / r, 0, 1)[0] \
        + 3.0 * integrate.quad(lambda r: np.exp(-r) / r, 1, np.inf)[0]
    assert levy_integral(nu, lambda r: np.minimum(1, r * r)).value == pytest.approx(direct, rel=1e-9)


def test_control_measure_examples(unit):
    assert control_measure(zero_triplet(), unit) == 0.0
    T = CharacteristicTriplet(unit, drift=SpatialIntensity.constant(1.0), gaussian=SpatialIntensity.constant(1.0))
    assert control_measure(T, unit) == 2.0
    assert control_measure(discrete_triplet(pairs=((0.5, 2.0),)), unit) == pytest.approx(0.5)


def test_control_measure_uses_absolute_drift(unit):
    T = CharacteristicTriplet(unit, drift=SpatialIntensity.linear(-1.0, (2.0,), signed=True))
    assert drift_of_set(T, unit) == pytest.approx(0.0, abs=1e-15)
    assert control_measure(T, unit) == pytest.approx(0.5, rel=1e-9)


def test_control_measure_names_divergent_component(unit):
    bad = SpatialIntensity.from_callable(lambda x: np.full(len(x), np.inf), bound=1.0)
    T = CharacteristicTriplet(unit, drift=bad)
    with pytest.raises((DivergenceError, DomainError)):
        control_measure(T, unit)


@given(st.lists(st.floats(0.05, 1.0), min_size=1, max_size=5))
def test_additivity_over_partitions(sizes):
    edges = np.concatenate([[0.0], np.cumsum(sizes) / np.sum(sizes)])
    W = Window.unit(1)
    T = CharacteristicTriplet(
        W, drift=SpatialIntensity.linear(0.2, (-0.7,), signed=True),
        gaussian=SpatialIntensity.exponential((1.3,), 0.5),
        jumps=(JumpComponent(GammaType(1, 2), SpatialIntensity.linear(0.5, (1.0,))),),
    )
    cells = [Window((a,), (b,)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    for fn in (drift_of_set, gaussian_of_set, control_measure):
        whole = fn(T, W)
        parts = sum(fn(T, c) for c in cells)
        assert parts == pytest.approx(whole, rel=1e-9, abs=1e-12)


def test_scale_examples(unit):
    T = gaussian_triplet()
    assert scale(T, 1.0) == T
    assert scale(T, 2.0).gaussian == SpatialIntensity.constant(2.0)
    D = scale(discrete_triplet(pairs=((2.0, 0.9),)), 1 / 3)
    assert D.jumps[0].levy.rates[0] == pytest.approx(0.3)
    with pytest.raises(DomainError):
        scale(T, 0.0)


@given(st.floats(0.1, 10), st.floats(0.1, 10))
def test_scale_composes(g1, g2):
    T = catalog()["compound"]
    a = cumulant_marginal(scale(scale(T, g1), g2), T.window, 1.3)
    b = cumulant_marginal(scale(T, g1 * g2), T.window, 1.3)
    assert abs(a - b) <= 1e-12 * abs(b)


def test_cumulant_marginal_examples(unit):
    assert cumulant_marginal(gaussian_triplet(), unit, 0.0) == 0
    assert cumulant_marginal(gaussian_triplet(), unit, 1.0) == pytest.approx(-0.5)
    assert abs(cumulant_marginal(discrete_triplet(), unit, np.pi)) < 1e-15
    u = np.array([0.5, 1.0, 3.0])
    got = cumulant_marginal(gamma_triplet(), unit, u)
    ref = np.array([gamma_cumulant_unit(v) for v in u])
    np.testing.assert_allclose(got, ref, rtol=1e-10)


@given(st.sampled_from(sorted(catalog())), st.floats(-10, 10), st.floats(0.0, 0.9), st.floats(0.05, 0.1))
def test_cumulant_marginal_properties(name, u, lo, width):
    T = catalog()[name]
    A = Window((lo,), (lo + width,))
    c = cumulant_marginal(T, A, u)
    assert c.real <= 1e-8
    assert cumulant_marginal(T, A, -u) == pytest.approx(np.conj(c), abs=1e-10)
    assert cumulant_marginal(T, A, 0.0) == 0


@given(st.sampled_from(sorted(catalog())), st.floats(0.01, 20), st.floats(-5, 5))
def test_scaling_linearity(name, gamma, u):
    T = catalog()[name]
    a = cumulant_marginal(scale(T, gamma), T.window, u)
    b = gamma * cumulant_marginal(T, T.window, u)
    assert abs(a - b) <= 1e-12 * max(abs(b), 1e-300)


def test_triplet_addition(unit):
    T = gaussian_triplet() + discrete_triplet()
    u = 0.8
    assert cumulant_marginal(T, unit, u) == pytest.approx(
        cumulant_marginal(gaussian_triplet(), unit, u) + cumulant_marginal(discrete_triplet(), unit, u), abs=1e-14)


@given(st.floats(-1, 1), st.floats(-2, 2).filter(lambda v: abs(v) > 1e-3), st.floats(-2, 2))
def test_abs_integral_of_signed_linear_drift_2d(a, s0, s1):
    g = SpatialIntensity.linear(a, (s0, s1), signed=True)
    box = Window((0.0, 0.0), (1.0, 1.0))

    def inner(y):
        root = -(a + s1 * y) / s0
        pts = [root] if 0 < root < 1 else None
        return integrate.quad(lambda x: abs(a + s0 * x + s1 * y), 0, 1, points=pts, epsabs=1e-14)[0]

    kinks = [y for y in ((-a) / s1, -(a + s0) / s1) if 0 < y < 1] if s1 else []
    ref = integrate.quad(inner, 0, 1, points=kinks or None, epsabs=1e-14, limit=200)[0]
    assert g.abs_integral(box) == pytest.approx(ref, rel=1e-9, abs=1e-12)
