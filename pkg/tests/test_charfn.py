import numpy as np
import pytest
from hypothesis import given, strategies as st

from idfield.basis import CharacteristicTriplet, JumpComponent, SpatialIntensity, Window, scale
from idfield.catalog import catalog, compound_triplet, discrete_triplet, gamma_triplet, gaussian_triplet, zero_triplet
from idfield.charfn import (
    CumulantRequest, SpatialQuadrature, cf_joint, cf_pow, characteristic_function,
    combined_drift, combined_gaussian, cumulant_joint, jump_cumulant,
)
from idfield.errors import DomainError
from idfield.kernels import Box, Discretized, ExpDecay, GaussianBump, Tabulated
from idfield.levy import DiscreteJumps

from oracles import compound_poisson_product_cf, gamma_cumulant_unit

FULL = Box((0.5,))
CENTRE = ((0.5,),)


def req(T, weights=(1.0,), kernel=FULL, points=CENTRE, **kw):
    return CumulantRequest.build(T, kernel, points, weights, **kw)


def test_drift_examples(unit):
    assert combined_drift(req(gaussian_triplet(), (0.0,))) == 0.0
    T = CharacteristicTriplet(unit, drift=SpatialIntensity.constant(1.0))
    assert combined_drift(req(T, kernel=Box((0.2,)))) == pytest.approx(0.4, rel=1e-14)
    assert combined_drift(req(gaussian_triplet())) == 0.0


def test_gaussian_examples():
    T = gaussian_triplet()
    assert combined_gaussian(req(T, (0.0,))) == 0.0
    assert combined_gaussian(req(T, (2.0,), kernel=ExpDecay(1.0))) == pytest.approx(
        4 * combined_gaussian(req(T, (1.0,), kernel=ExpDecay(1.0))), rel=1e-14)
    assert combined_gaussian(req(T, kernel=Box((0.15,)))) == pytest.approx(0.3, rel=1e-14)


def test_jump_examples():
    assert jump_cumulant(req(gaussian_triplet())) == 0
    assert jump_cumulant(req(discrete_triplet(), (0.0,))) == 0
    assert abs(jump_cumulant(req(discrete_triplet(), (np.pi,)))) < 1e-14


def test_cumulant_examples():
    assert cumulant_joint(req(gamma_triplet(), (0.0,))) == 0
    assert cumulant_joint(req(gaussian_triplet())) == pytest.approx(-0.5, rel=1e-14)
    for u in (0.5, 1.0, 3.0):
        got = cumulant_joint(req(gamma_triplet(), (u,)))
        assert abs(got - gamma_cumulant_unit(u)) <= 1e-10 * abs(gamma_cumulant_unit(u))


def test_gaussian_cf_in_two_dimensions():
    W = Window.unit(2)
    T = CharacteristicTriplet(W, gaussian=SpatialIntensity.constant(1.0))
    r = CumulantRequest.build(T, Box((0.5, 0.5)), ((0.5, 0.5),))
    np.testing.assert_allclose(cf_joint(r, [0.5, 1.0, 2.0]).cf_values, np.exp(-0.5 * np.array([0.25, 1, 4])),
                               rtol=1e-12)


def test_cf_examples():
    r = req(gaussian_triplet())
    assert cf_joint(r, [0.0]).cf_values[0] == 1
    assert cf_joint(r).cf_values[0] == pytest.approx(np.exp(-0.5), rel=1e-14)


def _two_point_request(T):
    return CumulantRequest.build(T, GaussianBump(0.25), ((0.3,), (0.6,)))


@given(st.sampled_from(sorted(catalog())), st.floats(-4, 4), st.floats(-4, 4))
def test_hermitian_and_bounded(name, x1, x2):
    r = _two_point_request(catalog()[name])
    rep = cf_joint(r, [[x1, x2], [-x1, -x2]])
    c, cm = rep.cumulants
    assert c.real <= 1e-8
    assert cm == pytest.approx(np.conj(c), abs=1e-10)
    assert np.all(np.abs(rep.cf_values) <= 1 + 1e-8)


def test_cf_pow_examples():
    r = req(gaussian_triplet())
    assert np.array_equal(cf_pow(r, 1.0).cf_values, cf_joint(r).cf_values)
    assert cf_pow(r, 2.0).cf_values[0] == pytest.approx(np.exp(-1.0), rel=1e-14)
    quarter = cf_pow(req(compound_triplet(), (1.7,)), 0.25).cf_values[0]
    assert quarter ** 4 == pytest.approx(cf_joint(req(compound_triplet(), (1.7,))).cf_values[0], rel=1e-10)
    with pytest.raises(DomainError):
        cf_pow(r, 0.0)


@given(st.sampled_from(sorted(catalog())), st.floats(0.05, 20))
def test_gamma_identity_on_shared_nodes(name, gamma):
    T = catalog()[name]
    args = [[1.0, -0.5], [2.5, 0.3]]
    a = cf_pow(_two_point_request(T), gamma, args).cf_values
    b = cf_joint(_two_point_request(scale(T, gamma)), args).cf_values
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=0)


def test_cumulant_additive_across_triplets():
    T1, T2 = gaussian_triplet(), compound_triplet()
    args = [[0.7, -1.2]]
    lhs = cf_joint(_two_point_request(T1 + T2), args).cumulants[0]
    rhs = cf_joint(_two_point_request(T1), args).cumulants[0] + cf_joint(_two_point_request(T2), args).cumulants[0]
    assert abs(lhs - rhs) <= 1e-10


def test_brute_force_product_oracle():
    W = Window.unit(1)
    pairs = [(0.5, 1.5), (-0.8, 0.7), (2.0, 1.0)]
    T = CharacteristicTriplet(W, jumps=(JumpComponent(DiscreteJumps.from_pairs(pairs), SpatialIntensity.constant(1.3)),))
    k = Discretized(GaussianBump(0.3), W, (4,))
    pts = ((0.2,), (0.7,))
    centres = (np.arange(4) + 0.5) / 4
    K = np.array([[np.exp(-0.5 * ((c - t[0]) / 0.3) ** 2) for c in centres] for t in pts])
    r = CumulantRequest.build(T, k, pts)
    for x in ([1.0, 0.0], [0.4, -2.0], [3.0, 1.5]):
        ref = compound_poisson_product_cf(pairs, np.full(4, 0.25 * 1.3), K, x)
        assert abs(cf_joint(r, [x]).cf_values[0] - ref) <= 1e-10


def test_error_estimates_are_reported():
    rep = cf_joint(_two_point_request(gamma_triplet()), [[1.0, 1.0]])
    assert 0 <= rep.error_estimates[0] < 1e-6


def test_tabulated_and_2d_quadrature_against_closed_form():
    W = Window.unit(1)
    T = CharacteristicTriplet(W, gaussian=SpatialIntensity.constant(1.0))
    k = Tabulated([(-0.5, 0.0, 0.5)], (0.0, 1.0, 0.0))  # hat of height 1, integral of square = 1/3
    r = CumulantRequest.build(T, k, ((0.5,),), (1.0,))
    assert combined_gaussian(r) == pytest.approx(1 / 3, rel=1e-13)


def test_integrability_failure_is_domain_error():
    with pytest.raises(DomainError):
        req(gamma_triplet(), kernel=Tabulated([(0.0, 1.0)], (1.0, 1.0), bound=np.inf))


def test_characteristic_function_callable_matches_report():
    r = _two_point_request(compound_triplet())
    phi = characteristic_function(r, 0.5)
    assert phi([1.0, 2.0]) == cf_pow(r, 0.5, [[1.0, 2.0]]).cf_values[0]


def test_report_to_dict():
    d = cf_joint(req(zero_triplet()), [0.5, 1.0]).to_dict()
    assert d["cf"] == [[1.0, 0.0], [1.0, 0.0]]
    assert d["arguments"] == [[0.5], [1.0]]


def test_quadrature_options():
    r = req(gamma_triplet(), (2.0,), quadrature=SpatialQuadrature(order=6, max_panel_width=0.1))
    assert cumulant_joint(r) == pytest.approx(gamma_cumulant_unit(2.0), rel=1e-10)
    with pytest.raises(DomainError):
        SpatialQuadrature(order=1)
