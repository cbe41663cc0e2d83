import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from idfield.basis import Window
from idfield.catalog import catalog, gamma_triplet
from idfield.errors import DomainError
from idfield.kernels import (
    Box, Discretized, ExpDecay, GaussianBump, Tabulated, WeightedCombination, combo_eval,
    eval_kernel, integrability_check,
)

KERNELS = [Box((0.3,), 2.0), GaussianBump(0.4, 1.5), ExpDecay(2.0, -1.0),
           Tabulated([(-1.0, 0.0, 0.5, 1.0)], (0.0, 1.0, 0.5, 0.0))]
finite = st.floats(-3, 3)


def test_box_examples():
    k = Box((0.5,))
    assert eval_kernel(k, 0.0, 0.0) == 1.0
    assert eval_kernel(k, 0.0, 0.75) == 0.0
    assert eval_kernel(k, 0.0, 0.5) == 1.0  # closed support


def test_gaussian_bump_example():
    assert eval_kernel(GaussianBump(1.0), 0.0, 1.0) == pytest.approx(np.exp(-0.5), rel=1e-15)


def test_exp_decay_uses_euclidean_norm():
    k = ExpDecay(1.0)
    assert eval_kernel(k, (0.0, 0.0), (3.0, 4.0)) == pytest.approx(np.exp(-5.0))


def test_tabulated_interpolates_and_vanishes_off_grid():
    k = Tabulated([(0.0, 1.0), (0.0, 2.0)], (0.0, 1.0, 2.0, 3.0))
    assert eval_kernel(k, (0.0, 0.0), (0.5, 1.0)) == pytest.approx(1.5)
    assert eval_kernel(k, (0.0, 0.0), (1.5, 1.0)) == 0.0
    assert k.bound == 3.0


def test_tabulated_validation():
    with pytest.raises(DomainError):
        Tabulated([(0.0, 1.0)], (1.0, 2.0, 3.0))
    with pytest.raises(DomainError):
        Tabulated([(1.0, 0.0)], (1.0, 2.0))


def test_embedding_maps_q_to_d():
    k = Box((0.1, 0.1), embedding=[[1.0], [2.0]])
    assert eval_kernel(k, 0.25, (0.25, 0.5)) == 1.0
    assert eval_kernel(k, 0.25, (0.5, 0.25)) == 0.0


@pytest.mark.parametrize("k", KERNELS)
@given(t=finite, x=arrays(float, 20, elements=finite))
def test_bounded_and_translation_consistent(k, t, x):
    vals = eval_kernel(k, t, x[:, None])
    assert np.all(np.isfinite(vals))
    assert np.all(np.abs(vals) <= k.bound)
    np.testing.assert_array_equal(vals, eval_kernel(k, 0.0, (x - t)[:, None]))


def test_combo_eval_examples():
    k = GaussianBump(0.5)
    s = np.linspace(-1, 1, 7)[:, None]
    assert np.all(combo_eval(WeightedCombination(k, ((0.0,),), (0.0,)), s) == 0.0)
    np.testing.assert_array_equal(combo_eval(WeightedCombination(k, ((0.2,),), (1.0,)), s), eval_kernel(k, 0.2, s))
    assert np.all(combo_eval(WeightedCombination(k, ((0.2,), (0.2,)), (1.0, -1.0)), s) == 0.0)


@given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite), finite, finite)
def test_combo_eval_is_linear(x, y, alpha, beta):
    k = ExpDecay(1.5)
    pts = ((-0.5,), (0.1,), (0.7,))
    s = np.linspace(-1, 1, 11)[:, None]
    lhs = combo_eval(WeightedCombination(k, pts, alpha * x + beta * y), s)
    rhs = alpha * combo_eval(WeightedCombination(k, pts, x), s) + beta * combo_eval(WeightedCombination(k, pts, y), s)
    np.testing.assert_allclose(lhs, rhs, atol=1e-14 * (1 + abs(alpha) + abs(beta)) * 10)


def test_combination_validation():
    with pytest.raises(DomainError):
        WeightedCombination(Box((1.0,)), (), ())
    with pytest.raises(DomainError):
        WeightedCombination(Box((1.0,)), ((0.0,),), (np.nan,))


def test_integrability_examples():
    W = Window.unit(1)
    for T in catalog().values():
        assert integrability_check(Box((0.5,)), T, W)
    bad = integrability_check(Tabulated([(0.0, 1.0)], (1.0, 1.0), bound=np.inf), gamma_triplet(), W)
    assert not bad and "unbounded" in bad.reason
    assert integrability_check(GaussianBump(0.3), gamma_triplet(), W)


def test_discretized_is_piecewise_constant():
    W = Window.unit(1)
    k = Discretized(GaussianBump(0.3), W, (4,))
    x = np.array([[0.01], [0.2], [0.24], [0.76]])
    vals = eval_kernel(k, 0.5, x)
    assert vals[0] == vals[1] == vals[2] == pytest.approx(np.exp(-0.5 * (0.375 / 0.3) ** 2))
    assert eval_kernel(k, 0.5, 1.5) == 0.0
    np.testing.assert_allclose(k.breakpoints(0.5)[0], [0, 0.25, 0.5, 0.75, 1.0])
