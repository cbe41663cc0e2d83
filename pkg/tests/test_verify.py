import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from idfield.basis import Window, scale
from idfield.catalog import gamma_triplet, gaussian_triplet, zero_triplet
from idfield.charfn import CumulantRequest, characteristic_function
from idfield.errors import DomainError
from idfield.kernels import Box
from idfield.simulate import FieldSample, GridDiscretization, SimulationConfig, simulate_array
from idfield.verify import (
    VerificationSettings, cf_compare, empirical_cf, ks_critical_value, ks_two_sample, psd_check,
    verify_infinite_divisibility,
)

W = Window.unit(1)
FULL = Box((0.5,))
CENTRE = [(0.5,)]


def non_cf(x):
    return max(0.0, 1.0 - float(np.sum(np.square(x))))


def cfg(reps=1000, seed=0, cells=8):
    return SimulationConfig(GridDiscretization(W, (cells,)), replicates=reps, seed=seed)


def test_empirical_cf_examples(rng):
    zeros = [FieldSample((0.0,), r) for r in range(5)]
    assert empirical_cf(zeros, 2.3) == 1
    assert empirical_cf(rng.normal(size=(50, 2)), [0.0, 0.0]) == 1
    z = rng.standard_normal(100_000)
    assert abs(empirical_cf(z, 1.0) - np.exp(-0.5)) < 0.02
    with pytest.raises(DomainError):
        empirical_cf([], 1.0)


@given(arrays(float, (30, 2), elements=st.floats(-1e3, 1e3)), arrays(float, 2, elements=st.floats(-50, 50)))
def test_empirical_cf_modulus_bounded(samples, x):
    assert abs(empirical_cf(samples, x)) <= 1.0


def test_cf_compare_examples():
    zero = simulate_array(zero_triplet(), FULL, CENTRE, cfg(reps=10))
    req = CumulantRequest.build(zero_triplet(), FULL, CENTRE)
    assert cf_compare(zero, req, np.linspace(-3, 3, 7)).max_error == 0.0
    x = simulate_array(gaussian_triplet(), FULL, CENTRE, cfg(reps=100_000, seed=3))
    req = CumulantRequest.build(gaussian_triplet(), FULL, CENTRE)
    assert cf_compare(x, req, np.linspace(-3, 3, 11)).max_error < 0.02
    doubled = CumulantRequest.build(scale(gaussian_triplet(), 2.0), FULL, CENTRE)
    comp = cf_compare(x, doubled, [2.0])
    assert comp.max_error > 0.1
    assert len(comp.table) == 1


def test_psd_examples(rng):
    assert psd_check(lambda x: 1.0, [[0.3]]) == pytest.approx(1.0)
    pts = rng.uniform(-3, 3, size=10)
    assert psd_check(lambda x: np.exp(-0.5 * x * x), pts) >= -1e-10
    assert psd_check(non_cf, [0.0, 0.5, 1.0]) < 0


def test_psd_negative_control_brute_force():
    pts = np.array([0.0, 0.5, 1.0])
    M = np.array([[non_cf(a - b) for b in pts] for a in pts])
    assert psd_check(non_cf, pts) == pytest.approx(1 - 0.75 * np.sqrt(2), abs=1e-14)
    assert psd_check(non_cf, pts) == pytest.approx(np.linalg.eigvalsh(M)[0], abs=1e-14)


def test_psd_point_limit():
    with pytest.raises(DomainError):
        psd_check(non_cf, np.zeros(26))
    with pytest.raises(DomainError):
        psd_check(non_cf, np.zeros(0))


def test_psd_permutation_invariant(rng):
    req = CumulantRequest.build(gamma_triplet(), FULL, CENTRE)
    phi = characteristic_function(req, 0.5)
    pts = rng.uniform(-3, 3, size=12)
    a = psd_check(phi, pts)
    b = psd_check(phi, rng.permutation(pts))
    assert a == pytest.approx(b, abs=1e-12)
    assert a >= -1e-8


def test_ks_examples():
    assert ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]).statistic == 0.0
    assert ks_two_sample([0.0], [1.0]).statistic == 1.0
    assert ks_critical_value(0.01) == pytest.approx(1.628, abs=5e-4)
    with pytest.raises(DomainError):
        ks_two_sample([], [1.0])


@given(arrays(float, 20, elements=st.floats(-5, 5)), arrays(float, 13, elements=st.floats(-5, 5)))
def test_ks_symmetric_and_matches_scipy(a, b):
    from scipy.stats import ks_2samp
    assert ks_two_sample(a, b) == ks_two_sample(b, a)
    assert ks_two_sample(a, b).statistic == pytest.approx(ks_2samp(a, b).statistic, abs=1e-12)


def test_ks_level_by_repetition():
    # 100 pairs of independent Gaussian-field marginals; each pair shares no stream.
    x = simulate_array(gaussian_triplet(), FULL, CENTRE, cfg(reps=200 * 2000, seed=11, cells=1))[:, 0]
    x = x.reshape(200, 2000)
    passes = sum(ks_two_sample(x[2 * i], x[2 * i + 1]).passed for i in range(100))
    assert passes >= 95


def test_verify_zero_triplet_passes_with_zero_errors():
    rep = verify_infinite_divisibility(zero_triplet(), FULL, CENTRE, [2, 3], cfg(),
                                       VerificationSettings(replicates=200))
    assert rep.passed
    assert rep.cf_max_abs_error == 0.0 and rep.ks_statistic == 0.0


def test_verify_gaussian_passes():
    rep = verify_infinite_divisibility(gaussian_triplet(), FULL, CENTRE, [2, 5], cfg())
    assert rep.passed, rep.to_dict()
    assert "consistent with" in rep.summary
    assert set(rep.psd_gammas) == {0.2, 0.5, 2.0}


def test_verify_gamma_psd_half():
    rep = verify_infinite_divisibility(gamma_triplet(), FULL, CENTRE, [2], cfg(),
                                       VerificationSettings(replicates=2000, psd_gammas=(0.5,)))
    assert rep.psd_min_eigenvalue >= -1e-8


def test_verify_negative_control_fails():
    rep = verify_infinite_divisibility(gaussian_triplet(), FULL, CENTRE, [2], cfg(),
                                       VerificationSettings(replicates=5000, sum_scale=2.0))
    assert not rep.passed
    assert not rep.ks_pass and not rep.cf_pass


def test_verify_records_errors_instead_of_raising():
    bad_grid = SimulationConfig(GridDiscretization(Window((0.0,), (2.0,)), (2,)), replicates=10)
    rep = verify_infinite_divisibility(gaussian_triplet(), FULL, CENTRE, [2], bad_grid,
                                       VerificationSettings(replicates=10))
    assert not rep.passed and rep.error_kind == "DomainError"


def test_verify_requires_m_values():
    with pytest.raises(DomainError):
        VerificationSettings(m_values=())


def test_report_flags_follow_numbers():
    rep = verify_infinite_divisibility(zero_triplet(), FULL, CENTRE, [2], cfg(), VerificationSettings(replicates=50))
    d = rep.to_dict()
    assert d["passed"] == (d["ks_statistic"] < d["ks_threshold"] and d["cf_max_abs_error"] < d["cf_threshold"]
                           and d["psd_min_eigenvalue"] >= -d["psd_tolerance"])
