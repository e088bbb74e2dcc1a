import math

import pytest

import tmcc


def test_pmf_matches_definition():
    p = tmcc.tmcc_pmf(1.0)
    i0 = sum(1 / math.factorial(m) ** 2 for m in range(40))  # I0(2)
    assert p[0] == pytest.approx(1 / i0, rel=1e-13)
    assert p[3] == pytest.approx(1 / (36 * i0), rel=1e-13)
    assert sum(p) == pytest.approx(1.0, abs=1e-12)


def test_moments_sub_poissonian():
    for lam in (0.5, 2.0, 7.0):
        assert tmcc.mean_square_photons(lam) == lam * lam
        assert tmcc.variance(lam) < tmcc.mean_photons(lam)
    assert tmcc.amplitude_for_mean(tmcc.mean_photons(3.0)) == pytest.approx(3.0, rel=1e-12)


def test_error_analysis():
    assert tmcc.decision_threshold(4.0) == 3
    assert tmcc.error_factor(1.0) == pytest.approx(1.0)
    assert tmcc.error_probability(4.0, 0.02) == pytest.approx(0.02 * tmcc.error_factor(4.0))
    assert tmcc.error_factor(20.0) < tmcc.error_factor(2.0)


def test_chi_square():
    assert tmcc.chi_square_sf(3.841458820694124, 1) == pytest.approx(0.05, abs=1e-12)


def test_fit_test_and_errors():
    with pytest.raises(tmcc.InsufficientData):
        tmcc.fit_test([0, 1, 2], 2.0)
    with pytest.raises(ValueError):
        tmcc.tmcc_pmf(-1.0)


def test_sessions():
    ok = tmcc.run_session(lambda_=2.0, key_bits=1024, seed=5)
    assert ok["outcome"] == "accepted"
    assert ok["alice_key"] == ok["bob_key"]
    assert len(ok["alice_key"]) == 1024

    cloned = tmcc.run_session(key_bits=4096, seed=8, attack="clone:poisson")
    assert cloned["abort_reason"] == "eavesdropping-suspected"

    with pytest.raises(ValueError):
        tmcc.run_session(key_bits=7)
