import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from fractal_langevin.noise import (
    NoiseModel,
    empirical_char_function,
    power_law_quantile,
    renormalize_cutoff,
    sample_power_law,
    sample_stable_increment,
    standard_stable,
    stream,
    walker_streams,
)


@pytest.mark.parametrize("delta, mu, expected", [(0.1, 2.0, 10 ** 0.5), (0.5, 1.0, 1.0), (0.01, 1.5, 0.01 ** (-1 / 3))])
def test_renormalized_cutoff(delta, mu, expected):
    assert renormalize_cutoff(delta, mu) == pytest.approx(expected, rel=1e-14)


def test_renormalized_cutoff_examples():
    assert renormalize_cutoff(0.01, 2.0) == pytest.approx(10.0, rel=1e-14)
    assert renormalize_cutoff(0.01, 1.0) == 1.0
    assert renormalize_cutoff(0.25, 0.5) == pytest.approx(0.25, rel=1e-14)


@settings(max_examples=200)
@given(st.floats(1e-6, 10.0), st.floats(0.05, 2.0))
def test_renormalization_identity(delta, mu):
    eta0 = renormalize_cutoff(delta, mu)
    assert eta0 ** mu * delta ** (mu - 1) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("mu", [0.0, -1.0, 2.5])
def test_renormalized_cutoff_rejects_bad_mu(mu):
    with pytest.raises(ValueError):
        renormalize_cutoff(0.1, mu)


def test_power_law_quantile_endpoint():
    assert power_law_quantile(1.0, 1.5, 2.0) == 2.0
    assert power_law_quantile(0.25, 2.0, 1.0) == 2.0


def test_power_law_truncated_mean():
    model = NoiseModel(1.5, 1.0, eta0=1.0, family="power_law")
    eta = sample_power_law(model, stream(101), 1_000_000)
    assert eta.min() >= 1.0
    # E[eta; eta <= c] = mu/(mu-1) * (1 - c^(1-mu)) for eta0 = 1
    c = 1e4
    kept = np.where(eta <= c, eta, 0.0)
    exact = 3.0 * (1 - c ** -0.5)
    se = kept.std() / math.sqrt(eta.size)
    assert abs(kept.mean() - exact) < 5 * se
    # the untruncated mean is 3; its estimate converges slowly
    assert eta.mean() == pytest.approx(3.0, rel=0.1)


def test_power_law_cdf_at_twice_cutoff():
    model = NoiseModel(1.0, 1.0, eta0=0.5, family="power_law")
    eta = sample_power_law(model, stream(102), 200_000)
    p = np.mean(eta <= 1.0)
    assert abs(p - 0.5) < 3 * math.sqrt(0.25 / eta.size)


def test_gaussian_increment_variance():
    model = NoiseModel(2.0, 0.5)
    xi = sample_stable_increment(model, 0.01, stream(103), 1_000_000)
    assert xi.var() == pytest.approx(2 * 0.5 * 0.01, rel=0.01)


def test_cauchy_increment_quartiles():
    model = NoiseModel(1.0, 2.0)
    xi = sample_stable_increment(model, 0.5, stream(104), 1_000_000)
    q1, med, q3 = np.quantile(xi, [0.25, 0.5, 0.75])
    assert abs(med) < 0.01
    assert (q3 - q1) / 2 == pytest.approx(1.0, rel=0.02)


@pytest.mark.parametrize("mu", [0.5, 1.0, 1.5, 1.8, 2.0])
def test_char_function_at_one(mu):
    model = NoiseModel(mu, 1.0)
    xi = sample_stable_increment(model, 1.0, stream(105), 1_000_000)
    ecf = empirical_char_function(xi, [1.0])
    assert abs(ecf.value[0] - math.exp(-1.0)) < 3 * ecf.se[0]


@pytest.mark.parametrize("mu", [0.7, 1.5])
def test_stable_matches_reference_distribution(mu):
    x = standard_stable(mu, stream(106), 4000)
    # scipy's S1 parametrization with beta = 0 has characteristic function exp(-|k|^mu)
    ks = stats.kstest(x, stats.levy_stable(mu, 0.0).cdf).statistic
    assert ks < 1.628 / math.sqrt(x.size)


@pytest.mark.parametrize("mu", [1.0, 1.5, 2.0])
def test_stability_under_convolution(mu):
    model = NoiseModel(mu, 0.7)
    n = 200_000
    rng = stream(107)
    four = sum(sample_stable_increment(model, 0.25, rng, n) for _ in range(4))
    one = sample_stable_increment(model, 1.0, stream(108), n)
    k = np.linspace(0.1, 4, 12)
    a, b = empirical_char_function(four, k), empirical_char_function(one, k)
    assert np.all(np.abs(a.value - b.value) < 3 * math.sqrt(2) * a.se)


@pytest.mark.parametrize("mu", [0.8, 1.0, 2.0])
def test_sign_symmetry(mu):
    xi = sample_stable_increment(NoiseModel(mu, 1.0), 0.1, stream(109), 200_000)
    assert abs(np.mean(np.sign(xi))) < 3 / math.sqrt(xi.size)
    # imaginary part of the ECF vanishes for a symmetric law
    ecf = empirical_char_function(xi, [0.5, 1, 2])
    assert np.all(np.abs(ecf.value.imag) < 3 * ecf.se)


def test_zero_noise_is_deterministic():
    xi = sample_stable_increment(NoiseModel(1.5, 0.0), 0.1, stream(1), 10)
    np.testing.assert_array_equal(xi, 0.0)


def test_streams_are_reproducible():
    a = sample_stable_increment(NoiseModel(1.5, 1.0), 0.1, stream(42, 3), 100)
    b = sample_stable_increment(NoiseModel(1.5, 1.0), 0.1, stream(42, 3), 100)
    c = sample_stable_increment(NoiseModel(1.5, 1.0), 0.1, stream(42, 4), 100)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_walker_streams_match_indexed_streams():
    for w, rng in zip(range(5, 9), walker_streams(7, 5, 4)):
        np.testing.assert_array_equal(rng.random(8), stream(7, w).random(8))


def test_empirical_char_function_basics(rng):
    ecf = empirical_char_function(np.zeros(50), [0.0, 1.0, 2.0])
    np.testing.assert_array_equal(ecf.value, 1.0)
    x = rng.normal(0, 2.0, 100_000)
    ecf = empirical_char_function(x, [0.0, 0.3, 0.7])
    assert ecf.value[0] == 1.0
    np.testing.assert_array_less(np.abs(ecf.value - np.exp(-2.0 * ecf.k ** 2)), 3 * ecf.se)
    with pytest.raises(ValueError):
        empirical_char_function([], [1.0])


@pytest.mark.parametrize("kw", [dict(mu=0.0, D=1), dict(mu=2.1, D=1), dict(mu=1, D=-1),
                                dict(mu=1, D=1, eta0=0), dict(mu=1, D=1, family="gauss")])
def test_noise_model_validation(kw):
    with pytest.raises(ValueError):
        NoiseModel(**kw)


def test_folded_coefficient():
    assert NoiseModel(1.5, 2.0, eta0=4.0).D1 == pytest.approx(16.0)
    with pytest.raises(ValueError):
        sample_power_law(NoiseModel(1.5, 1.0), stream(0), 3)
    with pytest.raises(ValueError):
        sample_stable_increment(NoiseModel(1.5, 1.0), 0.0, stream(0), 3)
