import math

import numpy as np
import pytest
from scipy import stats

from fractal_langevin.curve import CurveSpec, build_koch, evaluate
from fractal_langevin.fcalculus import build_staircase
from fractal_langevin.langevin import (
    Ensemble,
    RunConfig,
    alpha_velocity,
    map_to_curve,
    simulate_ensemble,
    step,
)
from fractal_langevin.noise import NoiseModel, sample_stable_increment, stream


def test_step_examples():
    assert step(0.0, 0.0) == 0.0
    assert step(1.5, -0.2) == pytest.approx(1.3, abs=1e-15)
    J = 0.0
    for _ in range(100):
        J = step(J, 0.0)
    assert J == 0.0


def test_alpha_velocity():
    delta = 0.1
    const = np.full(5, 2.0)
    assert alpha_velocity(const, 3, delta) == 0.0
    lin = np.arange(5) * delta * 1.7
    assert alpha_velocity(lin, 2, delta) == pytest.approx(1.7, rel=1e-12)
    with pytest.raises(IndexError):
        alpha_velocity(lin, 0, delta)


def test_alpha_velocity_recovers_increment():
    # power-of-two step: division and multiplication are exact
    delta = 2.0 ** -10
    xi = sample_stable_increment(NoiseModel(1.5, 1.0), delta, stream(1), 50)
    traj = [0.0]
    for x in xi:
        traj.append(step(traj[-1], x))
    # reconstruction from J_i - J_{i-1} is exact up to the rounding of each addition
    assert alpha_velocity(traj, 1, delta) * delta == xi[0]
    for i in range(1, 51):
        assert alpha_velocity(traj, i, delta) * delta == traj[i] - traj[i - 1]
        assert alpha_velocity(traj, i, delta) * delta == pytest.approx(xi[i - 1], abs=4 * np.spacing(abs(traj[i]) + abs(traj[i - 1])))


def test_zero_noise_ensemble():
    ens = simulate_ensemble(RunConfig(NoiseModel(2.0, 0.0), 1.0, 50, 1, 3))
    np.testing.assert_array_equal(ens.J, 0.0)
    assert ens.J.shape == (2, 1)


def test_matches_repeated_steps():
    cfg = RunConfig(NoiseModel(1.5, 0.8), 1.0, 40, 5, 11, record_times=range(41), J0=0.25)
    ens = simulate_ensemble(cfg)
    for w in range(5):
        rng = stream(11, w)
        xi = sample_stable_increment(cfg.noise, cfg.delta, rng, cfg.n_steps)
        J, path = 0.25, [0.25]
        for x in xi:
            J = step(J, x)
            path.append(J)
        np.testing.assert_array_equal(ens.J[:, w], path)


def test_snapshot_layout():
    cfg = RunConfig(NoiseModel(1.0, 1.0), 2.0, 100, 700, 1, record_times=(0, 50, 100))
    ens = simulate_ensemble(cfg)
    np.testing.assert_allclose(ens.times, [0.0, 1.0, 2.0])
    np.testing.assert_array_equal(ens.snapshot(0.0), 0.0)
    assert ens.snapshot(1.0).shape == (700,)
    assert ens.n_walkers == 700


@pytest.mark.parametrize("kw", [dict(n_steps=0), dict(n_walkers=0), dict(t_end=0.0),
                                dict(record_times=(0, 11))])
def test_config_validation(kw):
    base = dict(noise=NoiseModel(2.0, 1.0), t_end=1.0, n_steps=10, n_walkers=1)
    with pytest.raises(ValueError):
        RunConfig(**{**base, **kw})


@pytest.mark.parametrize("threads", [2, 5])
def test_thread_count_does_not_change_results(threads):
    cfg = RunConfig(NoiseModel(1.2, 1.0), 1.0, 30, 1500, 21)
    np.testing.assert_array_equal(simulate_ensemble(cfg).J, simulate_ensemble(cfg, threads=threads).J)


def test_gaussian_variance_moderate_ensemble():
    cfg = RunConfig(NoiseModel(2.0, 0.5), 1.0, 200, 20_000, 31)
    final = simulate_ensemble(cfg).J[-1]
    # relative SE of a Gaussian sample variance is sqrt(2/N)
    assert abs(final.var() - 1.0) < 3 * math.sqrt(2 / final.size)


def test_martingale():
    cfg = RunConfig(NoiseModel(2.0, 1.0), 1.0, 200, 20_000, 32, record_times=(50, 100, 200))
    ens = simulate_ensemble(cfg)
    for snap in ens.J:
        assert abs(snap.mean()) < 3 * snap.std() / math.sqrt(snap.size)


def test_law_does_not_depend_on_step_count():
    a = simulate_ensemble(RunConfig(NoiseModel(2.0, 0.5), 1.0, 500, 20_000, 41)).J[-1]
    b = simulate_ensemble(RunConfig(NoiseModel(2.0, 0.5), 1.0, 1000, 20_000, 42)).J[-1]
    n, m = a.size, b.size
    assert stats.ks_2samp(a, b).statistic < 1.628 * math.sqrt((n + m) / (n * m))


@pytest.fixture(scope="module")
def table6():
    return build_staircase(build_koch(6), 0.0)


def test_map_to_curve_examples(table6):
    T = table6.total_mass
    ens = map_to_curve(Ensemble(np.array([0.0]), np.array([[0.0, T, T / 2, -T / 4]])), table6)
    pos = ens.positions
    np.testing.assert_array_equal(pos.winding[0], [0, 1, 0, -1])
    np.testing.assert_allclose(pos.x[0, :2], 0.0, atol=1e-12)
    np.testing.assert_allclose(pos.y[0, :2], 0.0, atol=1e-12)
    np.testing.assert_allclose([pos.x[0, 2], pos.y[0, 2]], evaluate(table6.curve, 0.5), atol=1e-12)
    np.testing.assert_allclose([pos.x[0, 3], pos.y[0, 3]], evaluate(table6.curve, 0.75), atol=1e-12)


def test_winding_conservation(table6):
    cfg = RunConfig(NoiseModel(1.0, 2.0), 1.0, 100, 2000, 51, record_times=(0, 10, 100))
    ens = map_to_curve(simulate_ensemble(cfg), table6)
    pos = ens.positions
    np.testing.assert_allclose(pos.winding * table6.total_mass + pos.reduced, ens.J, rtol=1e-15, atol=1e-12)
    assert np.all((pos.reduced >= table6.J_min) & (pos.reduced < table6.J_max))


def test_curve_spec_defaults():
    spec = CurveSpec()
    assert spec.build().depth == 8
    assert spec.origin == 0.0
