import math
import warnings

import mpmath
import numpy as np
import pytest

from heavybandits.env import (BanditInstance, NoiseSpec, draw_reward, make_ape_counterexample, make_gap_instance,
                              make_ucb_counterexample, noise_draws, nu_p_bound)
from heavybandits.perturbations import PerturbationSpec

warnings.simplefilter("ignore")
GUMBEL = PerturbationSpec.named("gumbel", 1.0)


def test_noiseless_reward():
    inst = BanditInstance((0.7, 0.2))
    assert draw_reward(inst, 0, 0.123) == 0.7
    assert draw_reward(inst, 1, 0.999) == 0.2


def test_zero_noise_point():
    nz = NoiseSpec.pareto(2.5, 1.3)
    inst = BanditInstance((0.4, 0.9), nz)
    # z = E[z] when (1 - u)^(-1/alpha) = alpha / (alpha - 1)
    u = 1.0 - (2.5 / 1.5) ** -2.5
    assert draw_reward(inst, 0, u) == pytest.approx(0.4, abs=1e-14)


def test_reward_errors():
    inst = make_gap_instance(3, 0.2)
    with pytest.raises(IndexError):
        draw_reward(inst, 3, 0.5)
    with pytest.raises(ValueError):
        draw_reward(inst, 0, 1.0)


def test_noise_mean_finite_variance():
    u = np.random.default_rng(5).random(1_000_000)
    for alpha in [2.05, 3.0]:
        e = noise_draws(NoiseSpec.pareto(alpha, 1.0), u)
        assert abs(e.mean()) <= 5 * e.std() / 1e3


@pytest.mark.parametrize("alpha", [1.15, 1.55, 1.95])
def test_noise_median_heavy(alpha):
    nz = NoiseSpec.pareto(alpha, 1.0)
    e = noise_draws(nz, np.random.default_rng(6).random(1_000_000))
    want = 2.0 ** (1 / alpha) - nz.z_mean
    # the median's standard error is 1 / (2 f(m) sqrt(n)); f at the median of Pareto is alpha / (2 m)
    m = 2.0 ** (1 / alpha)
    se = 1.0 / (2 * (alpha / (2 * m)) * 1e3)
    assert abs(np.median(e) - want) <= 5 * se


def test_reward_mean_monte_carlo():
    inst = make_gap_instance(2, 0.3, NoiseSpec.pareto(3.0, 1.0))
    u = np.random.default_rng(7).random(1_000_000)
    r = inst.means[1] + noise_draws(inst.noise, u)
    assert abs(r.mean() - 0.7) <= 3 * r.std() / 1e3


def test_nu_p_bound_examples():
    nz = NoiseSpec.pareto(1.55, 1.0)
    mpmath.mp.dps = 40
    a, p = mpmath.mpf("1.55"), mpmath.mpf("1.5")
    want = (abs(1 - a / (a - 1)) + (a / (a - p)) ** (1 / p)) ** p
    assert nu_p_bound(nz, 1.0, 1.5) == pytest.approx(float(want), rel=1e-13)
    assert nu_p_bound(nz, 1.0, 1.5) == pytest.approx(39.9, abs=0.06)
    nz2 = NoiseSpec.pareto(3.0, 2.0)
    assert nu_p_bound(nz2, nz2.z_mean, 1.7) == pytest.approx(3.0 * 2.0 ** 1.7 / (3.0 - 1.7), rel=1e-13)
    with pytest.raises(ValueError):
        nu_p_bound(NoiseSpec.pareto(1.5, 1.0), 1.0, 1.5)


@pytest.mark.parametrize("p", [1.1, 1.5, 1.9])
def test_nu_p_bound_dominates_empirical_moment(p):
    nz = NoiseSpec.pareto(p + 0.05, 1.0)
    y = 1.0 + noise_draws(nz, np.random.default_rng(8).random(1_000_000))
    assert np.mean(np.abs(y) ** p) <= nu_p_bound(nz, 1.0, p) * 1.1


def test_gap_instance():
    inst = make_gap_instance(2, 0.3)
    assert inst.means == (1.0, 0.7)
    inst = make_gap_instance(5, 1.0)
    assert inst.means == (1.0, 0.0, 0.0, 0.0, 0.0)
    np.testing.assert_allclose(make_gap_instance(4, 0.25).gaps, [0, 0.25, 0.25, 0.25])
    for bad in [(1, 0.2), (3, 0.0), (3, 1.5)]:
        with pytest.raises(ValueError):
            make_gap_instance(*bad)


def test_instance_validation():
    with pytest.raises(ValueError):
        BanditInstance((0.5,))
    with pytest.raises(ValueError):
        BanditInstance((0.5, 1.2))
    assert BanditInstance((0.3, 0.3, 0.1)).best_arm == 0


def test_ucb_counterexample():
    inst = make_ucb_counterexample(2, 100, 2.0, 1.0, 1.0)
    assert inst.means[0] == pytest.approx(math.sqrt(math.log(100) / 100), rel=1e-14)
    assert inst.means[0] == pytest.approx(0.2146, abs=1e-4)
    assert sum(m != 0 for m in inst.means) == 1 and inst.noise.kind == "noiseless"
    gaps = [make_ucb_counterexample(4, T, 1.5).means[0] for T in [10, 100, 10 ** 3, 10 ** 5]]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    with pytest.raises(ValueError):
        make_ucb_counterexample(10, 3, 1.5, nu=5.0)


def test_ape_counterexample():
    c, T = 0.1, 500
    inst = make_ape_counterexample(2, T, 1.5, c, GUMBEL)
    q = -math.log(math.log(2.0))
    assert q == pytest.approx(0.3665, abs=1e-4)
    assert inst.means[0] == pytest.approx(0.5 * c ** (1 / 1.5) * (1 / T) ** (1 / 3) * q, rel=1e-12)
    assert sum(m != 0 for m in inst.means) == 1
    assert 0 <= inst.means[0] <= 1


def test_ape_counterexample_preconditions():
    # K = 4, p = 1.5: c must be below 3 / (3 + 8)
    with pytest.raises(ValueError, match="c_range"):
        make_ape_counterexample(4, 1000, 1.5, 0.3, GUMBEL)
    with pytest.raises(ValueError, match="horizon_too_small"):
        make_ape_counterexample(4, 100, 1.5, 0.19, PerturbationSpec("pareto", 1.1, 30.0))
