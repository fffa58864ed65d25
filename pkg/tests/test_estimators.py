import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heavybandits.env import NoiseSpec, noise_draws, nu_p_bound
from heavybandits.estimators import EstimatorSpec, confidence_width, estimate, mom_blocks

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_examples():
    assert estimate(EstimatorSpec("sample_mean"), [1, 2, 3]) == 2.0
    y = np.array([0.5, -1.0, 2.0, 0.25])
    tm = EstimatorSpec("truncated_mean", p=1.5, nu_p=1e9, delta=0.1)
    assert estimate(tm, y) == pytest.approx(y.mean())
    mom = EstimatorSpec("median_of_means", delta=0.5)
    assert mom_blocks(3, 0.5) == 1
    assert estimate(mom, [1.0, 2.0, 6.0]) == pytest.approx(3.0)


def test_mom_hand_enumeration():
    # k = min(floor(8 ln(1/delta)) + 1, n // 2) = 3 with n = 6
    delta = math.exp(-0.3)
    assert mom_blocks(6, delta) == 3
    assert estimate(EstimatorSpec("median_of_means", delta=delta), [0, 0, 0, 0, 100, 0]) == 0.0


def test_mom_even_blocks_average_middle():
    delta = math.exp(-0.15)  # k = 2
    assert estimate(EstimatorSpec("median_of_means", delta=delta), [1.0, 3.0, 10.0, 20.0]) == pytest.approx(8.5)


def test_truncated_mean_index_threshold():
    # threshold for index i is (nu i / ln(1/delta))^(1/p); with nu = ln(1/delta) and p = 1 it is i
    delta = math.exp(-1.0)
    spec = EstimatorSpec("truncated_mean", p=2.0, nu_p=1.0, delta=delta)
    y = np.array([1.5, 1.0, 2.0, 1.9])  # thresholds 1, sqrt2, sqrt3, 2
    assert estimate(spec, y) == pytest.approx((0 + 1.0 + 0 + 1.9) / 4)


def test_missing_parameters():
    with pytest.raises(ValueError):
        EstimatorSpec("truncated_mean", delta=0.1)
    with pytest.raises(ValueError):
        EstimatorSpec("median_of_means")
    with pytest.raises(ValueError):
        EstimatorSpec("p_robust")
    with pytest.raises(ValueError):
        estimate(EstimatorSpec("sample_mean"), [])


@settings(max_examples=100, deadline=None)
@given(y=finite, n=st.integers(1, 200))
def test_constant_data(y, n):
    data = np.full(n, y)
    assert estimate(EstimatorSpec("sample_mean"), data) == pytest.approx(y, rel=1e-12, abs=1e-300)
    assert estimate(EstimatorSpec("median_of_means", delta=0.01), data) == pytest.approx(y, rel=1e-12, abs=1e-300)
    tm = EstimatorSpec("truncated_mean", p=1.5, nu_p=abs(y) ** 1.5 * math.log(100) + 1.0, delta=0.01)
    assert estimate(tm, data) == pytest.approx(y, rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(data=st.lists(finite, min_size=1, max_size=100))
def test_sign_equivariance(data):
    y = np.array(data)
    for spec in [EstimatorSpec("sample_mean"), EstimatorSpec("truncated_mean", p=1.5, nu_p=3.0, delta=0.05),
                 EstimatorSpec("median_of_means", delta=0.01), EstimatorSpec("p_robust", p=1.5, c=0.8)]:
        assert estimate(spec, -y) == pytest.approx(-estimate(spec, y), rel=1e-12, abs=1e-12)


def test_p_robust_constant_tolerance():
    spec = EstimatorSpec("p_robust", p=2.0, c=1.0)
    # bias b_p n^(-(p-1)/p) = 0.5 / 100 at n = 1e4
    assert abs(estimate(spec, np.ones(10_000)) - 1.0) < 6e-3


@pytest.mark.parametrize("kind,eta", [("truncated_mean", 4.0), ("median_of_means", 32.0)])
def test_confidence_frequency(kind, eta):
    p, delta, n, trials = 1.5, 0.05, 200, 4000
    nz = NoiseSpec.pareto(p + 0.05, 1.0)
    nu = nu_p_bound(nz, 1.0, p)
    spec = EstimatorSpec(kind, p=p, nu_p=nu, delta=delta)
    rng = np.random.default_rng(42)
    width = confidence_width(nu, eta, delta, n, p)
    hits = 0
    for _ in range(trials):
        y = 1.0 + noise_draws(nz, rng.random(n))
        hits += abs(estimate(spec, y) - 1.0) > width
    q = hits / trials
    assert q <= delta + 3 * math.sqrt(delta * (1 - delta) / trials)
