import math
import warnings

import numpy as np
import pytest
from scipy import stats

from heavybandits.perturbations import (OffTheoryWarning, PerturbationSpec, cdf, check_assumption2, hazard,
                                        inverse_cdf, ln_zeta, optimal_params, pdf, sample, survival)

warnings.simplefilter("ignore", OffTheoryWarning)

SPECS = [
    PerturbationSpec("weibull", 1.0, 1.0),
    PerturbationSpec("weibull", 0.5, 2.0),
    PerturbationSpec("weibull", 2.0, 1.5),
    PerturbationSpec("gamma", 1.0, 1.0),
    PerturbationSpec("gamma", 3.5, 2.0),
    PerturbationSpec("gamma", 0.6, 1.2),
    PerturbationSpec("gev", 0.0, 1.0),
    PerturbationSpec("gev", 0.3, 1.5),
    PerturbationSpec("gev", 0.8, 2.0),
    PerturbationSpec("pareto", 2.0, 1.0),
    PerturbationSpec("pareto", 5.0, 5.0),
    PerturbationSpec("frechet", 3.0, 3.0),
    PerturbationSpec("frechet", 1.5, 0.7),
]


def scipy_dist(s):
    """Reference distributions from scipy.stats."""
    if s.kind == "weibull":
        return stats.weibull_min(s.shape, scale=s.scale)
    if s.kind == "gamma":
        return stats.gamma(s.shape, scale=s.scale)
    if s.kind == "gev":
        return stats.genextreme(-s.shape, scale=s.scale)  # scipy uses c = -zeta
    if s.kind == "pareto":
        return stats.pareto(s.shape, scale=s.scale)
    return stats.invweibull(s.shape, scale=s.scale)


def ids(s):
    return f"{s.kind}-{s.shape}-{s.scale}"


@pytest.mark.parametrize("spec", SPECS, ids=ids)
def test_against_scipy(spec):
    ref = scipy_dist(spec)
    ys = np.linspace(0.001, 0.999, 97)
    xs = ref.ppf(ys)
    np.testing.assert_allclose(cdf(spec, xs), ref.cdf(xs), rtol=1e-10, atol=1e-13)
    np.testing.assert_allclose(survival(spec, xs), ref.sf(xs), rtol=1e-9, atol=1e-13)
    np.testing.assert_allclose(pdf(spec, xs), ref.pdf(xs), rtol=1e-9, atol=1e-13)
    np.testing.assert_allclose(inverse_cdf(spec, ys), xs, rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("spec", SPECS, ids=ids)
def test_round_trip_and_monotone(spec):
    ys = np.linspace(1e-6, 1 - 1e-6, 1000)
    xs = inverse_cdf(spec, ys)
    assert np.max(np.abs(cdf(spec, xs) - ys)) <= 1e-9
    assert np.all(np.diff(xs) >= 0)
    grid = np.linspace(xs[0] - 1.0, xs[-1], 1000)
    assert np.all(np.diff(cdf(spec, grid)) >= 0)


@pytest.mark.parametrize("spec", SPECS, ids=ids)
def test_sampler_ks(spec):
    u = np.random.default_rng(123).random(100_000)
    x = np.sort(sample(spec, u))
    F = cdf(spec, x)
    n = x.size
    d = max(np.max(np.arange(1, n + 1) / n - F), np.max(F - np.arange(n) / n))
    assert d <= 0.01


def test_cdf_examples():
    assert cdf(PerturbationSpec("weibull", 1, 1), 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert cdf(PerturbationSpec("pareto", 2.5, 1.7), 1.7) == 0.0
    assert cdf(PerturbationSpec("gev", 0, 1), 0.0) == pytest.approx(math.exp(-1), rel=1e-15)
    assert cdf(PerturbationSpec("weibull", 1, 1), -3.0) == 0.0
    assert cdf(PerturbationSpec("gev", 0.5, 1), -2.5) == 0.0


def test_quantile_examples():
    assert inverse_cdf(PerturbationSpec("weibull", 1, 1), 1 - math.exp(-1)) == pytest.approx(1.0, rel=1e-15)
    assert inverse_cdf(PerturbationSpec("frechet", 2.0, 3.0), math.exp(-1)) == pytest.approx(3.0, rel=1e-15)
    assert inverse_cdf(PerturbationSpec("gamma", 1.0, 2.0), 1 - math.exp(-1)) == pytest.approx(2.0, abs=1e-10)
    assert sample(PerturbationSpec("pareto", 2.0, 1.0), 0.75) == pytest.approx(2.0, rel=1e-15)
    assert sample(PerturbationSpec.named("gumbel", 1.0), math.exp(-1)) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("y", [0.0, 1.0, -0.1, 1.5])
def test_quantile_domain(y):
    with pytest.raises(ValueError):
        inverse_cdf(PerturbationSpec("weibull", 1, 1), y)


def test_sample_round_trip_from_support():
    for spec in SPECS:
        x0 = float(inverse_cdf(spec, 0.37))
        assert sample(spec, cdf(spec, x0)) == pytest.approx(x0, abs=1e-6)


def test_hazard_examples():
    w = PerturbationSpec("weibull", 1.0, 2.5)
    np.testing.assert_allclose(hazard(w, np.linspace(0.01, 30, 50)), 1 / 2.5, rtol=1e-12)
    par = PerturbationSpec("pareto", 3.0, 2.0)
    x = np.linspace(2.01, 50, 50)
    np.testing.assert_allclose(hazard(par, x), 3.0 / x, rtol=1e-12)
    for spec in SPECS:
        xs = inverse_cdf(spec, np.linspace(0.01, 0.99, 50))
        assert np.all(hazard(spec, xs) >= 0)
    with pytest.raises(ValueError):
        hazard(par, 1.0)


def test_gev_sandwich():
    ys = np.linspace(0.001, 0.999, 999)
    for zeta in [0.1, 0.5, 0.9]:
        lam = 1.3
        q = inverse_cdf(PerturbationSpec("gev", zeta, lam), ys)
        lo = lam * ((ys / (1 - ys)) ** zeta - 1) / zeta
        hi = lam * ((1 - ys) ** -zeta - 1) / zeta
        assert np.all(lo <= q + 1e-12) and np.all(q <= hi + 1e-12)


def test_assumption2_examples():
    r = check_assumption2(PerturbationSpec("weibull", 1.0, 2.0))
    assert r.f_zero == 0.0 and r.integral_C <= 1.0 + 1e-9 and r.passed
    r = check_assumption2(PerturbationSpec("pareto", 2.0, 2.0))
    assert r.integral_bound == pytest.approx(0.5) and r.integral_C <= 0.5 and r.integral_ok
    with pytest.warns(RuntimeWarning):
        r = check_assumption2(PerturbationSpec.named("gumbel", 1.0))
    assert r.f_zero == pytest.approx(math.exp(-1)) and r.f_zero_ok


def test_assumption2_integral_oracle():
    # exponential(lam): h = 1/lam and 1 - F = e^(-x/lam), so the integral is
    # int (1/lam) e^(-x (1 - 1/lam)) dx = 1/(lam - 1)
    for lam in [1.5, 2.0, 4.0]:
        r = check_assumption2(PerturbationSpec("weibull", 1.0, lam))
        assert r.integral_C == pytest.approx(1.0 / (lam - 1.0), rel=1e-8)


def test_assumption2_detects_violations():
    # Gumbel with lam = 1: the integrand tends to 1, so the integral diverges
    with pytest.warns(RuntimeWarning):
        r = check_assumption2(PerturbationSpec("gev", 0.0, 1.0))
    assert r.integral_C == math.inf and not r.integral_ok and r.integral_bound is None
    assert r.f_zero_ok and r.log_concave_ok
    # exponential with lam -> 1 still converges, but slowly
    assert check_assumption2(PerturbationSpec("weibull", 1.0, 1.0 + 1e-3)).integral_C == pytest.approx(1e3, rel=1e-8)


@pytest.mark.parametrize("kind", ["weibull", "gamma", "gev", "pareto", "frechet"])
def test_optimal_params_pass_checks(kind):
    spec = optimal_params(kind, 20, p=1.5)
    if spec.kind in ("weibull", "gamma", "gev"):
        spec = PerturbationSpec(spec.kind, spec.shape, max(spec.scale, 1 + 1e-3))
    assert check_assumption2(spec).passed


def test_optimal_params_values():
    assert (optimal_params("weibull", 7).shape, optimal_params("weibull", 7).scale) == (1.0, 1.0)
    assert optimal_params("gev", 99).shape == 0.0
    par = optimal_params("pareto", math.exp(3))
    assert par.shape == pytest.approx(3.0) and par.scale == pytest.approx(3.0)
    with pytest.raises(ValueError):
        optimal_params("weibull", 1)
    with pytest.warns(OffTheoryWarning):
        warnings.simplefilter("always", OffTheoryWarning)
        optimal_params("pareto", 20, p=1.5)


def test_ln_zeta():
    assert ln_zeta(0.0, math.e) == pytest.approx(1.0)
    assert ln_zeta(0.5, 4.0) == pytest.approx(2.0)
    assert ln_zeta(0.3, 1.0) == 0.0
    assert ln_zeta(1e-9, 5.0) == pytest.approx(math.log(5.0), rel=1e-8)


def test_constructor_validation():
    with pytest.raises(ValueError):
        PerturbationSpec("weibull", -1, 1)
    with pytest.raises(ValueError):
        PerturbationSpec("gev", -0.2, 1)
    with pytest.raises(ValueError):
        PerturbationSpec("cauchy", 1, 1)
    warnings.simplefilter("always", OffTheoryWarning)
    with pytest.warns(OffTheoryWarning):
        PerturbationSpec("pareto", 3.0, 3.0, p=1.5)
    with pytest.warns(OffTheoryWarning):
        PerturbationSpec.named("gumbel", 1.0)
