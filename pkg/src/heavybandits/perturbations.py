"""Perturbation distributions used for randomized exploration.

Five unbounded families: Weibull(k, lam), Gamma(alpha, lam), GEV(zeta, lam),
Pareto(alpha, lam) and Frechet(alpha, lam). Each one exposes a CDF, a
quantile function (used for inverse-transform sampling), a hazard rate and
a mechanical check of the anti-concentration conditions the regret analysis
relies on: F(0) <= 1/2, log-concave F and a finite hazard integral.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import integrate

from .specfun import gamma_quantile, gammainc_lower, log_gammainc_upper

WEIBULL, GAMMA, GEV, PARETO, FRECHET = range(5)
KIND_CODES = {"weibull": WEIBULL, "gamma": GAMMA, "gev": GEV, "pareto": PARETO, "frechet": FRECHET}
KIND_NAMES = {v: k for k, v in KIND_CODES.items()}
_ALIASES = {"gumbel": ("gev", 0.0), "exponential": ("weibull", 1.0)}


class OffTheoryWarning(UserWarning):
    """Parameters outside the range covered by the regret analysis."""


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PerturbationSpec:
    """A perturbation family with its shape and scale.

    ``shape`` is k (Weibull), alpha (Gamma, Pareto, Frechet) or zeta (GEV);
    ``scale`` is lambda. ``p`` is the moment order the perturbation is
    paired with, used only to check the Pareto/Frechet shape constraint.
    """

    kind: str
    shape: float
    scale: float
    p: float | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in KIND_CODES:
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "shape", float(self.shape))
        object.__setattr__(self, "scale", float(self.scale))
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"{kind}: scale must be positive, got {self.scale}")
        if kind == "gev":
            if not (0.0 <= self.shape and math.isfinite(self.shape)):
                raise ValueError(f"gev: zeta must be >= 0 (bounded-support GEV is not supported), got {self.shape}")
        elif not (self.shape > 0 and math.isfinite(self.shape)):
            raise ValueError(f"{kind}: shape must be positive, got {self.shape}")
        for msg in self.theory_warnings():
            warnings.warn(msg, OffTheoryWarning, stacklevel=3)

    @classmethod
    def named(cls, name: str, scale: float = 1.0, shape: float | None = None, p: float | None = None):
        """Build from a family name; ``gumbel`` and ``exponential`` are shortcuts."""
        name = name.lower()
        if name in _ALIASES:
            kind, default_shape = _ALIASES[name]
            return cls(kind, default_shape if shape is None else shape, scale, p)
        if shape is None:
            raise ValueError(f"{name}: shape parameter required")
        return cls(name, shape, scale, p)

    @property
    def code(self) -> int:
        return KIND_CODES[self.kind]

    def theory_warnings(self) -> list[str]:
        k, a, lam = self.kind, self.shape, self.scale
        out = []
        if k == "weibull" and not (a <= 1.0 and lam > 1.0):
            out.append(f"weibull(k={a}, lam={lam}): analysis assumes k <= 1 and lam > 1")
        elif k == "gamma" and not (a >= 1.0 and lam >= 1.0):
            out.append(f"gamma(alpha={a}, lam={lam}): analysis assumes alpha >= 1 and lam >= 1")
        elif k == "gev" and not (a < 1.0 and lam > 1.0):
            out.append(f"gev(zeta={a}, lam={lam}): analysis assumes zeta < 1 and lam > 1")
        elif k in ("pareto", "frechet"):
            if self.p is None:
                out.append(f"{k}(alpha={a}, lam={lam}): no moment order given, shape constraint unchecked")
            elif not (a > self.p ** 2 / (self.p - 1.0) and lam >= a):
                out.append(f"{k}(alpha={a}, lam={lam}): analysis assumes alpha > p^2/(p-1) and lam >= alpha")
        return out

    @property
    def support_lower(self) -> float:
        if self.kind == "pareto":
            return self.scale
        if self.kind == "gev":
            return -math.inf if self.shape == 0.0 else -self.scale / self.shape
        return 0.0


# ---------------------------------------------------------------------------
# quantile (compiled: also used inside the bandit kernels)
# ---------------------------------------------------------------------------

@njit(cache=True)
def quantile_scalar(code, shape, scale, y):
    if code == WEIBULL:
        return scale * (-math.log1p(-y)) ** (1.0 / shape)
    if code == GAMMA:
        return gamma_quantile(shape, scale, y)
    if code == GEV:
        if shape == 0.0:
            return -scale * math.log(-math.log(y))
        return scale * math.expm1(-shape * math.log(-math.log(y))) / shape
    if code == PARETO:
        return scale * (1.0 - y) ** (-1.0 / shape)
    # FRECHET
    return scale * (-math.log(y)) ** (-1.0 / shape)


@njit(cache=True)
def _quantile_array(code, shape, scale, ys, out):
    for i in range(ys.size):
        out[i] = quantile_scalar(code, shape, scale, ys[i])


def inverse_cdf(spec: PerturbationSpec, y):
    """Quantile function F^-1(y) for y in the open interval (0, 1)."""
    arr = np.asarray(y, dtype=float)
    if np.any(~(arr > 0.0) | ~(arr < 1.0)):
        raise ValueError("quantile argument must lie strictly inside (0, 1)")
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    _quantile_array(spec.code, spec.shape, spec.scale, flat, out)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def sample(spec: PerturbationSpec, u):
    """Inverse-transform draw: deterministic given the uniform variate ``u``."""
    return inverse_cdf(spec, u)


# ---------------------------------------------------------------------------
# distribution functions (numpy, log-space for stability in the tails)
# ---------------------------------------------------------------------------

def _log1mexp_neg(t, logt):
    """ln(1 - e^-t), accurate when t underflows (uses ln t directly)."""
    small = t < 1e-8
    out = np.empty_like(t)
    out[small] = logt[small] - 0.5 * t[small]
    out[~small] = np.log(-np.expm1(-t[~small]))
    return out


def _log_terms(spec: PerturbationSpec, x: np.ndarray):
    """Return (log F, log S, log f) on ``x``; -inf marks zero values."""
    k, a, lam = spec.kind, spec.shape, spec.scale
    ninf = -np.inf
    logF = np.full(x.shape, ninf)
    logS = np.zeros(x.shape)
    logf = np.full(x.shape, ninf)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if k == "weibull":
            m = x > 0
            z = (x[m] / lam) ** a
            logF[m] = np.log(-np.expm1(-z))
            logS[m] = -z
            logf[m] = np.log(a / lam) + (a - 1.0) * np.log(x[m] / lam) - z
        elif k == "gamma":
            m = x > 0
            xs = x[m] / lam
            logF[m] = np.log([gammainc_lower(a, v) for v in xs])
            logS[m] = [log_gammainc_upper(a, v) for v in xs]
            logf[m] = (a - 1.0) * np.log(x[m]) - xs - a * math.log(lam) - math.lgamma(a)
        elif k == "gev":
            if a == 0.0:
                m = np.ones(x.shape, dtype=bool)
                logt = -x / lam
            else:
                m = 1.0 + a * x / lam > 0
                logt = -np.log1p(a * x[m] / lam) / a
            t = np.exp(logt)
            logF[m] = -t
            logS[m] = _log1mexp_neg(t, logt)
            logf[m] = -math.log(lam) + (a + 1.0) * logt - t
            if a > 0.0:
                logF[~m] = ninf
                logS[~m] = 0.0
        elif k == "pareto":
            m = x >= lam
            logS[m] = -a * np.log(x[m] / lam)
            logF[m] = np.log(-np.expm1(logS[m]))
            logf[m] = math.log(a) + a * math.log(lam) - (a + 1.0) * np.log(x[m])
        else:  # frechet
            m = x > 0
            logt = -a * np.log(x[m] / lam)
            t = np.exp(logt)
            logF[m] = -t
            logS[m] = _log1mexp_neg(t, logt)
            logf[m] = math.log(a / lam) + (a + 1.0) / a * logt - t
    return logF, logS, logf


def _scalar_or_array(arr, out):
    return float(out) if np.ndim(arr) == 0 else out


def cdf(spec: PerturbationSpec, x):
    arr = np.asarray(x, dtype=float)
    logF, _, _ = _log_terms(spec, np.atleast_1d(arr))
    out = np.exp(logF)
    return _scalar_or_array(arr, out.reshape(arr.shape) if arr.ndim else out[0])


def survival(spec: PerturbationSpec, x):
    arr = np.asarray(x, dtype=float)
    _, logS, _ = _log_terms(spec, np.atleast_1d(arr))
    out = np.exp(logS)
    return _scalar_or_array(arr, out.reshape(arr.shape) if arr.ndim else out[0])


def pdf(spec: PerturbationSpec, x):
    arr = np.asarray(x, dtype=float)
    _, _, logf = _log_terms(spec, np.atleast_1d(arr))
    out = np.exp(logf)
    return _scalar_or_array(arr, out.reshape(arr.shape) if arr.ndim else out[0])


def hazard(spec: PerturbationSpec, x):
    """Hazard rate h(x) = f(x) / (1 - F(x)) on the interior of the support."""
    arr = np.asarray(x, dtype=float)
    flat = np.atleast_1d(arr)
    inside = flat > spec.support_lower
    if spec.kind == "pareto":
        inside = flat > spec.scale
    if not np.all(inside):
        raise ValueError(f"hazard evaluated outside the support of {spec.kind}")
    _, logS, logf = _log_terms(spec, flat)
    if np.any(np.isneginf(logS)):
        raise ValueError("hazard undefined where F(x) = 1")
    out = np.exp(logf - logS)
    return _scalar_or_array(arr, out.reshape(arr.shape) if arr.ndim else out[0])


# ---------------------------------------------------------------------------
# anti-concentration checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Assumption2Report:
    f_zero: float
    f_zero_ok: bool
    log_concave_ok: bool
    max_second_diff: float
    integral_C: float
    integral_bound: float | None
    integral_ok: bool
    sup_hazard: float

    @property
    def passed(self) -> bool:
        return self.f_zero_ok and self.log_concave_ok and self.integral_ok


def closed_form_integral_bound(spec: PerturbationSpec) -> float | None:
    """Analytic upper bound on the hazard integral, when one is known."""
    k, a, lam = spec.kind, spec.shape, spec.scale
    if k == "weibull":
        return (lam - 1.0) ** (-a) if lam > 1.0 else None
    if k == "gamma":
        return (lam - 1.0) ** (-a) if lam > 1.0 else None
    if k == "gev":
        return 2.0 / (lam - 1.0) if lam > 1.0 else None
    if k == "pareto":
        return math.exp(math.lgamma(a + 1.0) - a * math.log(lam))
    return 4.0 if lam >= a else None


def _integrand(spec: PerturbationSpec):
    def f(x):
        _, logS, logf = _log_terms(spec, np.array([x]))
        v = logf[0] - x - 2.0 * logS[0]
        return 0.0 if v == -np.inf else math.exp(v)
    return f


def hazard_integral(spec: PerturbationSpec, cutoff: float = 1e-12) -> float:
    """Numerically integrate h(x) e^-x / (1 - F(x)) over [0, inf).

    The range is truncated where the integrand drops below ``cutoff``; the
    interval is split geometrically so slow exponential tails stay resolved.
    Returns ``inf`` when the integrand has not decayed by x = 1e7.
    """
    f = _integrand(spec)
    lo = max(0.0, spec.support_lower)
    x_end = max(lo + 1.0, float(inverse_cdf(spec, 1.0 - 1e-4)), 1.0)
    while f(x_end) >= cutoff:
        x_end = lo + 2.0 * (x_end - lo)
        if x_end > 1e7:
            # the integrand has not decayed: treat the integral as divergent
            warnings.warn(f"{spec}: integrand still {f(x_end):.3e} at x={x_end:.3e}; integral diverges",
                          RuntimeWarning, stacklevel=2)
            return math.inf
    edges = [lo]
    step = 0.5
    while edges[-1] + step < x_end:
        edges.append(edges[-1] + step)
        step *= 2.0
    edges.append(x_end)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err, *rest = integrate.quad(f, a, b, limit=400, epsabs=1e-14, epsrel=1e-11, full_output=1)
        if len(rest) > 1 and err > 1e-6 * max(abs(val), 1e-12):
            raise IntegrationError(f"{spec}: quadrature on [{a:.4g}, {b:.4g}] did not converge "
                                   f"(value={val:.6g}, abserr={err:.3g}): {rest[1]}")
        total += val
    return total


def check_assumption2(spec: PerturbationSpec, grid_points: int = 10_000) -> Assumption2Report:
    """Check F(0) <= 1/2, log-concavity of F and the hazard integral."""
    f_zero = float(cdf(spec, 0.0))
    lo = float(inverse_cdf(spec, 1e-4))
    hi = float(inverse_cdf(spec, 1.0 - 1e-4))
    grid = np.linspace(lo, hi, grid_points)
    logF, logS, logf = _log_terms(spec, grid)
    d2 = logF[2:] - 2.0 * logF[1:-1] + logF[:-2]
    max_d2 = float(np.max(d2))
    log_concave_ok = bool(np.all(np.isfinite(logF)) and max_d2 <= 1e-8)

    integral = hazard_integral(spec)
    bound = closed_form_integral_bound(spec)
    if bound is None:
        integral_ok = math.isfinite(integral)
    else:
        integral_ok = integral <= bound * (1.0 + 1e-3)
    inner = grid[grid > max(spec.support_lower, 0.0)]
    sup_h = float(np.max(np.exp(logf[-inner.size:] - logS[-inner.size:]))) if inner.size else math.nan
    return Assumption2Report(
        f_zero=f_zero,
        f_zero_ok=f_zero <= 0.5,
        log_concave_ok=log_concave_ok,
        max_second_diff=max_d2,
        integral_C=integral,
        integral_bound=bound,
        integral_ok=bool(integral_ok and integral >= 0.0),
        sup_hazard=sup_h,
    )


def optimal_params(kind: str, K: int, p: float | None = None) -> PerturbationSpec:
    """Shape and scale that minimize the gap-independent regret rate."""
    if K < 2:
        raise ValueError(f"need at least 2 arms, got K={K}")
    kind = kind.lower()
    kind, _ = _ALIASES.get(kind, (kind, None))
    if kind == "weibull":
        shape, scale = 1.0, 1.0
    elif kind == "gamma":
        shape, scale = 1.0, 1.0
    elif kind == "gev":
        shape, scale = 0.0, 1.0
    elif kind in ("pareto", "frechet"):
        shape = scale = math.log(K)
        if p is not None and K <= math.exp(p ** 2 / (p - 1.0)):
            warnings.warn(f"{kind}: K={K} <= exp(p^2/(p-1)); ln K is outside the optimal-rate regime",
                          OffTheoryWarning, stacklevel=2)
    else:
        raise ValueError(f"unknown perturbation kind {kind!r}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OffTheoryWarning)
        return PerturbationSpec(kind, shape, scale, p)


@njit(cache=True)
def ln_zeta_scalar(zeta, x):
    if zeta == 0.0:
        return math.log(x)
    return math.expm1(zeta * math.log(x)) / zeta


def ln_zeta(zeta: float, x):
    """Deformed logarithm (x^zeta - 1) / zeta, with ln x at zeta = 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("ln_zeta needs x > 0")
    if zeta == 0.0:
        out = np.log(arr)
    else:
        out = np.expm1(zeta * np.log(arr)) / zeta
    return float(out) if arr.ndim == 0 else out
