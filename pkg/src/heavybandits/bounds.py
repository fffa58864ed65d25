"""Leading-order regret rates (constants suppressed) for overlays and sanity checks."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .perturbations import PerturbationSpec, inverse_cdf, ln_zeta


@dataclass(frozen=True)
class BoundInputs:
    p: float
    c: float
    K: int
    T: float
    spec: PerturbationSpec
    gaps: tuple = field(default=())

    def __post_init__(self):
        g = tuple(float(v) for v in self.gaps)
        if any(not 0.0 < v <= 1.0 for v in g):
            raise ValueError(f"gaps must lie in (0, 1], got {g}")
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if self.T < self.K:
            raise ValueError(f"T={self.T} must be at least K={self.K}")
        if not 1.0 < self.p <= 2.0:
            raise ValueError(f"p must lie in (1, 2], got {self.p}")
        object.__setattr__(self, "gaps", g)


def _log_term(spec: PerturbationSpec, x: float) -> float | None:
    """ln(x) or ln_zeta(x) per family; None where it is not positive."""
    if x <= 1.0:
        return None
    if spec.kind == "gev":
        return ln_zeta(spec.shape, x)
    return math.log(x)


def gap_dependent_bound(inp: BoundInputs) -> float:
    p, c, T, spec = inp.p, inp.c, inp.T, inp.spec
    lam, a = spec.scale, spec.shape
    e = p / (p - 1.0)
    total = 0.0
    for gap in inp.gaps:
        A = ((3.0 * c * lam) ** p / gap) ** (1.0 / (p - 1.0))
        BT = (gap / c) ** e * T
        if spec.kind in ("pareto", "frechet"):
            total += A * BT ** (p / (a * (p - 1.0)))
            continue
        L = _log_term(spec, BT)
        if L is None:
            warnings.warn(f"B*T = {BT:.4g} <= 1 for gap {gap}; contribution clamped to 0", RuntimeWarning,
                          stacklevel=2)
            continue
        if spec.kind == "weibull":
            total += A * L ** (p / (a * (p - 1.0)))
        elif spec.kind == "gamma":
            total += A * a ** e * L ** e
        else:
            total += A * L ** e
    return total


def gap_independent_bound(inp: BoundInputs) -> float:
    p, K, T, spec = inp.p, inp.K, inp.T, inp.spec
    a = spec.shape
    e = p / (p - 1.0)
    C = K ** (1.0 - 1.0 / p) * T ** (1.0 / p)
    if spec.kind == "weibull":
        return C * math.log(K) ** (1.0 / a)
    if spec.kind == "gamma":
        return C * math.log(a * K ** (1.0 + e)) ** e / math.log(K) ** (1.0 / (p - 1.0))
    if spec.kind == "gev":
        return C * ln_zeta(a, K ** ((2.0 * p - 1.0) / (p - 1.0))) ** e / ln_zeta(a, K) ** (1.0 / (p - 1.0))
    return C * a ** (1.0 + p * p / (a * (p - 1.0) ** 2)) * K ** (1.0 / (a * (p - 1.0)))


def ucb_lower_rate(K: int, T: float, p: float) -> float:
    """(K ln T)^(1 - 1/p) T^(1/p)."""
    if T <= 10:
        warnings.warn(f"T={T} <= 10: outside the lower-bound regime", RuntimeWarning, stacklevel=2)
    return (K * math.log(T)) ** (1.0 - 1.0 / p) * T ** (1.0 / p)


def ape_lower_rate(K: int, T: float, p: float, spec: PerturbationSpec) -> float:
    """K^(1 - 1/p) T^(1/p) F^-1(1 - 1/K)."""
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    return K ** (1.0 - 1.0 / p) * T ** (1.0 / p) * inverse_cdf(spec, 1.0 - 1.0 / K)


def optimal_rate_ratio(K: int, T: float, p: float, spec: PerturbationSpec) -> float:
    """gap_independent_bound / (K^(1-1/p) T^(1/p) ln K)."""
    inp = BoundInputs(p=p, c=1.0, K=K, T=T, spec=spec)
    return gap_independent_bound(inp) / (K ** (1.0 - 1.0 / p) * T ** (1.0 / p) * math.log(K))


def rate_table(kinds, Ks, Ts, p: float):
    """Rows (kind, K, T, gap-independent rate, ratio to the optimal rate)."""
    from .perturbations import optimal_params

    rows = []
    for kind in kinds:
        for K in Ks:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                spec = optimal_params(kind, K, p)
            for T in Ts:
                inp = BoundInputs(p=p, c=1.0, K=K, T=T, spec=spec)
                rows.append((kind, K, T, gap_independent_bound(inp), optimal_rate_ratio(K, T, p, spec)))
    return rows
