"""Generalized Catoni influence function and the p-robust mean estimator.

The influence function

    psi_p(x) = sign(x) * ln(1 + |x| + b_p |x|^p)

grows only logarithmically, so a single huge sample cannot dominate the
scaled sum

    Y_n = c / n^(1 - 1/p) * sum_k psi_p(Y_k / (c n^(1/p))).

No bound on the p-th moment is needed to form the estimate; the moment
bound only enters the tail bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit


def compute_bp(p: float) -> float:
    """Closed-form constant b_p for 1 < p <= 2.

    At p = 2 the bracket contains 0^0; the limit value 1/2 is returned.
    """
    p = float(p)
    if not (1.0 < p <= 2.0):
        raise ValueError(f"moment order p must lie in (1, 2], got {p}")
    if p == 2.0:
        return 0.5
    r = (2.0 - p) / (p - 1.0)
    bracket = 2.0 * r ** (1.0 - 2.0 / p) + r ** (2.0 - 2.0 / p)
    return bracket ** (-p / 2.0)


@dataclass(frozen=True)
class InfluenceParams:
    """Moment order ``p``, estimator scale ``c`` and the derived ``b_p``."""

    p: float
    c: float = 1.0
    b_p: float = field(init=False)

    def __post_init__(self):
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError(f"scale c must be positive and finite, got {self.c}")
        object.__setattr__(self, "b_p", compute_bp(self.p))


@njit(cache=True)
def psi_scalar(x, p, b):
    ax = abs(x)
    v = math.log1p(ax + b * ax ** p)
    return v if x >= 0.0 else -v


@njit(cache=True)
def robust_sum(samples, n, p, b, c):
    """sum_k psi_p(Y_k / (c n^(1/p))) over the first ``n`` entries."""
    s = 1.0 / (c * n ** (1.0 / p))
    total = 0.0
    for k in range(n):
        total += psi_scalar(samples[k] * s, p, b)
    return total


def psi(params: InfluenceParams, x):
    """Evaluate psi_p elementwise; scalar in, float out."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("psi is only defined for finite inputs")
    ax = np.abs(arr)
    out = np.sign(arr) * np.log1p(ax + params.b_p * ax ** params.p)
    if out.ndim == 0:
        return float(out)
    return out


def p_robust_estimate(params: InfluenceParams, samples, n_override: int | None = None) -> float:
    """Recompute the p-robust estimate from the full sample history.

    ``n_override`` replaces the sample count in both the prefactor and the
    argument scaling; by default it is ``len(samples)``.
    """
    y = np.asarray(samples, dtype=float)
    if y.size == 0:
        raise ValueError("p-robust estimate needs at least one sample")
    n = y.size if n_override is None else int(n_override)
    if n < 1:
        raise ValueError(f"sample count must be positive, got {n}")
    p, c = params.p, params.c
    scaled = y / (c * n ** (1.0 / p))
    return float(c / n ** (1.0 - 1.0 / p) * np.sum(psi(params, scaled)))


def tail_bound(params: InfluenceParams, n: int, eps: float, nu_p: float) -> float:
    """One-sided deviation bound exp(-n^((p-1)/p) eps / c + b_p nu_p / c^p), capped at 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p, c = params.p, params.c
    exponent = -(n ** ((p - 1.0) / p)) * eps / c + params.b_p * nu_p / c ** p
    if exponent >= 0.0:
        return 1.0
    return math.exp(exponent)
