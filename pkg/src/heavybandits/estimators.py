"""Baseline mean estimators: sample mean, truncated mean, median of means.

The p-robust estimator is reachable through the same ``estimate`` entry
point so experiments can treat all four uniformly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .influence import InfluenceParams, p_robust_estimate

KINDS = ("sample_mean", "truncated_mean", "median_of_means", "p_robust")


@dataclass(frozen=True)
class EstimatorSpec:
    kind: str
    p: float = 2.0
    nu_p: float | None = None
    delta: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown estimator {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("truncated_mean", "median_of_means"):
            if self.delta is None or not 0.0 < self.delta < 1.0:
                raise ValueError(f"{self.kind} needs delta in (0, 1), got {self.delta}")
        if self.kind == "truncated_mean" and (self.nu_p is None or not self.nu_p > 0.0):
            raise ValueError(f"truncated_mean needs nu_p > 0, got {self.nu_p}")
        if self.kind == "p_robust" and (self.c is None or not self.c > 0.0):
            raise ValueError(f"p_robust needs c > 0, got {self.c}")


def mom_blocks(n: int, delta: float) -> int:
    """Number of median-of-means blocks for n samples at confidence delta."""
    return max(1, min(int(math.floor(8.0 * math.log(1.0 / delta))) + 1, n // 2))


def truncated_mean(samples: np.ndarray, nu_p: float, delta: float, p: float) -> float:
    n = samples.size
    idx = np.arange(1, n + 1)
    thresh = (nu_p * idx / math.log(1.0 / delta)) ** (1.0 / p)
    return float(np.sum(np.where(np.abs(samples) <= thresh, samples, 0.0)) / n)


def median_of_means(samples: np.ndarray, delta: float) -> float:
    k = mom_blocks(samples.size, delta)
    means = [b.mean() for b in np.array_split(samples, k)]
    return float(np.median(means))


def estimate(spec: EstimatorSpec, samples) -> float:
    y = np.asarray(samples, dtype=float)
    if y.size == 0:
        raise ValueError("estimator needs at least one sample")
    if spec.kind == "sample_mean":
        return float(y.mean())
    if spec.kind == "truncated_mean":
        return truncated_mean(y, spec.nu_p, spec.delta, spec.p)
    if spec.kind == "median_of_means":
        return median_of_means(y, spec.delta)
    return p_robust_estimate(InfluenceParams(spec.p, spec.c), y)


def confidence_width(nu_p: float, eta: float, delta: float, n: int, p: float) -> float:
    """Deviation level nu_p^(1/p) (eta ln(1/delta) / n)^(1 - 1/p)."""
    return nu_p ** (1.0 / p) * (eta * math.log(1.0 / delta) / n) ** (1.0 - 1.0 / p)
