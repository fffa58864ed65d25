"""Bandit instances, heavy-tailed reward noise and lower-bound constructions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .perturbations import PerturbationSpec, inverse_cdf

NOISELESS, PARETO_SHIFTED = 0, 1


@dataclass(frozen=True)
class NoiseSpec:
    """Reward noise: a centred Pareto variable, or no noise at all.

    With ``kind == "pareto"`` the noise is z - E[z] where z follows a Pareto
    law with tail index ``alpha`` and scale ``lam``.
    """

    kind: str = "noiseless"
    alpha: float = math.nan
    lam: float = math.nan

    def __post_init__(self):
        if self.kind not in ("noiseless", "pareto"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "pareto":
            if not (self.alpha > 1.0 and math.isfinite(self.alpha)):
                raise ValueError(f"pareto noise needs alpha > 1 for a finite mean, got {self.alpha}")
            if not (self.lam > 0.0 and math.isfinite(self.lam)):
                raise ValueError(f"pareto noise needs lambda > 0, got {self.lam}")

    @classmethod
    def pareto(cls, alpha: float, lam: float) -> "NoiseSpec":
        return cls("pareto", float(alpha), float(lam))

    @classmethod
    def noiseless(cls) -> "NoiseSpec":
        return cls()

    @property
    def code(self) -> int:
        return PARETO_SHIFTED if self.kind == "pareto" else NOISELESS

    @property
    def z_mean(self) -> float:
        if self.kind != "pareto":
            return 0.0
        return self.alpha * self.lam / (self.alpha - 1.0)


@njit(cache=True)
def noise_scalar(code, alpha, lam, u):
    if code == NOISELESS:
        return 0.0
    return lam * (1.0 - u) ** (-1.0 / alpha) - alpha * lam / (alpha - 1.0)


def noise_draws(noise: NoiseSpec, u) -> np.ndarray:
    """Vectorised noise values for an array of uniforms in (0, 1)."""
    u = np.asarray(u, dtype=float)
    if noise.kind == "noiseless":
        return np.zeros_like(u)
    return noise.lam * (1.0 - u) ** (-1.0 / noise.alpha) - noise.z_mean


@dataclass(frozen=True)
class BanditInstance:
    means: tuple
    noise: NoiseSpec = NoiseSpec()

    def __post_init__(self):
        m = tuple(float(v) for v in self.means)
        if len(m) < 2:
            raise ValueError(f"a bandit needs at least 2 arms, got {len(m)}")
        if any(not (0.0 <= v <= 1.0) for v in m):
            raise ValueError(f"arm means must lie in [0, 1], got {m}")
        object.__setattr__(self, "means", m)

    @property
    def K(self) -> int:
        return len(self.means)

    @property
    def best_arm(self) -> int:
        return int(np.argmax(self.means))

    @property
    def gaps(self) -> np.ndarray:
        m = np.asarray(self.means)
        return m.max() - m

    @property
    def max_gap(self) -> float:
        return float(self.gaps.max())


def draw_reward(instance: BanditInstance, arm: int, u: float) -> float:
    """Reward of ``arm`` given the uniform variate driving its noise."""
    if not 0 <= arm < instance.K:
        raise IndexError(f"arm {arm} out of range for K={instance.K}")
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie in (0, 1), got {u}")
    nz = instance.noise
    return instance.means[arm] + noise_scalar(nz.code, nz.alpha, nz.lam, u)


def nu_p_bound(noise: NoiseSpec, y: float, p: float) -> float:
    """Upper bound on E|y + noise|^p via the triangle inequality in L^p."""
    if noise.kind == "noiseless":
        return abs(y) ** p
    a, lam = noise.alpha, noise.lam
    if not a > p:
        raise ValueError(f"p-th moment is infinite: alpha={a} <= p={p}")
    return (abs(y - noise.z_mean) + a ** (1.0 / p) * lam / (a - p) ** (1.0 / p)) ** p


def make_gap_instance(K: int, delta: float, noise: NoiseSpec = NoiseSpec()) -> BanditInstance:
    """Best arm at index 0 with mean 1; every other arm has mean 1 - delta."""
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"gap must lie in (0, 1], got {delta}")
    return BanditInstance((1.0,) + (1.0 - delta,) * (K - 1), noise)


def ucb_counterexample_gap(K: int, T: int, p: float, nu: float, eta: float) -> float:
    return nu ** (1.0 / p) * (eta * (K - 1) * math.log(T) / T) ** ((p - 1.0) / p)


def make_ucb_counterexample(K: int, T: int, p: float, nu: float = 1.0, eta: float = 1.0) -> BanditInstance:
    """Noiseless instance on which robust UCB pays its lower-bound rate."""
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    gap = ucb_counterexample_gap(K, T, p, nu, eta)
    if gap > 1.0:
        raise ValueError(f"horizon T={T} too small: optimal reward {gap:.4g} exceeds 1")
    return BanditInstance((gap,) + (0.0,) * (K - 1))


def ape_counterexample_gap(K: int, T: int, p: float, c: float, spec: PerturbationSpec) -> float:
    q = inverse_cdf(spec, 1.0 - 1.0 / K)
    return 0.5 * c ** (1.0 / p) * ((K - 1) / T) ** (1.0 - 1.0 / p) * q


def make_ape_counterexample(K: int, T: int, p: float, c: float, spec: PerturbationSpec) -> BanditInstance:
    """Noiseless instance realizing the perturbation-based lower bound."""
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    e = p / (p - 1.0)
    c_max = (K - 1) / (K - 1 + 2.0 ** e)
    if not 0.0 < c < c_max:
        raise ValueError(f"c_range: c={c} must lie in (0, {c_max:.6g})")
    q = inverse_cdf(spec, 1.0 - 1.0 / K)
    t_min = c ** (1.0 / (p - 1.0)) * (K - 1) / 2.0 ** e * abs(q) ** e
    if T < t_min:
        raise ValueError(f"horizon_too_small: T={T} < {t_min:.6g}")
    gap = ape_counterexample_gap(K, T, p, c, spec)
    if not 0.0 <= gap <= 1.0:
        raise ValueError(f"gap_range: optimal reward {gap:.6g} outside [0, 1]")
    return BanditInstance((gap,) + (0.0,) * (K - 1))
