"""Bandit policies: APE2 (perturbed p-robust leader), robust UCB and DSEE.

Two routes run the same selection rules:

* ``PolicyState`` plus the ``*_select`` / ``*_update`` functions keep full
  reward histories and recompute every estimate from scratch. They are the
  readable reference and are used in tests.
* ``run_policy`` drives a compiled per-trial kernel. The selection helpers
  are shared with the reference route; estimates are maintained
  incrementally (see below) so that a 10^5-round trial stays cheap.

Incremental p-robust estimate
-----------------------------
The p-robust estimate rescales every sample by 1/(c n^(1/p)) whenever n
changes, so the sum over psi has to be re-evaluated for each pull. Writing
u = ln|Y| the summand is  sign(Y) * g_s(u)  with

    g_s(u) = ln(1 + s e^u + b_p s^p e^(p u)),   s = 1/(c n^(1/p)),

which is smooth in u. Each sample is spread over the Chebyshev-Lobatto
nodes of the bin of width 2 containing u using its Lagrange weights, so the
sum becomes sum_g W_g g_s(u_g) over a fixed node set (degree-20 bins,
relative error ~1e-15). Samples with |u| > 20 are kept on an exact side
list. While an arm has fewer samples than occupied nodes the estimate is
recomputed directly from the history. ``exact=True`` disables the
accumulator altogether.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .env import BanditInstance, noise_scalar
from .estimators import EstimatorSpec, estimate, mom_blocks
from .influence import InfluenceParams, compute_bp, p_robust_estimate, psi_scalar, robust_sum
from .perturbations import PerturbationSpec, quantile_scalar

# ---------------------------------------------------------------------------
# policy descriptions
# ---------------------------------------------------------------------------

UCB_TRUNCATED, UCB_MOM = 0, 1
_UCB_EST_CODES = {"truncated_mean": UCB_TRUNCATED, "median_of_means": UCB_MOM}
DEFAULT_ETA = {"truncated_mean": 4.0, "median_of_means": 32.0}


@dataclass(frozen=True)
class APE2Policy:
    """Adaptively perturbed exploration with a p-robust estimator.

    ``fixed_u`` pins every perturbation draw to one quantile level, which
    turns the policy into a deterministic index rule (greedy when the
    quantile is zero).
    """

    perturbation: PerturbationSpec
    c: float = 1.0
    p: float = 1.5
    fixed_u: float | None = None
    name: str = "ape2"

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"ape2: c must be positive, got {self.c}")
        compute_bp(self.p)
        if self.fixed_u is not None and not 0.0 < self.fixed_u < 1.0:
            raise ValueError(f"ape2: fixed_u must lie in (0, 1), got {self.fixed_u}")


@dataclass(frozen=True)
class RobustUCBPolicy:
    """Robust UCB: a heavy-tail mean estimator plus a scaled confidence bonus."""

    nu_p: float
    c: float = 1.0
    p: float = 1.5
    eta: float | None = None
    estimator: str = "truncated_mean"
    name: str = "robust_ucb"

    def __post_init__(self):
        if self.estimator not in _UCB_EST_CODES:
            raise ValueError(f"robust_ucb: estimator must be one of {sorted(_UCB_EST_CODES)}")
        if self.eta is None:
            object.__setattr__(self, "eta", DEFAULT_ETA[self.estimator])
        if not self.c >= 0.0:
            raise ValueError(f"robust_ucb: c must be >= 0, got {self.c}")
        if not self.nu_p > 0.0 or not self.eta > 0.0:
            raise ValueError("robust_ucb: nu_p and eta must be positive")
        compute_bp(self.p)


@dataclass(frozen=True)
class DSEEPolicy:
    """Deterministic sequencing of exploration and exploitation."""

    w: float = 1.0
    name: str = "dsee"

    def __post_init__(self):
        if not self.w > 0.0:
            raise ValueError(f"dsee: w must be positive, got {self.w}")


# ---------------------------------------------------------------------------
# shared selection helpers (compiled, also called by the reference route)
# ---------------------------------------------------------------------------

@njit(cache=True)
def argmax_first(x):
    best = 0
    for i in range(1, x.size):
        if x[i] > x[best]:
            best = i
    return best


@njit(cache=True)
def ape2_scores(est, counts, c, p, code, shape, scale, u, out):
    for a in range(est.size):
        g = quantile_scalar(code, shape, scale, u[a])
        out[a] = est[a] + c / counts[a] ** (1.0 - 1.0 / p) * g
    return argmax_first(out)


@njit(cache=True)
def ucb_scores(est, counts, t, c, p, eta, nu_p, out):
    log_t2 = 2.0 * math.log(t)
    for a in range(est.size):
        out[a] = est[a] + c * nu_p ** (1.0 / p) * (eta * log_t2 / counts[a]) ** (1.0 - 1.0 / p)
    return argmax_first(out)


@njit(cache=True)
def dsee_choice(est, counts, t, w):
    thresh = math.ceil(w * math.log(t + 1.0))
    low = 0
    for a in range(1, counts.size):
        if counts[a] < counts[low]:
            low = a
    if counts[low] < thresh:
        return low
    return argmax_first(est)


# ---------------------------------------------------------------------------
# reference route: full histories, exact recomputation
# ---------------------------------------------------------------------------

@dataclass
class PolicyState:
    """Per-trial state: counts, reward histories, estimates and round index."""

    policy: object
    K: int
    t: int = 0
    counts: np.ndarray = field(init=False)
    estimates: np.ndarray = field(init=False)
    histories: list = field(init=False)

    def __post_init__(self):
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        self.counts = np.zeros(self.K, dtype=np.int64)
        self.estimates = np.zeros(self.K)
        self.histories = [[] for _ in range(self.K)]

    @property
    def initialized(self) -> bool:
        return bool(np.all(self.counts > 0))

    def check(self):
        assert int(self.counts.sum()) == self.t
        assert all(len(h) == n for h, n in zip(self.histories, self.counts))


def _require_init(state: PolicyState):
    if not state.initialized:
        raise RuntimeError("every arm must be pulled once before selection")


def _record(state: PolicyState, arm: int, reward: float):
    if not 0 <= arm < state.K:
        raise IndexError(f"arm {arm} out of range for K={state.K}")
    state.histories[arm].append(float(reward))
    state.counts[arm] += 1
    state.t += 1


def ape2_select(state: PolicyState, uniforms) -> int:
    _require_init(state)
    pol = state.policy
    u = np.ascontiguousarray(uniforms, dtype=float)
    if u.shape != (state.K,):
        raise ValueError(f"need one uniform per arm, got shape {u.shape}")
    spec = pol.perturbation
    out = np.empty(state.K)
    return int(ape2_scores(state.estimates, state.counts.astype(float), pol.c, pol.p,
                           spec.code, spec.shape, spec.scale, u, out))


def ape2_update(state: PolicyState, arm: int, reward: float) -> PolicyState:
    _record(state, arm, reward)
    pol = state.policy
    state.estimates[arm] = p_robust_estimate(InfluenceParams(pol.p, pol.c), state.histories[arm])
    return state


def _ucb_estimator(pol: RobustUCBPolicy, t: int) -> EstimatorSpec:
    return EstimatorSpec(pol.estimator, p=pol.p, nu_p=pol.nu_p, delta=float(t) ** -2)


def robust_ucb_select(state: PolicyState) -> int:
    """Select at round t = state.t + 1 with confidence delta = t^-2."""
    _require_init(state)
    pol = state.policy
    t = state.t + 1
    spec = _ucb_estimator(pol, t)
    for a in range(state.K):
        state.estimates[a] = estimate(spec, state.histories[a])
    out = np.empty(state.K)
    return int(ucb_scores(state.estimates, state.counts.astype(float), float(t), pol.c, pol.p,
                          pol.eta, pol.nu_p, out))


def robust_ucb_update(state: PolicyState, arm: int, reward: float) -> PolicyState:
    _record(state, arm, reward)
    return state


def dsee_select(state: PolicyState) -> int:
    t = state.t + 1
    return int(dsee_choice(state.estimates, state.counts.astype(float), float(t), state.policy.w))


def dsee_update(state: PolicyState, arm: int, reward: float) -> PolicyState:
    _record(state, arm, reward)
    state.estimates[arm] = float(np.mean(state.histories[arm]))
    return state


def reference_trial(policy, instance: BanditInstance, u_noise, u_pert=None) -> np.ndarray:
    """Play a whole trial through the reference route; returns the pulled arms."""
    K, T = instance.K, len(u_noise)
    state = PolicyState(policy, K)
    nz = instance.noise
    arms = np.empty(T, dtype=np.int64)
    for t in range(T):
        if t < K:
            arm = t
        elif isinstance(policy, APE2Policy):
            u = np.full(K, policy.fixed_u) if policy.fixed_u is not None else u_pert[t]
            arm = ape2_select(state, u)
        elif isinstance(policy, RobustUCBPolicy):
            arm = robust_ucb_select(state)
        else:
            arm = dsee_select(state)
        reward = instance.means[arm] + noise_scalar(nz.code, nz.alpha, nz.lam, u_noise[t])
        if isinstance(policy, APE2Policy):
            ape2_update(state, arm, reward)
        elif isinstance(policy, RobustUCBPolicy):
            robust_ucb_update(state, arm, reward)
        else:
            dsee_update(state, arm, reward)
        arms[t] = arm
    state.check()
    return arms


# ---------------------------------------------------------------------------
# log-space interpolation accumulator
# ---------------------------------------------------------------------------

ACC_V0 = -20.0
ACC_WIDTH = 2.0
ACC_J = 20
ACC_NB = 20
ACC_NN = ACC_NB * ACC_J + 1

_i = np.arange(ACC_J + 1)
ACC_LOC = 0.5 * (1.0 - np.cos(np.pi * _i / ACC_J))
ACC_BW = np.where(_i % 2 == 0, 1.0, -1.0) * np.where((_i == 0) | (_i == ACC_J), 0.5, 1.0)
ACC_NODES = np.concatenate([ACC_V0 + ACC_WIDTH * (b + ACC_LOC[:-1]) for b in range(ACC_NB)]
                           + [np.array([ACC_V0 + ACC_WIDTH * ACC_NB])])
del _i


@njit(cache=True)
def acc_add(W, span, ext, n_ext, y, idx, loc, bw):
    """Fold one nonzero sample ``y`` (history position ``idx``) into the accumulator."""
    v = math.log(abs(y))
    sg = 1.0 if y > 0.0 else -1.0
    pos = (v - ACC_V0) / ACC_WIDTH
    if not (0.0 <= pos < ACC_NB):
        ext[n_ext[0]] = idx
        n_ext[0] += 1
        return
    b = int(pos)
    tt = pos - b
    base = b * ACC_J
    if b < span[0]:
        span[0] = b
    if b > span[1]:
        span[1] = b
    for i in range(ACC_J + 1):
        if tt == loc[i]:
            W[base + i] += sg
            return
    tot = 0.0
    for i in range(ACC_J + 1):
        tot += bw[i] / (tt - loc[i])
    for i in range(ACC_J + 1):
        W[base + i] += sg * (bw[i] / (tt - loc[i])) / tot


@njit(cache=True)
def acc_sum(W, span, E, Pn, s, sp, b):
    total = 0.0
    if span[0] > span[1]:
        return total
    for g in range(span[0] * ACC_J, span[1] * ACC_J + ACC_J + 1):
        wg = W[g]
        if wg != 0.0:
            total += wg * math.log1p(s * E[g] + b * sp * Pn[g])
    return total


@njit(cache=True)
def _p_robust_arm(hist, n, W, span, ext, n_ext, E, Pn, p, b, c, exact):
    occupied = 0 if span[0] > span[1] else (span[1] - span[0]) * ACC_J + ACC_J + 1
    if exact or n <= occupied + n_ext:
        return c / n ** (1.0 - 1.0 / p) * robust_sum(hist, n, p, b, c)
    s = 1.0 / (c * n ** (1.0 / p))
    total = acc_sum(W, span, E, Pn, s, s ** p, b)
    for j in range(n_ext):
        total += psi_scalar(hist[ext[j]] * s, p, b)
    return c / n ** (1.0 - 1.0 / p) * total


@njit(cache=True)
def _ape2_kernel(means, ncode, nalpha, nlam, u_noise, u_pert, fixed, fixed_u,
                 c, p, pcode, pshape, pscale, exact, nodes, loc, bw):
    K = means.size
    T = u_noise.size
    b = compute_bp_nb(p)
    hist = np.zeros((K, T))
    W = np.zeros((K, ACC_NN))
    span = np.empty((K, 2), dtype=np.int64)
    span[:, 0] = ACC_NB
    span[:, 1] = -1
    ext = np.zeros((K, T), dtype=np.int64)
    n_ext = np.zeros((K, 1), dtype=np.int64)
    E = np.exp(nodes)
    Pn = np.exp(p * nodes)
    counts = np.zeros(K)
    est = np.zeros(K)
    scores = np.empty(K)
    u = np.empty(K)
    arms = np.empty(T, dtype=np.int64)
    for t in range(T):
        if t < K:
            arm = t
        else:
            for a in range(K):
                u[a] = fixed_u if fixed else u_pert[t, a]
            arm = ape2_scores(est, counts, c, p, pcode, pshape, pscale, u, scores)
        y = means[arm] + noise_scalar(ncode, nalpha, nlam, u_noise[t])
        n = int(counts[arm])
        hist[arm, n] = y
        if y != 0.0 and not exact:
            acc_add(W[arm], span[arm], ext[arm], n_ext[arm], y, n, loc, bw)
        counts[arm] = n + 1
        est[arm] = _p_robust_arm(hist[arm], n + 1, W[arm], span[arm], ext[arm], n_ext[arm, 0],
                                 E, Pn, p, b, c, exact)
        arms[t] = arm
    return arms


@njit(cache=True)
def compute_bp_nb(p):
    if p == 2.0:
        return 0.5
    r = (2.0 - p) / (p - 1.0)
    return (2.0 * r ** (1.0 - 2.0 / p) + r ** (2.0 - 2.0 / p)) ** (-p / 2.0)


# ---------------------------------------------------------------------------
# truncated mean under a rising threshold: min-heap on inclusion keys
# ---------------------------------------------------------------------------
# Sample i of an arm is kept iff |Y_i| <= (nu_p i / L)^(1/p), i.e. iff
# key_i = nu_p i / |Y_i|^p >= L with L = ln(1/delta) = 2 ln t. L only grows,
# so once a sample drops out it never returns and can be popped for good.

@njit(cache=True)
def heap_push(keys, vals, size, key, val):
    i = size
    keys[i] = key
    vals[i] = val
    while i > 0:
        parent = (i - 1) // 2
        if keys[parent] <= keys[i]:
            break
        keys[parent], keys[i] = keys[i], keys[parent]
        vals[parent], vals[i] = vals[i], vals[parent]
        i = parent
    return size + 1


@njit(cache=True)
def heap_pop(keys, vals, size):
    """Remove the minimum; returns its value and the new size."""
    top = vals[0]
    size -= 1
    keys[0] = keys[size]
    vals[0] = vals[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        child = left
        if left + 1 < size and keys[left + 1] < keys[left]:
            child = left + 1
        if keys[i] <= keys[child]:
            break
        keys[child], keys[i] = keys[i], keys[child]
        vals[child], vals[i] = vals[i], vals[child]
        i = child
    return top, size


@njit(cache=True)
def _neumaier_add(acc, x):
    s = acc[0]
    t = s + x
    if abs(s) >= abs(x):
        acc[1] += (s - t) + x
    else:
        acc[1] += (x - t) + s
    acc[0] = t


@njit(cache=True)
def _mom_from_prefix(cums, n, k, buf):
    q, r = n // k, n % k
    start = 0
    for j in range(k):
        size = q + 1 if j < r else q
        buf[j] = (cums[start + size] - cums[start]) / size
        start += size
    m = np.sort(buf[:k])
    if k % 2 == 1:
        return m[k // 2]
    return 0.5 * (m[k // 2 - 1] + m[k // 2])


@njit(cache=True)
def _ucb_kernel(means, ncode, nalpha, nlam, u_noise, c, p, eta, nu_p, est_code):
    K = means.size
    T = u_noise.size
    keys = np.empty((K, T))
    vals = np.empty((K, T))
    hsize = np.zeros(K, dtype=np.int64)
    tsum = np.zeros((K, 2))
    cums = np.zeros((K, T + 1))
    buf = np.empty(T)
    counts = np.zeros(K)
    est = np.zeros(K)
    scores = np.empty(K)
    arms = np.empty(T, dtype=np.int64)
    for t in range(T):
        if t < K:
            arm = t
        else:
            rnd = t + 1.0
            L = 2.0 * math.log(rnd)
            for a in range(K):
                n = int(counts[a])
                if est_code == UCB_TRUNCATED:
                    while hsize[a] > 0 and keys[a, 0] < L:
                        v, sz = heap_pop(keys[a], vals[a], hsize[a])
                        hsize[a] = sz
                        _neumaier_add(tsum[a], -v)
                    est[a] = (tsum[a, 0] + tsum[a, 1]) / n
                else:
                    k = max(1, min(int(math.floor(8.0 * L)) + 1, n // 2))
                    est[a] = _mom_from_prefix(cums[a], n, k, buf)
            arm = ucb_scores(est, counts, rnd, c, p, eta, nu_p, scores)
        y = means[arm] + noise_scalar(ncode, nalpha, nlam, u_noise[t])
        n = int(counts[arm]) + 1
        counts[arm] = n
        cums[arm, n] = cums[arm, n - 1] + y
        if y != 0.0:
            hsize[arm] = heap_push(keys[arm], vals[arm], hsize[arm], nu_p * n / abs(y) ** p, y)
            _neumaier_add(tsum[arm], y)
        arms[t] = arm
    return arms


@njit(cache=True)
def _dsee_kernel(means, ncode, nalpha, nlam, u_noise, w):
    K = means.size
    T = u_noise.size
    sums = np.zeros(K)
    counts = np.zeros(K)
    est = np.zeros(K)
    arms = np.empty(T, dtype=np.int64)
    for t in range(T):
        arm = t if t < K else dsee_choice(est, counts, t + 1.0, w)
        y = means[arm] + noise_scalar(ncode, nalpha, nlam, u_noise[t])
        sums[arm] += y
        counts[arm] += 1.0
        est[arm] = sums[arm] / counts[arm]
        arms[t] = arm
    return arms


def run_policy(policy, instance: BanditInstance, u_noise, u_pert=None, exact: bool = False) -> np.ndarray:
    """Play one trial with the compiled kernel; returns the arm pulled each round.

    ``u_noise`` holds one uniform per round for the reward noise and
    ``u_pert`` one uniform per round and arm for APE2's perturbations.
    """
    means = np.asarray(instance.means, dtype=float)
    nz = instance.noise
    u_noise = np.ascontiguousarray(u_noise, dtype=float)
    if u_noise.size < instance.K:
        raise ValueError(f"horizon {u_noise.size} shorter than the {instance.K}-round initialization")
    nargs = (means, nz.code, float(nz.alpha), float(nz.lam), u_noise)
    if isinstance(policy, APE2Policy):
        spec = policy.perturbation
        fixed = policy.fixed_u is not None
        if fixed:
            u_pert = np.empty((1, 1))
        elif u_pert is None or np.shape(u_pert) != (u_noise.size, instance.K):
            raise ValueError("ape2 needs a (T, K) array of perturbation uniforms")
        return _ape2_kernel(*nargs, np.ascontiguousarray(u_pert, dtype=float), fixed,
                            float(policy.fixed_u or 0.5), float(policy.c), float(policy.p),
                            spec.code, spec.shape, spec.scale, bool(exact), ACC_NODES, ACC_LOC, ACC_BW)
    if isinstance(policy, RobustUCBPolicy):
        return _ucb_kernel(*nargs, float(policy.c), float(policy.p), float(policy.eta),
                           float(policy.nu_p), _UCB_EST_CODES[policy.estimator])
    if isinstance(policy, DSEEPolicy):
        return _dsee_kernel(*nargs, float(policy.w))
    raise TypeError(f"unsupported policy {policy!r}")
