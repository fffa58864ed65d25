"""Seeded Monte-Carlo experiments: estimator convergence, bandit regret, grid search.

Every trial draws its randomness from a Philox stream keyed by
(base seed, trial index, policy index, stream tag), so results do not
depend on execution order and serial and parallel runs agree byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .env import BanditInstance, NoiseSpec, make_ape_counterexample, make_gap_instance, \
    make_ucb_counterexample, noise_draws, nu_p_bound
from .estimators import EstimatorSpec, mom_blocks
from .influence import compute_bp, robust_sum
from .perturbations import PerturbationSpec, check_assumption2
from .policies import APE2Policy, DSEEPolicy, RobustUCBPolicy, _mom_from_prefix, run_policy

MODES = ("estimators", "bandit", "grid", "check", "bounds")
CSV_HEADER = ("round", "policy", "metric", "mean", "std", "runs")
MAX_LOGGED_ROUNDS = 2000


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


# ---------------------------------------------------------------------------
# randomness
# ---------------------------------------------------------------------------

def trial_rng(seed: int, trial: int, policy_id: int, tag: str) -> np.random.Generator:
    key = [int(seed), int(trial), int(policy_id), zlib.crc32(tag.encode())]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def open_uniforms(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniforms on the open interval (0, 1): exact zeros are redrawn."""
    u = rng.random(shape)
    zeros = u == 0.0
    while np.any(zeros):
        u[zeros] = rng.random(int(zeros.sum()))
        zeros = u == 0.0
    return u


def default_grid() -> np.ndarray:
    """62 candidate values: 50 on (0.1, 5.0], 10 on [0.01, 0.1], then 0.005 and 0.001."""
    coarse = np.linspace(0.1, 5.0, 51)[1:]
    fine = np.linspace(0.01, 0.1, 10)
    return np.concatenate([coarse, fine, [0.005, 0.001]])


def log_rounds(T: int, max_points: int = MAX_LOGGED_ROUNDS) -> np.ndarray:
    """Log-spaced 1-based rounds in [1, T], always including both ends."""
    r = np.unique(np.round(np.geomspace(1, T, max_points)).astype(np.int64))
    r[0], r[-1] = 1, T
    return r


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolicyEntry:
    label: str
    policy: object
    tune: str | None  # name of the grid-searched parameter, if any


@dataclass(frozen=True)
class EstimatorEntry:
    label: str
    kind: str
    params: dict


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    p: float = 1.5
    horizon: int = 100_000
    runs: int = 40
    seed: int = 0
    output: str | None = None
    instance: BanditInstance | None = None
    policies: tuple = ()
    estimators: tuple = ()
    noise: NoiseSpec | None = None
    y: float = 1.0
    grid: tuple = ()
    tune_runs: int | None = None
    tune_horizon: int | None = None
    tune_seed: int | None = None
    workers: int = 1
    exact: bool = False
    perturbations: tuple = ()
    bound_kinds: tuple = ("weibull", "gamma", "gev", "pareto", "frechet")
    bound_K: tuple = (2, 8, 32, 128)
    bound_T: tuple = (1_000, 100_000, 10_000_000)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        cfg = replace(self, **kw)
        cfg.validate()
        return cfg

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.mode in ("bandit", "grid") and self.instance is not None:
            if self.horizon < self.instance.K:
                raise ConfigError(f"horizon {self.horizon} shorter than K={self.instance.K}")
        if self.mode in ("bandit", "grid") and not self.policies and not self.estimators:
            raise ConfigError("no policies configured")
        if self.mode == "estimators" and not self.estimators:
            raise ConfigError("no estimators configured")
        nz = self.noise if self.noise is not None else (self.instance.noise if self.instance else None)
        if nz is not None and nz.kind == "pareto" and not nz.alpha > self.p:
            raise ConfigError(f"noise alpha={nz.alpha} must exceed p={self.p} for a finite p-th moment")


DEFAULT_POLICIES = (
    {"name": "ape2", "perturbation": "gumbel"},
    {"name": "ape2", "perturbation": "exponential"},
    {"name": "robust_ucb"},
    {"name": "dsee"},
)
DEFAULT_ESTIMATORS = (
    {"name": "sample_mean"},
    {"name": "truncated_mean"},
    {"name": "median_of_means"},
    {"name": "p_robust"},
)


def _perturbation(obj, p: float) -> PerturbationSpec:
    if isinstance(obj, str):
        obj = {"kind": obj}
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"perturbation must be a name or an object with 'kind', got {obj!r}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return PerturbationSpec.named(obj["kind"], scale=float(obj.get("scale", obj.get("lambda", 1.0))),
                                      shape=obj.get("shape"), p=obj.get("p", p))


def _noise(obj, p: float) -> NoiseSpec:
    if obj is None or obj == "none" or obj == "noiseless":
        return NoiseSpec.noiseless()
    if not isinstance(obj, dict):
        raise ConfigError(f"noise must be an object with 'alpha' and 'lambda', got {obj!r}")
    return NoiseSpec.pareto(float(obj.get("alpha", p + 0.05)), float(obj.get("lambda", 1.0)))


def _instance(obj: dict, p: float, horizon: int) -> BanditInstance:
    kind = obj.get("kind", "gap")
    K = int(obj.get("arms", 10))
    if kind == "gap":
        noise = _noise(obj["noise"], p) if "noise" in obj else NoiseSpec.pareto(p + 0.05, 1.0)
        return make_gap_instance(K, float(obj.get("gap", 0.1)), noise)
    if kind == "means":
        return BanditInstance(tuple(obj["means"]), _noise(obj.get("noise"), p))
    if kind == "ucb_counterexample":
        return make_ucb_counterexample(K, horizon, p, float(obj.get("nu", 1.0)), float(obj.get("eta", 1.0)))
    if kind == "ape_counterexample":
        spec = _perturbation(obj.get("perturbation", "gumbel"), p)
        return make_ape_counterexample(K, horizon, p, float(obj["c"]), spec)
    raise ConfigError(f"unknown instance kind {kind!r}")


def _policy(obj: dict, p: float, instance: BanditInstance | None, y_ref: float) -> PolicyEntry:
    obj = dict(obj)
    name = obj.pop("name", None)
    label = obj.pop("label", name)
    tune = obj.pop("tune", True)
    pp = float(obj.pop("p", p))
    if name == "ape2":
        raw = obj.pop("perturbation", "gumbel")
        pert = _perturbation(raw, pp)
        if label == name:
            label = f"ape2-{raw if isinstance(raw, str) else raw.get('kind')}"
        pol = APE2Policy(pert, c=float(obj.pop("c", 1.0)), p=pp, fixed_u=obj.pop("fixed_u", None))
        param = "c"
    elif name == "robust_ucb":
        nu = obj.pop("nu_p", None)
        if nu is None:
            if instance is None:
                raise ConfigError("robust_ucb needs nu_p when no instance is configured")
            nu = default_nu_p(instance, pp)
        pol = RobustUCBPolicy(float(nu), c=float(obj.pop("c", 1.0)), p=pp, eta=obj.pop("eta", None),
                              estimator=obj.pop("estimator", "truncated_mean"))
        param = "c"
    elif name == "dsee":
        pol = DSEEPolicy(float(obj.pop("w", 1.0)))
        param = "w"
    else:
        raise ConfigError(f"unknown policy {name!r}; expected ape2, robust_ucb or dsee")
    if obj:
        raise ConfigError(f"{name}: unknown parameters {sorted(obj)}")
    return PolicyEntry(label, pol, param if tune else None)


def _estimator(obj: dict, p: float) -> EstimatorEntry:
    obj = dict(obj)
    name = obj.pop("name", None)
    label = obj.pop("label", name)
    if name not in ("sample_mean", "truncated_mean", "median_of_means", "p_robust"):
        raise ConfigError(f"unknown estimator {name!r}")
    params = {"p": float(obj.pop("p", p))}
    for key in ("c", "delta", "nu_p"):
        if key in obj:
            params[key] = float(obj.pop(key))
    if "tune" in obj:
        params["tune"] = bool(obj.pop("tune"))
    if obj:
        raise ConfigError(f"{name}: unknown parameters {sorted(obj)}")
    return EstimatorEntry(label, name, params)


def default_nu_p(instance: BanditInstance, p: float) -> float:
    """Largest per-arm moment bound; used when a policy needs nu_p and none is given."""
    return max(nu_p_bound(instance.noise, m, p) for m in instance.means)


def _unique_labels(entries):
    seen = {}
    out = []
    for i, e in enumerate(entries):
        lab = e.label
        if lab in seen:
            lab = f"{lab}#{i}"
        seen[lab] = i
        out.append(replace(e, label=lab))
    return tuple(out)


def config_from_dict(d: dict) -> ExperimentConfig:
    try:
        mode = d.get("mode")
        p = float(d.get("p", 1.5))
        compute_bp(p)
        runs_default = 60 if mode == "estimators" else 40
        horizon_default = 5000 if mode == "estimators" else 100_000
        horizon = int(d.get("horizon", horizon_default))
        inst = None
        if "instance" in d and mode in ("bandit", "grid"):
            inst = _instance(d["instance"], p, horizon)
        elif mode in ("bandit", "grid") and "estimators" not in d:
            inst = _instance({}, p, horizon)
        y = float(d.get("y", 1.0))
        pol_objs = d.get("policies", DEFAULT_POLICIES if mode in ("bandit", "grid") and "estimators" not in d else [])
        est_objs = d.get("estimators", DEFAULT_ESTIMATORS if mode == "estimators" else [])
        policies = _unique_labels([_policy(o, p, inst, y) for o in pol_objs])
        estimators = _unique_labels([_estimator(o, p) for o in est_objs])
        noise = None
        if mode == "estimators" or (mode == "grid" and estimators and not policies):
            noise = _noise(d["noise"], p) if "noise" in d else NoiseSpec.pareto(p + 0.05, 1.0)
            estimators = tuple(_fill_estimator(e, noise, y) for e in estimators)
        perts = tuple(_perturbation(o, o.get("p") if isinstance(o, dict) else None) for o in d.get("perturbations", []))
        bounds = d.get("bounds", {})
        cfg = ExperimentConfig(
            mode=mode, p=p, horizon=horizon, runs=int(d.get("runs", runs_default)),
            seed=int(d.get("seed", 0)), output=d.get("output"), instance=inst, policies=policies,
            estimators=estimators, noise=noise, y=y,
            grid=tuple(float(v) for v in d.get("grid", ())),
            tune_runs=d.get("tune_runs"), tune_horizon=d.get("tune_horizon"), tune_seed=d.get("tune_seed"),
            workers=int(d.get("workers", 1)), exact=bool(d.get("exact", False)), perturbations=perts,
            bound_kinds=tuple(bounds.get("kinds", ExperimentConfig.bound_kinds)),
            bound_K=tuple(int(k) for k in bounds.get("K", ExperimentConfig.bound_K)),
            bound_T=tuple(float(t) for t in bounds.get("T", ExperimentConfig.bound_T)),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


def _fill_estimator(e: EstimatorEntry, noise: NoiseSpec, y: float) -> EstimatorEntry:
    params = dict(e.params)
    if e.kind in ("truncated_mean", "median_of_means"):
        params.setdefault("delta", 0.01)
    if e.kind == "truncated_mean" and "nu_p" not in params:
        params["nu_p"] = nu_p_bound(noise, y, params["p"])
    if e.kind == "p_robust":
        params.setdefault("c", 1.0)
    spec_args = {k: v for k, v in params.items() if k != "tune"}
    EstimatorSpec(e.kind, **spec_args)  # validates
    return replace(e, params=params)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(d)


# ---------------------------------------------------------------------------
# bandit trials
# ---------------------------------------------------------------------------

@dataclass
class RegretTrace:
    """Pulled arms and cumulative pseudo-regret of one trial."""

    arms: np.ndarray
    cumulative: np.ndarray

    @property
    def average(self) -> np.ndarray:
        return self.cumulative / np.arange(1, self.cumulative.size + 1)

    def check(self, gaps: np.ndarray):
        R = self.cumulative
        K = gaps.size
        if np.any(np.diff(R) < 0):
            raise AssertionError("cumulative regret decreased")
        if np.any(R > np.arange(1, R.size + 1) * gaps.max() * (1 + 1e-12)):
            raise AssertionError("cumulative regret exceeds t * max gap")
        if R.size >= K and not math.isclose(R[K - 1], gaps.sum(), rel_tol=1e-12, abs_tol=1e-15):
            raise AssertionError(f"R_K={R[K - 1]} differs from the sum of gaps {gaps.sum()}")


def run_bandit_trial(cfg: ExperimentConfig, trial: int, policy_index: int = 0,
                     horizon: int | None = None, policy=None) -> RegretTrace:
    """One seeded trial of one policy; identical inputs give identical traces."""
    T = cfg.horizon if horizon is None else horizon
    inst = cfg.instance
    pol = cfg.policies[policy_index].policy if policy is None else policy
    rng = trial_rng(cfg.seed, trial, policy_index, "bandit")
    u_noise = open_uniforms(rng, T)
    u_pert = None
    if isinstance(pol, APE2Policy) and pol.fixed_u is None:
        u_pert = open_uniforms(rng, (T, inst.K))
    arms = run_policy(pol, inst, u_noise, u_pert, exact=cfg.exact)
    gaps = inst.gaps
    trace = RegretTrace(arms, np.cumsum(gaps[arms]))
    trace.check(gaps)
    return trace


def _trial_job(args):
    cfg, trial, pidx, horizon, policy, rounds = args
    tr = run_bandit_trial(cfg, trial, pidx, horizon, policy)
    return tr.average[rounds - 1]


def _map_jobs(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


@dataclass
class AggregateRow:
    round: int
    policy: str
    metric: str
    mean: float
    std: float
    runs: int


def _aggregate(label, metric, rounds, matrix) -> list:
    # matrix rows are ordered by trial index, so the reduction is order-independent
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    return [AggregateRow(int(r), label, metric, float(m), float(s), matrix.shape[0])
            for r, m, s in zip(rounds, mean, std)]


def run_experiment(cfg: ExperimentConfig) -> list:
    """Run every policy for ``cfg.runs`` trials and aggregate R_t/t per logged round."""
    if cfg.mode == "estimators":
        return run_estimator_convergence(cfg)
    rounds = log_rounds(cfg.horizon)
    rows = []
    for pidx, entry in enumerate(cfg.policies):
        jobs = [(cfg, trial, pidx, cfg.horizon, None, rounds) for trial in range(cfg.runs)]
        mat = np.vstack(_map_jobs(_trial_job, jobs, cfg.workers))
        rows.extend(_aggregate(entry.label, "regret_avg", rounds, mat))
    return rows


# ---------------------------------------------------------------------------
# estimator convergence
# ---------------------------------------------------------------------------

def estimator_stream(cfg: ExperimentConfig, trial: int, horizon: int | None = None) -> np.ndarray:
    """Observations y + noise for one run; shared by every estimator."""
    T = cfg.horizon if horizon is None else horizon
    rng = trial_rng(cfg.seed, trial, 0, "estimators")
    return cfg.y + noise_draws(cfg.noise, open_uniforms(rng, T))


@njit(cache=True)
def _p_robust_prefixes(y, rounds, p, b, c, out):
    for j in range(rounds.size):
        n = rounds[j]
        out[j] = c / n ** (1.0 - 1.0 / p) * robust_sum(y, n, p, b, c)


@njit(cache=True)
def _mom_prefixes(cums, rounds, ks, out):
    buf = np.empty(ks.max())
    for j in range(rounds.size):
        out[j] = _mom_from_prefix(cums, rounds[j], ks[j], buf)


def prefix_estimates(entry: EstimatorEntry, y: np.ndarray, rounds: np.ndarray) -> np.ndarray:
    """Estimates on the prefixes y[:t] for each t in ``rounds``."""
    prm = entry.params
    p = prm["p"]
    out = np.empty(rounds.size)
    if entry.kind == "sample_mean":
        return np.cumsum(y)[rounds - 1] / rounds
    if entry.kind == "truncated_mean":
        idx = np.arange(1, y.size + 1)
        keep = np.abs(y) <= (prm["nu_p"] * idx / math.log(1.0 / prm["delta"])) ** (1.0 / p)
        return np.cumsum(np.where(keep, y, 0.0))[rounds - 1] / rounds
    if entry.kind == "median_of_means":
        cums = np.concatenate([[0.0], np.cumsum(y)])
        ks = np.array([mom_blocks(int(n), prm["delta"]) for n in rounds], dtype=np.int64)
        _mom_prefixes(cums, rounds, ks, out)
        return out
    _p_robust_prefixes(y, rounds, p, compute_bp(p), prm["c"], out)
    return out


def run_estimator_convergence(cfg: ExperimentConfig) -> list:
    """Mean and std of |estimate - y| over runs at each logged prefix length."""
    rounds = log_rounds(cfg.horizon)
    errs = {e.label: np.empty((cfg.runs, rounds.size)) for e in cfg.estimators}
    for trial in range(cfg.runs):
        y = estimator_stream(cfg, trial)
        for e in cfg.estimators:
            errs[e.label][trial] = np.abs(prefix_estimates(e, y, rounds) - cfg.y)
    rows = []
    for e in cfg.estimators:
        rows.extend(_aggregate(e.label, "est_error", rounds, errs[e.label]))
    return rows


# ---------------------------------------------------------------------------
# grid search
# ---------------------------------------------------------------------------

@dataclass
class GridResult:
    table: list = field(default_factory=list)  # (label, param, value, score)
    best: dict = field(default_factory=dict)  # label -> (value, score)

    def best_config(self, cfg: ExperimentConfig) -> ExperimentConfig:
        """``cfg`` with each tuned parameter set to its best grid value."""
        if cfg.estimators and not cfg.policies:
            ests = []
            for e in cfg.estimators:
                if e.label in self.best:
                    e = replace(e, params={**e.params, "c": self.best[e.label][0]})
                ests.append(e)
            return replace(cfg, estimators=tuple(ests))
        pols = []
        for e in cfg.policies:
            if e.label in self.best and e.tune:
                e = replace(e, policy=replace(e.policy, **{e.tune: self.best[e.label][0]}))
            pols.append(e)
        return replace(cfg, policies=tuple(pols))


def grid_search(cfg: ExperimentConfig, grid=None) -> GridResult:
    """Score each grid value by the final mean R_T/T (or |estimate - y|); lower is better.

    Uses ``tune_runs``, ``tune_horizon`` and ``tune_seed`` when set, so the
    tuning draws can be kept apart from the final evaluation.
    """
    grid = np.asarray(default_grid() if grid is None else grid, dtype=float)
    if grid.size == 0:
        raise ConfigError("grid search needs at least one grid value")
    runs = cfg.tune_runs or cfg.runs
    T = cfg.tune_horizon or cfg.horizon
    tcfg = replace(cfg, seed=cfg.seed if cfg.tune_seed is None else cfg.tune_seed)
    res = GridResult()
    if cfg.estimators and not cfg.policies:
        streams = [estimator_stream(tcfg, trial, T) for trial in range(runs)]
        last = np.array([T], dtype=np.int64)
        for e in cfg.estimators:
            if e.kind != "p_robust" or not e.params.get("tune", True):
                continue
            for v in grid:
                ee = replace(e, params={**e.params, "c": float(v)})
                score = float(np.mean([abs(prefix_estimates(ee, y, last)[0] - cfg.y) for y in streams]))
                res.table.append((e.label, "c", float(v), score))
        _pick_best(res)
        return res
    last = np.array([T], dtype=np.int64)
    for pidx, entry in enumerate(cfg.policies):
        if entry.tune is None:
            continue
        for v in grid:
            pol = replace(entry.policy, **{entry.tune: float(v)})
            jobs = [(tcfg, trial, pidx, T, pol, last) for trial in range(runs)]
            finals = np.concatenate(_map_jobs(_trial_job, jobs, cfg.workers))
            res.table.append((entry.label, entry.tune, float(v), float(finals.mean())))
    _pick_best(res)
    return res


def _pick_best(res: GridResult):
    for label, param, v, score in res.table:
        # first minimum wins, in grid order
        if label not in res.best or score < res.best[label][1]:
            res.best[label] = (v, score)


# ---------------------------------------------------------------------------
# check / bounds tables and CSV output
# ---------------------------------------------------------------------------

DEFAULT_CHECK = (("weibull", 1.0, 2.0), ("gamma", 1.0, 2.0), ("gev", 0.0, 1.5),
                 ("pareto", 3.0, 3.0), ("frechet", 3.0, 3.0))


def check_rows(cfg: ExperimentConfig) -> list:
    specs = cfg.perturbations
    if not specs:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            specs = tuple(PerturbationSpec(k, a, lam) for k, a, lam in DEFAULT_CHECK)
    rows = []
    for s in specs:
        r = check_assumption2(s)
        rows.append({"kind": s.kind, "shape": s.shape, "scale": s.scale, "f_zero": r.f_zero,
                     "f_zero_ok": r.f_zero_ok, "log_concave_ok": r.log_concave_ok,
                     "max_second_diff": r.max_second_diff, "integral_C": r.integral_C,
                     "integral_bound": "" if r.integral_bound is None else r.integral_bound,
                     "integral_ok": r.integral_ok, "sup_hazard": r.sup_hazard, "passed": r.passed})
    return rows


def bounds_rows(cfg: ExperimentConfig) -> list:
    from .bounds import rate_table, ucb_lower_rate

    rows = []
    for kind, K, T, rate, ratio in rate_table(cfg.bound_kinds, cfg.bound_K, cfg.bound_T, cfg.p):
        rows.append({"kind": kind, "K": K, "T": float(T), "p": cfg.p, "gap_independent": rate,
                     "ratio_to_optimal": ratio, "ucb_lower": ucb_lower_rate(K, T, cfg.p)})
    return rows


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return str(v).lower() if isinstance(v, bool) else ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_table(rows, path: str | None, columns=None) -> str:
    """Write dict rows or AggregateRow objects as CSV (LF line endings); returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows and isinstance(rows[0], AggregateRow):
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.round, r.policy, r.metric, repr(r.mean), repr(r.std), r.runs])
    else:
        cols = columns or (list(rows[0]) if rows else [])
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])
    text = buf.getvalue()
    if path:
        try:
            d = os.path.dirname(path)
            if d:
                os.makedirs(d, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
    return text


def grid_rows(res: GridResult) -> list:
    return [{"policy": lab, "param": prm, "value": v, "score": s, "best": res.best[lab][0] == v}
            for lab, prm, v, s in res.table]
