"""Experiment runner: seeded trials, regret traces, aggregation and reports."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from .errors import ConfigurationError, InsufficientData, StepCapExceeded
from .instances import OptimalPolicy, RandomPolicy
from .levis import Levis, LevisConfig, run_episode
from .levis_plus import LevisPlus, LevisPlusConfig
from .oracle import solve_optimal

log = logging.getLogger(__name__)

ALGORITHMS = ("levis", "levis_plus", "random", "optimal")


@dataclass(frozen=True)
class AgentSpec:
    """Which agent to run and with what parameters.

    ``rho`` is a number or ``"k-cube-root"`` (resolved to ``K ** (-1/3)``).
    ``lam=None`` picks the algorithm default (1 for levis, ``1/B^2`` for
    levis_plus).
    """

    algorithm: str = "levis"
    lam: float | None = None
    B: float = 3.0
    delta: float = 0.01
    rho: float | str = 0.0
    beta_scale: float = 1.0
    tie_tol: float = 1e-9
    sherman_morrison: bool = False
    log_every: int = 100

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if isinstance(self.rho, str) and self.rho != "k-cube-root":
            raise ConfigurationError(f"rho must be a number or 'k-cube-root', got {self.rho!r}")

    def resolve_rho(self, K: int) -> float:
        if self.rho == "k-cube-root":
            return float(K) ** (-1.0 / 3.0)
        return float(self.rho)

    def learner_config(self, K: int):
        common = dict(B=self.B, delta=self.delta, rho=self.resolve_rho(K),
                      beta_scale=self.beta_scale, tie_tol=self.tie_tol)
        if self.algorithm == "levis":
            return LevisConfig(lam=1.0 if self.lam is None else self.lam, **common)
        if self.algorithm == "levis_plus":
            return LevisPlusConfig(lam=self.lam, sherman_morrison=self.sherman_morrison,
                                   log_every=self.log_every, **common)
        return None

    def build(self, instance, rng, oracle_result, K: int):
        if self.algorithm == "random":
            return RandomPolicy(instance, rng)
        if self.algorithm == "optimal":
            return OptimalPolicy(instance, oracle_result)
        cls = Levis if self.algorithm == "levis" else LevisPlus
        return cls(instance.view(), self.learner_config(K))


@dataclass
class RegretTrace:
    trial: int
    v_star_init: float
    costs: np.ndarray
    steps: np.ndarray
    epochs: np.ndarray
    truncated: np.ndarray
    agent: object = field(default=None, repr=False)

    @property
    def K(self) -> int:
        return len(self.costs)

    @property
    def cum_regret(self) -> np.ndarray:
        return np.cumsum(self.costs) - np.arange(1, self.K + 1) * self.v_star_init

    @property
    def avg_regret(self) -> np.ndarray:
        return self.cum_regret / np.arange(1, self.K + 1)

    @property
    def tainted(self) -> bool:
        return bool(np.any(self.truncated))


def trial_rngs(master_seed: int, trial: int):
    """Independent environment and agent generators for one trial."""
    env, agent = np.random.SeedSequence([int(master_seed), int(trial)]).spawn(2)
    return np.random.default_rng(env), np.random.default_rng(agent)


def run_trial(instance, spec: AgentSpec, K: int, master_seed: int = 0, trial: int = 0,
              step_cap: int = 1_000_000, oracle_result=None, keep_agent: bool = False) -> RegretTrace:
    """Run ``K`` episodes; deterministic in ``(instance, spec, master_seed, trial)``."""
    if oracle_result is None:
        oracle_result = solve_optimal(instance)
    env_rng, agent_rng = trial_rngs(master_seed, trial)
    agent = spec.build(instance, agent_rng, oracle_result, K)
    costs = np.zeros(K)
    steps = np.zeros(K, dtype=np.int64)
    epochs = np.zeros(K, dtype=np.int64)
    truncated = np.zeros(K, dtype=bool)
    for k in range(K):
        try:
            costs[k], steps[k] = run_episode(agent, instance, env_rng, step_cap)
        except StepCapExceeded as exc:
            log.warning("trial %d episode %d: %s", trial, k + 1, exc)
            costs[k], steps[k], truncated[k] = exc.cost, exc.steps, True
        epochs[k] = getattr(agent, "j", 0)
    return RegretTrace(trial, float(oracle_result.V_star[instance.init]), costs, steps, epochs,
                       truncated, agent if keep_agent else None)


def run_trials(instance, spec: AgentSpec, K: int, trials: int, master_seed: int = 0,
               step_cap: int = 1_000_000, parallelism: int = 1, keep_agent: bool = False):
    oracle_result = solve_optimal(instance)
    args = dict(step_cap=step_cap, oracle_result=oracle_result, keep_agent=keep_agent)
    if parallelism == 1:
        return [run_trial(instance, spec, K, master_seed, i, **args) for i in range(trials)]
    return Parallel(n_jobs=parallelism)(
        delayed(run_trial)(instance, spec, K, master_seed, i, **args) for i in range(trials))


def checkpoint_grid(K_max: int, n: int = 20, start: int = 25) -> np.ndarray:
    """Geometric grid of episode counts, strictly increasing."""
    if K_max < start:
        raise ConfigurationError(f"K_max={K_max} is below the first checkpoint {start}")
    return np.unique(np.round(np.geomspace(start, K_max, n)).astype(int))


@dataclass(frozen=True)
class TrialAggregate:
    K: np.ndarray
    mean: np.ndarray
    q10: np.ndarray
    q90: np.ndarray
    n_trials: int
    excluded: int = 0


def aggregate(traces, checkpoints) -> TrialAggregate:
    """Mean and 10%/90% quantiles of ``R_K / K``; tainted trials are left out."""
    checkpoints = np.asarray(checkpoints, dtype=int)
    clean = [tr for tr in traces if not tr.tainted]
    excluded = len(traces) - len(clean)
    if excluded:
        log.warning("excluding %d tainted trial(s) from the aggregate", excluded)
    if not clean:
        raise InsufficientData("no untainted trials to aggregate")
    if any(tr.K < checkpoints.max() for tr in clean):
        raise ConfigurationError("some traces are shorter than the last checkpoint")
    M = np.array([tr.avg_regret[checkpoints - 1] for tr in clean])
    return TrialAggregate(checkpoints, M.mean(axis=0), np.quantile(M, 0.1, axis=0),
                          np.quantile(M, 0.9, axis=0), len(clean), excluded)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    n_points: int


def loglog_slope(agg: TrialAggregate, k_min: int = 100) -> SlopeFit:
    """Least-squares slope of ``log(mean R_K/K)`` against ``log K`` for ``K >= k_min``."""
    K = np.asarray(agg.K, dtype=float)
    m = np.asarray(agg.mean, dtype=float)
    keep = (K >= k_min) & (m > 0)
    if keep.sum() < 5:
        raise InsufficientData(f"only {int(keep.sum())} usable checkpoints with K >= {k_min}")
    x, y = np.log(K[keep]), np.log(m[keep])
    if np.ptp(y) == 0.0:
        return SlopeFit(0.0, float(y[0]), 1.0, int(keep.sum()))
    fit = stats.linregress(x, y)
    return SlopeFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2), int(keep.sum()))


# ---------------------------------------------------------------------------
# reports


def write_trace_csv(traces, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "episode", "cost", "steps", "cum_regret"])
        for tr in traces:
            cr = tr.cum_regret
            for k in range(tr.K):
                w.writerow([tr.trial, k + 1, repr(float(tr.costs[k])), int(tr.steps[k]),
                            repr(float(cr[k]))])


def write_aggregate_csv(agg: TrialAggregate, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["K", "mean_avg_regret", "q10", "q90", "n_trials"])
        for i, k in enumerate(agg.K):
            w.writerow([int(k), repr(float(agg.mean[i])), repr(float(agg.q10[i])),
                        repr(float(agg.q90[i])), agg.n_trials])


def write_summary(path, fit: SlopeFit | None, config: dict, tainted: int) -> None:
    data = {
        "slope": None if fit is None else fit.slope,
        "r2": None if fit is None else fit.r2,
        "config": config,
        "tainted_trials": tainted,
    }
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def spec_to_dict(spec: AgentSpec) -> dict:
    return asdict(spec)
