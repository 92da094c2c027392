"""Damped extended value iteration over a confidence set."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NonConvergent
from .optim import find_feasible_point, min_linear


@dataclass(frozen=True)
class DeviConfig:
    """Controls for :func:`devi`.

    ``outer_max_iter=None`` picks ``ceil(log(epsilon) / log(1 - q)) + 1``
    plus a safety margin, which the contraction argument guarantees is enough.
    ``cache_directions`` reuses an inner argmin whenever the objective for a
    state-action pair only changed by a positive scale factor; the minimiser
    is scale invariant, so this changes nothing but the running time.
    """

    epsilon: float
    q: float
    rho: float = 0.0
    inner_tol: float = 1e-9
    inner_max_iter: int = 10_000
    outer_max_iter: int | None = None
    cache_directions: bool = True
    keep_history: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.q < 1:
            raise ConfigurationError(f"q must lie in (0, 1), got {self.q}")
        if not 0 <= self.rho <= 1:
            raise ConfigurationError(f"rho must lie in [0, 1], got {self.rho}")
        need = self.min_outer_iter()
        if self.outer_max_iter is None:
            object.__setattr__(self, "outer_max_iter", 2 * need + 100)
        elif self.outer_max_iter < need:
            raise ConfigurationError(
                f"outer_max_iter={self.outer_max_iter} is below the guaranteed bound {need}")

    def min_outer_iter(self) -> int:
        if self.epsilon >= 1.0:
            return 1
        return math.ceil(math.log(self.epsilon) / math.log1p(-self.q)) + 1


@dataclass
class DeviResult:
    Q: np.ndarray
    iterations: int
    feasible_flag: bool
    gaps: list = field(default_factory=list)
    inner_solves: int = 0
    history: list = field(default_factory=list)

    @property
    def V(self) -> np.ndarray:
        return self.Q.min(axis=1)


class _DirectionCache:
    """Reuses argmins across sweeps: the minimiser only depends on the direction."""

    def __init__(self, S, A, d, tol=1e-12):
        self.tol = tol
        self.unit = np.full((S, A, d), np.nan)
        self.theta = np.zeros((S, A, d))

    def misses(self, agg, active):
        norms = np.linalg.norm(agg, axis=2, keepdims=True)
        unit = np.divide(agg, norms, out=np.zeros_like(agg), where=norms > 0)
        stale = ~(np.max(np.abs(unit - self.unit), axis=2) <= self.tol)
        return unit, stale & active


def devi(view, ellipsoid, feasible, config: DeviConfig) -> DeviResult:
    """Optimistic Q-function for the set ``ellipsoid`` intersected with ``feasible``.

    ``view`` exposes ``features``, ``cost`` and ``goal`` (a model instance or
    its learner-facing :class:`~linssp.model.SSPView`).
    """
    S, A = view.cost.shape
    g = view.goal
    if ellipsoid.d != view.features.shape[3]:
        raise ConfigurationError("ellipsoid dimension does not match the features")
    if find_feasible_point(ellipsoid, feasible) is None:
        return DeviResult(np.zeros((S, A)), 0, False)

    c_rho = np.maximum(view.cost, config.rho)
    c_rho[g] = 0.0
    keep = 1.0 - config.q
    d = view.features.shape[3]
    cache = _DirectionCache(S, A, d)
    non_goal = np.ones((S, A), dtype=bool)
    non_goal[g] = False
    solves = 0

    def sweep(V):
        nonlocal solves
        agg = np.einsum("sapd,p->sad", view.features, V)
        active = non_goal & np.any(agg != 0.0, axis=2)
        unit, todo = cache.misses(agg, active)
        if not config.cache_directions:
            todo = active
        for s, a in zip(*np.nonzero(todo)):
            res = min_linear(agg[s, a], ellipsoid, feasible, tol=config.inner_tol,
                             max_iter=config.inner_max_iter)
            solves += 1
            if res is None:
                raise NonConvergent("inner minimisation found the set empty after a "
                                    "feasibility check succeeded", np.inf, 0)
            cache.theta[s, a] = res.argmin
            cache.unit[s, a] = unit[s, a]
        inner = np.where(active, np.einsum("sad,sad->sa", cache.theta, agg), 0.0)
        Q = c_rho + keep * inner
        Q[g] = 0.0
        return Q

    Q = np.zeros((S, A))
    V = np.zeros(S)
    gaps = []
    history = []
    it = 0
    while True:
        it += 1
        Q_new = sweep(V)
        V_new = Q_new.min(axis=1)
        if config.keep_history:
            history.append(V_new)
        gaps.append(float(np.max(np.abs(Q_new - Q))))
        diff = float(np.max(np.abs(V_new - V)))
        Q, V = Q_new, V_new
        if diff < config.epsilon:
            break
        if it >= config.outer_max_iter:
            raise NonConvergent("DEVI outer loop", diff, it)
    Q_final = sweep(V)
    gaps.append(float(np.max(np.abs(Q_final - Q))))
    return DeviResult(Q_final, it, True, gaps, solves, history)
