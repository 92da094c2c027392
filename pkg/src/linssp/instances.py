"""Instance generators and non-learning baseline policies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .model import LinearMixtureSSP
from .optim import L1FeasibleSet, feasible_set_from_features

S_INIT, GOAL = 0, 1


@dataclass(frozen=True)
class HardInstanceParams:
    """Two-state hard family: ``delta + Delta = 1 / B_star`` and ``delta > Delta``."""

    d: int
    B_star: float
    delta: float
    Delta: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ConfigurationError(f"d must be an integer >= 2, got {self.d}")
        if not self.B_star >= 2:
            raise ConfigurationError(f"B_star must be >= 2, got {self.B_star}")
        if not (self.delta > 0 and self.Delta > 0):
            raise ConfigurationError(f"delta and Delta must be positive, got {self.delta}, {self.Delta}")
        if not self.delta > self.Delta:
            raise ConfigurationError(f"need delta > Delta, got {self.delta} <= {self.Delta}")
        if abs(self.delta + self.Delta - 1.0 / self.B_star) > 1e-12:
            raise ConfigurationError(
                f"delta + Delta = {self.delta + self.Delta!r} differs from 1/B_star = {1.0 / self.B_star!r}")

    @classmethod
    def default(cls, d: int = 5, B_star: float = 3.0, split: float = 0.9) -> "HardInstanceParams":
        """``delta = split / B_star`` and ``Delta = (1 - split) / B_star``."""
        delta = split / B_star
        return cls(d, B_star, delta, 1.0 / B_star - delta)

    @classmethod
    def lower_bound_calibrated(cls, d: int, B_star: float, K: int) -> "HardInstanceParams":
        """``Delta = (d-1) sqrt(delta) / (64 sqrt(K B_star))`` with ``delta + Delta = 1/B_star``.

        Writing ``x = sqrt(delta)`` gives ``x^2 + c x - 1/B_star = 0``.
        """
        c = (d - 1) / (64.0 * np.sqrt(K * B_star))
        x = (-c + np.sqrt(c * c + 4.0 / B_star)) / 2.0
        delta = x * x
        return cls(d, B_star, delta, 1.0 / B_star - delta)

    @classmethod
    def preset(cls, name: str, d: int = 5, B_star: float = 3.0, K: int | None = None,
               split: float = 0.9) -> "HardInstanceParams":
        if name == "default":
            return cls.default(d, B_star, split)
        if name == "lower-bound-calibrated":
            if K is None:
                raise ConfigurationError("preset 'lower-bound-calibrated' needs K")
            return cls.lower_bound_calibrated(d, B_star, K)
        raise ConfigurationError(f"unknown hard-instance preset {name!r}")


def action_vectors(d: int) -> np.ndarray:
    """Sign vectors in ``{-1, 1}^{d-1}``; bit ``k`` of index ``i`` set means ``+1``."""
    n = d - 1
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> np.arange(n)[None, :]) & 1
    return np.where(bits == 1, 1.0, -1.0)


def build_hard_instance(params: HardInstanceParams, cost=None) -> LinearMixtureSSP:
    d, delta, Delta = params.d, params.delta, params.Delta
    acts = action_vectors(d)
    n_act = len(acts)
    feats = np.zeros((2, n_act, 2, d))
    feats[S_INIT, :, S_INIT, :-1] = -acts
    feats[S_INIT, :, S_INIT, -1] = 1.0 - delta
    feats[S_INIT, :, GOAL, :-1] = acts
    feats[S_INIT, :, GOAL, -1] = delta
    feats[GOAL, :, GOAL, -1] = 1.0
    theta = np.full(d, Delta / (d - 1))
    theta[-1] = 1.0
    if cost is None:
        cost = np.zeros((2, n_act))
        cost[S_INIT] = 1.0
    return LinearMixtureSSP(feats, theta, np.asarray(cost, dtype=float), S_INIT, GOAL, kind="hard",
                            parameters={"d": d, "B_star": params.B_star, "delta": delta,
                                        "Delta": Delta},
                            feasible=L1FeasibleSet(delta, d))


def optimal_hard_action(d: int) -> int:
    """Index of the all-ones action."""
    return 2 ** (d - 1) - 1


def embed_tabular(P, c, init: int, goal: int) -> LinearMixtureSSP:
    """Tabular SSP as a linear mixture with indicator features ``e_{(s, a, s')}``."""
    P = np.asarray(P, dtype=float)
    c = np.asarray(c, dtype=float)
    if P.ndim != 3 or P.shape[0] != P.shape[2]:
        raise ConfigurationError(f"P must have shape (S, A, S), got {P.shape}")
    S, A, _ = P.shape
    if np.any(P < 0) or np.any(np.abs(P.sum(axis=2) - 1.0) > 1e-12):
        raise ConfigurationError("each row of P must be a probability vector")
    if np.any(np.abs(P[goal, :, goal] - 1.0) > 1e-12):
        raise ConfigurationError("goal state must be absorbing")
    if np.any(c[goal] != 0.0):
        raise ConfigurationError("cost at the goal must be zero")
    d = S * S * A
    feats = np.zeros((S, A, S, d))
    for s in range(S):
        for a in range(A):
            for s2 in range(S):
                feats[s, a, s2, (s * A + a) * S + s2] = 1.0
    return LinearMixtureSSP(feats, P.reshape(-1), c, init, goal, kind="tabular",
                            parameters={"P": P.tolist()},
                            feasible=feasible_set_from_features(feats, goal))


def random_tabular(rng, n_states: int = 4, n_actions: int = 2, goal: int | None = None,
                   init: int = 0, cost_low: float = 0.1) -> LinearMixtureSSP:
    """Random proper tabular instance (every row puts mass on the goal)."""
    goal = n_states - 1 if goal is None else goal
    P = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
    P = 0.9 * P
    P[:, :, goal] += 0.1
    P[goal] = 0.0
    P[goal, :, goal] = 1.0
    P /= P.sum(axis=2, keepdims=True)
    c = rng.uniform(cost_low, 1.0, size=(n_states, n_actions))
    c[goal] = 0.0
    return embed_tabular(P, c, init, goal)


class RandomPolicy:
    """Picks an action uniformly at random at every step."""

    name = "random"

    def __init__(self, instance, rng):
        self.n_actions = instance.n_actions
        self.rng = rng

    def act(self, s: int) -> int:
        return int(self.rng.integers(self.n_actions))

    def observe(self, s, a, cost, s_next):
        pass

    def end_episode(self):
        pass


class OptimalPolicy:
    """Follows the oracle's greedy policy."""

    name = "optimal"

    def __init__(self, instance, oracle_result):
        self.pi = np.asarray(oracle_result.pi_star)

    def act(self, s: int) -> int:
        return int(self.pi[s])

    def observe(self, s, a, cost, s_next):
        pass

    def end_episode(self):
        pass


def random_policy_baseline(instance, rng) -> RandomPolicy:
    return RandomPolicy(instance, rng)


def optimal_policy_baseline(instance, oracle_result) -> OptimalPolicy:
    return OptimalPolicy(instance, oracle_result)
