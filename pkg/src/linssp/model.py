"""Linear mixture SSP instances: representation, feature aggregation, validation.

Transitions are linear in a known feature map,
``P(s'|s, a) = <phi(s'|s, a), theta*>``, with ``theta*`` unknown to the learner.
Features are stored as a dense tensor of shape ``(S, A, S, d)`` indexed as
``features[s, a, s_next]``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConfigurationError

PROB_TOL = 1e-12
_MAX_VERTEX_STATES = 12


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LinearMixtureSSP:
    """A finite SSP instance with linear mixture transitions.

    ``kind`` is one of ``"hard"``, ``"tabular"`` or ``"explicit"`` and,
    together with ``parameters``, records how the instance was generated.
    ``feasible`` is the set of transition parameters the learner may plan
    with; when ``None`` it is derived from the features on demand.
    """

    features: np.ndarray
    theta_star: np.ndarray
    cost: np.ndarray
    init: int
    goal: int
    kind: str = "explicit"
    parameters: dict = field(default_factory=dict)
    feasible: object = None

    def __post_init__(self):
        features = _frozen(self.features)
        if features.ndim != 4 or features.shape[0] != features.shape[2]:
            raise ConfigurationError(
                f"features must have shape (S, A, S, d), got {features.shape}")
        n_states, n_actions, _, d = features.shape
        theta = _frozen(self.theta_star)
        if theta.shape != (d,):
            raise ConfigurationError(
                f"theta_star has shape {theta.shape}, feature dimension is {d}")
        cost = _frozen(self.cost)
        if cost.shape != (n_states, n_actions):
            raise ConfigurationError(
                f"cost must have shape ({n_states}, {n_actions}), got {cost.shape}")
        for name in ("init", "goal"):
            idx = getattr(self, name)
            if not 0 <= int(idx) < n_states:
                raise ConfigurationError(f"{name}={idx} is not a state index")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "theta_star", theta)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "init", int(self.init))
        object.__setattr__(self, "goal", int(self.goal))
        P = _frozen(features @ theta)
        object.__setattr__(self, "_P", P)
        cdf = np.cumsum(np.clip(P, 0.0, None), axis=-1)
        object.__setattr__(self, "_cdf", cdf)

    @classmethod
    def from_feature_fn(cls, fn: Callable[[int, int, int], np.ndarray], n_states: int,
                        n_actions: int, d: int, theta_star, cost, init: int, goal: int,
                        **kwargs) -> "LinearMixtureSSP":
        """Build an instance by evaluating ``fn(s_next, s, a)`` on every triple."""
        feats = np.zeros((n_states, n_actions, n_states, d))
        for s, a, s2 in itertools.product(range(n_states), range(n_actions), range(n_states)):
            vec = np.asarray(fn(s2, s, a), dtype=float)
            if vec.shape != (d,):
                raise ConfigurationError(
                    f"feature map returned shape {vec.shape} at (s'={s2}, s={s}, a={a}); expected ({d},)")
            feats[s, a, s2] = vec
        return cls(feats, theta_star, cost, init, goal, **kwargs)

    @property
    def n_states(self) -> int:
        return self.features.shape[0]

    @property
    def n_actions(self) -> int:
        return self.features.shape[1]

    @property
    def d(self) -> int:
        return self.features.shape[3]

    @property
    def transitions(self) -> np.ndarray:
        """True transition tensor ``P[s, a, s_next]``."""
        return self._P

    def feature(self, s_next: int, s: int, a: int) -> np.ndarray:
        return self.features[s, a, s_next]

    def feasible_set(self):
        """Planning constraint set; derived from the features if not attached."""
        if self.feasible is not None:
            return self.feasible
        from .optim import feasible_set_from_features
        fs = feasible_set_from_features(self.features, self.goal)
        object.__setattr__(self, "feasible", fs)
        return fs

    def view(self) -> "SSPView":
        """Everything a learner may see: the instance minus ``theta_star``."""
        return SSPView(self.features, self.cost, self.init, self.goal, self.feasible_set())


@dataclass(frozen=True, eq=False)
class SSPView:
    """Learner-visible part of an instance (no access to the true parameter)."""

    features: np.ndarray
    cost: np.ndarray
    init: int
    goal: int
    feasible: object

    @property
    def n_states(self) -> int:
        return self.features.shape[0]

    @property
    def n_actions(self) -> int:
        return self.features.shape[1]

    @property
    def d(self) -> int:
        return self.features.shape[3]

    def phi_v_all(self, V) -> np.ndarray:
        """Aggregated features for every (s, a) pair, shape ``(S, A, d)``."""
        return _aggregate(self.features, V)


def _aggregate(features, V):
    V = np.asarray(V, dtype=float)
    if V.shape != (features.shape[0],):
        raise ConfigurationError(
            f"value table has shape {V.shape}, expected ({features.shape[0]},)")
    return np.einsum("sapd,p->sad", features, V)


def phi_v(instance, V, s: int, a: int) -> np.ndarray:
    """Aggregated feature ``sum_{s'} phi(s'|s, a) V(s')`` by exact summation."""
    V = np.asarray(V, dtype=float)
    if V.shape != (instance.features.shape[0],):
        raise ConfigurationError(
            f"value table has shape {V.shape}, expected ({instance.features.shape[0]},)")
    return V @ instance.features[s, a]


def transition_prob(instance: LinearMixtureSSP, s: int, a: int, s_next: int) -> float:
    return float(instance.features[s, a, s_next] @ instance.theta_star)


def sample_next_state(instance: LinearMixtureSSP, s: int, a: int,
                      rng: np.random.Generator) -> int:
    """Draw ``s' ~ P(.|s, a)`` from the supplied generator."""
    if s == instance.goal:
        raise ValueError("cannot step from the goal state; the episode has ended")
    cdf = instance._cdf[s, a]
    u = rng.random() * cdf[-1]
    return min(int(np.searchsorted(cdf, u, side="right")), len(cdf) - 1)


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    detail: str

    def __str__(self):
        return f"{self.kind} at {self.where}: {self.detail}"


def _value_vertices(n_states, rng):
    if n_states <= _MAX_VERTEX_STATES:
        return np.array(list(itertools.product((0.0, 1.0), repeat=n_states)))
    return rng.integers(0, 2, size=(256, n_states)).astype(float)


def validate(instance: LinearMixtureSSP, tol: float = PROB_TOL) -> list[Violation]:
    """Check the instance invariants; returns an empty list iff all hold.

    The bound ``||phi_V(s, a)|| <= B sqrt(d)`` for ``0 <= V <= B`` is checked
    at the vertices of the unit box (``phi_V`` is linear in ``V``, so the
    norm is maximised at a vertex); beyond 12 states random vertices are used.
    """
    out: list[Violation] = []
    S, A, d = instance.n_states, instance.n_actions, instance.d
    g = instance.goal
    P = instance.transitions
    if instance.init == g:
        out.append(Violation("init-goal", (instance.init,), "initial state equals the goal"))
    for s, a in itertools.product(range(S), range(A)):
        if s == g:
            for s2 in range(S):
                want = 1.0 if s2 == g else 0.0
                if abs(P[s, a, s2] - want) > tol:
                    out.append(Violation("goal-absorbing", (s, a, s2),
                                         f"P={P[s, a, s2]!r}, expected {want}"))
            if instance.cost[s, a] != 0.0:
                out.append(Violation("goal-cost", (s, a), f"c(g, a)={instance.cost[s, a]!r}"))
            continue
        for s2 in range(S):
            p = P[s, a, s2]
            if p < -tol or p > 1.0 + tol:
                out.append(Violation("probability-range", (s, a, s2), f"P={p!r}"))
        total = P[s, a].sum()
        if abs(total - 1.0) > tol:
            out.append(Violation("row-sum", (s, a), f"sum_s' P(s'|s,a)={total!r}"))
        c = instance.cost[s, a]
        if not 0.0 <= c <= 1.0:
            out.append(Violation("cost-range", (s, a), f"c={c!r}"))
    norm = float(np.linalg.norm(instance.theta_star))
    if norm > np.sqrt(d) + tol:
        out.append(Violation("theta-norm", (), f"||theta*||={norm:.6g} > sqrt(d)={np.sqrt(d):.6g}"))
    verts = _value_vertices(S, np.random.default_rng(0))
    agg = np.einsum("sapd,vp->vsad", instance.features, verts)
    norms = np.linalg.norm(agg, axis=-1).max(axis=0)
    for s, a in zip(*np.nonzero(norms > np.sqrt(d) + 1e-9)):
        out.append(Violation("feature-norm", (int(s), int(a)),
                             f"max ||phi_V|| over V in [0,1]^S is {norms[s, a]:.6g} > sqrt(d)"))
    return out


def to_dict(instance: LinearMixtureSSP) -> dict:
    """JSON-ready description; generated kinds carry only generator parameters."""
    data = {
        "kind": instance.kind,
        "states": list(range(instance.n_states)),
        "actions": list(range(instance.n_actions)),
        "d": instance.d,
        "init": instance.init,
        "goal": instance.goal,
        "cost": instance.cost.tolist(),
        "parameters": dict(instance.parameters),
    }
    if instance.kind == "explicit":
        data["theta_star"] = instance.theta_star.tolist()
        data["features"] = instance.features.tolist()
    return data


def from_dict(data: dict) -> LinearMixtureSSP:
    from . import instances

    kind = data.get("kind", "explicit")
    cost = data.get("cost")
    if kind == "hard":
        params = instances.HardInstanceParams(**data["parameters"])
        return instances.build_hard_instance(params, cost=cost)
    if kind == "tabular":
        p = data["parameters"]
        if cost is None:
            raise ConfigurationError("tabular instance needs a 'cost' table")
        return instances.embed_tabular(np.asarray(p["P"], dtype=float), np.asarray(cost, dtype=float),
                                       init=data["init"], goal=data["goal"])
    if kind == "explicit":
        try:
            return LinearMixtureSSP(np.asarray(data["features"], dtype=float), data["theta_star"],
                                    cost, data["init"], data["goal"], kind="explicit",
                                    parameters=data.get("parameters", {}))
        except KeyError as exc:
            raise ConfigurationError(f"explicit instance is missing field {exc}") from None
    raise ConfigurationError(f"unknown instance kind {kind!r}")


def save_instance(instance: LinearMixtureSSP, path) -> None:
    Path(path).write_text(json.dumps(to_dict(instance), indent=2, sort_keys=True) + "\n")


def load_instance(path) -> LinearMixtureSSP:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(data)
