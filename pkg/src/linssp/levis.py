"""Optimistic learner with lazy re-planning and a Hoeffding-type confidence set."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .devi import DeviConfig, devi
from .errors import ConfigurationError, StepCapExceeded
from .model import sample_next_state
from .optim import ConfidenceEllipsoid


@dataclass(frozen=True)
class LevisConfig:
    """Learner parameters.

    ``beta_scale`` multiplies the confidence radius; 1.0 is the theoretical
    value and anything else is an ablation. ``tie_tol`` is the slack within
    which Q-values count as tied (ties go to the lowest action index).
    """

    lam: float = 1.0
    B: float = 3.0
    delta: float = 0.01
    rho: float = 0.0
    beta_scale: float = 1.0
    tie_tol: float = 1e-9
    inner_tol: float = 1e-9
    min_lam: float = 1.0

    def __post_init__(self):
        if not self.lam >= self.min_lam:
            raise ConfigurationError(f"lam must be >= {self.min_lam}, got {self.lam}")
        if not self.B >= 1:
            raise ConfigurationError(f"B must be >= 1, got {self.B}")
        if not 0 < self.delta < 1:
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 <= self.rho <= 1:
            raise ConfigurationError(f"rho must lie in [0, 1], got {self.rho}")
        if not self.beta_scale > 0:
            raise ConfigurationError(f"beta_scale must be positive, got {self.beta_scale}")


def beta_t(t: int, d: int, config: LevisConfig) -> float:
    """``B sqrt(d log(4 (t^2 + t^3 B^2 / lam) / delta)) + sqrt(lam d)``."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    B, lam, delta = config.B, config.lam, config.delta
    inner = 4.0 * (t * t + t ** 3 * B * B / lam) / delta
    return B * math.sqrt(d * math.log(inner)) + math.sqrt(lam * d)


@dataclass
class Epoch:
    """One re-planning event."""

    j: int
    t: int
    beta: float
    logdet: float
    devi_iterations: int
    feasible: bool
    center: np.ndarray
    weight: np.ndarray
    V: np.ndarray = field(repr=False, default=None)

    def ellipsoid(self) -> ConfidenceEllipsoid:
        return ConfidenceEllipsoid(self.center, self.weight, self.beta)


class _LazyLearner:
    """State and trigger logic shared by both learners.

    ``t`` counts observed transitions. The epoch start ``t_j`` begins at 1
    and the determinant reference is taken after the first observation, so
    the time-doubling rule fires for the first time at ``t = 2``.
    """

    name = "lazy"

    def __init__(self, view, config):
        self.view = view
        self.config = config
        d = view.d
        S, A = view.n_states, view.n_actions
        self.d = d
        self.t = 0
        self.j = 0
        self.t_j = 1
        self.Sigma = config.lam * np.eye(d)
        self.b = np.zeros(d)
        self.logdet = d * math.log(config.lam)
        self.logdet_ref = self.logdet
        self.Q = np.ones((S, A))
        self.Q[view.goal] = 0.0
        self.V = self.Q.min(axis=1)
        self.theta_hat = np.zeros(d)
        self.events: list[Epoch] = []
        self.truncations = 0

    def act(self, s: int) -> int:
        row = self.Q[s]
        return int(np.argmax(row <= row.min() + self.config.tie_tol))

    def phi_v(self, s, a, V=None):
        V = self.V if V is None else V
        return V @ self.view.features[s, a]

    def _rank_one(self, x, weight=1.0):
        """Add ``weight x x^T`` to ``Sigma`` and update its log-determinant."""
        if not np.any(x):
            return
        u = linalg.cho_solve(linalg.cho_factor(self.Sigma), x)
        self.logdet += math.log1p(weight * float(x @ u))
        self.Sigma += weight * np.outer(x, x)

    def should_update(self) -> bool:
        return (self.logdet >= self.logdet_ref + math.log(2.0)) or (self.t >= 2 * self.t_j)

    def maybe_update(self) -> bool:
        if self.t == 1 and self.j == 0:
            self.logdet_ref = self.logdet
        if not self.should_update():
            return False
        self.j += 1
        self.t_j = self.t
        self.logdet_ref = self.logdet
        center = self.planning_center()
        radius = self.config.beta_scale * self.radius(self.t_j)
        ell = ConfidenceEllipsoid(center, self.Sigma.copy(), radius)
        eps = 1.0 / self.t_j
        cfg = DeviConfig(epsilon=eps, q=eps, rho=self.config.rho, inner_tol=self.config.inner_tol)
        res = devi(self.view, ell, self.view.feasible, cfg)
        self.Q = res.Q
        self.V = self.Q.min(axis=1)
        self.V[self.view.goal] = 0.0
        self.events.append(Epoch(self.j, self.t_j, radius, self.logdet, res.iterations,
                                 res.feasible_flag, center.copy(), self.Sigma.copy(),
                                 self.V.copy()))
        return True

    def end_episode(self):
        pass


class Levis(_LazyLearner):
    """Hoeffding-type learner: unweighted ridge regression on ``phi_V``."""

    name = "levis"

    def radius(self, t):
        return beta_t(t, self.d, self.config)

    def planning_center(self):
        self.theta_hat = linalg.cho_solve(linalg.cho_factor(self.Sigma), self.b)
        return self.theta_hat

    def observe(self, s, a, cost, s_next):
        x = self.phi_v(s, a)
        self.t += 1
        self._rank_one(x)
        self.b += x * self.V[s_next]
        self.maybe_update()


def run_episode(agent, instance, rng, step_cap: int = 1_000_000):
    """Play one episode from the initial state; returns ``(cost, steps)``.

    The cost is the true (unperturbed) cost. Raises :class:`StepCapExceeded`
    carrying the partial cost when the goal is not reached within ``step_cap``.
    """
    if step_cap <= 0:
        raise ConfigurationError(f"step_cap must be positive, got {step_cap}")
    s = instance.init
    total = 0.0
    steps = 0
    while s != instance.goal:
        if steps >= step_cap:
            agent.end_episode()
            raise StepCapExceeded(total, steps)
        a = agent.act(s)
        s_next = sample_next_state(instance, s, a, rng)
        c = float(instance.cost[s, a])
        agent.observe(s, a, c, s_next)
        total += c
        steps += 1
        s = s_next
    agent.end_episode()
    return total, steps
