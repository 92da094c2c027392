"""Exact planning with the true transitions: optimal values, policy evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from .errors import Improper, NonConvergent

DIVERGENCE = 1e9


@dataclass(frozen=True)
class PlanningResult:
    V_star: np.ndarray
    Q_star: np.ndarray
    pi_star: np.ndarray
    B_star: float
    T_star: float
    iterations: int
    residual: float


def bellman_operator(instance, V) -> np.ndarray:
    """``(L V)(s) = min_a c(s, a) + P(.|s, a) V``, with the goal pinned to zero."""
    Q = _q_from_v(instance, V)
    return Q.min(axis=1)


def _q_from_v(instance, V):
    Q = instance.cost + instance.transitions @ np.asarray(V, dtype=float)
    Q[instance.goal] = 0.0
    return Q


def greedy(Q, tie_tol: float = 0.0) -> np.ndarray:
    """Lowest-index argmin per row, treating values within ``tie_tol`` as equal."""
    Q = np.asarray(Q)
    best = Q.min(axis=-1, keepdims=True)
    return np.argmax(Q <= best + tie_tol, axis=-1)


def solve_optimal(instance, tol: float = 1e-10, max_iter: int = 10_000_000) -> PlanningResult:
    """Value iteration from zero until the sup-norm change drops below ``tol``."""
    V = np.zeros(instance.n_states)
    res = np.inf
    for it in range(1, max_iter + 1):
        V_new = bellman_operator(instance, V)
        res = float(np.max(np.abs(V_new - V)))
        V = V_new
        if not np.isfinite(res) or res > DIVERGENCE:
            raise Improper("value iteration diverged; no proper policy reaches the goal", [])
        if res < tol:
            break
    else:
        raise NonConvergent("value iteration", res, max_iter)
    Q = _q_from_v(instance, V)
    pi = greedy(Q)
    V_pi = _evaluate_exact(instance, pi)
    if V_pi is not None and np.max(np.abs(bellman_operator(instance, V_pi) - V_pi)) <= tol:
        # polish: the greedy policy's exact value is the fixed point
        V = V_pi
        Q = _q_from_v(instance, V)
        pi = greedy(Q, tie_tol=1e-12)
    T = expected_hitting_time(instance, pi)
    return PlanningResult(V, Q, pi, float(V.max()), float(T.max()), it, res)


def _evaluate_exact(instance, pi):
    """Value of a deterministic policy by a direct linear solve; ``None`` if singular."""
    Pp, cp = _policy_matrix(instance, pi)
    keep = np.arange(instance.n_states) != instance.goal
    M = np.eye(int(keep.sum())) - Pp[np.ix_(keep, keep)]
    try:
        sol = np.linalg.solve(M, cp[keep])
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)) or np.any(sol < -1e-12):
        return None
    V = np.zeros(instance.n_states)
    V[keep] = sol
    return V


def _policy_matrix(instance, policy):
    """Transition matrix and per-state cost under a deterministic or stochastic policy."""
    policy = np.asarray(policy)
    S = instance.n_states
    P = instance.transitions
    if policy.ndim == 1:
        idx = np.arange(S)
        return P[idx, policy.astype(int)], instance.cost[idx, policy.astype(int)]
    return np.einsum("sa,sap->sp", policy, P), np.einsum("sa,sa->s", policy, instance.cost)


def policy_value(instance, policy, tol: float = 1e-10, max_iter: int = 10_000_000,
                 cost=None) -> np.ndarray:
    """Expected total cost to reach the goal under ``policy``.

    Solved directly as a linear system once properness is established, with
    iterative evaluation as a fallback. ``policy`` is either an array of actions ``(S,)`` or a distribution over
    actions per state ``(S, A)``. Raises :class:`Improper` if some state with
    positive cost never reaches the goal.
    """
    Pp, cp = _policy_matrix(instance, policy)
    if cost is not None:
        cp = np.asarray(cost, dtype=float)
    g = instance.goal
    cp = cp.copy()
    cp[g] = 0.0
    stuck = _states_missing_goal(Pp, g)
    bad = [s for s in stuck if cp[s] > 0 or _reaches_cost(Pp, s, cp, stuck)]
    if bad:
        raise Improper("policy does not reach the goal from every state", bad)
    # states that cannot reach the goal only ever see zero cost, so their value is 0
    keep = np.ones(instance.n_states, dtype=bool)
    keep[g] = False
    keep[stuck] = False
    V = np.zeros(instance.n_states)
    try:
        V[keep] = np.linalg.solve(np.eye(int(keep.sum())) - Pp[np.ix_(keep, keep)], cp[keep])
        if np.all(np.isfinite(V)) and V.max() <= DIVERGENCE:
            return V
    except np.linalg.LinAlgError:
        pass
    V = np.zeros(instance.n_states)
    res = np.inf
    for it in range(max_iter):
        V_new = cp + Pp @ V
        V_new[g] = 0.0
        res = float(np.max(np.abs(V_new - V)))
        V = V_new
        if V.max() > DIVERGENCE:
            raise Improper("policy value diverged", [int(s) for s in np.nonzero(V > DIVERGENCE)[0]])
        if res < tol * max(1.0, V.max()):
            return V
    raise NonConvergent("policy evaluation", res, max_iter)


def _states_missing_goal(Pp, goal):
    """States from which the goal is unreachable."""
    adj = csr_matrix((Pp > 0).T.astype(float))
    reach = csgraph.breadth_first_order(adj, goal, directed=True, return_predecessors=False)
    mask = np.ones(len(Pp), dtype=bool)
    mask[reach] = False
    return [int(s) for s in np.nonzero(mask)[0]]


def _reaches_cost(Pp, s, cost, stuck):
    adj = csr_matrix((Pp > 0).astype(float))
    reach = csgraph.breadth_first_order(adj, s, directed=True, return_predecessors=False)
    return bool(np.any(cost[reach] > 0))


def expected_hitting_time(instance, policy, **kw) -> np.ndarray:
    """Expected number of steps to the goal under ``policy``."""
    unit = np.ones(instance.n_states)
    return policy_value(instance, policy, cost=unit, **kw)
