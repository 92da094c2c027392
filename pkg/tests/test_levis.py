import math
from types import SimpleNamespace

import numpy as np
import pytest

from linssp.devi import DeviConfig, devi
from linssp.errors import ConfigurationError, StepCapExceeded
from linssp.instances import embed_tabular
from linssp.levis import Levis, LevisConfig, beta_t, run_episode
from linssp.model import sample_next_state
from linssp.optim import ConfidenceEllipsoid

from .oracles import beta_hoeffding


def _agent(inst, **kw):
    return Levis(inst.view(), LevisConfig(**kw))


def test_config_domains():
    with pytest.raises(ConfigurationError):
        LevisConfig(lam=0.5)
    with pytest.raises(ConfigurationError):
        LevisConfig(delta=1.5)
    with pytest.raises(ConfigurationError):
        LevisConfig(rho=-0.1)
    with pytest.raises(ConfigurationError):
        LevisConfig(B=0.5)


def test_beta_example():
    cfg = LevisConfig(lam=1.0, B=3.0, delta=0.01)
    assert beta_t(1, 5, cfg) == pytest.approx(beta_hoeffding(1, 3.0, 5, 1.0, 0.01), rel=1e-12)
    assert beta_t(1, 5, cfg) == pytest.approx(21.56, abs=0.01)


def test_beta_is_nondecreasing():
    cfg = LevisConfig(lam=1.0, B=3.0, delta=0.01)
    prev = 0.0
    for t in range(1, 1_000_001, 7):
        b = beta_t(t, 5, cfg)
        assert b >= prev
        prev = b


def test_beta_additive_term():
    surrogate = SimpleNamespace(B=0.0, lam=4.0, delta=0.5)
    assert beta_t(3, 9, surrogate) == 6.0
    with pytest.raises(ValueError):
        beta_t(0, 9, surrogate)


def test_tie_break_and_unique_minimum(hard):
    ag = _agent(hard)
    assert ag.act(0) == 0
    ag.Q = np.ones_like(ag.Q)
    ag.Q[0, 3] = 0.5
    assert ag.act(0) == 3


def test_zero_values_leave_statistics_untouched(hard):
    ag = _agent(hard)
    ag.V = np.zeros(2)
    Sigma, b = ag.Sigma.copy(), ag.b.copy()
    ag.t_j = 100                       # keep the time rule quiet
    ag.observe(0, 3, 1.0, 0)
    assert ag.t == 1
    np.testing.assert_array_equal(ag.Sigma, Sigma)
    np.testing.assert_array_equal(ag.b, b)


def test_determinant_lemma(hard):
    ag = _agent(hard, lam=2.0)
    x = ag.phi_v(0, 5)
    ag._rank_one(x)
    expected = hard.d * math.log(2.0) + math.log1p(x @ x / 2.0)
    assert ag.logdet == pytest.approx(expected, rel=1e-12)
    assert ag.logdet == pytest.approx(np.linalg.slogdet(ag.Sigma)[1], rel=1e-12)


def test_rank_one_updates_commute(hard):
    a, b = _agent(hard), _agent(hard)
    x1, x2 = a.phi_v(0, 1), a.phi_v(0, 14) * 0.5
    a._rank_one(x1), a._rank_one(x2)
    b._rank_one(x2), b._rank_one(x1)
    np.testing.assert_allclose(a.Sigma, b.Sigma, rtol=0, atol=1e-14)


def test_time_rule_fires_without_determinant_growth(hard):
    ag = _agent(hard)
    ag.t_j, ag.t = 5, 9
    assert not ag.should_update()
    ag.t = 10
    assert ag.should_update()


def test_first_update_at_step_two(hard):
    ag = _agent(hard)
    rng = np.random.default_rng(0)
    run_episode(ag, hard, rng)
    assert ag.events and ag.events[0].t <= 2


def test_replayed_statistics_match(hard):
    ag = _agent(hard)
    rng = np.random.default_rng(3)
    xs, ys = [], []
    for _ in range(300):
        s = hard.init
        while s != hard.goal:
            a = ag.act(s)
            s2 = sample_next_state(hard, s, a, rng)
            xs.append(ag.phi_v(s, a))
            ys.append(ag.V[s2])
            ag.observe(s, a, hard.cost[s, a], s2)
            s = s2
    X = np.array(xs)
    Sigma = np.eye(hard.d) + X.T @ X
    b = X.T @ np.array(ys)
    assert np.linalg.norm(Sigma - ag.Sigma) <= 1e-8 * np.linalg.norm(Sigma)
    assert np.linalg.norm(b - ag.b) <= 1e-8 * np.linalg.norm(b)
    assert ag.logdet == pytest.approx(np.linalg.slogdet(Sigma)[1], rel=1e-9)


def test_epoch_bookkeeping(hard):
    ag = _agent(hard)
    rng = np.random.default_rng(8)
    for _ in range(300):
        run_episode(ag, hard, rng)
    T, J, d, lam, B = ag.t, ag.j, hard.d, 1.0, 3.0
    assert J <= 2 * d * math.log(1 + T * B * B * d / lam) + 2 * math.log(T)
    starts = [1] + [e.t for e in ag.events]
    for a, b in zip(starts, starts[1:]):
        assert b <= 2 * a + 1


def test_runs_are_deterministic(hard):
    out = []
    for _ in range(2):
        ag = _agent(hard)
        rng = np.random.default_rng(44)
        out.append([run_episode(ag, hard, rng) for _ in range(50)])
    assert out[0] == out[1]


def test_tight_set_prefers_the_optimal_action(hard):
    ell = ConfidenceEllipsoid(hard.theta_star, 1e6 * np.eye(hard.d), 1.0)
    res = devi(hard.view(), ell, hard.feasible, DeviConfig(1e-8, 1e-3))
    ag = _agent(hard)
    ag.Q = res.Q
    assert ag.act(0) == 15


def test_one_step_instance_episode():
    P = np.zeros((2, 2, 2))
    P[:, :, 1] = 1.0
    c = np.array([[0.6, 0.1], [0.0, 0.0]])
    inst = embed_tabular(P, c, 0, 1)
    ag = _agent(inst)
    cost, steps = run_episode(ag, inst, np.random.default_rng(0))
    assert (cost, steps) == (0.6, 1)            # Q_0 ties, lowest index first


def test_step_cap_raises_with_partial_cost():
    P = np.zeros((3, 1, 3))
    P[0, 0, 1] = 1.0
    P[1, 0, 2] = 1.0
    P[2, 0, 2] = 1.0
    inst = embed_tabular(P, np.array([[1.0], [1.0], [0.0]]), 0, 2)
    with pytest.raises(StepCapExceeded) as err:
        run_episode(_agent(inst), inst, np.random.default_rng(0), step_cap=1)
    assert err.value.cost == 1.0 and err.value.steps == 1
    with pytest.raises(ConfigurationError):
        run_episode(_agent(inst), inst, np.random.default_rng(0), step_cap=0)


def test_rho_affects_planning_only():
    P = np.zeros((2, 2, 2))
    P[:, :, 1] = 1.0
    c = np.array([[0.0, 0.5], [0.0, 0.0]])
    inst = embed_tabular(P, c, 0, 1)
    ag = _agent(inst, rho=0.3)
    rng = np.random.default_rng(0)
    costs = [run_episode(ag, inst, rng)[0] for _ in range(5)]
    assert costs == [0.0] * 5
    assert ag.Q[0, 0] == pytest.approx(0.3)
