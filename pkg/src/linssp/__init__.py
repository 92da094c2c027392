"""Regret minimisation for linear mixture stochastic shortest path problems."""

from .devi import DeviConfig, DeviResult, devi
from .errors import (ConfigurationError, Improper, InsufficientData, NonConvergent,
                     StepCapExceeded)
from .harness import AgentSpec, RegretTrace, aggregate, loglog_slope, run_trial, run_trials
from .instances import (HardInstanceParams, build_hard_instance, embed_tabular,
                        optimal_policy_baseline, random_policy_baseline)
from .levis import Levis, LevisConfig, beta_t, run_episode
from .levis_plus import LevisPlus, LevisPlusConfig, three_betas
from .model import LinearMixtureSSP, phi_v, sample_next_state, transition_prob, validate
from .optim import ConfidenceEllipsoid, GeneralFeasibleSet, L1FeasibleSet, min_linear
from .oracle import PlanningResult, policy_value, solve_optimal

__version__ = "0.1.0"
