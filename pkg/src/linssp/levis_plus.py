"""Variance-aware learner: weighted ridge regression with Bernstein-type radii."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import ConfigurationError
from .levis import LevisConfig, _LazyLearner


@dataclass(frozen=True)
class LevisPlusConfig(LevisConfig):
    """``lam=None`` means ``1 / B**2``.

    ``sherman_morrison`` keeps running inverses instead of re-factorising
    every step; ``log_every`` controls how often per-step diagnostics are kept.
    """

    lam: float | None = None
    min_lam: float = 0.0
    sherman_morrison: bool = False
    log_every: int = 100

    def __post_init__(self):
        if self.lam is None:
            object.__setattr__(self, "lam", 1.0 / (self.B * self.B))
        if not self.lam > 0:
            raise ConfigurationError(f"lam must be positive, got {self.lam}")
        if self.log_every < 1:
            raise ConfigurationError(f"log_every must be >= 1, got {self.log_every}")
        super().__post_init__()


@dataclass(frozen=True)
class Radii:
    beta_check: float
    beta_tilde: float
    beta_hat: float


def three_betas(t: int, d: int, config: LevisPlusConfig) -> Radii:
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    B, lam, delta = config.B, config.lam, config.delta
    log_conf = math.log(32.0 * t ** 4 / delta)
    log_det = math.log(1.0 + t / lam)
    tail = math.sqrt(lam * d)
    check = 8 * d * math.sqrt(log_det * log_conf) + 4 * math.sqrt(d) * log_conf + tail
    tilde = (8 * math.sqrt(d * B ** 4 * math.log(1.0 + t * B ** 4 / (d * lam)) * log_conf)
             + 4 * B * B * log_conf + tail)
    hat = 8 * math.sqrt(d * log_det * log_conf) + 4 * math.sqrt(d) * log_conf + tail
    return Radii(check, tilde, hat)


@dataclass(frozen=True)
class VarianceEstimate:
    v_hat: float
    e_t: float
    sigma_sq: float


class LevisPlus(_LazyLearner):
    """Learner whose regression weights each sample by an estimated variance."""

    name = "levis_plus"

    def __init__(self, view, config: LevisPlusConfig):
        super().__init__(view, config)
        d = self.d
        self.Sigma_tilde = config.lam * np.eye(d)
        self.b_tilde = np.zeros(d)
        self.theta_tilde = np.zeros(d)
        self.last_sigma_sq = None
        self.sigma_sq_range = (np.inf, -np.inf)
        self.step_log: list[dict] = []
        if config.sherman_morrison:
            self._inv = np.eye(d) / config.lam
            self._inv_tilde = np.eye(d) / config.lam

    def radius(self, t):
        return three_betas(t, self.d, self.config).beta_hat

    def planning_center(self):
        return self.theta_hat

    def _inv_norm(self, M, x, inv=None):
        """``||M^{-1/2} x||``."""
        if inv is not None:
            return math.sqrt(max(float(x @ inv @ x), 0.0))
        L = np.linalg.cholesky(M)
        return float(np.linalg.norm(linalg.solve_triangular(L, x, lower=True)))

    def variance_estimate(self, s, a, t=None) -> VarianceEstimate:
        """Variance estimate for ``(s, a)`` from the statistics before step ``t``."""
        cfg = self.config
        B = cfg.B
        t = self.t + 1 if t is None else t
        x = self.phi_v(s, a)
        x2 = self.phi_v(s, a, self.V ** 2)
        if not np.any(x) and not np.any(x2):
            return VarianceEstimate(0.0, 0.0, B * B / self.d)
        second = min(max(float(x2 @ self.theta_tilde), 0.0), B * B)
        first = min(max(float(x @ self.theta_hat), 0.0), B)
        v_hat = second - first * first
        r = three_betas(t, self.d, cfg)
        sm = cfg.sherman_morrison
        n1 = self._inv_norm(self.Sigma, x, self._inv if sm else None)
        n2 = self._inv_norm(self.Sigma_tilde, x2, self._inv_tilde if sm else None)
        e_t = min(B * B, 2 * B * r.beta_check * n1) + min(B * B, r.beta_tilde * n2)
        return VarianceEstimate(v_hat, e_t, max(B * B / self.d, v_hat + e_t))

    def observe(self, s, a, cost, s_next):
        est = self.variance_estimate(s, a, self.t + 1)
        self.t += 1
        self.last_sigma_sq = est.sigma_sq
        lo, hi = self.sigma_sq_range
        self.sigma_sq_range = (min(lo, est.sigma_sq), max(hi, est.sigma_sq))
        x = self.phi_v(s, a)
        x2 = self.phi_v(s, a, self.V ** 2)
        w = 1.0 / est.sigma_sq
        v_next = self.V[s_next]
        self._rank_one(x, w)
        self.b += w * x * v_next
        self.Sigma_tilde += np.outer(x2, x2)
        self.b_tilde += x2 * v_next ** 2
        if self.config.sherman_morrison:
            self._inv = _sm_update(self._inv, x, w)
            self._inv_tilde = _sm_update(self._inv_tilde, x2, 1.0)
            self.theta_hat = self._inv @ self.b
            self.theta_tilde = self._inv_tilde @ self.b_tilde
        else:
            self.theta_hat = linalg.cho_solve(linalg.cho_factor(self.Sigma), self.b)
            self.theta_tilde = linalg.cho_solve(linalg.cho_factor(self.Sigma_tilde), self.b_tilde)
        if self.t % self.config.log_every == 0:
            self.step_log.append({"t": self.t, "s": int(s), "a": int(a), "j": self.j,
                                  "v_hat": est.v_hat, "e_t": est.e_t,
                                  "sigma_sq": est.sigma_sq, "V": self.V.copy()})
        self.maybe_update()


def _sm_update(inv, x, w):
    """Inverse of ``M + w x x^T`` given ``inv = M^{-1}``."""
    u = inv @ x
    return inv - (w / (1.0 + w * float(x @ u))) * np.outer(u, u)
