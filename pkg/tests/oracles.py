"""Independent reference computations used by the tests.

Nothing here imports the package under test.
"""

import math

import numpy as np


def tabular_value_iteration(P, c, goal, tol=1e-13, max_iter=10_000_000):
    """Plain tabular value iteration on ``P[s, a, s']`` and ``c[s, a]``."""
    S, A, _ = P.shape
    V = [0.0] * S
    for _ in range(max_iter):
        new = []
        for s in range(S):
            if s == goal:
                new.append(0.0)
                continue
            best = math.inf
            for a in range(A):
                q = c[s, a] + sum(P[s, a, s2] * V[s2] for s2 in range(S))
                best = min(best, q)
            new.append(best)
        diff = max(abs(x - y) for x, y in zip(new, V))
        V = new
        if diff < tol:
            break
    return np.array(V)


def discounted_value_iteration(P, c, goal, gamma, tol=1e-14):
    """Value iteration for ``V = min_a c + gamma P V`` with the goal pinned at 0."""
    S = P.shape[0]
    V = np.zeros(S)
    while True:
        Q = c + gamma * P @ V
        Q[goal] = 0.0
        new = Q.min(axis=1)
        if np.max(np.abs(new - V)) < tol:
            return new
        V = new


def beta_hoeffding(t, B, d, lam, delta):
    return B * math.sqrt(d * math.log(4 * (t ** 2 + t ** 3 * B ** 2 / lam) / delta)) + math.sqrt(lam * d)


def betas_bernstein(t, B, d, lam, delta):
    L = math.log(32 * t ** 4 / delta)
    check = 8 * d * math.sqrt(math.log(1 + t / lam) * L) + 4 * math.sqrt(d) * L + math.sqrt(lam * d)
    tilde = (8 * math.sqrt(d * B ** 4 * math.log(1 + t * B ** 4 / (d * lam)) * L)
             + 4 * B ** 2 * L + math.sqrt(lam * d))
    hat = 8 * math.sqrt(d * math.log(1 + t / lam) * L) + 4 * math.sqrt(d) * L + math.sqrt(lam * d)
    return check, tilde, hat


def grid_min_linear(x, center, weight, radius, G, h, n=200):
    """Exact minimum of ``x . theta`` over a regular ``n^3`` grid (d = 3).

    The grid lives in the eigenbasis of ``weight`` and spans the ellipsoid's
    bounding box. For every (i, j) column the feasible k-indices form an
    interval, so the best grid point sits at one of its two ends; this gives
    the same answer as scanning all ``n^3`` points. Returns ``(value, spacing)``
    with ``value=None`` when no grid point is feasible.
    """
    lam, U = np.linalg.eigh(weight)
    ext = radius / np.sqrt(lam)
    axes = [np.linspace(-e, e, n) for e in ext]
    step = np.array([a[1] - a[0] for a in axes])
    Z1, Z2 = np.meshgrid(axes[0], axes[1], indexing="ij")
    # ellipsoid: lam3 z3^2 <= r^2 - lam1 z1^2 - lam2 z2^2
    rem = radius ** 2 - lam[0] * Z1 ** 2 - lam[1] * Z2 ** 2
    half = np.sqrt(np.maximum(rem, 0.0) / lam[2])
    lo = np.where(rem >= 0, -half, np.inf)
    hi = np.where(rem >= 0, half, -np.inf)
    # halfspaces: g . (c + U z) >= h  ->  a3 z3 >= rhs
    for g, hh in zip(G, h):
        a = U.T @ g
        rhs = hh - g @ center - a[0] * Z1 - a[1] * Z2
        if abs(a[2]) < 1e-15:
            bad = rhs > 0
            lo = np.where(bad, np.inf, lo)
            hi = np.where(bad, -np.inf, hi)
        elif a[2] > 0:
            lo = np.maximum(lo, rhs / a[2])
        else:
            hi = np.minimum(hi, rhs / a[2])
    k_lo = np.ceil((lo - axes[2][0]) / step[2] - 1e-12)
    k_hi = np.floor((hi - axes[2][0]) / step[2] + 1e-12)
    k_lo = np.clip(k_lo, 0, n - 1)
    k_hi = np.clip(k_hi, 0, n - 1)
    ok = (k_lo <= k_hi) & np.isfinite(lo) & np.isfinite(hi)
    if not ok.any():
        return None, float(step.max())
    w = U.T @ x
    base = x @ center + w[0] * Z1 + w[1] * Z2
    z_lo = axes[2][0] + k_lo * step[2]
    z_hi = axes[2][0] + k_hi * step[2]
    vals = base + np.minimum(w[2] * z_lo, w[2] * z_hi)
    return float(vals[ok].min()), float(step.max())
