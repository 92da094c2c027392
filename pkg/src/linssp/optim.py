"""Linear minimisation over a confidence ellipsoid intersected with the
set of parameters that induce valid transitions.

The main entry point is :func:`min_linear`. Its default method whitens the
ellipsoid into the unit ball, eliminates equality constraints exactly, and
solves the remaining "unit ball intersected with a polyhedron" problem by a
log-barrier Newton method with a phase-I emptiness test, finishing with an
active-set polish step. ``method="pgd"`` runs projected gradient descent
with Dykstra projections instead; it is slower and less accurate and is
kept as an independent cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg, optimize

from .errors import ConfigurationError, NonConvergent

FEAS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ConfidenceEllipsoid:
    """The set ``{theta : ||weight^{1/2} (theta - center)||_2 <= radius}``."""

    center: np.ndarray
    weight: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).copy()
        W = np.asarray(self.weight, dtype=float)
        d = c.shape[0]
        if c.ndim != 1 or W.shape != (d, d):
            raise ConfigurationError(f"center {c.shape} and weight {W.shape} do not match")
        if not np.allclose(W, W.T, rtol=0.0, atol=1e-10):
            raise ConfigurationError("ellipsoid weight matrix is not symmetric")
        if not self.radius >= 0 or not np.isfinite(self.radius):
            raise ConfigurationError(f"ellipsoid radius must be finite and >= 0, got {self.radius}")
        W = 0.5 * (W + W.T)
        try:
            L = np.linalg.cholesky(W)
        except np.linalg.LinAlgError:
            raise ConfigurationError("ellipsoid weight matrix is not positive definite") from None
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "weight", W)
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "_chol", L)

    @property
    def d(self) -> int:
        return self.center.shape[0]

    def norm(self, theta) -> float:
        """``||weight^{1/2} (theta - center)||``."""
        return float(np.linalg.norm(self._chol.T @ (np.asarray(theta) - self.center)))

    def contains(self, theta, tol: float = FEAS_TOL) -> bool:
        return self.norm(theta) <= self.radius + tol

    @cached_property
    def _eig(self):
        return np.linalg.eigh(self.weight)


class GeneralFeasibleSet:
    """Polyhedron ``{theta : A theta = b, G theta >= h}``."""

    def __init__(self, eq_matrix=None, eq_rhs=None, ineq_matrix=None, ineq_rhs=None, d=None):
        if d is None:
            for m in (eq_matrix, ineq_matrix):
                if m is not None and np.size(m):
                    d = np.shape(m)[1]
                    break
        if d is None:
            raise ConfigurationError("cannot infer dimension of an empty constraint set")
        self.d = int(d)
        self.eq_matrix = np.asarray(eq_matrix if eq_matrix is not None else np.zeros((0, d)),
                                    dtype=float).reshape(-1, self.d)
        self.eq_rhs = np.asarray(eq_rhs if eq_rhs is not None else np.zeros(0), dtype=float).ravel()
        self.ineq_matrix = np.asarray(ineq_matrix if ineq_matrix is not None else np.zeros((0, d)),
                                      dtype=float).reshape(-1, self.d)
        self.ineq_rhs = np.asarray(ineq_rhs if ineq_rhs is not None else np.zeros(0),
                                   dtype=float).ravel()
        if len(self.eq_rhs) != len(self.eq_matrix) or len(self.ineq_rhs) != len(self.ineq_matrix):
            raise ConfigurationError("constraint matrix and right-hand side lengths differ")

    def __repr__(self):
        return (f"GeneralFeasibleSet(d={self.d}, equalities={len(self.eq_rhs)}, "
                f"inequalities={len(self.ineq_rhs)})")

    def constraints(self):
        return self.eq_matrix, self.eq_rhs, self.ineq_matrix, self.ineq_rhs

    def residual(self, theta) -> float:
        theta = np.asarray(theta, dtype=float)
        r = 0.0
        if len(self.eq_rhs):
            r = max(r, float(np.max(np.abs(self.eq_matrix @ theta - self.eq_rhs))))
        if len(self.ineq_rhs):
            r = max(r, float(np.max(self.ineq_rhs - self.ineq_matrix @ theta)))
        return r

    def contains(self, theta, tol: float = FEAS_TOL) -> bool:
        return self.residual(theta) <= tol

    def projectors(self):
        out = []
        if len(self.eq_rhs):
            A, b = self.eq_matrix, self.eq_rhs
            pinv = np.linalg.pinv(A)
            out.append(lambda x, A=A, b=b, pinv=pinv: x - pinv @ (A @ x - b))
        for g, h in zip(self.ineq_matrix, self.ineq_rhs):
            gg = float(g @ g)
            if gg == 0.0:
                continue
            out.append(lambda x, g=g, h=h, gg=gg: x + max(0.0, h - g @ x) / gg * g)
        return out

    def project(self, point, tol: float = 1e-12, max_iter: int = 10_000) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if self.residual(point) <= tol:
            return point.copy()
        x, moved, converged = _dykstra(point, self.projectors(), tol, max_iter)
        if not converged:
            raise NonConvergent("Dykstra projection onto the feasible set", moved, max_iter)
        return x


class L1FeasibleSet:
    """``{theta : theta_d = 1, ||theta_{1..d-1}||_1 <= min(delta, 1 - delta)}``.

    This is exactly the valid-parameter set of the hard instance family.
    """

    def __init__(self, delta: float, d: int):
        if not 0.0 < delta < 1.0:
            raise ConfigurationError(f"L1 feasible set needs 0 < delta < 1, got {delta}")
        if d < 2:
            raise ConfigurationError(f"L1 feasible set needs d >= 2, got {d}")
        self.delta = float(delta)
        self.d = int(d)
        self.radius = min(self.delta, 1.0 - self.delta)

    def __repr__(self):
        return f"L1FeasibleSet(delta={self.delta}, d={self.d})"

    def constraints(self):
        d = self.d
        A = np.zeros((1, d))
        A[0, -1] = 1.0
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=d - 1)))
        G = np.hstack([-signs, np.zeros((len(signs), 1))])
        h = np.full(len(signs), -self.radius)
        return A, np.ones(1), G, h

    def residual(self, theta) -> float:
        theta = np.asarray(theta, dtype=float)
        return max(abs(theta[-1] - 1.0), float(np.abs(theta[:-1]).sum()) - self.radius, 0.0)

    def contains(self, theta, tol: float = FEAS_TOL) -> bool:
        return self.residual(theta) <= tol

    def project(self, point, tol: float = 1e-12, max_iter: int = 10_000) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        out = np.empty_like(point)
        out[:-1] = project_l1_ball(point[:-1], self.radius)
        out[-1] = 1.0
        return out

    def projectors(self):
        return [self.project]


def project_l1_ball(v, radius: float) -> np.ndarray:
    """Euclidean projection onto ``{x : ||x||_1 <= radius}`` by sorted thresholding."""
    v = np.asarray(v, dtype=float)
    if np.abs(v).sum() <= radius:
        return v.copy()
    u = np.sort(np.abs(v))[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(u) + 1)
    rho = np.nonzero(u * k > css - radius)[0][-1]
    tau = (css[rho] - radius) / (rho + 1.0)
    return np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)


def feasible_set_from_features(features, goal: int) -> GeneralFeasibleSet:
    """Valid-parameter polyhedron implied by a feature tensor ``(S, A, S, d)``.

    Every non-goal row ``<phi(.|s, a), theta>`` must be a probability vector
    and the goal must be absorbing. Duplicate and zero rows are removed.
    """
    features = np.asarray(features, dtype=float)
    S, A, _, d = features.shape
    eq_rows, eq_rhs, in_rows = [], [], []
    for s, a in itertools.product(range(S), range(A)):
        if s == goal:
            for s2 in range(S):
                eq_rows.append(features[s, a, s2])
                eq_rhs.append(1.0 if s2 == goal else 0.0)
        else:
            eq_rows.append(features[s, a].sum(axis=0))
            eq_rhs.append(1.0)
            in_rows.extend(features[s, a])
    eq = _dedupe(np.asarray(eq_rows), np.asarray(eq_rhs))
    ineq = _dedupe(np.asarray(in_rows).reshape(-1, d), np.zeros(len(in_rows)))
    return GeneralFeasibleSet(eq[0], eq[1], ineq[0], ineq[1], d=d)


def _dedupe(rows, rhs):
    if not len(rows):
        return rows, rhs
    zero = np.all(rows == 0.0, axis=1)
    if np.any(zero & (rhs != 0.0)):
        raise ConfigurationError("inconsistent constraint: zero feature row with nonzero target")
    rows, rhs = rows[~zero], rhs[~zero]
    key = np.round(np.hstack([rows, rhs[:, None]]), 12)
    _, idx = np.unique(key, axis=0, return_index=True)
    idx = np.sort(idx)
    return rows[idx], rhs[idx]


# ---------------------------------------------------------------------------
# projections


def project_ellipsoid(point, ellipsoid: ConfidenceEllipsoid, tol: float = 1e-12) -> np.ndarray:
    """Euclidean projection onto the ellipsoid.

    Solves for the Lagrange multiplier ``mu`` of
    ``(theta - c) = (I + mu W)^{-1} (p - c)`` with a bracketing root finder
    in the eigenbasis of the weight matrix.
    """
    p = np.asarray(point, dtype=float)
    lam, U = ellipsoid._eig
    y = U.T @ (p - ellipsoid.center)
    beta = ellipsoid.radius
    if float(np.sum(lam * y * y)) <= beta * beta:
        return p.copy()
    if beta == 0.0:
        return ellipsoid.center.copy()

    def excess(mu):
        return float(np.sum(lam * (y / (1.0 + mu * lam)) ** 2)) - beta * beta

    hi = np.sqrt(float(np.sum(y * y / lam))) / beta
    while excess(hi) > 0.0:
        hi *= 2.0
    mu = optimize.brentq(excess, 0.0, hi, xtol=1e-300, rtol=max(tol, 4 * np.finfo(float).eps),
                         maxiter=500)
    z = y / (1.0 + mu * lam)
    z *= beta / np.sqrt(float(np.sum(lam * z * z)))
    return ellipsoid.center + U @ z


def project_feasible(point, feasible, tol: float = 1e-12, max_iter: int = 10_000) -> np.ndarray:
    """Projection onto the valid-parameter set (exact for the L1 variant)."""
    return feasible.project(point, tol=tol, max_iter=max_iter)


def _dykstra(point, projectors, tol, max_iter):
    x = np.array(point, dtype=float)
    if len(projectors) == 1:
        return projectors[0](x), 0.0, True
    incr = [np.zeros_like(x) for _ in projectors]
    moved = np.inf
    for _ in range(max_iter):
        start = x.copy()
        for i, proj in enumerate(projectors):
            y = proj(x + incr[i])
            incr[i] = x + incr[i] - y
            x = y
        moved = float(np.linalg.norm(x - start))
        if moved < tol:
            return x, moved, True
    return x, moved, False


# ---------------------------------------------------------------------------
# linear minimisation


@dataclass(frozen=True)
class LinearMin:
    argmin: np.ndarray
    value: float


@dataclass
class _Reduced:
    """Problem in whitened, equality-free coordinates ``y`` with ``||y|| <= 1``.

    ``theta = offset + basis @ y`` and the polyhedral part is ``G y <= h``.
    """

    offset: np.ndarray
    basis: np.ndarray
    G: np.ndarray
    h: np.ndarray
    point_only: bool = False


def _reduce(ellipsoid: ConfidenceEllipsoid, feasible):
    """Whiten the ellipsoid and eliminate equalities; ``None`` if provably empty."""
    d = ellipsoid.d
    if feasible is not None and feasible.d != d:
        raise ConfigurationError(f"feasible set has dimension {feasible.d}, ellipsoid has {d}")
    c = ellipsoid.center
    # theta = c + M u, ||u|| <= 1
    M = ellipsoid.radius * linalg.solve_triangular(ellipsoid._chol.T, np.eye(d), lower=False)
    if feasible is None:
        A, b, G, h = np.zeros((0, d)), np.zeros(0), np.zeros((0, d)), np.zeros(0)
    else:
        A, b, G, h = feasible.constraints()
    u0 = np.zeros(d)
    N = np.eye(d)
    if len(b):
        Am = A @ M
        bm = b - A @ c
        U, sv, Vt = np.linalg.svd(Am)
        rank = int(np.sum(sv > max(sv[0], 1e-300) * 1e-11)) if len(sv) else 0
        if rank:
            u0 = Vt[:rank].T @ ((U[:, :rank].T @ bm) / sv[:rank])
        N = Vt[rank:].T
        scale = 1.0 + np.abs(bm).max()
        if np.abs(Am @ u0 - bm).max() > 1e-9 * scale:
            return None
    rho2 = 1.0 - float(u0 @ u0)
    point_only = False
    if rho2 <= 1e-14:
        if rho2 < -1e-9:
            return None
        rho2, point_only = 0.0, True
    rho = np.sqrt(rho2)
    offset = c + M @ u0
    basis = rho * (M @ N)
    Gy = -(G @ basis)
    hy = G @ offset - h
    if len(hy):
        norms = np.linalg.norm(Gy, axis=1)
        flat = norms <= 1e-14 * (1.0 + np.abs(G).max())
        if np.any(hy[flat] < -FEAS_TOL):
            return None
        Gy, hy, norms = Gy[~flat], hy[~flat], norms[~flat]
        Gy = Gy / norms[:, None]
        hy = hy / norms
    if point_only or basis.shape[1] == 0:
        if len(hy) and hy.min() < -FEAS_TOL:
            return None
        return _Reduced(offset, basis[:, :0], Gy[:, :0], hy, point_only=True)
    return _Reduced(offset, basis, Gy, hy)


def _barrier(cvec, A, b, quad_idx, quad_lin, z0, gap_tol, stop=None, max_newton=60):
    """Minimise ``cvec @ z`` s.t. ``A z <= b`` and ``||z[quad_idx]||^2 - quad_lin @ z <= 1``.

    ``z0`` must be strictly feasible. ``stop(z, t)`` is consulted after each
    centering step and may end the run early. Returns the last iterate.
    """
    z = z0.copy()
    n = len(z)
    E = np.zeros(n)
    E[quad_idx] = 1.0
    m = len(b) + 1
    scale = max(float(np.linalg.norm(cvec)), 1e-12)
    t = max(m / (2.0 * scale), 1.0)

    def slacks(zz):
        return b - A @ zz, 1.0 - (float(np.dot(zz * E, zz)) - float(quad_lin @ zz))

    while True:
        for _ in range(max_newton):
            sl, sq = slacks(z)
            gq = 2.0 * z * E - quad_lin
            inv = 1.0 / sl
            grad = t * cvec + A.T @ inv + gq / sq
            H = (A.T * (inv * inv)) @ A + np.diag(2.0 * E / sq) + np.outer(gq, gq) / (sq * sq)
            try:
                dz = -np.linalg.solve(H, grad)
            except np.linalg.LinAlgError:
                dz = -np.linalg.lstsq(H, grad, rcond=None)[0]
            dec = -float(grad @ dz)
            if not np.isfinite(dec) or dec <= 1e-10:
                break
            # largest step keeping every slack positive
            Adz = A @ dz
            pos = Adz > 0
            step = min(1.0, 0.99 * float(np.min(sl[pos] / Adz[pos]))) if np.any(pos) else 1.0
            qa = float(np.dot(dz * E, dz))
            qb = float(np.dot(gq, dz))
            if qa > 0 or qb > 0:
                disc = qb * qb + 4.0 * qa * sq
                root = (2.0 * sq) / (qb + np.sqrt(disc)) if qb + np.sqrt(disc) > 0 else np.inf
                step = min(step, 0.99 * root)
            # Armijo on the change of the barrier function, evaluated stably
            while step > 1e-16:
                zn = z + step * dz
                sln, sqn = slacks(zn)
                if sqn > 0 and (not len(sln) or sln.min() > 0):
                    df = (t * step * float(cvec @ dz) - float(np.sum(np.log(sln / sl)))
                          - np.log(sqn / sq))
                    if df <= -0.25 * step * dec:
                        break
                step *= 0.5
            else:
                break
            z = zn
            if dec <= 1e-10 * m:
                break
        if stop is not None and stop(z, t):
            return z
        if m / t < gap_tol:
            return z
        t *= 20.0


def _phase_one(G, h, k):
    """Strictly feasible point of ``{||y|| <= 1, G y <= h}``, or ``None``.

    Returns ``(y, strict)``; ``strict`` is False when the set is nonempty only
    within tolerance (an essentially single-point intersection).
    """
    y = np.zeros(k)
    if not len(h) or h.min() > 1e-12:
        return y, True
    # minimise s subject to G y - s <= h and ||y||^2 - s <= 1
    A = np.hstack([G, -np.ones((len(h), 1))])
    s0 = max(float(np.max(-h)), 0.0) + 1.0
    z0 = np.append(y, s0)
    cvec = np.zeros(k + 1)
    cvec[-1] = 1.0
    qlin = np.zeros(k + 1)
    qlin[-1] = 1.0
    z = _barrier(cvec, A, h, np.arange(k), qlin, z0, gap_tol=1e-13,
                 stop=lambda zz, t: zz[-1] < -1e-7)
    s = z[-1]
    yy = z[:-1]
    if s < 0.0:
        return yy, True
    viol = max(float(yy @ yy) - 1.0, float(np.max(G @ yy - h)))
    if viol <= FEAS_TOL:
        return yy, False
    return None


def _polish(w, G, h, y_b, tau=1e-6):
    """Re-solve exactly on the face active at ``y_b``.

    Returns ``(y, certified)`` or ``None``; ``certified`` means the KKT
    conditions hold at ``y`` with nonnegative multipliers, so ``y`` is optimal.
    """
    slack = h - G @ y_b
    act = slack < tau
    ball_active = 1.0 - float(y_b @ y_b) < tau
    Ga, ha = G[act], h[act]
    k = len(y_b)
    if len(ha):
        U, sv, Vt = np.linalg.svd(Ga)
        rank = int(np.sum(sv > sv[0] * 1e-10)) if len(sv) else 0
        yp = Vt[:rank].T @ ((U[:, :rank].T @ ha) / sv[:rank]) if rank else np.zeros(k)
        Nn = Vt[rank:].T
    else:
        yp, Nn = np.zeros(k), np.eye(k)
    if ball_active and Nn.shape[1]:
        rr2 = 1.0 - float(yp @ yp)
        wn = Nn.T @ w
        nw = float(np.linalg.norm(wn))
        if rr2 < 0.0 or nw <= 1e-15 * (1.0 + np.linalg.norm(w)):
            return None
        y = yp - np.sqrt(rr2) * (Nn @ wn) / nw
    else:
        y = yp + Nn @ (Nn.T @ (y_b - yp))
    if float(y @ y) > 1.0 + 1e-13 or (len(h) and np.min(h - G @ y) < -1e-13):
        return None
    # KKT: -w = mu * 2y + Ga^T lam, mu, lam >= 0
    cols = [Ga.T] if len(ha) else []
    if ball_active or 1.0 - float(y @ y) < 1e-12:
        cols.append(2.0 * y[:, None])
    if not cols:
        return y, bool(np.linalg.norm(w) <= 1e-12)
    M = np.hstack(cols)
    mult, *_ = np.linalg.lstsq(M, -w, rcond=None)
    resid = float(np.linalg.norm(M @ mult + w))
    ok = resid <= 1e-9 * (1.0 + float(np.linalg.norm(w))) and float(mult.min()) >= -1e-10
    return y, ok


def _solve_reduced(red: _Reduced, x, tol):
    base = float(x @ red.offset)
    if red.point_only:
        return red.offset.copy(), base
    k = red.basis.shape[1]
    w = red.basis.T @ x
    G, h = red.G, red.h
    nw = float(np.linalg.norm(w))
    if nw > 0.0:
        y = -w / nw
        if not len(h) or np.min(h - G @ y) >= -1e-14:
            return red.offset + red.basis @ y, base + float(w @ y)
    found = _phase_one(G, h, k)
    if found is None:
        return None
    y0, strict = found
    if nw == 0.0 or not strict:
        return red.offset + red.basis @ y0, base + float(w @ y0)
    # interior start for the barrier: pull the phase-one point slightly inward
    if float(y0 @ y0) >= 1.0 - 1e-9:
        y0 = y0 * (1.0 - 1e-9)
    gap_tol = 0.01 * tol * (1.0 + float(np.linalg.norm(x)))
    m = len(h) + 1
    certified = {}

    def try_polish(yy, t):
        if m / t > 1e-4 * nw:
            return False
        out = _polish(w, G, h, yy)
        if out is not None and out[1]:
            certified["y"] = out[0]
            return True
        return False

    y_b = _barrier(w, G, h, np.arange(k), np.zeros(k), y0, gap_tol=gap_tol, stop=try_polish)
    if "y" in certified:
        y = certified["y"]
    else:
        out = _polish(w, G, h, y_b)
        y = out[0] if out is not None and w @ out[0] <= w @ y_b + 1e-13 * (1.0 + nw) else y_b
    return red.offset + red.basis @ y, base + float(w @ y)


def find_feasible_point(ellipsoid: ConfidenceEllipsoid, feasible):
    """A point of the intersection, or ``None`` when it is empty."""
    red = _reduce(ellipsoid, feasible)
    if red is None:
        return None
    if red.point_only:
        return red.offset.copy()
    found = _phase_one(red.G, red.h, red.basis.shape[1])
    if found is None:
        return None
    return red.offset + red.basis @ found[0]


def min_linear(objective, ellipsoid: ConfidenceEllipsoid, feasible=None, tol: float = 1e-9,
               max_iter: int = 10_000, method: str = "barrier", restarts: int = 5,
               rng=None):
    """Minimise ``<theta, objective>`` over the ellipsoid intersected with ``feasible``.

    Returns a :class:`LinearMin`, or ``None`` when the intersection is empty.
    ``feasible=None`` means no constraint beyond the ellipsoid.
    """
    x = np.asarray(objective, dtype=float)
    if x.shape != (ellipsoid.d,):
        raise ConfigurationError(f"objective has shape {x.shape}, expected ({ellipsoid.d},)")
    if method == "barrier":
        red = _reduce(ellipsoid, feasible)
        if red is None:
            return None
        res = _solve_reduced(red, x, tol)
        if res is None:
            return None
        return LinearMin(res[0], res[1])
    if method == "pgd":
        return _min_linear_pgd(x, ellipsoid, feasible, max_iter, restarts, rng)
    raise ConfigurationError(f"unknown method {method!r}")


def _intersection_projectors(ellipsoid, feasible):
    projs = [lambda p: project_ellipsoid(p, ellipsoid)]
    if feasible is not None:
        projs.extend(feasible.projectors())
    return projs


def _project_intersection(point, ellipsoid, feasible, max_cycles=10_000, tol=1e-12):
    x, _, _ = _dykstra(point, _intersection_projectors(ellipsoid, feasible), tol, max_cycles)
    res = max(ellipsoid.norm(x) - ellipsoid.radius, 0.0)
    if feasible is not None:
        res = max(res, feasible.residual(x))
    return x, res


def _min_linear_pgd(x, ellipsoid, feasible, max_iter, restarts, rng):
    """Projected gradient with diminishing steps ``radius / (k ||x||)``."""
    rng = np.random.default_rng(0) if rng is None else rng
    start, res = _project_intersection(ellipsoid.center, ellipsoid, feasible)
    if res > 1e-6:
        return None
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        return LinearMin(start, 0.0)
    lam, U = ellipsoid._eig
    spread = ellipsoid.radius / np.sqrt(lam)
    best, best_val = start, float(x @ start)
    for r in range(max(restarts, 1)):
        if r == 0:
            theta = start
        else:
            jitter = U @ (spread * rng.uniform(-1.0, 1.0, size=len(lam)))
            theta, res = _project_intersection(ellipsoid.center + jitter, ellipsoid, feasible)
            if res > 1e-6:
                continue
        for k in range(1, max_iter + 1):
            step = ellipsoid.radius / (k * nx) if ellipsoid.radius > 0 else 0.0
            theta, res = _project_intersection(theta - step * x, ellipsoid, feasible, 500, 1e-10)
            val = float(x @ theta)
            if res <= FEAS_TOL and val < best_val:
                best, best_val = theta, val
    return LinearMin(best, best_val)
