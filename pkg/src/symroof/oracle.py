"""Brute-force numerical checks that do not use any closed form.

Every routine here returns the value of an explicit feasible point, so its
result is an upper bound on a minimum (or a lower bound on a maximum) and can
be compared one-sidedly against the analytic formulas of :mod:`symroof.roofs`
and :mod:`symroof.witness`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import DomainError
from .families import FamilyPoint, family_to_density
from .monotones import MonotoneSpec
from .qcore import OperatorKind, SchmidtVector, as_schmidt, build_operator, make_rng

MIN_STEP = 1e-13
MAX_STEP = 4.0  # larger steps only wrap around the compact search manifolds
ACTIVE_LAMBDA = 1e-12
SMOOTHING = (1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 0.0)


@dataclass(frozen=True)
class SearchBudget:
    restarts: int = 64
    iterations: int = 2000
    seed: int = 0
    step: float = 0.1
    decay: float = 0.5
    growth: float = 1.2

    def __post_init__(self):
        if self.restarts < 1 or self.iterations < 1:
            raise DomainError("restarts and iterations must be positive")
        if not (self.step > 0 and 0 < self.decay < 1 and self.growth >= 1):
            raise DomainError("need step > 0, 0 < decay < 1, growth >= 1")

    def scaled(self, restarts=None, iterations=None) -> "SearchBudget":
        return SearchBudget(restarts or self.restarts, iterations or self.iterations,
                            self.seed, self.step, self.decay, self.growth)


@dataclass(frozen=True, eq=False)
class OracleEstimate:
    value: float
    argmin: object
    gap: float | None = None
    diagnostics: dict = field(default_factory=dict)


def _with_gap(est: OracleEstimate, closed_form) -> OracleEstimate:
    if closed_form is None:
        return est
    return OracleEstimate(est.value, est.argmin, est.value - float(closed_form), est.diagnostics)


# ---------------------------------------------------------------------------
# generic batched descent with backtracking


def _descend(x, value_fn, grad_fn, retract, budget: SearchBudget, sign: float = 1.0):
    """Minimize sign*value over a manifold given a retraction; x has a leading batch axis."""
    f = sign * value_fn(x)
    step = np.full(x.shape[0], budget.step)
    shape = (-1,) + (1,) * (x.ndim - 1)
    its = 0
    for its in range(budget.iterations):
        g = sign * grad_fn(x)
        gn = np.sqrt(np.sum(np.abs(g) ** 2, axis=tuple(range(1, x.ndim))))
        gn = np.where(gn > 0, gn, 1.0)
        trial = retract(x - (step / gn).reshape(shape) * g)
        ft = sign * value_fn(trial)
        ok = np.isfinite(ft) & (ft < f)
        x = np.where(ok.reshape(shape), trial, x)
        f = np.where(ok, ft, f)
        step = np.where(ok, np.minimum(step * budget.growth, MAX_STEP), step * budget.decay)
        if np.all(step < MIN_STEP):
            break
    return x, sign * f, its + 1


# ---------------------------------------------------------------------------
# isotropic fiber: x = sqrt(lambda) on {sum x = c, |x| = 1, x >= 0}


def project_iso_fiber(y: np.ndarray, c: float) -> np.ndarray:
    """Map points onto {x >= 0, sum x = c, |x| = 1} by centring, rescaling and clamping.

    Coordinates that come out negative are fixed at zero one at a time and the
    remaining free block is re-fitted. Rows with no usable direction are
    returned as NaN.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    n_rows, d = y.shape
    free = np.ones_like(y, dtype=bool)
    x = np.full_like(y, np.nan)
    for _ in range(d):
        n = free.sum(axis=1)
        mean = np.where(free, y, 0).sum(axis=1) / n
        dev = np.where(free, y - mean[:, None], 0.0)
        nd = np.linalg.norm(dev, axis=1)
        rad2 = 1.0 - c * c / n
        rad = np.sqrt(np.clip(rad2, 0.0, None))
        with np.errstate(invalid="ignore", divide="ignore"):
            x = np.where(free, (c / n)[:, None] + (rad / nd)[:, None] * dev, 0.0)
        bad = (nd < 1e-15) & (rad > 1e-12) | (rad2 < -1e-12)
        x[bad] = np.nan
        neg = np.where(free, x, np.inf)
        worst = np.argmin(neg, axis=1)
        needs = neg[np.arange(n_rows), worst] < 0
        needs &= n > 1
        if not needs.any():
            break
        free[np.flatnonzero(needs), worst[needs]] = False
    x[np.any(x < -1e-12, axis=1)] = np.nan
    return np.clip(x, 0.0, None)


def _iso_check(b, d):
    if d < 2:
        raise DomainError("d must be >= 2")
    if not 1 / d - 1e-12 <= b <= 1:
        raise DomainError(f"isotropic fiber search needs b in [1/d, 1], got {b}")


def min_on_iso_fiber(spec: MonotoneSpec, b: float, d: int, budget: SearchBudget | None = None,
                     closed_form=None, maximize: bool = False) -> OracleEstimate:
    """Multi-start projected descent of spec over Schmidt vectors with sum(sqrt) = sqrt(d b)."""
    _iso_check(b, d)
    budget = budget or SearchBudget()
    c = math.sqrt(d * min(max(b, 1 / d), 1.0))
    rng = make_rng(budget.seed)
    y = np.sqrt(rng.dirichlet(np.full(d, 0.5), size=budget.restarts))
    x0 = project_iso_fiber(y, c)
    x0 = x0[~np.isnan(x0).any(axis=1)]
    if x0.shape[0] == 0:
        x0 = project_iso_fiber(np.linspace(1.0, 0.5, d)[None, :], c)

    def value(x):
        out = np.asarray(spec(x * x), dtype=float)
        return np.where(np.isnan(x).any(axis=1), np.inf if not maximize else -np.inf, out)

    def grad(x):
        return 2 * x * spec.gradient(np.nan_to_num(x * x))

    x, f, its = _descend(x0, value, grad, lambda z: project_iso_fiber(z, c), budget,
                         sign=-1.0 if maximize else 1.0)
    i = int(np.argmax(f) if maximize else np.argmin(f))
    lam = x[i] ** 2
    diag = {
        "iterations": its,
        "restarts": int(x0.shape[0]),
        "constraint_residual": float(abs(x[i].sum() - c) + abs(x[i] @ x[i] - 1)),
    }
    return _with_gap(OracleEstimate(float(f[i]), as_schmidt(lam / lam.sum()), None, diag), closed_form)


# ---------------------------------------------------------------------------
# Werner fiber: psi = sqrt(1-a) (symmetric part) + sqrt(a) (antisymmetric part)


def _schmidt_grad(mats, spec, weights=False, smooth=0.0):
    """Values and gradients of spec on unnormalized amplitude matrices.

    With ``weights=True`` the function is p * spec(mu / p) with p = |M|^2, the
    ensemble weight times the entanglement of the normalized state.
    ``smooth > 0`` evaluates spec at (lam + smooth) / (1 + n smooth), which turns
    the cusp of alpha < 1 power terms at a vanishing Schmidt value into a bowl.
    """
    u, s, vh = np.linalg.svd(mats)
    mu = s * s
    p = mu.sum(axis=-1)
    safe_p = np.where(p > 0, p, 1.0)
    lam = mu / safe_p[..., None]
    scale = 1.0 + lam.shape[-1] * smooth
    lam_s = (lam + smooth) / scale
    val = np.asarray(spec(lam_s), dtype=float)
    dF = np.asarray(spec.gradient(lam_s), dtype=float) / scale
    # a Schmidt value at zero is an active bound: for alpha < 1 power terms its
    # derivative blows up but only points out of the feasible set
    dF = np.where(lam_s > ACTIVE_LAMBDA, dF, 0.0)
    if weights:
        g = val[..., None] + dF - np.sum(lam * dF, axis=-1, keepdims=True)
        val = p * val
    else:
        g = dF
    grad = np.einsum("...ai,...i,...ib->...ab", u, 2 * s * g, vh)
    return val, grad


def min_on_werner_fiber(spec: MonotoneSpec, a: float, d: int = 2, budget: SearchBudget | None = None,
                        closed_form=None) -> OracleEstimate:
    """Random fiber states refined by retracted gradient descent on the Werner fiber."""
    if not 0 <= a <= 1:
        raise DomainError(f"a={a} outside [0, 1]")
    if d < 2:
        raise DomainError("d must be >= 2")
    budget = budget or SearchBudget()
    rng = make_rng(budget.seed)
    wm = build_operator(OperatorKind.W_MINUS, d).real
    wp = build_operator(OperatorKind.W_PLUS, d).real
    wa, wb = math.sqrt(1 - a), math.sqrt(a)

    def retract(m):
        v = m.reshape(m.shape[0], d * d)
        sym = v @ wp.T
        anti = v @ wm.T
        ns = np.linalg.norm(sym, axis=1, keepdims=True)
        na = np.linalg.norm(anti, axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = (wa * sym / ns if wa > 0 else 0.0) + (wb * anti / na if wb > 0 else 0.0)
        return np.asarray(out).reshape(-1, d, d)

    z = rng.standard_normal((budget.restarts, d * d)) + 1j * rng.standard_normal((budget.restarts, d * d))
    m0 = retract(z.reshape(-1, d, d))

    def objective(eps):
        def value(m):
            v = _schmidt_grad(np.nan_to_num(m), spec, smooth=eps)[0]
            return np.where(np.isnan(m).any(axis=(1, 2)), np.inf, v)
        return value

    def tangent(m, g):
        # remove the radial part within each of the two sphere factors
        v, gv = m.reshape(-1, d * d), g.reshape(-1, d * d)
        out = gv.copy()
        for proj in (wp, wm):
            pv, pg = v @ proj.T, gv @ proj.T
            nn = np.sum(np.abs(pv) ** 2, axis=1, keepdims=True)
            coef = np.real(np.sum(pv.conj() * pg, axis=1, keepdims=True)) / np.where(nn > 0, nn, 1.0)
            out -= coef * pv
        return out.reshape(g.shape)

    m, its = m0, 0
    for eps in SMOOTHING:
        m, f, n = _descend(m, objective(eps), lambda z: tangent(z, _schmidt_grad(z, spec, smooth=eps)[1]),
                           retract, budget)
        its += n
    i = int(np.argmin(f))
    psi = m[i].reshape(-1)
    lam = np.linalg.svd(m[i], compute_uv=False) ** 2
    diag = {
        "iterations": its,
        "state": psi,
        "wminus": float(np.real(psi.conj() @ wm @ psi)),
    }
    return _with_gap(OracleEstimate(float(f[i]), as_schmidt(lam / lam.sum()), None, diag), closed_form)


# ---------------------------------------------------------------------------
# decompositions of a mixed state


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Pure-state ensemble {(p_j, psi_j)} of a density matrix."""

    weights: np.ndarray
    states: np.ndarray

    def density(self) -> np.ndarray:
        return np.einsum("j,ja,jb->ab", self.weights, self.states, self.states.conj())


def _qr_retract(v):
    q, r = np.linalg.qr(v)
    ph = np.sign(np.diagonal(r, axis1=-2, axis2=-1).real)
    ph = np.where(ph == 0, 1.0, ph)
    return q * ph[..., None, :]


def _stiefel_tangent(v, g):
    # drop the normal part V sym(V^H G); the objective is homogeneous in V, so
    # the raw gradient is dominated by directions the retraction undoes
    s = np.swapaxes(v.conj(), -1, -2) @ g
    return g - v @ ((s + np.swapaxes(s.conj(), -1, -2)) / 2)


def decomposition_objective(v, blocks, spec, smooth=0.0):
    """Average entanglement of the ensemble M_j = sum_i V_ji B_i and its gradient in V."""
    mats = np.einsum("...ji,iab->...jab", v, blocks)
    val, gm = _schmidt_grad(mats, spec, weights=True, smooth=smooth)
    gv = np.einsum("...jab,iab->...ji", gm, blocks.conj())
    return val.sum(axis=-1), gv


def roof_upper_bound_by_decompositions(point, spec: MonotoneSpec, ensemble_size: int | None = None,
                                       budget: SearchBudget | None = None, closed_form=None) -> OracleEstimate:
    """Best average pure-state entanglement over searched decompositions of the family state.

    Every decomposition into m states is M = V B with V an m x r isometry and
    B the eigenvectors scaled by square-root eigenvalues, so the search runs
    over isometries with a QR retraction.
    """
    budget = budget or SearchBudget(restarts=32, iterations=500)
    rho = family_to_density(point).matrix if isinstance(point, FamilyPoint) else np.asarray(point, dtype=complex)
    dim = rho.shape[0]
    d = int(round(math.sqrt(dim)))
    evals, evecs = np.linalg.eigh(rho)
    keep = evals > 1e-12
    evals, evecs = evals[keep], evecs[:, keep]
    r = int(keep.sum())
    m = 2 * r if ensemble_size is None else int(ensemble_size)
    if m < r:
        raise DomainError(f"ensemble size {m} is below the rank {r}")
    blocks = (np.sqrt(evals)[:, None] * evecs.T).reshape(r, d, d)
    rng = make_rng(budget.seed)
    z = rng.standard_normal((budget.restarts, m, r)) + 1j * rng.standard_normal((budget.restarts, m, r))
    v0 = _qr_retract(z)

    # continuation: descend on smoothed objectives first so ensemble members can
    # reach exact product states, then finish on the exact one
    v, its = v0, 0
    for eps in SMOOTHING:
        v, f, n = _descend(v, lambda z: decomposition_objective(z, blocks, spec, eps)[0],
                           lambda z: _stiefel_tangent(z, decomposition_objective(z, blocks, spec, eps)[1]),
                           _qr_retract, budget)
        its += n
    i = int(np.argmin(f))
    mats = np.einsum("ji,iab->jab", v[i], blocks).reshape(m, dim)
    w = np.sum(np.abs(mats) ** 2, axis=1)
    states = mats / np.sqrt(np.where(w > 0, w, 1.0))[:, None]
    dec = Decomposition(w, states)
    diag = {"iterations": its, "rank": r, "ensemble_size": m,
            "reconstruction_error": float(np.abs(dec.density() - rho).max())}
    return _with_gap(OracleEstimate(float(f[i]), dec, None, diag), closed_form)


# ---------------------------------------------------------------------------
# isotropic witness by direct max-min search


def _maxmin_value(mu, lam_cum):
    mu = -np.sort(-mu, axis=-1)
    f = np.cumsum(mu, axis=-1)[..., :-1] - lam_cum
    return f.min(axis=-1)


def _fiber_basis(d):
    # orthonormal basis of the complement of the all-ones vector
    q, _ = np.linalg.qr(np.column_stack([np.ones(d), np.eye(d)[:, : d - 1]]))
    return q[:, 1:]


def witness_oracle(lam, b: float, d: int | None = None, budget: SearchBudget | None = None,
                   closed_form=None, scan: int = 200_001) -> OracleEstimate:
    """max over the fiber of min_k f_k(mu), by dense scan (d = 3) or random search plus Nelder-Mead.

    Returns the value at an explicit feasible mu, so the result is a lower
    bound on the witness.
    """
    lam = as_schmidt(lam)
    d = lam.d if d is None else int(d)
    lam_v = lam.padded(d) if lam.d < d else lam.values
    _iso_check(b, d)
    budget = budget or SearchBudget(restarts=64, iterations=400)
    lam_cum = np.cumsum(lam_v)[:-1]
    c = math.sqrt(d * b)
    rad = math.sqrt(1 - b)  # equals sqrt(1 - c^2/d) without the rounding
    basis = _fiber_basis(d)

    def points(u):
        n = np.linalg.norm(u, axis=-1, keepdims=True)
        n = np.where(n > 0, n, 1.0)
        return c / d + rad * (u / n) @ basis.T

    def score(x):
        val = _maxmin_value(x * x, lam_cum)
        return np.where(np.all(x >= -1e-15, axis=-1), val, -np.inf)

    if d == 2:
        # the fiber is two points, swapped by the sort
        x = points(np.array([[1.0]]))
        x = np.clip(x, 0, None)
        best_x = x[0]
        best = float(score(x)[0])
    elif d == 3:
        th = np.linspace(0, 2 * np.pi, scan)
        x = points(np.column_stack([np.cos(th), np.sin(th)]))
        vals = score(x)
        j = int(np.argmax(vals))
        h = th[1] - th[0]
        fun = lambda t: -max(float(score(points(np.array([[math.cos(t), math.sin(t)]])))[0]), -1e3)  # noqa: E731
        res = minimize_scalar(fun, bounds=(th[j] - h, th[j] + h), method="bounded",
                              options={"xatol": 1e-14})
        if -res.fun > vals[j]:
            best, best_x = -res.fun, points(np.array([[math.cos(res.x), math.sin(res.x)]]))[0]
        else:
            best, best_x = float(vals[j]), x[j]
    else:
        rng = make_rng(budget.seed)
        n = max(budget.restarts * 200, 1000)
        # at small b only directions towards concentrated vectors stay nonnegative,
        # so half the directions point at sparse Dirichlet draws
        y = rng.dirichlet(np.full(d, 0.3), size=n // 2)
        u = np.vstack([rng.standard_normal((n - n // 2, d - 1)), (y - 1 / d) @ basis])
        vals = score(points(u))
        order = np.argsort(-vals)[: budget.restarts]
        best, best_x = -np.inf, None
        for j in order:
            if not np.isfinite(vals[j]):
                continue
            fun = lambda w: -max(float(score(points(w[None, :]))[0]), -1e3)  # noqa: E731
            res = minimize(fun, u[j], method="Nelder-Mead",
                           options={"maxiter": budget.iterations * d, "xatol": 1e-12, "fatol": 1e-14})
            improved = -res.fun > vals[j]
            cand = -res.fun if improved else vals[j]
            if cand > best:
                best = float(cand)
                best_x = points((res.x if improved else u[j])[None, :])[0]
        if best_x is None:
            raise DomainError("no feasible fiber point found")
    mu = np.clip(best_x, 0, None) ** 2
    diag = {"fiber_residual": float(abs(np.sqrt(mu).sum() - c) + abs(mu.sum() - 1))}
    return _with_gap(OracleEstimate(float(best), SchmidtVector(np.sort(mu / mu.sum())[::-1]), None, diag),
                     closed_form)
