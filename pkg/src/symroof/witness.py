"""LOCC conversion witnesses from a pure source state to symmetric targets.

Three witnesses are provided:

* pure -> two-qubit mixed state (complete), through the two-qubit concurrence;
* pure -> Werner state (complete), through the largest Schmidt coefficient;
* pure -> isotropic state (no-go only), through a max-min over the isotropic fiber.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import lsq_linear, minimize

from .errors import DomainError, SolverError, StructuralError
from .monotones import vidal_ek
from .qcore import DensityMatrix, as_schmidt, make_rng

GO_TOL = 1e-10
NOGO_TOL = 1e-8
FEAS_TOL = 1e-8


class Verdict(str, enum.Enum):
    GO = "Go"
    NOGO = "NoGo"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True, eq=False)
class WitnessResult:
    value: float
    verdict: Verdict
    per_k: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)


def _complete(value: float, tol: float, **diag) -> WitnessResult:
    verdict = Verdict.GO if value >= -tol else Verdict.NOGO
    diag["boundary"] = abs(value) <= NOGO_TOL
    return WitnessResult(float(value), verdict, None, diag)


# ---------------------------------------------------------------------------
# two qubits


_SIGMA_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


def two_qubit_concurrence(rho) -> float:
    """Concurrence of a two-qubit state from the spectrum of rho times its spin flip.

    With rho = X X^H, the square roots of the eigenvalues of rho (sy sy) rho* (sy sy)
    are the singular values of X^T (sy sy) X, which avoids square roots of
    eigenvalues that are zero up to rounding.
    """
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (4, 4):
        raise StructuralError(f"two-qubit concurrence needs a 4x4 matrix, got {mat.shape}")
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
    x = v * np.sqrt(np.clip(w, 0.0, None))
    s = np.linalg.svd(x.T @ _SIGMA_YY @ x, compute_uv=False)
    c = float(max(0.0, s[0] - s[1] - s[2] - s[3]))
    # sqrt(1 - C^2) has infinite slope at C = 1, so an ulp of rounding there
    # would surface as ~1e-8 in the roof
    return 1.0 if c > 1 - 1e-14 else c


def two_qubit_e1_roof(rho) -> float:
    c = two_qubit_concurrence(rho)
    return (1 - math.sqrt(max(1 - c * c, 0.0))) / 2


def pure_to_two_qubit(lam, rho) -> WitnessResult:
    """Complete witness for psi -> rho with rho a two-qubit state: E_1(lam) - roof of E_1 at rho."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(np.asarray(rho, dtype=complex))
    if rho.matrix.shape != (4, 4):
        raise StructuralError("target must be a two-qubit density matrix")
    lam = as_schmidt(lam)
    c = two_qubit_concurrence(rho)
    roof = (1 - math.sqrt(max(1 - c * c, 0.0))) / 2
    value = vidal_ek(lam, 1) - roof
    return _complete(value, GO_TOL, concurrence=c, target_roof=roof)


# ---------------------------------------------------------------------------
# Werner targets


def pure_to_werner(lam, a: float) -> WitnessResult:
    """Complete witness for psi -> Werner(a): value = 1/2 + sqrt(a(1-a)) - lam_1."""
    if not 0 <= a <= 1:
        raise DomainError(f"a={a} outside [0, 1]")
    lam = as_schmidt(lam)
    threshold = 0.5 + math.sqrt(a * (1 - a))
    value = threshold - float(lam.values[0])
    if a <= 0.5:
        return WitnessResult(value, Verdict.GO, None, {"separable_target": True, "boundary": False})
    return _complete(value, 1e-12, threshold=threshold)


# ---------------------------------------------------------------------------
# isotropic targets


def _fiber_constants(b: float, d: int):
    return math.sqrt(d * b)


def _region_rows(k: int, d: int, mode: str):
    """Rows encoding the region where f_k is the minimum.

    Each row r means ``sum_i r_i (mu_i - lam_i) >= 0``.
    """
    rows = []
    if mode == "derived":
        for ell in range(1, d):
            r = np.zeros(d)
            if ell > k:
                r[k:ell] = 1.0
            elif ell < k:
                r[ell:k] = -1.0
            else:
                continue
            rows.append(r)
    else:
        # index ranges exactly as printed, 1-based with empty sums dropped
        for ell in range(1, k):
            r = np.zeros(d)
            r[1:ell] = -1.0
            if r.any():
                rows.append(r)
        for ell in range(k + 1, d):
            r = np.zeros(d)
            r[k : min(ell + 1, d)] = 1.0
            rows.append(r)
    return np.array(rows).reshape(-1, d)


def _fiber_start(rng, b: float, d: int, c: float) -> np.ndarray:
    """Random point x >= 0 on {sum x = c, |x| = 1}, sorted descending (rejection sampling)."""
    r = math.sqrt(1 - b)
    for i in range(200):
        # odd draws aim at sparse vectors, the only feasible directions at small b
        u = rng.dirichlet(np.full(d, 0.3)) if i % 2 else rng.standard_normal(d)
        u -= u.mean()
        n = np.linalg.norm(u)
        if n < 1e-12:
            continue
        x = c / d + r * u / n
        if x.min() >= 0:
            return np.sort(x)[::-1]
    x = np.zeros(d)
    x[0] = 1.0
    return x


def _structured_starts(b: float, d: int) -> list[np.ndarray]:
    from .roofs import iso_top_heavy_profile, iso_truncated_profile, iso_two_level_profile

    starts = []
    for j in range(1, d):
        if b >= j / d:
            starts.append(np.sqrt(iso_two_level_profile(j, b, d).schmidt.values))
    if b >= 1 / d:
        starts.append(np.sqrt(iso_top_heavy_profile(b, d).schmidt.values))
        starts.append(np.sqrt(iso_truncated_profile(b, d).schmidt.values))
    return starts


@dataclass(frozen=True)
class _SubResult:
    k: int
    value: float
    x: np.ndarray | None
    violation: float
    kkt: float
    starts_feasible: int


def _kkt_residual(x, k, lam, rows, c, tol=1e-7) -> float:
    d = x.size
    grad = np.zeros(d)
    grad[:k] = 2 * x[:k]
    cols = [np.ones(d), 2 * x]
    bounds_lo = [-np.inf, -np.inf]
    mu = x * x
    for r in rows:
        g = r @ (mu - lam)
        if abs(g) <= tol:
            cols.append(-2 * r * x)
            bounds_lo.append(0.0)
    for i in range(d - 1):
        if abs(x[i] - x[i + 1]) <= tol:
            e = np.zeros(d)
            e[i], e[i + 1] = -1.0, 1.0
            cols.append(e)
            bounds_lo.append(0.0)
    for i in range(d):
        if x[i] <= tol:
            e = np.zeros(d)
            e[i] = -1.0
            cols.append(e)
            bounds_lo.append(0.0)
    A = np.array(cols).T
    res = lsq_linear(A, grad, bounds=(np.array(bounds_lo), np.full(len(cols), np.inf)))
    return float(np.linalg.norm(A @ res.x - grad))


def _solve_subproblem(k, lam, b, d, starts, mode) -> _SubResult:
    c = _fiber_constants(b, d)
    rows = _region_rows(k, d, mode)
    lam_prefix = lam[:k].sum()

    def obj(x):
        return -np.sum(x[:k] ** 2)

    def jac(x):
        g = np.zeros(d)
        g[:k] = -2 * x[:k]
        return g

    cons = [
        {"type": "eq", "fun": lambda x: np.sum(x) - c, "jac": lambda x: np.ones(d)},
        {"type": "eq", "fun": lambda x: x @ x - 1.0, "jac": lambda x: 2 * x},
    ]
    if d > 1:
        diff = np.eye(d)[:-1] - np.eye(d, k=1)[:-1]
        cons.append({"type": "ineq", "fun": lambda x: diff @ x, "jac": lambda x: diff})
    if rows.size:
        cons.append({
            "type": "ineq",
            "fun": lambda x: rows @ (x * x - lam),
            "jac": lambda x: rows * (2 * x)[None, :],
        })

    def violation(x):
        v = max(abs(x.sum() - c), abs(x @ x - 1), max(-x.min(), 0.0))
        v = max(v, max(np.diff(x).max(), 0.0))
        if rows.size:
            v = max(v, max(-(rows @ (x * x - lam)).min(), 0.0))
        return v

    best, best_x, best_v, n_ok = -np.inf, None, np.inf, 0
    for x0 in starts:
        res = minimize(obj, x0, jac=jac, method="SLSQP", constraints=cons,
                       bounds=[(0.0, 1.0)] * d, options={"ftol": 1e-14, "maxiter": 500})
        x = np.clip(res.x, 0.0, None)
        v = violation(x)
        if v > FEAS_TOL:
            continue
        n_ok += 1
        val = -obj(x) - lam_prefix
        if val > best:
            best, best_x, best_v = val, x, v
    if best_x is None:
        return _SubResult(k, float("nan"), None, float("nan"), float("nan"), 0)
    kkt = _kkt_residual(best_x, k, lam, rows, c)
    return _SubResult(k, float(best), best_x, float(best_v), kkt, n_ok)


def pure_to_isotropic_nogo(lam, b: float, d: int | None = None, starts: int = 32, seed=0,
                           mode: str = "derived") -> WitnessResult:
    """No-go witness for psi -> isotropic(b): max over fiber mu of min_k f_k(mu).

    ``f_k(mu) = sum_{i<=k} mu_i - sum_{i<=k} lam_i``. The max-min is split over
    the regions where each f_k attains the minimum; each piece is a smooth
    problem in ``x = sqrt(mu)`` solved by SLSQP from ``starts`` multi-starts
    (structured profiles first, then random fiber points). ``mode="literal"``
    uses the alternative constraint index ranges and a min over pieces; it is
    a diagnostic and does not compute the witness.
    """
    lam = as_schmidt(lam)
    d = lam.d if d is None else int(d)
    if lam.d > d:
        raise StructuralError(f"Schmidt vector of length {lam.d} does not fit d={d}")
    lam_v = lam.padded(d) if lam.d < d else lam.values
    if not 0 <= b <= 1:
        raise DomainError(f"b={b} outside [0, 1]")
    if mode not in ("derived", "literal"):
        raise StructuralError(f"unknown mode {mode!r}")
    if b < 1 / d:
        return WitnessResult(0.0, Verdict.GO, None, {"separable_target": True})
    if d == 1:
        raise DomainError("d must be >= 2")
    rng = make_rng(seed)
    c = _fiber_constants(b, d)
    x0s = _structured_starts(b, d)
    while len(x0s) < starts:
        x0s.append(_fiber_start(rng, b, d, c))
    x0s = x0s[:max(starts, 1)]
    subs = [_solve_subproblem(k, lam_v, b, d, x0s, mode) for k in range(1, d)]
    per_k = np.array([s.value for s in subs])
    feasible = ~np.isnan(per_k)
    if not feasible.any():
        raise SolverError("no feasible point found for any subproblem",
                          {"per_k": per_k, "b": b, "d": d})
    value = float(per_k[feasible].max() if mode == "derived" else per_k[feasible].min())
    k_best = int(np.flatnonzero(feasible)[np.argmax(per_k[feasible])]) if mode == "derived" else None
    diag = {
        "kkt_residual": [s.kkt for s in subs],
        "violation": [s.violation for s in subs],
        "feasible_starts": [s.starts_feasible for s in subs],
        "restarts": len(x0s),
        "mode": mode,
        "boundary": abs(value) <= NOGO_TOL,
    }
    if k_best is not None:
        diag["argmax_mu"] = subs[k_best].x ** 2
        diag["argmax_k"] = k_best + 1
    verdict = Verdict.NOGO if value < -NOGO_TOL else Verdict.INCONCLUSIVE
    return WitnessResult(value, verdict, per_k, diag)


def witness_zero_crossing(lam, d: int, lo: float | None = None, hi: float = 1.0, tol: float = 1e-6, **kw) -> float:
    """Smallest b at which the isotropic witness turns negative, by bisection.

    Requires the witness to be nonnegative at ``lo`` and negative at ``hi``.
    """
    lo = 1 / d if lo is None else lo
    f = lambda t: pure_to_isotropic_nogo(lam, t, d, **kw).value  # noqa: E731
    flo, fhi = f(lo), f(hi)
    if not (flo >= 0 > fhi):
        raise SolverError("witness does not change sign on the bracket", {"f_lo": flo, "f_hi": fhi})
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
