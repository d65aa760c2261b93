"""Bipartite linear algebra on C^d (x) C^d.

Basis ordering is |ij> -> i*d + j throughout. Every stochastic routine takes an
explicit ``seed`` that may be an integer, a ``numpy.random.SeedSequence`` or a
``numpy.random.Generator``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, StructuralError

SUM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_FLOOR = -1e-10
SCHMIDT_ZERO = 1e-12


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_rngs(seed, n: int) -> list[np.random.Generator]:
    """Independent child generators, one per restart."""
    if isinstance(seed, np.random.Generator):
        seq = seed.bit_generator.seed_seq
    elif isinstance(seed, np.random.SeedSequence):
        seq = seed
    else:
        seq = np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in seq.spawn(n)]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def local_dimension(n: int) -> int:
    d = math.isqrt(n)
    if d * d != n or d < 1:
        raise StructuralError(f"length {n} is not a bipartite square d*d")
    return d


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True, eq=False)
class SchmidtVector:
    """Descending probability vector of squared Schmidt coefficients."""

    values: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.values, dtype=float).ravel()
        if lam.size == 0:
            raise DomainError("empty Schmidt vector")
        if np.any(~np.isfinite(lam)):
            raise DomainError("Schmidt vector has non-finite entries")
        if lam.min() < -SUM_TOL or lam.max() > 1 + SUM_TOL:
            raise DomainError("Schmidt coefficients must lie in [0, 1]")
        if abs(lam.sum() - 1.0) > SUM_TOL:
            raise DomainError(f"Schmidt coefficients sum to {lam.sum():.15g}, not 1")
        lam = np.clip(lam, 0.0, 1.0)
        # stable descending sort
        order = np.argsort(-lam, kind="stable")
        object.__setattr__(self, "values", _frozen(lam[order]))

    @classmethod
    def from_values(cls, values, normalize: bool = False, tol: float = SUM_TOL) -> "SchmidtVector":
        lam = np.asarray(values, dtype=float).ravel()
        if lam.size and lam.min() < -tol:
            raise DomainError("negative Schmidt coefficient")
        lam = np.clip(lam, 0.0, None)
        total = lam.sum()
        if normalize:
            if total <= 0:
                raise DomainError("cannot normalize an all-zero vector")
            lam = lam / total
        elif abs(total - 1.0) > tol:
            raise DomainError(f"Schmidt coefficients sum to {total:.15g}, not 1")
        else:
            lam = lam / total
        return cls(lam)

    @property
    def d(self) -> int:
        return self.values.size

    def padded(self, d: int) -> "SchmidtVector":
        if d < self.d:
            if np.any(self.values[d:] > SCHMIDT_ZERO):
                raise StructuralError(f"Schmidt rank exceeds requested dimension {d}")
            return SchmidtVector(self.values[:d] / self.values[:d].sum())
        return SchmidtVector(np.concatenate([self.values, np.zeros(d - self.d)]))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.d

    def __repr__(self):
        return f"SchmidtVector({np.array2string(self.values, precision=6)})"


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector of length d*d."""

    amplitudes: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=complex).ravel()
        local_dimension(psi.size)
        norm2 = float(np.vdot(psi, psi).real)
        if abs(norm2 - 1.0) > SUM_TOL:
            raise DomainError(f"state has squared norm {norm2:.15g}")
        object.__setattr__(self, "amplitudes", _frozen(psi))

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        psi = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(psi / np.linalg.norm(psi))

    @property
    def d(self) -> int:
        return local_dimension(self.amplitudes.size)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Normalized positive semidefinite operator on C^d (x) C^d."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise StructuralError("density matrix must be square")
        local_dimension(rho.shape[0])
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise DomainError("density matrix is not Hermitian")
        rho = 0.5 * (rho + rho.conj().T)
        if abs(np.trace(rho).real - 1.0) > SUM_TOL:
            raise DomainError(f"density matrix has trace {np.trace(rho).real:.15g}")
        evals = np.linalg.eigvalsh(rho)
        if evals.min() < PSD_FLOOR:
            raise DomainError(f"density matrix has eigenvalue {evals.min():.3e}")
        object.__setattr__(self, "matrix", _frozen(rho))

    @property
    def d(self) -> int:
        return local_dimension(self.matrix.shape[0])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def as_schmidt(lam) -> SchmidtVector:
    if isinstance(lam, SchmidtVector):
        return lam
    return SchmidtVector(lam)


def _state_vector(psi) -> np.ndarray:
    if isinstance(psi, PureState):
        return psi.amplitudes
    vec = np.asarray(psi, dtype=complex).ravel()
    local_dimension(vec.size)
    return vec


def _density(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return DensityMatrix(rho).matrix


# ---------------------------------------------------------------------------
# symmetric operators


class OperatorKind(str, enum.Enum):
    SWAP = "swap"
    W_PLUS = "wplus"
    W_MINUS = "wminus"
    PHI_D = "phid"
    Q = "q"


@lru_cache(maxsize=64)
def _operator(kind: OperatorKind, d: int) -> np.ndarray:
    n = d * d
    if kind is OperatorKind.SWAP:
        op = np.zeros((n, n))
        for i in range(d):
            for j in range(d):
                op[i * d + j, j * d + i] = 1.0
    elif kind is OperatorKind.W_PLUS:
        op = 0.5 * (np.eye(n) + _operator(OperatorKind.SWAP, d))
    elif kind is OperatorKind.W_MINUS:
        op = 0.5 * (np.eye(n) - _operator(OperatorKind.SWAP, d))
    elif kind is OperatorKind.PHI_D:
        omega = np.eye(d).ravel() / math.sqrt(d)
        op = np.outer(omega, omega)
    else:
        op = np.diag(np.eye(d).ravel())
    return _frozen(op.astype(complex))


def build_operator(kind, d: int) -> np.ndarray:
    """Return the d^2 x d^2 matrix of swap, W+/W- projector, Phi_d, or Q."""
    if d < 2:
        raise DomainError("symmetric operators need d >= 2")
    return _operator(OperatorKind(kind), int(d))


def maximally_entangled(d: int) -> np.ndarray:
    return np.eye(d).ravel().astype(complex) / math.sqrt(d)


def expectation(psi, op) -> float:
    """<psi|op|psi> for a Hermitian operator, as a real number."""
    vec = _state_vector(psi)
    op = np.asarray(op)
    if op.shape != (vec.size, vec.size):
        raise StructuralError(f"operator shape {op.shape} does not act on a length-{vec.size} state")
    val = np.vdot(vec, op @ vec)
    if abs(val.imag) > 1e-12:
        raise DomainError("operator expectation has an imaginary part; is it Hermitian?")
    return float(val.real)


# ---------------------------------------------------------------------------
# Schmidt decomposition and majorization


def schmidt_decompose(psi):
    """Schmidt vector and local unitaries with psi = (UL (x) UR) sum_i sqrt(lam_i)|ii>."""
    vec = _state_vector(psi)
    d = local_dimension(vec.size)
    if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
        raise DomainError("state is not normalized")
    u, s, vh = np.linalg.svd(vec.reshape(d, d))
    s = np.where(s < SCHMIDT_ZERO, 0.0, s)
    lam = s**2
    lam = lam / lam.sum()
    return SchmidtVector(lam), u, vh.T


def schmidt_coefficients(states: np.ndarray) -> np.ndarray:
    """Batched Schmidt vectors for an array of shape (..., d*d)."""
    states = np.asarray(states)
    d = local_dimension(states.shape[-1])
    s = np.linalg.svd(states.reshape(states.shape[:-1] + (d, d)), compute_uv=False)
    lam = s**2
    return lam / lam.sum(axis=-1, keepdims=True)


def from_schmidt(lam, left=None, right=None) -> np.ndarray:
    """(UL (x) UR) sum_i sqrt(lam_i)|ii>, as an amplitude vector."""
    lam = np.asarray(lam, dtype=float)
    d = lam.size
    mat = np.diag(np.sqrt(lam)).astype(complex)
    if left is not None:
        mat = left @ mat
    if right is not None:
        mat = mat @ np.asarray(right).T
    return mat.ravel()


def majorizes(x, y) -> bool:
    """True iff x majorizes y (x is at least as concentrated as y)."""
    x = np.sort(np.asarray(x, dtype=float).ravel())[::-1]
    y = np.sort(np.asarray(y, dtype=float).ravel())[::-1]
    n = max(x.size, y.size)
    x = np.pad(x, (0, n - x.size))
    y = np.pad(y, (0, n - y.size))
    if abs(x.sum() - y.sum()) > 1e-12:
        return False
    return bool(np.all(np.cumsum(x) >= np.cumsum(y) - 1e-12))


# ---------------------------------------------------------------------------
# random group elements


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary via phase-corrected QR of a Ginibre matrix."""
    if d < 1:
        raise DomainError("d must be positive")
    rng = make_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def haar_unitaries(n: int, d: int, seed=None) -> np.ndarray:
    """Array of n independent Haar unitaries, shape (n, d, d)."""
    rng = make_rng(seed)
    z = (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_orthogonals(n: int, d: int, seed=None) -> np.ndarray:
    rng = make_rng(seed)
    z = rng.standard_normal((n, d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * np.sign(diag)[:, None, :]


def phase_permutations(n: int, d: int, seed=None) -> np.ndarray:
    """Uniform permutation composed with i.i.d. uniform phases, shape (n, d, d)."""
    rng = make_rng(seed)
    out = np.zeros((n, d, d), dtype=complex)
    phases = np.exp(2j * np.pi * rng.random((n, d)))
    for m in range(n):
        perm = rng.permutation(d)
        out[m, perm, np.arange(d)] = phases[m]
    return out


def haar_state(dim: int, seed=None) -> np.ndarray:
    rng = make_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_density(d: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre ensemble."""
    rng = make_rng(seed)
    n = d * d
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# twirl fibers


def _fiber_state(weight: float, proj: np.ndarray, d: int, seed) -> np.ndarray:
    rng = make_rng(seed)
    comp = np.eye(d * d) - proj
    while True:
        psi0 = haar_state(d * d, rng)
        inside = proj @ psi0
        outside = comp @ psi0
        n_in = np.linalg.norm(inside)
        n_out = np.linalg.norm(outside)
        if n_in < 1e-12 or n_out < 1e-12:
            continue
        return math.sqrt(1.0 - weight) * outside / n_out + math.sqrt(weight) * inside / n_in


def fiber_state_werner(a: float, d: int, seed=None) -> PureState:
    """Random pure state with <W-> = a, Haar-random inside each of the W+/W- subspaces."""
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"Werner coordinate {a} outside [0, 1]")
    if d < 2:
        raise DomainError("d must be >= 2")
    psi = _fiber_state(a, build_operator(OperatorKind.W_MINUS, d), d, seed)
    return PureState.normalized(psi)


def fiber_state_isotropic(b: float, d: int, seed=None) -> PureState:
    """Random pure state with <Phi_d> = b."""
    if not 0.0 <= b <= 1.0:
        raise DomainError(f"isotropic coordinate {b} outside [0, 1]")
    if d < 2:
        raise DomainError("d must be >= 2")
    psi = _fiber_state(b, build_operator(OperatorKind.PHI_D, d), d, seed)
    return PureState.normalized(psi)
