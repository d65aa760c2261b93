"""Pure-state entanglement monotones as functions of Schmidt vectors.

All functions accept a :class:`~symroof.qcore.SchmidtVector` or any array whose
last axis holds (not necessarily sorted) Schmidt coefficients, and broadcast
over leading axes. Logarithms are base 2, so entropies are in ebits.

Renyi entropies are monotones on pure states only for ``0 < alpha <= 1``;
values for ``alpha > 1`` are still computed, since their roofs on Werner
states are of independent interest.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import comb, xlogy

from .errors import DomainError, RegistrationError, StructuralError
from .qcore import SchmidtVector

LN2 = math.log(2.0)
_TINY = 1e-300


def _arr(lam) -> np.ndarray:
    if isinstance(lam, SchmidtVector):
        return lam.values
    return np.asarray(lam, dtype=float)


def _sorted_desc(lam: np.ndarray) -> np.ndarray:
    return -np.sort(-lam, axis=-1)


def vidal_ek(lam, k: int):
    """Sum of the d-k smallest Schmidt coefficients (zero once k >= d)."""
    if k < 1:
        raise DomainError("Vidal index k must be >= 1")
    lam = _sorted_desc(_arr(lam))
    out = lam[..., k:].sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def entropy_of_entanglement(lam):
    """Shannon entropy of the Schmidt vector in bits, with 0 log 0 = 0."""
    lam = _arr(lam)
    out = -xlogy(lam, lam).sum(axis=-1) / LN2
    out = np.maximum(out, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def renyi_entropy(lam, alpha: float):
    """Renyi-alpha entropy in bits; alpha = 1 is rejected."""
    if alpha <= 0 or alpha == 1:
        raise DomainError("Renyi order must satisfy alpha > 0, alpha != 1")
    lam = np.clip(_arr(lam), 0.0, None)
    power_sum = np.sum(lam**alpha, axis=-1)
    out = np.log2(power_sum) / (1.0 - alpha)
    out = np.maximum(out, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def elementary_symmetric(lam, k: int):
    """k-th elementary symmetric polynomial along the last axis.

    Vieta's product recursion; inputs are nonnegative, so no cancellation.
    """
    lam = _arr(lam)
    e = np.zeros(lam.shape[:-1] + (k + 1,))
    e[..., 0] = 1.0
    for i in range(lam.shape[-1]):
        x = lam[..., i : i + 1]
        e[..., 1:] = e[..., 1:] + x * e[..., :-1]
    out = e[..., k]
    return float(out) if np.ndim(out) == 0 else out


def _concurrence_scale(d: int, k: int) -> float:
    return d / comb(d, k, exact=False) ** (1.0 / k)


def concurrence_ck(lam, k: int):
    """Generalized k-concurrence, normalized to 1 on the uniform vector."""
    lam = _arr(lam)
    d = lam.shape[-1]
    if not 1 <= k <= d:
        raise DomainError(f"concurrence index k={k} outside [1, {d}]")
    sk = np.clip(elementary_symmetric(lam, k), 0.0, None)
    out = _concurrence_scale(d, k) * sk ** (1.0 / k)
    return float(out) if np.ndim(out) == 0 else out


def generalized_entropy(lam, f: Callable):
    """Sum of f over the Schmidt coefficients."""
    lam = _arr(lam)
    out = np.sum(_apply(f, lam), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _apply(f, x):
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == np.shape(x):
            return y
    except (TypeError, ValueError):
        pass
    return np.vectorize(lambda t: float(f(float(t))))(x)


# handy summands for generalized entropies


def shannon_term(x):
    x = np.asarray(x, dtype=float)
    return -xlogy(x, x) / LN2


def shannon_term_derivative(x):
    x = np.maximum(np.asarray(x, dtype=float), _TINY)
    return -(np.log2(x) + 1.0 / LN2)


def power_term(alpha: float):
    """f(x) = x**alpha together with its derivative."""

    def f(x):
        return np.clip(np.asarray(x, dtype=float), 0.0, None) ** alpha

    def df(x):
        x = np.maximum(np.asarray(x, dtype=float), _TINY)
        return alpha * x ** (alpha - 1.0)

    return f, df


# ---------------------------------------------------------------------------


class MonotoneKind(str, enum.Enum):
    VIDAL = "vidal"
    RENYI = "renyi"
    ENTROPY = "entropy"
    CONCURRENCE = "concurrence"
    GENERALIZED = "generalized"


@dataclass(frozen=True)
class MonotoneSpec:
    """Selector for a pure-state monotone.

    Build with the class methods rather than the constructor::

        MonotoneSpec.vidal(2)
        MonotoneSpec.renyi(0.25)
        MonotoneSpec.entropy()
        MonotoneSpec.concurrence(2)
        MonotoneSpec.generalized(f, df)

    ``concurrence`` accepts ``k=None`` meaning k = d (the G-concurrence), resolved
    at evaluation time.
    """

    kind: MonotoneKind
    param: float | int | None = None
    f: Callable | None = None
    df: Callable | None = None
    name: str | None = None

    @classmethod
    def vidal(cls, k: int) -> "MonotoneSpec":
        if int(k) != k or k < 1:
            raise DomainError("Vidal index k must be an integer >= 1")
        return cls(MonotoneKind.VIDAL, int(k))

    @classmethod
    def renyi(cls, alpha: float) -> "MonotoneSpec":
        if not alpha > 0 or alpha == 1:
            raise DomainError("Renyi order must satisfy alpha > 0, alpha != 1")
        return cls(MonotoneKind.RENYI, float(alpha))

    @classmethod
    def entropy(cls) -> "MonotoneSpec":
        return cls(MonotoneKind.ENTROPY)

    @classmethod
    def concurrence(cls, k: int | None) -> "MonotoneSpec":
        if k is not None and (int(k) != k or k < 1):
            raise DomainError("concurrence index k must be an integer >= 1")
        return cls(MonotoneKind.CONCURRENCE, None if k is None else int(k))

    @classmethod
    def generalized(cls, f: Callable, df: Callable | None = None, name: str | None = None) -> "MonotoneSpec":
        with np.errstate(all="ignore"):
            f0 = float(np.asarray(_apply(f, np.zeros(1)))[0])
        if not np.isfinite(f0) or abs(f0) > 1e-12:
            raise RegistrationError(f"generalized entropy needs f(0) = 0, got {f0!r}")
        return cls(MonotoneKind.GENERALIZED, None, f, df, name)

    @property
    def label(self) -> str:
        if self.kind is MonotoneKind.GENERALIZED:
            return f"generalized:{self.name or getattr(self.f, '__name__', 'f')}"
        if self.param is None:
            return "concurrence:d" if self.kind is MonotoneKind.CONCURRENCE else self.kind.value
        return f"{self.kind.value}:{self.param:g}"

    def resolved_k(self, d: int) -> int:
        if self.kind is MonotoneKind.CONCURRENCE and self.param is None:
            return d
        return int(self.param)

    def __call__(self, lam):
        if self.kind is MonotoneKind.VIDAL:
            return vidal_ek(lam, self.param)
        if self.kind is MonotoneKind.RENYI:
            return renyi_entropy(lam, self.param)
        if self.kind is MonotoneKind.ENTROPY:
            return entropy_of_entanglement(lam)
        if self.kind is MonotoneKind.CONCURRENCE:
            return concurrence_ck(lam, self.resolved_k(_arr(lam).shape[-1]))
        return generalized_entropy(lam, self.f)

    def gradient(self, lam) -> np.ndarray:
        """Partial derivatives with respect to each Schmidt coefficient.

        At kinks (ties in the Vidal sort order) a valid subgradient is returned.
        Singular derivatives at zero coefficients are evaluated at 1e-300.
        """
        lam = np.asarray(_arr(lam), dtype=float)
        if self.kind is MonotoneKind.VIDAL:
            order = np.argsort(-lam, axis=-1, kind="stable")
            ranks = np.argsort(order, axis=-1, kind="stable")
            return (ranks >= self.param).astype(float)
        if self.kind is MonotoneKind.ENTROPY:
            return shannon_term_derivative(lam)
        if self.kind is MonotoneKind.RENYI:
            alpha = self.param
            safe = np.maximum(lam, _TINY)
            power_sum = np.sum(np.clip(lam, 0, None) ** alpha, axis=-1, keepdims=True)
            return alpha * safe ** (alpha - 1.0) / ((1.0 - alpha) * LN2 * power_sum)
        if self.kind is MonotoneKind.CONCURRENCE:
            d = lam.shape[-1]
            k = self.resolved_k(d)
            sk = np.maximum(elementary_symmetric(lam, k), _TINY)
            grads = np.empty_like(lam)
            for i in range(d):
                rest = np.delete(lam, i, axis=-1)
                grads[..., i] = elementary_symmetric(rest, k - 1) if k > 1 else 1.0
            scale = _concurrence_scale(d, k) / k * np.asarray(sk) ** (1.0 / k - 1.0)
            return grads * np.asarray(scale)[..., None]
        if self.df is None:
            raise RegistrationError("this generalized entropy was registered without a derivative")
        return _apply(self.df, lam)


def parse_monotone(text: str) -> MonotoneSpec:
    """Parse ``vidal:K``, ``renyi:ALPHA``, ``entropy``, ``concurrence:K`` or ``concurrence:d``."""
    head, _, arg = text.strip().lower().partition(":")
    if head in ("entropy", "eoe", "shannon"):
        if arg:
            raise StructuralError("entropy takes no argument")
        return MonotoneSpec.entropy()
    if not arg:
        raise StructuralError(f"monotone {text!r} needs an argument, e.g. vidal:1")
    try:
        if head == "vidal":
            return MonotoneSpec.vidal(int(arg))
        if head == "renyi":
            return MonotoneSpec.renyi(float(arg))
        if head == "concurrence":
            return MonotoneSpec.concurrence(None if arg in ("d", "g") else int(arg))
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise StructuralError(f"cannot parse monotone argument {arg!r}") from exc
    raise StructuralError(f"unknown monotone {head!r}")
