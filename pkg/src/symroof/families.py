"""Symmetric state families and their twirls.

Coordinates follow the operator expectations that define each twirl:

=============  =====================  ======================
family         a                      b
=============  =====================  ======================
werner         Tr[rho W-]             --
isotropic      --                     Tr[rho Phi_d]
oo             Tr[rho W-]             Tr[rho Phi_d]
ppwerner       Tr[rho W-]             Tr[rho (W+ - Q)]
ppisotropic    Tr[rho (Q - Phi_d)]    Tr[rho Phi_d]
=============  =====================  ======================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .errors import DomainError, StructuralError, UnsupportedQueryError
from .qcore import (
    DensityMatrix,
    OperatorKind,
    build_operator,
    haar_orthogonals,
    haar_unitaries,
    local_dimension,
    make_rng,
    phase_permutations,
)

COORD_TOL = 1e-12


class Family(str, enum.Enum):
    WERNER = "werner"
    ISOTROPIC = "isotropic"
    OO = "oo"
    PP_WERNER = "ppwerner"
    PP_ISOTROPIC = "ppisotropic"

    @property
    def two_parameter(self) -> bool:
        return self in (Family.OO, Family.PP_WERNER, Family.PP_ISOTROPIC)


_ALIASES = {"iso": Family.ISOTROPIC, "wer": Family.WERNER, "pp-werner": Family.PP_WERNER,
            "pp-isotropic": Family.PP_ISOTROPIC, "axisymmetric": Family.PP_ISOTROPIC}


def as_family(name) -> Family:
    if isinstance(name, Family):
        return name
    key = str(name).strip().lower()
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return Family(key)
    except ValueError:
        raise StructuralError(f"unknown family {name!r}") from None


@dataclass(frozen=True)
class FamilyPoint:
    """A point of one of the five symmetric families in local dimension d."""

    family: Family
    d: int
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        fam = as_family(self.family)
        object.__setattr__(self, "family", fam)
        if int(self.d) != self.d or self.d < 2:
            raise DomainError("local dimension must be an integer >= 2")
        object.__setattr__(self, "d", int(self.d))
        need_a = fam is not Family.ISOTROPIC
        need_b = fam is not Family.WERNER
        for name, needed in (("a", need_a), ("b", need_b)):
            val = getattr(self, name)
            if needed and val is None:
                raise DomainError(f"{fam.value} point needs coordinate {name}")
            if not needed and val is not None:
                raise DomainError(f"{fam.value} point takes no coordinate {name}")
            if val is not None:
                if not -COORD_TOL <= val <= 1 + COORD_TOL:
                    raise DomainError(f"coordinate {name}={val} outside [0, 1]")
                object.__setattr__(self, name, float(min(max(val, 0.0), 1.0)))
        if fam.two_parameter and self.a + self.b > 1 + COORD_TOL:
            raise DomainError(f"coordinates must satisfy a + b <= 1, got {self.a + self.b}")

    @classmethod
    def werner(cls, a, d=2):
        return cls(Family.WERNER, d, a=a)

    @classmethod
    def isotropic(cls, b, d):
        return cls(Family.ISOTROPIC, d, b=b)

    @classmethod
    def oo(cls, a, b, d):
        return cls(Family.OO, d, a=a, b=b)

    @classmethod
    def pp_werner(cls, a, b, d):
        return cls(Family.PP_WERNER, d, a=a, b=b)

    @classmethod
    def pp_isotropic(cls, a, b, d):
        return cls(Family.PP_ISOTROPIC, d, a=a, b=b)

    def coords(self) -> tuple:
        return tuple(v for v in (self.a, self.b) if v is not None)


def _ops(d):
    wm = build_operator(OperatorKind.W_MINUS, d)
    wp = build_operator(OperatorKind.W_PLUS, d)
    phi = build_operator(OperatorKind.PHI_D, d)
    q = build_operator(OperatorKind.Q, d)
    return wm, wp, phi, q, np.eye(d * d)


def family_to_density(point: FamilyPoint) -> DensityMatrix:
    d = point.d
    wm, wp, phi, q, one = _ops(d)
    a, b = point.a, point.b
    fam = point.family
    anti = comb(d, 2)
    sym = comb(d + 1, 2)
    if fam is Family.WERNER:
        rho = a / anti * wm + (1 - a) / sym * wp
    elif fam is Family.ISOTROPIC:
        rho = b * phi + (1 - b) * (one - phi) / (d * d - 1)
    elif fam is Family.OO:
        rho = a / anti * wm + b * phi + (1 - a - b) / (sym - 1) * (one - phi - wm)
    elif fam is Family.PP_WERNER:
        rho = a / anti * wm + b / anti * (wp - q) + (1 - a - b) / d * q
    else:
        rho = b * phi + a / (d - 1) * (q - phi) + (1 - a - b) / (d * (d - 1)) * (one - q)
    return DensityMatrix(rho)


def _expect(rho, op) -> float:
    return float(np.real(np.trace(rho @ op)))


def twirl(rho, group) -> FamilyPoint:
    """Coordinates of the twirl of rho over the family's symmetry group."""
    fam = as_family(group)
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise StructuralError("density matrix must be square")
    d = local_dimension(mat.shape[0])
    wm, wp, phi, q, _ = _ops(d)
    clip = lambda x: min(max(x, 0.0), 1.0)  # noqa: E731
    if fam is Family.WERNER:
        return FamilyPoint(fam, d, a=clip(_expect(mat, wm)))
    if fam is Family.ISOTROPIC:
        return FamilyPoint(fam, d, b=clip(_expect(mat, phi)))
    if fam is Family.OO:
        return FamilyPoint(fam, d, a=clip(_expect(mat, wm)), b=clip(_expect(mat, phi)))
    if fam is Family.PP_WERNER:
        return FamilyPoint(fam, d, a=clip(_expect(mat, wm)), b=clip(_expect(mat, wp - q)))
    return FamilyPoint(fam, d, a=clip(_expect(mat, q - phi)), b=clip(_expect(mat, phi)))


def twirl_matrix(rho, group) -> np.ndarray:
    return family_to_density(twirl(rho, group)).matrix


def sample_group(group, n: int, d: int, seed=None) -> np.ndarray:
    """n local unitaries g = A (x) B of the family's symmetry group, shape (n, d^2, d^2)."""
    fam = as_family(group)
    rng = make_rng(seed)
    if fam in (Family.WERNER, Family.ISOTROPIC):
        us = haar_unitaries(n, d, rng)
    elif fam is Family.OO:
        us = haar_orthogonals(n, d, rng).astype(complex)
    else:
        us = phase_permutations(n, d, rng)
    second = us.conj() if fam in (Family.ISOTROPIC, Family.PP_ISOTROPIC) else us
    return np.einsum("nij,nkl->nikjl", us, second).reshape(n, d * d, d * d)


def monte_carlo_twirl(rho, group, n: int = 10_000, seed=None, batch: int = 2000) -> np.ndarray:
    """Sample average of g rho g^dagger over the group's Haar measure."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    d = local_dimension(mat.shape[0])
    rng = make_rng(seed)
    acc = np.zeros_like(mat, dtype=complex)
    done = 0
    while done < n:
        m = min(batch, n - done)
        g = sample_group(group, m, d, rng)
        acc += np.einsum("nij,jk,nlk->il", g, mat, g.conj())
        done += m
    return acc / n


def is_separable(point: FamilyPoint) -> bool:
    """Closed separability regions for Werner, isotropic and OO-invariant states."""
    fam = point.family
    if fam is Family.WERNER:
        return point.a <= 0.5
    if fam is Family.ISOTROPIC:
        return point.b <= 1.0 / point.d
    if fam is Family.OO:
        return point.a <= 0.5 and point.b <= 1.0 / point.d
    raise UnsupportedQueryError(
        f"no closed separability inequality is known for {fam.value} states"
    )
