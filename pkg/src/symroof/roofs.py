"""Closed-form convex roofs on Werner and isotropic states and their orbit extensions.

The reduction used everywhere: the roof of a monotone E on a symmetric family is
the one-variable lower convex envelope of the fiber minimum
``E_G(x) = min{E(psi) : psi twirls to the family point x}``. For Werner states
the fiber minimum is attained by one fixed two-level state for every monotone;
for isotropic states it reduces to a minimization over Schmidt vectors with
``sum(sqrt(lam)) = sqrt(d b)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    IndeterminateRegimeError,
    RegistrationError,
    StructuralError,
    UnsupportedQueryError,
    UnsupportedRegionError,
)
from .families import Family, FamilyPoint
from .monotones import (
    MonotoneKind,
    MonotoneSpec,
    power_term,
    shannon_term,
    shannon_term_derivative,
)
from .qcore import OperatorKind, SchmidtVector, build_operator, expectation

DEFAULT_GRID = 2001
PRE_ENVELOPE_TOL = 1e-9


def _check_unit(x, name):
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"{name}={x} outside [0, 1]")


# ---------------------------------------------------------------------------
# one-dimensional lower convex envelope


@dataclass(frozen=True, eq=False)
class EnvelopeFunction:
    """Piecewise-linear lower convex envelope sampled on ``grid``."""

    grid: np.ndarray
    values: np.ndarray
    vertices: np.ndarray = field(repr=False)

    def __call__(self, x):
        return np.interp(x, self.vertices[:, 0], self.vertices[:, 1])

    def linear_sections(self) -> list[tuple[float, float]]:
        """Intervals where the envelope is a chord between non-adjacent samples."""
        idx = np.searchsorted(self.grid, self.vertices[:, 0])
        return [(float(self.grid[i]), float(self.grid[j])) for i, j in zip(idx[:-1], idx[1:]) if j - i > 1]


def _cross(o, p, q):
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def convex_envelope_1d(x, y) -> EnvelopeFunction:
    """Lower convex hull of the graph samples (x_i, y_i), by the monotone chain."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise StructuralError("x and y must have the same length")
    if x.size < 2:
        raise StructuralError("need at least two samples")
    if np.any(np.diff(x) <= 0):
        raise StructuralError("sample abscissae must be strictly increasing")
    hull: list[tuple[float, float]] = []
    for p in zip(x, y):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    vertices = np.array(hull)
    values = np.interp(x, vertices[:, 0], vertices[:, 1])
    return EnvelopeFunction(x, values, vertices)


def _envelope_at(func, x0: float, lo: float = 0.0, hi: float = 1.0, grid: int = DEFAULT_GRID,
                 breaks=()) -> float:
    # breakpoints of the fiber function go on the grid so kinks are not smeared
    xs = np.unique(np.concatenate([np.linspace(lo, hi, grid), [x0], np.asarray(breaks, dtype=float)]))
    xs = xs[np.concatenate([[True], np.diff(xs) > 1e-15])]
    if not np.any(xs == x0):
        xs[np.argmin(np.abs(xs - x0))] = x0
    ys = np.array([func(t) for t in xs])
    return float(convex_envelope_1d(xs, ys)(x0))


# ---------------------------------------------------------------------------
# minimizer profiles


class ProfileKind(str, enum.Enum):
    WERNER_PSI = "werner_psi"
    ISO_TWO_LEVEL = "iso_two_level"
    ISO_TOP_HEAVY = "iso_top_heavy"
    ISO_TRUNCATED = "iso_truncated"
    PRODUCT = "product"


@dataclass(frozen=True, eq=False)
class MinimizerProfile:
    """Schmidt vector of a fiber minimizer together with the family parameters it solves.

    ``params`` holds ``a`` for Werner profiles and ``b``, ``t``, ``k`` for
    isotropic ones.
    """

    kind: ProfileKind
    schmidt: SchmidtVector
    params: dict

    @property
    def d(self) -> int:
        return self.schmidt.d

    def state(self) -> np.ndarray:
        """Amplitude vector of the minimizing pure state."""
        d = self.d
        lam = self.schmidt.values
        psi = np.zeros(d * d, dtype=complex)
        if self.kind is ProfileKind.WERNER_PSI:
            a = self.params["a"]
            if a <= 0.5:
                # (sqrt(2a)|1> + sqrt(1-2a)|2>) (x) |2>
                psi[0 * d + 1] = math.sqrt(2 * a)
                psi[1 * d + 1] = math.sqrt(max(1 - 2 * a, 0.0))
            else:
                psi[0 * d + 1] = math.sqrt(lam[0])
                psi[1 * d + 0] = -math.sqrt(lam[1])
            return psi
        if self.kind is ProfileKind.PRODUCT:
            b = self.params["b"]
            psi[0] = math.sqrt(d * b)
            psi[1] = math.sqrt(max(1 - d * b, 0.0))
            return psi
        psi[np.arange(d) * (d + 1)] = np.sqrt(lam)
        return psi

    def constraint_residual(self) -> float:
        """Distance of the profile from its fiber constraint."""
        if self.kind is ProfileKind.WERNER_PSI:
            return abs(expectation(self.state(), build_operator(OperatorKind.W_MINUS, self.d)) - self.params["a"])
        b = self.params["b"]
        if self.kind is ProfileKind.PRODUCT:
            return abs(expectation(self.state(), build_operator(OperatorKind.PHI_D, self.d)) - b)
        return abs(np.sqrt(self.schmidt.values).sum() - math.sqrt(self.d * b))


def _schmidt(values, d) -> SchmidtVector:
    lam = np.zeros(d)
    values = np.asarray(values, dtype=float)
    lam[: values.size] = values
    lam = np.clip(lam, 0.0, None)
    return SchmidtVector(lam / lam.sum())


def werner_lambda_max(a: float) -> float:
    return 0.5 + math.sqrt(max(a * (1 - a), 0.0))


def werner_minimizer(a: float, d: int = 2) -> MinimizerProfile:
    """Two-level state that minimizes every monotone on the Werner fiber <W-> = a."""
    _check_unit(a, "a")
    if d < 2:
        raise DomainError("d must be >= 2")
    if a <= 0.5:
        lam = _schmidt([1.0], d)
    else:
        s = math.sqrt(a * (1 - a))
        lam = _schmidt([0.5 + s, 0.5 - s], d)
    return MinimizerProfile(ProfileKind.WERNER_PSI, lam, {"a": float(a)})


def werner_fiber_value(spec: MonotoneSpec, a: float, d: int = 2) -> float:
    """Minimum of the monotone over pure states with <W-> = a (the pre-envelope)."""
    return float(spec(werner_minimizer(a, d).schmidt))


def renyi_werner(alpha: float, a: float) -> float:
    """Closed-form Renyi fiber minimum on Werner states, in bits."""
    _check_unit(a, "a")
    if a <= 0.5:
        return 0.0
    s = math.sqrt(a * (1 - a))
    return math.log2((0.5 + s) ** alpha + (0.5 - s) ** alpha) / (1 - alpha)


def _binary_entropy(p: float) -> float:
    return float(shannon_term(p) + shannon_term(1 - p))


def roof_werner(spec: MonotoneSpec, a: float, d: int = 2, method: str = "auto", grid: int = DEFAULT_GRID) -> float:
    """Convex roof of ``spec`` on the Werner state with <W-> = a.

    ``method="auto"`` uses closed forms where they exist and the envelope of the
    fiber minimum otherwise; ``"envelope"`` always takes the envelope path.
    """
    _check_unit(a, "a")
    if method not in ("auto", "envelope"):
        raise StructuralError(f"unknown method {method!r}")
    s = math.sqrt(max(a * (1 - a), 0.0))
    if method == "auto":
        kind = spec.kind
        if kind is MonotoneKind.ENTROPY:
            return 0.0 if a <= 0.5 else _binary_entropy(0.5 - s)
        if kind is MonotoneKind.VIDAL:
            return max(0.0, 0.5 - s) if (spec.param == 1 and a > 0.5) else 0.0
        if kind is MonotoneKind.RENYI and spec.param > 1:
            return renyi_werner(spec.param, a)
        if kind is MonotoneKind.RENYI and spec.param < 0.5:
            return max(0.0, 2 * a - 1)
    return _envelope_at(lambda t: werner_fiber_value(spec, t, d), a, grid=grid)


# ---------------------------------------------------------------------------
# isotropic states: Vidal monotones


def iso_vidal_roof(k: int, b: float, d: int) -> float:
    """Roof of the k-th Vidal monotone on the isotropic state with <Phi_d> = b."""
    _check_unit(b, "b")
    if k < 1:
        raise DomainError("k must be >= 1")
    if k >= d or b <= k / d:
        return 0.0
    return (math.sqrt((1 - b) * k) - math.sqrt(b * (d - k))) ** 2 / d


def _two_level_t(k: int, b: float, d: int) -> float:
    return 1.0 / k - (math.sqrt((1 - b) * k) - math.sqrt(b * (d - k))) ** 2 / (k * d)


def iso_two_level_profile(k: int, b: float, d: int) -> MinimizerProfile:
    """Schmidt vector (t,..,t, s,..,s) with k leading entries, on the fiber of b >= k/d."""
    if not k / d <= b <= 1 or not 1 <= k < d:
        raise DomainError(f"two-level profile needs 1 <= k < d and b >= k/d (k={k}, b={b}, d={d})")
    t = _two_level_t(k, b, d)
    rest = (1 - k * t) / (d - k)
    lam = _schmidt([t] * k + [rest] * (d - k), d)
    kind = ProfileKind.ISO_TOP_HEAVY if k == 1 else ProfileKind.ISO_TWO_LEVEL
    return MinimizerProfile(kind, lam, {"b": float(b), "t": t, "k": k})


def iso_vidal_minimizer(k: int, b: float, d: int) -> MinimizerProfile:
    """Fiber minimizer of E_k on the isotropic fiber of b."""
    _check_unit(b, "b")
    if b < 1 / d:
        return product_profile(b, d)
    if k < d and b >= k / d:
        return iso_two_level_profile(k, b, d)
    # at most k nonzero coefficients reach this fiber, so E_k vanishes
    return iso_truncated_profile(b, d)


def product_profile(b: float, d: int) -> MinimizerProfile:
    """Separable state on the isotropic fiber of b <= 1/d."""
    if b > 1 / d + 1e-15:
        raise DomainError("product states reach only b <= 1/d")
    return MinimizerProfile(ProfileKind.PRODUCT, _schmidt([1.0], d), {"b": float(b)})


def iso_lambda_beta(b: float, d: int) -> SchmidtVector:
    """Schmidt vector majorizing every vector on the isotropic fiber of b."""
    _check_unit(b, "b")
    ek = [1.0] + [iso_vidal_roof(k, b, d) for k in range(1, d)] + [0.0]
    diffs = -np.diff(ek)
    diffs = np.clip(diffs, 0.0, None)
    return SchmidtVector(diffs / diffs.sum())


def iso_lower_bound_roof(spec: MonotoneSpec, b: float, d: int) -> float:
    """Lower bound on the roof of any monotone on isotropic states (not the roof itself)."""
    return float(spec(iso_lambda_beta(b, d)))


# ---------------------------------------------------------------------------
# isotropic states: generalized entropies


def _top_heavy_tail(b: float, d: int) -> float:
    return (math.sqrt(1 - b) - math.sqrt(b * (d - 1))) ** 2 / d


def t_top_heavy(b: float, d: int) -> float:
    """Leading coefficient of (t, (1-t)/(d-1), ...) on the fiber of b >= 1/d."""
    return 1 - _top_heavy_tail(b, d)


def truncation_index(b: float, d: int) -> int:
    """floor(d b), rounded to the nearest integer when d b is within 1e-12 of one."""
    db = d * b
    k = round(db)
    return int(k) if abs(db - k) < 1e-12 else int(math.floor(db))


def _truncated_angle(b: float, d: int) -> tuple[float, int]:
    # with k t = cos^2(th) and 1 - k t = sin^2(th): sqrt(k) cos(th) + sin(th) = sqrt(d b),
    # solved as a difference of angles so a tiny tail keeps its relative precision
    k = truncation_index(b, d)
    if k < 1:
        raise DomainError("truncated profile needs b >= 1/d")
    db = d * b
    th = math.atan(1 / math.sqrt(k)) - math.atan(math.sqrt(max(k + 1 - db, 0.0) / db))
    return max(th, 0.0), k


def t_truncated(b: float, d: int) -> tuple[float, int]:
    """(t, k) of the profile (t,..,t, 1-kt, 0,..) with k = floor(d b) on the fiber of b >= 1/d."""
    th, k = _truncated_angle(b, d)
    return math.cos(th) ** 2 / k, k


def iso_top_heavy_profile(b: float, d: int) -> MinimizerProfile:
    if b < 1 / d:
        raise DomainError("profile needs b >= 1/d")
    tail = _top_heavy_tail(b, d)  # kept separate so tiny tails survive rounding
    t = 1 - tail
    lam = _schmidt([t] + [tail / (d - 1)] * (d - 1), d)
    return MinimizerProfile(ProfileKind.ISO_TOP_HEAVY, lam, {"b": float(b), "t": t, "k": 1})


def iso_truncated_profile(b: float, d: int) -> MinimizerProfile:
    if b < 1 / d:
        raise DomainError("profile needs b >= 1/d")
    th, k = _truncated_angle(b, d)
    t = math.cos(th) ** 2 / k
    vals = [t] * k + [math.sin(th) ** 2]
    lam = _schmidt(vals[:d], d)
    return MinimizerProfile(ProfileKind.ISO_TRUNCATED, lam, {"b": float(b), "t": t, "k": k})


BERRY_SAMPLES = 512
BERRY_EPS = 1e-4


def classify_berry_regime(df, samples: int = BERRY_SAMPLES, eps: float = BERRY_EPS, tol: float = 1e-9) -> str:
    """Return "concave" or "convex" for x -> f'(1/(4 x^2)) on the range of the inverse map.

    The map x -> 1/(4x^2) inverts the derivative of sqrt on (0, 1), so x runs over
    (1/2, 1/(2 sqrt(eps))); second differences are taken on a uniform grid there
    and scaled by the sampled range of the function.
    """
    xs = np.linspace(0.5 * (1 + eps), 0.5 / math.sqrt(eps), samples)
    with np.errstate(all="ignore"):
        vals = np.asarray(df(1.0 / (4.0 * xs**2)), dtype=float)
    if vals.shape != xs.shape:
        vals = np.array([float(df(1.0 / (4.0 * x**2))) for x in xs])
    if not np.all(np.isfinite(vals)):
        raise IndeterminateRegimeError("derivative is not finite on the sampled range")
    second = np.diff(vals, 2)
    scale = max(np.ptp(vals), 1.0)
    thresh = tol * scale
    if np.all(second <= thresh) and np.any(second < -thresh):
        return "concave"
    if np.all(second >= -thresh) and np.any(second > thresh):
        return "convex"
    raise IndeterminateRegimeError("x -> f'(1/(4x^2)) is neither strictly convex nor strictly concave")


def _berry_extremum(f, df, b: float, d: int, maximize: bool = False) -> tuple[float, MinimizerProfile]:
    if not 1 / d - 1e-15 <= b <= 1:
        raise DomainError(f"fiber constraint needs b in [1/d, 1], got {b}")
    b = max(b, 1 / d)
    regime = classify_berry_regime(df)
    top_heavy = (regime == "concave") != maximize
    profile = iso_top_heavy_profile(b, d) if top_heavy else iso_truncated_profile(b, d)
    lam = profile.schmidt.values
    value = float(np.sum(np.asarray(f(lam), dtype=float)))
    return value, profile


def _resolve_f(f, df):
    if isinstance(f, MonotoneSpec):
        if f.kind is not MonotoneKind.GENERALIZED:
            raise StructuralError("expected a generalized-entropy spec")
        f, df = f.f, f.df
    if df is None:
        raise RegistrationError("the Berry classification needs the derivative f'")
    return f, df


def iso_entropy_minimum(f, b: float, d: int, df=None) -> tuple[float, MinimizerProfile]:
    """Minimum of sum_i f(lam_i) over Schmidt vectors with sum(sqrt(lam)) = sqrt(d b).

    ``f`` is either a generalized-entropy :class:`MonotoneSpec` or a callable, in
    which case ``df`` must be given.
    """
    f, df = _resolve_f(f, df)
    return _berry_extremum(f, df, b, d, maximize=False)


def iso_entropy_maximum(f, b: float, d: int, df=None) -> tuple[float, MinimizerProfile]:
    f, df = _resolve_f(f, df)
    return _berry_extremum(f, df, b, d, maximize=True)


# ---------------------------------------------------------------------------
# isotropic states: generalized concurrences


def c2_pre_envelope(b: float, d: int) -> float:
    """Minimum 2-concurrence on the isotropic fiber of b >= 1/d."""
    if b < 1 / d:
        return 0.0
    t = t_top_heavy(b, d)
    return math.sqrt(d) / (d - 1) * math.sqrt(max((1 - t) * (d * (1 + t) - 2), 0.0))


def cd_pre_envelope(b: float, d: int) -> float:
    """Minimum G-concurrence on the isotropic fiber of b."""
    if b <= 1 - 1 / d:
        return 0.0
    t = (math.sqrt((d - 1) * b) + math.sqrt(1 - b)) ** 2 / (d * (d - 1))
    return d * max(t ** (d - 1) - (d - 1) * t**d, 0.0) ** (1 / d)


def iso_c2_roof(b: float, d: int) -> float:
    _check_unit(b, "b")
    return 0.0 if b <= 1 / d else (d * b - 1) / (d - 1)


def iso_cd_roof(b: float, d: int) -> float:
    _check_unit(b, "b")
    return 0.0 if b <= 1 - 1 / d else d * b - d + 1


# ---------------------------------------------------------------------------
# isotropic dispatch


def iso_fiber_minimum(spec: MonotoneSpec, b: float, d: int) -> tuple[float, MinimizerProfile]:
    """Fiber minimum E_iso(b) and a minimizing profile (the pre-envelope)."""
    _check_unit(b, "b")
    if b <= 1 / d:
        return 0.0, product_profile(min(b, 1 / d), d)
    kind = spec.kind
    if kind is MonotoneKind.VIDAL:
        prof = iso_vidal_minimizer(spec.param, b, d)
        return iso_vidal_roof(spec.param, b, d), prof
    if kind is MonotoneKind.CONCURRENCE:
        k = spec.resolved_k(d)
        if k == 2:
            return c2_pre_envelope(b, d), iso_top_heavy_profile(b, d)
        if k == d:
            return cd_pre_envelope(b, d), iso_truncated_profile(b, d)
        if k == 1:
            return 1.0, iso_top_heavy_profile(b, d)
        raise UnsupportedQueryError(f"no isotropic fiber formula for the {k}-concurrence with d={d}")
    if kind is MonotoneKind.ENTROPY:
        return _berry_extremum(shannon_term, shannon_term_derivative, b, d)
    if kind is MonotoneKind.RENYI:
        alpha = spec.param
        if alpha == 0.5:
            # the constraint fixes sum sqrt(lam), so this entropy is constant on the fiber
            prof = iso_top_heavy_profile(b, d)
            return math.log2(d * b), prof
        f, df = power_term(alpha)
        value, prof = _berry_extremum(f, df, b, d, maximize=alpha > 1)
        return float(spec(prof.schmidt)), prof
    value, prof = _berry_extremum(spec.f, _require_df(spec), b, d)
    return value, prof


def _require_df(spec):
    if spec.df is None:
        raise RegistrationError("generalized entropy registered without a derivative")
    return spec.df


def iso_fiber_value(spec: MonotoneSpec, b: float, d: int) -> float:
    return iso_fiber_minimum(spec, b, d)[0]


def roof_isotropic(spec: MonotoneSpec, b: float, d: int, method: str = "auto", grid: int = DEFAULT_GRID) -> float:
    """Convex roof of ``spec`` on the isotropic state with <Phi_d> = b."""
    _check_unit(b, "b")
    if method not in ("auto", "envelope"):
        raise StructuralError(f"unknown method {method!r}")
    if method == "auto":
        if spec.kind is MonotoneKind.VIDAL:
            return iso_vidal_roof(spec.param, b, d)
        if spec.kind is MonotoneKind.CONCURRENCE:
            k = spec.resolved_k(d)
            if k == 2:
                return iso_c2_roof(b, d)
            if k == d:
                return iso_cd_roof(b, d)
    return _envelope_at(lambda t: iso_fiber_value(spec, t, d), b, grid=grid,
                        breaks=[k / d for k in range(1, d + 1)])


# ---------------------------------------------------------------------------
# regions of the two-parameter families


class Region(str, enum.Enum):
    WERNER_ORBIT = "werner_orbit"
    ISO_ORBIT = "iso_orbit"
    SEPARABLE = "separable"
    UNKNOWN = "unknown"


_UNKNOWN_LABEL = {Family.OO: "C", Family.PP_WERNER: "B", Family.PP_ISOTROPIC: "A"}


def unknown_region_label(point: FamilyPoint) -> str | None:
    return _UNKNOWN_LABEL.get(point.family) if region_membership(point) is Region.UNKNOWN else None


def region_membership(point: FamilyPoint) -> Region:
    """Which orbit hull (if any) the point lies in."""
    fam, d, a, b = point.family, point.d, point.a, point.b
    tol = 1e-12
    if fam is Family.WERNER:
        return Region.WERNER_ORBIT
    if fam is Family.ISOTROPIC:
        return Region.ISO_ORBIT
    if fam is Family.PP_WERNER:
        if a >= 0.5 - tol and b <= 1 - a + tol:
            return Region.WERNER_ORBIT
        return Region.UNKNOWN
    if fam is Family.PP_ISOTROPIC:
        if b >= 1 / d - tol and a <= 1 - b + tol:
            return Region.ISO_ORBIT
        return Region.UNKNOWN
    if a >= 0.5 - tol and b <= 2 * (1 - a) / d + tol:
        return Region.WERNER_ORBIT
    if b >= 1 / d - tol and a <= d * (1 - b) / (2 * (d - 1)) + tol:
        return Region.ISO_ORBIT
    if a <= 0.5 + tol and b <= 1 / d + tol:
        return Region.SEPARABLE
    return Region.UNKNOWN


@dataclass(frozen=True)
class ExtendedRoof:
    value: float
    region: Region
    coordinate: float | None
    by_continuity: bool = False


def extended_roof_info(spec: MonotoneSpec, point: FamilyPoint, continuous: bool = False) -> ExtendedRoof:
    """Roof value on a two-parameter family point inside a known orbit hull.

    The orbit argument needs the one-variable roof to coincide with the fiber
    minimum at the relevant coordinate. When it does not, ``continuous=True``
    asserts that the monotone is continuous and the value is returned flagged
    ``by_continuity``; otherwise an :class:`UnsupportedRegionError` is raised.
    """
    region = region_membership(point)
    if region is Region.UNKNOWN:
        label = _UNKNOWN_LABEL.get(point.family)
        raise UnsupportedRegionError(
            f"{point.family.value} point (a={point.a}, b={point.b}) lies in region {label}, "
            "where no roof formula is known",
            region_label=label,
        )
    if region is Region.SEPARABLE:
        return ExtendedRoof(0.0, region, None)
    d = point.d
    if region is Region.WERNER_ORBIT:
        x = point.a
        roof = roof_werner(spec, x, d)
        pre = werner_fiber_value(spec, x, d)
    else:
        x = point.b
        roof = roof_isotropic(spec, x, d)
        pre = iso_fiber_value(spec, x, d)
    if abs(roof - pre) <= PRE_ENVELOPE_TOL:
        return ExtendedRoof(roof, region, x)
    if continuous:
        return ExtendedRoof(roof, region, x, by_continuity=True)
    raise UnsupportedRegionError(
        f"the one-variable roof lies strictly below the fiber minimum at {x} "
        f"({roof:.6g} < {pre:.6g}); pass continuous=True for a continuous monotone"
    )


def extended_roof(spec: MonotoneSpec, point: FamilyPoint, continuous: bool = False) -> float:
    return extended_roof_info(spec, point, continuous).value


# ---------------------------------------------------------------------------
# orbit certificates


def pair_unitary(j: int, k: int, d: int) -> np.ndarray:
    """U_{j,k}: a fixed 2x2 block on basis vectors j < k (1-based), identity elsewhere."""
    if not 1 <= j < k <= d:
        raise DomainError(f"need 1 <= j < k <= d, got j={j}, k={k}, d={d}")
    u = np.eye(d, dtype=complex)
    j0, k0 = j - 1, k - 1
    r = 1 / math.sqrt(2)
    u[j0, j0], u[j0, k0] = r, r
    u[k0, j0], u[k0, k0] = 1j * r, -1j * r
    return u


def dft_unitary(d: int) -> np.ndarray:
    idx = np.arange(1, d + 1)
    return np.exp(2j * np.pi * np.outer(idx, idx) / d) / math.sqrt(d)


def paired_unitary(d: int, pairs: int) -> np.ndarray:
    """U_{1,d} U_{2,d-1} ... U_{m,d+1-m} with m = pairs."""
    u = np.eye(d, dtype=complex)
    for j in range(1, pairs + 1):
        u = u @ pair_unitary(j, d + 1 - j, d)
    return u


@dataclass(frozen=True, eq=False)
class OrbitCertificate:
    """Explicit orbit states whose twirls bracket a two-parameter point.

    ``checks`` lists ``(label, required, achieved, relation)`` with relation one
    of ``"=="`` or ``">="``.
    """

    point: FamilyPoint
    region: Region
    base_state: np.ndarray
    unitaries: tuple
    conjugate: bool
    checks: tuple
    span: tuple

    def max_error(self) -> float:
        err = 0.0
        for _, req, got, rel in self.checks:
            err = max(err, abs(got - req) if rel == "==" else max(req - got, 0.0))
        return err

    def verify(self, tol: float = 1e-10) -> bool:
        lo, hi = self.span
        coord = self.point.b if self.point.family in (Family.PP_WERNER,) or (
            self.point.family is Family.OO and self.region is Region.WERNER_ORBIT) else self.point.a
        inside = lo - tol <= coord <= hi + tol
        return self.max_error() <= tol and inside

    def states(self) -> list[np.ndarray]:
        out = []
        for u in self.unitaries:
            v = u.conj() if self.conjugate else u
            out.append(np.kron(u, v) @ self.base_state)
        return out


def orbit_membership_certificate(point: FamilyPoint, profile: MinimizerProfile | None = None) -> OrbitCertificate:
    """Orbit states of the fiber minimizer whose twirls span the point's segment."""
    region = region_membership(point)
    d, a, b = point.d, point.a, point.b
    if region not in (Region.WERNER_ORBIT, Region.ISO_ORBIT) or not point.family.two_parameter:
        raise UnsupportedRegionError(f"{point.family.value} point is not in a covered two-parameter region")
    wm = build_operator(OperatorKind.W_MINUS, d)
    wp = build_operator(OperatorKind.W_PLUS, d)
    phi = build_operator(OperatorKind.PHI_D, d)
    q = build_operator(OperatorKind.Q, d)
    if region is Region.WERNER_ORBIT:
        profile = profile or werner_minimizer(a, d)
        if profile.kind is not ProfileKind.WERNER_PSI:
            raise StructuralError("Werner-orbit certificate needs a Werner profile")
        a = profile.params["a"]
        base = profile.state()
        unitaries = (np.eye(d, dtype=complex), pair_unitary(1, 2, d))
        psi0, psi1 = (np.kron(u, u) @ base for u in unitaries)
        checks = [
            ("<W-> base", a, expectation(psi0, wm), "=="),
            ("<W-> rotated", a, expectation(psi1, wm), "=="),
        ]
        if point.family is Family.PP_WERNER:
            checks += [
                ("<Q> base", 0.0, expectation(psi0, q), "=="),
                ("<Q> rotated", 1 - a, expectation(psi1, q), "=="),
            ]
            ends = (expectation(psi0, wp - q), expectation(psi1, wp - q))
        else:
            checks += [
                ("<Phi_d> base", 0.0, expectation(psi0, phi), "=="),
                ("<Phi_d> rotated", 2 * (1 - a) / d, expectation(psi1, phi), "=="),
            ]
            ends = (expectation(psi0, phi), expectation(psi1, phi))
        return OrbitCertificate(point, region, base, unitaries, False, tuple(checks), (min(ends), max(ends)))

    profile = profile or iso_top_heavy_profile(b, d)
    if profile.kind not in (ProfileKind.ISO_TWO_LEVEL, ProfileKind.ISO_TOP_HEAVY, ProfileKind.ISO_TRUNCATED):
        raise StructuralError("isotropic-orbit certificate needs an isotropic profile")
    b = profile.params["b"]
    base = profile.state()
    if point.family is Family.PP_ISOTROPIC:
        unitaries = (np.eye(d, dtype=complex), dft_unitary(d))
        psi0, psi1 = (np.kron(u, u.conj()) @ base for u in unitaries)
        checks = [
            ("<Phi_d> base", b, expectation(psi0, phi), "=="),
            ("<Phi_d> rotated", b, expectation(psi1, phi), "=="),
            ("<Q> base", 1.0, expectation(psi0, q), "=="),
            ("<Q> rotated", b, expectation(psi1, q), "=="),
        ]
        ends = (expectation(psi0, q - phi), expectation(psi1, q - phi))
        return OrbitCertificate(point, region, base, unitaries, True, tuple(checks), (min(ends), max(ends)))

    k = profile.params["k"]
    if profile.kind is ProfileKind.ISO_TRUNCATED:
        pairs = d // 2
        exact = k == d - 1 or abs(b - 1) < 1e-15
    else:
        pairs = min(k, d - k)
        exact = k in (1, d - 1) or abs(b - 1) < 1e-15
    unitaries = (np.eye(d, dtype=complex), paired_unitary(d, pairs))
    psi0, psi1 = (np.kron(u, u.conj()) @ base for u in unitaries)
    bound = d * (1 - b) / (2 * (d - 1))
    checks = [
        ("<Phi_d> base", b, expectation(psi0, phi), "=="),
        ("<Phi_d> rotated", b, expectation(psi1, phi), "=="),
        ("<W-> base", 0.0, expectation(psi0, wm), "=="),
        ("<W-> rotated", bound, expectation(psi1, wm), "==" if exact else ">="),
    ]
    ends = (expectation(psi0, wm), expectation(psi1, wm))
    return OrbitCertificate(point, region, base, unitaries, True, tuple(checks), (min(ends), max(ends)))
