"""Registry of invariant checks run by ``symroof verify``.

Each check takes ``(seed, full)`` and returns ``(passed, detail)``. Details
contain no timings, so two runs with the same seed print identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import families, oracle, qcore, roofs, witness
from .families import Family, FamilyPoint
from .monotones import MonotoneSpec, shannon_term
from .oracle import SearchBudget


@dataclass(frozen=True)
class Check:
    ident: str
    run: Callable
    full_only: bool = False


_REGISTRY: list[Check] = []


def check(ident, full_only=False):
    def deco(fn):
        _REGISTRY.append(Check(ident, fn, full_only))
        return fn
    return deco


def registry() -> list[Check]:
    return list(_REGISTRY)


def _fmt(x):
    return f"{x:.3e}"


@check("qcore.operators")
def _operators(seed, full):
    err = 0.0
    for d in range(2, 6):
        one = np.eye(d * d)
        swap = qcore.build_operator("swap", d)
        wp = qcore.build_operator("wplus", d)
        wm = qcore.build_operator("wminus", d)
        phi = qcore.build_operator("phid", d)
        err = max(err, np.abs(swap @ swap - one).max(), np.abs(wp + wm - one).max(),
                  np.abs(phi @ phi - phi).max(), abs(np.trace(wm).real - d * (d - 1) / 2))
    return err < 1e-12, f"max identity error {_fmt(err)}"


@check("qcore.schmidt")
def _schmidt(seed, full):
    rng = qcore.make_rng(seed)
    err = 0.0
    for d in (2, 3, 5):
        psi = qcore.haar_state(d * d, rng)
        lam, u, v = qcore.schmidt_decompose(psi)
        back = qcore.from_schmidt(lam, u, v)
        err = max(err, abs(abs(np.vdot(back, psi)) - 1))
    return err < 1e-12, f"reconstruction error {_fmt(err)}"


@check("families.twirl_idempotent")
def _twirl_idem(seed, full):
    rng = qcore.make_rng(seed)
    err = 0.0
    for fam in Family:
        for d in (2, 3, 4):
            rho = qcore.random_density(d, rng)
            t1 = families.twirl_matrix(rho, fam)
            t2 = families.twirl_matrix(t1, fam)
            err = max(err, np.abs(t1 - t2).max())
    return err < 1e-12, f"max |T(T(rho)) - T(rho)| {_fmt(err)}"


@check("families.monte_carlo")
def _mc(seed, full):
    n = 10_000 if full else 2000
    rng = qcore.make_rng(seed)
    err = 0.0
    for fam in Family:
        rho = qcore.random_density(2, rng)
        mc = families.monte_carlo_twirl(rho, fam, n=n, seed=rng)
        err = max(err, np.abs(mc - families.twirl_matrix(rho, fam)).max())
    return err < 5e-2, f"max entrywise deviation {_fmt(err)} at N={n}"


@check("roofs.werner_formation")
def _wer_eof(seed, full):
    spec = MonotoneSpec.entropy()
    err = 0.0
    for a in np.linspace(0, 1, 21):
        ref = float(shannon_term(0.5 - math.sqrt(a * (1 - a))) + shannon_term(0.5 + math.sqrt(a * (1 - a)))) if a > 0.5 else 0.0
        err = max(err, abs(roofs.roof_werner(spec, a) - ref), abs(roofs.roof_werner(spec, a, method="envelope") - ref))
    return err < 1e-10, f"max deviation {_fmt(err)}"


@check("roofs.vidal_iso_convex")
def _vidal_convex(seed, full):
    bs = np.linspace(0, 1, 1001)
    worst = 0.0
    for d in range(2, 7):
        for k in range(1, d):
            v = np.array([roofs.iso_vidal_roof(k, b, d) for b in bs])
            worst = min(worst, np.diff(v, 2).min())
    return worst >= -1e-9, f"min second difference {_fmt(worst)}"


@check("roofs.concurrence_pre_envelope")
def _conc(seed, full):
    worst = -np.inf
    for d in (3, 4, 5):
        b2 = np.linspace(1 / d, 1, 1001)
        bd = np.linspace(1 - 1 / d, 1, 1001)
        c2 = np.array([roofs.c2_pre_envelope(b, d) for b in b2])
        cd = np.array([roofs.cd_pre_envelope(b, d) for b in bd])
        worst = max(worst, np.diff(c2, 2).max(), np.diff(cd, 2).max())
    return worst <= 1e-9, f"max second difference {_fmt(worst)}"


@check("roofs.lambda_beta")
def _lam_beta(seed, full):
    err = 0.0
    for d in (3, 4, 5):
        for b in np.linspace(0, 1, 11):
            lam = roofs.iso_lambda_beta(b, d)
            for k in range(1, d):
                err = max(err, abs(MonotoneSpec.vidal(k)(lam) - roofs.iso_vidal_roof(k, b, d)))
    return err < 1e-12, f"max partial-sum deviation {_fmt(err)}"


@check("roofs.orbit_certificates")
def _certs(seed, full):
    worst = 0.0
    count = 0
    for d in range(2, 7):
        for a in np.linspace(0.5, 1, 6):
            for frac in (0.0, 0.5, 1.0):
                pts = [FamilyPoint.pp_werner(a, frac * (1 - a), d),
                       FamilyPoint.oo(a, frac * 2 * (1 - a) / d, d)]
                for p in pts:
                    c = roofs.orbit_membership_certificate(p)
                    worst = max(worst, c.max_error())
                    count += c.verify()
        for b in np.linspace(1 / d, 1, 6):
            for frac in (0.0, 0.5, 1.0):
                pts = [FamilyPoint.pp_isotropic(frac * (1 - b), b, d),
                       FamilyPoint.oo(frac * d * (1 - b) / (2 * (d - 1)), b, d)]
                for p in pts:
                    c = roofs.orbit_membership_certificate(p)
                    worst = max(worst, c.max_error())
                    count += c.verify()
    total = 5 * (6 * 3 * 2 * 2)
    return worst < 1e-10 and count == total, f"{count}/{total} certificates, max error {_fmt(worst)}"


@check("witness.werner_majorization")
def _wer_major(seed, full):
    rng = qcore.make_rng(seed)
    bad = 0
    n = 500 if full else 100
    for _ in range(n):
        d = int(rng.integers(2, 6))
        lam = rng.dirichlet(np.ones(d))
        a = float(rng.uniform(0.5, 1))
        res = witness.pure_to_werner(lam, a)
        target = roofs.werner_minimizer(a, d).schmidt
        bad += (res.verdict is witness.Verdict.GO) != qcore.majorizes(target, qcore.as_schmidt(lam))
    return bad == 0, f"{bad} disagreements in {n}"


@check("oracle.iso_vidal_sandwich")
def _iso_sandwich(seed, full):
    budget = SearchBudget(restarts=64 if full else 16, iterations=2000 if full else 600, seed=seed)
    lo, hi = 0.0, -np.inf
    dims = (3, 4, 5) if full else (3, 4)
    for d in dims:
        for k in range(1, d):
            for b in np.linspace(1 / d, 1, 6 if full else 4):
                est = oracle.min_on_iso_fiber(MonotoneSpec.vidal(k), b, d, budget,
                                              closed_form=roofs.iso_vidal_roof(k, b, d))
                lo = min(lo, est.gap)
                hi = max(hi, est.gap)
    return lo >= -1e-6 and hi <= 1e-5, f"gap range [{_fmt(lo)}, {_fmt(hi)}]"


@check("oracle.werner_fiber")
def _wer_fiber(seed, full):
    budget = SearchBudget(restarts=16, iterations=1000 if full else 300, seed=seed)
    lo, hi = 0.0, -np.inf
    for spec in (MonotoneSpec.vidal(1), MonotoneSpec.entropy(), MonotoneSpec.renyi(2)):
        for a in (0.6, 0.75, 0.9):
            ref = roofs.werner_fiber_value(spec, a, 2)
            est = oracle.min_on_werner_fiber(spec, a, 2, budget, closed_form=ref)
            lo, hi = min(lo, est.gap), max(hi, est.gap)
    return lo >= -1e-6 and hi <= 1e-5, f"gap range [{_fmt(lo)}, {_fmt(hi)}]"


@check("oracle.decompositions")
def _decomp(seed, full):
    budget = SearchBudget(restarts=16 if full else 4, iterations=500 if full else 200, seed=seed)
    cases = [(FamilyPoint.werner(0.75, 2), MonotoneSpec.entropy()),
             (FamilyPoint.isotropic(0.8, 2), MonotoneSpec.vidal(1))]
    if full:
        cases.append((FamilyPoint.isotropic(0.8, 3), MonotoneSpec.vidal(1)))
    lo, hi = 0.0, -np.inf
    for p, spec in cases:
        ref = roofs.roof_werner(spec, p.a, p.d) if p.family is Family.WERNER else roofs.roof_isotropic(spec, p.b, p.d)
        est = oracle.roof_upper_bound_by_decompositions(p, spec, budget=budget, closed_form=ref)
        lo, hi = min(lo, est.gap), max(hi, est.gap)
    return lo >= -1e-6 and hi <= 1e-3, f"gap range [{_fmt(lo)}, {_fmt(hi)}]"


@check("witness.solver_vs_oracle")
def _wit_vs_oracle(seed, full):
    lam = [0.6, 0.3, 0.1]
    worst = 0.0
    for b in np.linspace(0.4, 1, 13 if full else 4):
        s = witness.pure_to_isotropic_nogo(lam, b, 3, seed=seed).value
        o = oracle.witness_oracle(lam, b, 3, SearchBudget(seed=seed)).value
        worst = max(worst, abs(s - o))
    return worst < 1e-4, f"max |solver - oracle| {_fmt(worst)}"


@check("witness.crossing", full_only=True)
def _crossing(seed, full):
    b0 = witness.witness_zero_crossing([0.6, 0.3, 0.1], 3, lo=0.85, hi=0.95, tol=1e-5, seed=seed)
    return 0.890 <= b0 <= 0.900, f"zero crossing at b = {b0:.5f}"


def run(full: bool = False, seed: int = 0):
    """Run the suite; returns a list of (ident, passed, detail)."""
    out = []
    for c in _REGISTRY:
        if c.full_only and not full:
            continue
        try:
            ok, detail = c.run(seed, full)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((c.ident, bool(ok), detail))
    return out
