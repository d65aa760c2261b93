import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symroof.errors import DomainError, RegistrationError, StructuralError
from symroof.monotones import (
    MonotoneSpec,
    concurrence_ck,
    elementary_symmetric,
    entropy_of_entanglement,
    generalized_entropy,
    parse_monotone,
    renyi_entropy,
    vidal_ek,
)


def brute_symmetric(lam, k):
    return sum(math.prod(c) for c in itertools.combinations(lam, k))


def loop_entropy(lam):
    # ascending order, natural log converted at the end
    total = 0.0
    for x in sorted(lam):
        if x > 0:
            total -= x * math.log(x)
    return total / math.log(2)


ALL_SPECS = [
    MonotoneSpec.vidal(1), MonotoneSpec.vidal(2), MonotoneSpec.entropy(),
    MonotoneSpec.renyi(0.3), MonotoneSpec.renyi(0.7), MonotoneSpec.concurrence(2),
    MonotoneSpec.concurrence(None),
    MonotoneSpec.generalized(lambda x: np.sqrt(np.asarray(x)) - np.asarray(x), name="sqrt-x"),
]


def test_vidal_examples():
    assert vidal_ek([0.5, 0.5], 1) == 0.5
    assert vidal_ek([0.6, 0.3, 0.1], 2) == pytest.approx(0.1)
    assert vidal_ek([0.2] * 5, 3) == pytest.approx(0.4)
    assert vidal_ek([0.2] * 5, 5) == 0
    with pytest.raises(DomainError):
        vidal_ek([1.0], 0)


def test_entropy_examples():
    assert entropy_of_entanglement([1, 0]) == 0
    assert entropy_of_entanglement([0.5, 0.5]) == pytest.approx(1)
    assert entropy_of_entanglement([0.6, 0.3, 0.1]) == pytest.approx(loop_entropy([0.6, 0.3, 0.1]), abs=1e-14)
    assert entropy_of_entanglement([0.6, 0.3, 0.1]) == pytest.approx(1.29546, abs=1e-4)


def test_renyi_examples():
    assert renyi_entropy([0.5, 0.5], 2) == pytest.approx(1)
    assert renyi_entropy([1, 0, 0], 0.4) == 0
    assert renyi_entropy([0.6, 0.4], 2) == pytest.approx(-math.log2(0.36 + 0.16), abs=1e-14)
    for bad in (0, -1, 1):
        with pytest.raises(DomainError):
            renyi_entropy([0.5, 0.5], bad)


def test_renyi_continuity_at_one():
    lam = [0.5, 0.3, 0.15, 0.05]
    for alpha in (1 - 1e-4, 1 + 1e-4):
        assert abs(renyi_entropy(lam, alpha) - entropy_of_entanglement(lam)) < 1e-4


@given(st.lists(st.floats(0, 1), min_size=1, max_size=7), st.integers(1, 7))
def test_elementary_symmetric_brute_force(vals, k):
    k = min(k, len(vals))
    assert elementary_symmetric(np.array(vals), k) == pytest.approx(brute_symmetric(vals, k), rel=1e-12, abs=1e-14)


def test_concurrence_examples():
    lam = [0.5, 0.3, 0.2]
    s2 = 0.5 * 0.3 + 0.5 * 0.2 + 0.3 * 0.2
    assert s2 == pytest.approx(0.31)
    assert concurrence_ck(lam, 2) == pytest.approx(3 * math.sqrt(s2 / 3), abs=1e-14)
    assert concurrence_ck(lam, 2) == pytest.approx(0.96437, abs=1e-5)
    assert concurrence_ck([1, 0, 0, 0], 3) == 0
    with pytest.raises(DomainError):
        concurrence_ck(lam, 4)


@pytest.mark.parametrize("d", range(1, 7))
def test_concurrence_uniform_normalization(d):
    for k in range(1, d + 1):
        assert concurrence_ck(np.full(d, 1 / d), k) == pytest.approx(1, abs=1e-12)


def test_generalized_examples():
    shannon = lambda x: -x * math.log2(x) if x > 0 else 0.0  # noqa: E731
    assert generalized_entropy([0.5, 0.5], shannon) == pytest.approx(1)
    assert generalized_entropy([0.6, 0.4], lambda x: x**2) == pytest.approx(0.52)
    assert generalized_entropy([0.25] * 4, np.sqrt) == pytest.approx(2)
    with pytest.raises(RegistrationError):
        MonotoneSpec.generalized(lambda x: np.asarray(x) + 1)


def t_transform(x, rng):
    i, j = rng.choice(x.size, 2, replace=False)
    t = rng.random()
    y = x.copy()
    y[i], y[j] = t * x[i] + (1 - t) * x[j], (1 - t) * x[i] + t * x[j]
    return y


def test_schur_concavity():
    rng = np.random.default_rng(0)
    for _ in range(500):
        d = int(rng.integers(2, 6))
        x = rng.dirichlet(np.full(d, 0.5))
        y = t_transform(t_transform(x, rng), rng)
        for spec in ALL_SPECS:
            assert spec(x) <= spec(y) + 1e-10, spec.label


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_permutation_symmetry(d, seed):
    rng = np.random.default_rng(seed)
    x = rng.dirichlet(np.ones(d))
    p = rng.permutation(d)
    for spec in ALL_SPECS:
        assert spec(x) == pytest.approx(spec(x[p]), abs=1e-12)


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_vidal_telescoping(d, seed):
    lam = np.sort(np.random.default_rng(seed).dirichlet(np.ones(d)))[::-1]
    for k in range(1, d):
        assert vidal_ek(lam, k) - vidal_ek(lam, k + 1) == pytest.approx(lam[k], abs=1e-15)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_zero_on_product(d):
    e0 = np.eye(d)[0]
    for spec in ALL_SPECS:
        assert abs(spec(e0)) <= 1e-12


def test_batched_evaluation():
    rng = np.random.default_rng(5)
    lam = rng.dirichlet(np.ones(4), size=6)
    for spec in ALL_SPECS:
        batch = np.asarray(spec(lam))
        assert batch.shape == (6,)
        assert np.allclose(batch, [spec(v) for v in lam])


@pytest.mark.parametrize("spec", [s for s in ALL_SPECS if s.kind.value != "generalized"] + [
    MonotoneSpec.renyi(2.5), MonotoneSpec.concurrence(3)])
def test_gradient_against_finite_differences(spec):
    lam = np.array([0.45, 0.3, 0.15, 0.1])
    g = spec.gradient(lam)
    h = 1e-7
    for i in range(lam.size):
        e = np.zeros_like(lam)
        e[i] = h
        fd = (spec(lam + e) - spec(lam - e)) / (2 * h)
        assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_generalized_gradient_requires_derivative():
    spec = MonotoneSpec.generalized(lambda x: np.asarray(x) ** 2)
    with pytest.raises(RegistrationError):
        spec.gradient([0.5, 0.5])


@pytest.mark.parametrize("text, label", [
    ("vidal:2", "vidal:2"), ("renyi:0.25", "renyi:0.25"), ("entropy", "entropy"),
    ("concurrence:2", "concurrence:2"), ("concurrence:d", "concurrence:d")])
def test_parse_monotone(text, label):
    assert parse_monotone(text).label == label


@pytest.mark.parametrize("text", ["vidal", "renyi:x", "foo:1", "entropy:2"])
def test_parse_monotone_rejects(text):
    with pytest.raises(StructuralError):
        parse_monotone(text)


def test_parse_monotone_domain():
    with pytest.raises(DomainError):
        parse_monotone("renyi:1")
    with pytest.raises(DomainError):
        parse_monotone("vidal:0")
