import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densepart.errors import BudgetExceededError
from densepart.graph import Graph, weights_from_alpha
from densepart.moments import (
    collection_sums,
    connected_sums,
    falling,
    h_derivatives_closed,
    h_derivatives_enumerated,
    restricted_h_derivatives,
    subset_ratio,
)
from densepart.oracle import h_coeffs_exact, pm_exact


def _sym(rng, n, scale=0.3, complex_=False):
    w = rng.uniform(-scale, scale, (n, n))
    if complex_:
        w = w + 1j * rng.uniform(-scale, scale, (n, n))
    w = np.triu(w, 1)
    return w + w.T


def _naive_sums(w):
    n = len(w)
    V = range(n)
    A1 = sum(w[i, j] for i, j in itertools.combinations(V, 2))
    B1 = sum(w[i, j] ** 2 for i, j in itertools.combinations(V, 2))
    B2 = sum(w[i, j] * w[j, k] for j in V for i, k in itertools.combinations([v for v in V if v != j], 2))
    C1 = sum(w[i, j] ** 3 for i, j in itertools.combinations(V, 2))
    C2 = sum(w[i, j] ** 2 * w[j, k] for i, j, k in itertools.permutations(V, 3))
    C3 = sum(w[i, j] * w[j, k] * w[k, i] for i, j, k in itertools.combinations(V, 3))
    C4 = sum(w[i, j] * w[j, k] * w[k, l] for i, j, k, l in itertools.permutations(V, 4))
    C5 = sum(
        w[i, j] * w[i, k] * w[i, l]
        for i in V
        for j, k, l in itertools.combinations([v for v in V if v != i], 3)
    )
    return dict(A1=A1, B1=B1, B2=B2, C1=C1, C2=C2, C3=C3, C4=C4, C5=C5)


@pytest.mark.parametrize("seed", range(4))
def test_connected_sums_match_nested_loops(seed):
    w = _sym(np.random.default_rng(seed), 7)
    got = connected_sums(w)
    for name, want in _naive_sums(w).items():
        assert getattr(got, name) == pytest.approx(want, rel=1e-12, abs=1e-14), name


def test_connected_sums_k4():
    s = connected_sums(weights_from_alpha(Graph.complete(4), 0.1))
    assert s.A1 == pytest.approx(0.6)
    assert s.B1 == pytest.approx(0.06)
    assert s.B2 == pytest.approx(0.12)
    assert s.C3 == pytest.approx(0.004)


def test_falling_and_ratio():
    assert falling(5, 3) == 60
    assert falling(3, 4) == 0
    assert falling(2, 3) == 0
    assert subset_ratio(10, 3, 2) == pytest.approx(6 / 90)
    assert subset_ratio(10, 3, 4) == 0.0


@pytest.mark.parametrize("seed", range(10))
def test_closed_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 11))
    m = int(rng.integers(2, min(n, 6) + 1))
    w = _sym(rng, n)
    a = h_derivatives_closed(w, m, 3).values
    b = h_derivatives_enumerated(w, m, 3).values
    assert np.allclose(a, b, rtol=1e-9, atol=1e-15)


def test_closed_matches_enumeration_complex():
    rng = np.random.default_rng(42)
    w = _sym(rng, 8, complex_=True)
    a = h_derivatives_closed(w, 4, 3).values
    b = h_derivatives_enumerated(w, 4, 3).values
    assert np.allclose(a, b, rtol=1e-9, atol=1e-15)


def test_second_derivative_n5_m3():
    w = np.where(np.random.default_rng(0).random((5, 5)) < 0.5, 0.2, -0.2)
    w = np.triu(w, 1)
    w = w + w.T
    assert h_derivatives_enumerated(w, 3, 2).values[2] == pytest.approx(
        h_derivatives_closed(w, 3, 2).values[2], rel=1e-10
    )


def test_shared_vertex_collection_covers_three():
    ends = np.array([[0, 1], [1, 2], [3, 4]])
    out = collection_sums(ends, np.array([1.0, 1.0, 1.0]), 2, 4)
    assert out[2, 3] == 1  # {01, 12}
    assert out[2, 4] == 2  # {01, 34}, {12, 34}
    assert out[1, 2] == 3


def test_full_subset_case_matches_direct_expansion():
    # m = n: a single subset, h(z) = prod (1 + z w_ij)
    w = _sym(np.random.default_rng(3), 6)
    c = h_coeffs_exact(w, 6).coeffs
    d = h_derivatives_enumerated(w, 6, 5).values
    for k in range(6):
        assert d[k] == pytest.approx(math.factorial(k) * c[k], rel=1e-10)


def test_numerical_differentiation_of_oracle():
    rng = np.random.default_rng(9)
    w = _sym(rng, 7)
    m = 4

    def h(z):
        return pm_exact(np.log1p(z * w), m).real / math.comb(7, m)

    step = 1e-3
    f = {k: h(k * step) for k in (-2, -1, 0, 1, 2)}
    d1 = (f[1] - f[-1]) / (2 * step)
    d2 = (f[1] - 2 * f[0] + f[-1]) / step**2
    d3 = (f[2] - 2 * f[1] + 2 * f[-1] - f[-2]) / (2 * step**3)
    vals = h_derivatives_closed(w, m, 3).values
    assert d1 == pytest.approx(vals[1], abs=1e-6)
    assert d2 == pytest.approx(vals[2], abs=1e-6)
    assert d3 == pytest.approx(vals[3], abs=1e-4)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 6))
def test_sign_flip(seed, m):
    w = _sym(np.random.default_rng(seed), 7)
    a = h_derivatives_enumerated(w, m, 4).values
    b = h_derivatives_enumerated(-w, m, 4).values
    assert np.allclose(b, a * (-1.0) ** np.arange(5), rtol=1e-10, atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.permutations(list(range(7))))
def test_permutation_invariance(seed, perm):
    w = _sym(np.random.default_rng(seed), 7)
    perm = np.array(perm)
    inv = np.argsort(perm)
    wp = w[np.ix_(inv, inv)]
    assert np.allclose(h_derivatives_closed(w, 4).values, h_derivatives_closed(wp, 4).values, rtol=1e-12)
    assert np.allclose(
        h_derivatives_enumerated(w, 4, 3).values, h_derivatives_enumerated(wp, 4, 3).values, rtol=1e-12
    )


def test_order_validation_and_budget():
    w = _sym(np.random.default_rng(0), 6)
    with pytest.raises(ValueError):
        h_derivatives_closed(w, 3, 4)
    with pytest.raises(ValueError):
        h_derivatives_closed(w, 7, 2)
    with pytest.raises(BudgetExceededError):
        h_derivatives_enumerated(_sym(np.random.default_rng(0), 30), 5, 6, budget=10**6)


def test_restricted_derivatives_match_oracle():
    rng = np.random.default_rng(4)
    n, m = 8, 4
    w = _sym(rng, n)
    for omega in ([], [2], [1, 5], [0, 3, 6]):
        moments, log_const = restricted_h_derivatives(w, m, omega, 3)
        rest = [v for v in range(n) if v not in omega]
        t = m - len(omega)
        # exact polynomial: prod_{j in T} (1 + z x_j) * prod_{pairs in T} (1 + z w)
        x = {j: math.prod(1 + w[i, j] for i in omega) - 1 for j in rest}
        coeffs = np.zeros(max(t + math.comb(t, 2), 3) + 1)
        at_one = 0.0
        for T in itertools.combinations(rest, t):
            poly = np.array([1.0])
            for j in T:
                poly = np.convolve(poly, [1.0, x[j]])
            for i, j in itertools.combinations(T, 2):
                poly = np.convolve(poly, [1.0, w[i, j]])
            coeffs[: len(poly)] += poly
            at_one += math.prod(1 + w[i, j] for i, j in itertools.combinations(sorted(omega + list(T)), 2))
        assert coeffs.sum() == pytest.approx(at_one * math.exp(-sum(
            math.log1p(w[i, j]) for i, j in itertools.combinations(omega, 2))), rel=1e-12)
        coeffs /= math.comb(len(rest), t)
        for k in range(4):
            assert moments.values[k] == pytest.approx(math.factorial(k) * coeffs[k], rel=1e-9, abs=1e-14)
        pairs = [(i, j) for i, j in itertools.combinations(omega, 2)]
        assert log_const == pytest.approx(sum(math.log1p(w[i, j]) for i, j in pairs), abs=1e-14)
