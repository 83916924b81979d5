"""Acceptance suite: one test per criterion, each at its stated tolerance and
runtime. A pass/fail line per criterion is printed in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import functools
import itertools
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from densepart.cli import main as cli_main
from densepart.experiments import expectation_identity_check, expectation_rhs, oracle_log_h1
from densepart.graph import Graph, random_gnp
from densepart.moments import MomentVector, h_derivatives_closed, h_derivatives_enumerated
from densepart.oracle import den_exact, pm_exact
from densepart.pipeline import ApproxConfig, approx_direct, extract_subset
from densepart.series import TruncatedSeries, build_phi, exp_series, log_from_derivatives, log_series
from densepart.zerofree import sample_domain, solve_params

# Median order-3 |error| on ln h(1) over the criterion-5 instances was
# 3.134e-4 when first measured against brute force; the bound is 1.5x that.
ORDER3_MEDIAN_BOUND = 4.70e-4
ORDER3_MEDIAN_TARGET = 0.02


def criterion(number, title, limit_s):
    """Record the outcome and runtime of one criterion; fail on overtime."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            note = ""
            passed = False
            try:
                note = fn(*args, **kwargs) or ""
                elapsed = time.perf_counter() - start
                assert elapsed < limit_s, f"took {elapsed:.1f}s, limit {limit_s}s"
                passed = True
            finally:
                ACCEPTANCE_RESULTS.append((number, title, passed, time.perf_counter() - start, note))
                print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {title}")

        return run

    return wrap


def _sym(rng, n, scale):
    w = np.triu(rng.uniform(-scale, scale, (n, n)), 1)
    return w + w.T


@criterion(1, "closed-form h', h'', h''' match enumeration", 30)
def test_c01_closed_form_vs_enumeration():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(5, 11))
        w = _sym(rng, n, 0.3)
        for m in (3, 4, 5):
            a = h_derivatives_closed(w, m, 3).values[1:]
            b = h_derivatives_enumerated(w, m, 3).values[1:]
            rel = np.abs(a - b) / np.maximum(np.abs(b), 1e-300)
            worst = max(worst, float(rel.max()))
    assert worst <= 1e-9
    return f"max rel diff {worst:.1e}"


@criterion(2, "P_m(Z_0) equals exp(-gamma m/2) C(n,m) den", 10)
def test_c02_oracle_identity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for trial in range(20):
        n = int(rng.integers(5, 13))
        m = int(rng.integers(2, min(n, 5) + 1))
        gamma = (0.3, 0.7)[trial % 2]
        g = random_gnp(n, 0.5, int(rng.integers(1 << 31)))
        z0 = np.where(g.adjacency_matrix, 1.0, -1.0) * gamma / (m - 1)
        np.fill_diagonal(z0, 0.0)
        lhs = pm_exact(z0, m)
        rhs = math.exp(-gamma * m / 2 + den_exact(g, m, gamma)) * math.comb(n, m)
        worst = max(worst, abs(lhs - rhs) / rhs)
    assert worst <= 1e-10
    return f"max rel diff {worst:.1e}"


@criterion(3, "restricted sums satisfy the averaging recursion", 5)
def test_c03_recursion():
    rng = np.random.default_rng(11)
    n, m = 8, 4
    z = np.zeros((n, n), dtype=complex)
    i, j = np.triu_indices(n, 1)
    z[i, j] = 0.3 * (rng.normal(size=len(i)) + 1j * rng.normal(size=len(i)))
    z = z + z.T
    worst = 0.0
    for size in range(m):
        for omega in itertools.combinations(range(n), size):
            lhs = pm_exact(z, m, omega)
            rhs = sum(pm_exact(z, m, omega + (v,)) for v in range(n) if v not in omega) / (m - size)
            worst = max(worst, abs(lhs - rhs))
    assert worst <= 1e-10
    return f"max abs diff {worst:.1e}"


@criterion(4, "complete-graph collapse of the direct estimate", 1)
def test_c04_complete_graph():
    g = Graph.complete(10)
    for m in (3, 5, 8):
        for alpha in (0.1, 0.3):
            exact = oracle_log_h1(g, m, alpha)
            assert abs(exact - math.comb(m, 2) * math.log1p(alpha)) <= 1e-9
            for r in (1, 2, 3):
                partial = sum((-1) ** (k + 1) * alpha**k / k for k in range(1, r + 1))
                est = approx_direct(g, ApproxConfig(m=m, alpha=alpha, order=r)).ln_h1
                assert abs(est - math.comb(m, 2) * partial) <= 1e-9
                assert abs(abs(exact - est) - math.comb(m, 2) * abs(math.log1p(alpha) - partial)) <= 1e-9


@criterion(5, "order 3 beats order 2 on G(10, 0.5), small median error", 60)
def test_c05_direct_convergence():
    err2, err3 = [], []
    for seed in range(100):
        g = random_gnp(10, 0.5, seed)
        truth = oracle_log_h1(g, 4, 0.2)
        err2.append(abs(approx_direct(g, ApproxConfig(m=4, alpha=0.2, order=2)).ln_h1 - truth))
        err3.append(abs(approx_direct(g, ApproxConfig(m=4, alpha=0.2, order=3)).ln_h1 - truth))
    better = sum(e3 <= e2 for e2, e3 in zip(err2, err3))
    median = float(np.median(err3))
    assert better >= 80
    assert median <= ORDER3_MEDIAN_TARGET
    assert median <= ORDER3_MEDIAN_BOUND
    return f"{better}/100 improved, median {median:.2e}"


@criterion(6, "phi maps the disc of radius beta into the strip", 5)
def test_c06_phi():
    t = np.linspace(0, 2 * np.pi, 10_000, endpoint=False)
    for rho in (0.3, 0.5, 1.0):
        phi = build_phi(rho)
        assert phi(0.0) == 0.0
        assert abs(phi(1.0) - 1) <= 1e-12
        v = phi(phi.beta * np.exp(1j * t))
        bad = np.count_nonzero((v.real < -rho) | (v.real > 1 + 2 * rho) | (np.abs(v.imag) > 2 * rho))
        assert bad == 0


@criterion(7, "log/exp series round trip and ln(1+z)", 1)
def test_c07_log_transform():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        a = np.concatenate([[1.0], rng.uniform(-1, 1, 10)])
        back = exp_series(log_series(TruncatedSeries(a))).coeffs
        worst = max(worst, float(np.abs(back - a).max()))
    assert worst <= 1e-10
    d = np.zeros(13)
    d[:2] = 1.0
    f = log_from_derivatives(MomentVector(d)).coeffs
    want = np.array([0.0] + [(-1) ** (k + 1) / k for k in range(1, 13)])
    assert np.abs(f - want).max() <= 1e-12
    return f"max round-trip diff {worst:.1e}"


@criterion(8, "zero-free parameters satisfy all inequalities; spot check", 60)
def test_c08_zero_free():
    for delta in (0.1, 0.3, 0.5, 0.7, 0.9):
        for m in (4, 10, 100):
            p = solve_params(delta, m)
            assert all(p.check(p.min_n()).values()), (delta, m)
    # spot check at the only delta whose threshold is enumerable (n = 47)
    p = solve_params(0.1, 4)
    n = p.min_n()
    rng = np.random.default_rng(1)
    smallest = min(abs(pm_exact(sample_domain(n, p.delta, p.eta, 4, rng), 4)) for _ in range(200))
    assert smallest > 0
    return f"spot check n={n}, min |P| {smallest:.3g}"


@criterion(9, "second-moment identity for random sign matrices", 5)
def test_c09_expectation_identity():
    for m in (2, 3):
        for radius in (0.5, 1.0):
            for theta in (0.0, math.pi / 3):
                lhs, rhs = expectation_identity_check(4, m, radius, theta)
                assert abs(lhs - rhs) <= 1e-10
    assert abs(expectation_rhs(4, 2, 1.0) - 7 / 6) <= 1e-12
    assert abs(expectation_identity_check(4, 2, 1.0, 0.0)[0] - 7 / 6) <= 1e-10


ZEROS_ARGS = ["zeros", "--n", "150", "--m", "3", "--r", "1", "--tau", "2", "--trials", "200", "--seed", "1", "--threads", "1"]


@criterion(10, "in-disc root frequency within 1/tau + 3 sigma", 120)
def test_c10_root_frequency(tmp_path):
    out, summary = tmp_path / "zeros.csv", tmp_path / "zeros.json"
    assert cli_main(ZEROS_ARGS + ["--output", str(out), "--summary", str(summary)]) == 0
    s = json.loads(summary.read_text())
    assert s["failures"] == 0
    assert s["above_threshold"]
    slack = 3 * math.sqrt(0.25 / 200)
    assert s["frequency"] <= 0.5 + 0.12
    assert s["frequency"] <= 0.5 + slack + 1e-12
    return f"frequency {s['frequency']:.3f}"


@criterion(11, "successive conditioning meets the certified density", 30)
def test_c11_extraction():
    for seed in range(30):
        g = random_gnp(12, 0.5, seed)
        found = extract_subset(g, 4, 1.0, engine="exact")
        assert found.value >= den_exact(g, 4, 1.0) / 4 - 1e-9, seed
    planted = Graph.from_edges(8, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    found = extract_subset(planted, 4, 1.0, engine="exact")
    assert found.subset == (0, 1, 2, 3) and found.sigma == 1


@criterion(12, "CLI outputs are byte-identical across runs", 120)
def test_c12_determinism(tmp_path):
    graph = tmp_path / "g.el"
    graph.write_text(random_gnp(10, 0.5, 3).to_edge_list())
    invocations = {
        "approx": ["approx", "--graph", str(graph), "--m", "4", "--alpha", "0.2", "--order", "3", "--format", "json"],
        "approx_csv": ["approx", "--gen", "gnp:10:0.5:7", "--m", "4", "--gamma", "0.5", "--order", "5", "--format", "csv"],
        "exact": ["exact", "--gen", "gnp:10:0.5:7", "--m", "4", "--gamma", "0.5"],
        "extract": ["extract", "--gen", "gnp:12:0.5:4", "--m", "4", "--gamma", "1"],
        "params": ["params", "--delta", "0.5", "--m", "10", "--gamma", "0.2"],
        "zeros": ZEROS_ARGS,
        "identity": ["check-identity", "--n", "4", "--m", "3", "--radius", "0.5", "--theta", "1.0472"],
        "sweep": ["sweep", "--n", "10", "--seeds", "0:20", "--m", "4", "--alpha", "0.2", "--orders", "1,2,3"],
    }
    for name, argv in invocations.items():
        blobs = []
        for run in (1, 2):
            out = tmp_path / f"{name}.{run}"
            extra = ["--threads", "1"] if "--threads" not in argv else []
            assert cli_main(argv + extra + ["--output", str(out)]) == 0, name
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1], name
        assert blobs[0], name
    return f"{len(invocations)} invocations"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
