"""Brute-force reference computations by enumerating every m-subset.

Everything here is exponential in ``m`` and guarded by explicit budgets;
these functions are the ground truth the fast paths are tested against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import BudgetExceededError, RootFindingError
from .graph import Graph, as_weight_matrix

SUBSET_BUDGET = 10**7
H_SUBSET_BUDGET = 10**6
CHUNK = 1 << 16
_CACHE_LIMIT = 2 * 10**6


@dataclass(frozen=True)
class RestrictedIndex:
    """Sorted set ``omega`` of vertices forced into every subset."""

    omega: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(sorted(set(int(v) for v in self.omega))))

    def __len__(self) -> int:
        return len(self.omega)


@dataclass(frozen=True, eq=False)
class PolyCoeffs:
    """Coefficients ``c_0 .. c_d`` in ascending order."""

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        out = 0
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out


def _check_budget(count: int, budget: int, what: str) -> None:
    if count > budget:
        raise BudgetExceededError(f"{what}: {count} subsets exceeds budget {budget}")


@lru_cache(maxsize=8)
def _all_subsets(n: int, k: int) -> np.ndarray:
    total = math.comb(n, k)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)), dtype=np.int64, count=total * k
    )
    arr = flat.reshape(total, k)
    arr.setflags(write=False)
    return arr


def subset_chunks(pool: Iterable[int], k: int, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """Lexicographic k-subsets of ``pool`` as ``(rows, k)`` arrays, in fixed-size chunks."""
    pool = np.asarray(list(pool), dtype=np.int64)
    total = math.comb(len(pool), k)
    if total == 0:
        return
    if k == 0:
        yield np.zeros((1, 0), dtype=np.int64)
        return
    if total <= _CACHE_LIMIT:
        idx = _all_subsets(len(pool), k)
        for start in range(0, total, chunk):
            yield pool[idx[start : start + chunk]]
        return
    combos = itertools.combinations(range(len(pool)), k)
    while True:
        block = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(combos, chunk)), dtype=np.int64
        )
        if block.size == 0:
            return
        yield pool[block.reshape(-1, k)]


def _pair_columns(k: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.triu_indices(k, k=1)
    return a, b


def edge_count_histogram(g: Graph, m: int, omega: Iterable[int] = ()) -> np.ndarray:
    """Number of m-subsets ``S ⊇ omega`` spanning exactly ``e`` edges, for ``e = 0 .. C(m,2)``."""
    omega = RestrictedIndex(tuple(omega)).omega
    hist = np.zeros(math.comb(m, 2) + 1, dtype=np.int64)
    if len(omega) > m:
        return hist
    adj = g.adjacency_matrix.astype(np.int64)
    fixed = np.array(omega, dtype=np.int64)
    rest = [v for v in range(g.n) if v not in set(omega)]
    t = m - len(omega)
    base = int(adj[np.ix_(fixed, fixed)].sum() // 2) if len(fixed) else 0
    to_fixed = adj[:, fixed].sum(axis=1) if len(fixed) else np.zeros(g.n, dtype=np.int64)
    a, b = _pair_columns(t)
    for block in subset_chunks(rest, t):
        counts = base + to_fixed[block].sum(axis=1)
        if t >= 2:
            counts = counts + adj[block[:, a], block[:, b]].sum(axis=1)
        hist += np.bincount(counts, minlength=len(hist))
    return hist


def _log_weighted_count(hist: np.ndarray, slope: float) -> float:
    """``ln sum_e hist[e] * exp(slope * e)`` anchored at the largest exponent."""
    nz = np.nonzero(hist)[0]
    if nz.size == 0:
        return -math.inf
    logs = np.log(hist[nz].astype(np.float64)) + slope * nz
    top = logs.max()
    return float(top + math.log(np.exp(logs - top).sum()))


def den_exact(g: Graph, m: int, gamma: float, budget: int = SUBSET_BUDGET) -> float:
    """Natural log of the density partition function, by full enumeration."""
    if not 2 <= m <= g.n:
        raise ValueError(f"m must satisfy 2 <= m <= n={g.n}, got {m}")
    _check_budget(math.comb(g.n, m), budget, "den_exact")
    hist = edge_count_histogram(g, m)
    slope = gamma * m / math.comb(m, 2)
    return _log_weighted_count(hist, slope) - math.log(math.comb(g.n, m))


def log_restricted_den(g: Graph, m: int, gamma: float, omega: Iterable[int]) -> float:
    """``ln sum_{|S|=m, S ⊇ omega} exp(gamma * m * sigma(S))`` (unnormalised)."""
    hist = edge_count_histogram(g, m, omega)
    return _log_weighted_count(hist, gamma * m / math.comb(m, 2))


def pm_exact(z_matrix, m: int, omega: RestrictedIndex | Iterable[int] = (), budget: int = SUBSET_BUDGET) -> complex:
    """Sum over m-subsets ``S ⊇ omega`` of ``exp(sum of z_ij over pairs in S)``.

    Returns 0 when ``|omega| > m``.
    """
    z = as_weight_matrix(z_matrix).entries.astype(np.complex128)
    n = z.shape[0]
    if not isinstance(omega, RestrictedIndex):
        omega = RestrictedIndex(tuple(omega))
    fixed = np.array(omega.omega, dtype=np.int64)
    if len(fixed) > m:
        return 0j
    if len(fixed) and (fixed[0] < 0 or fixed[-1] >= n):
        raise ValueError("omega vertex out of range")
    rest = [v for v in range(n) if v not in set(omega.omega)]
    t = m - len(fixed)
    _check_budget(math.comb(len(rest), t), budget, "pm_exact")
    base = z[np.ix_(fixed, fixed)].sum() / 2 if len(fixed) else 0j
    to_fixed = z[:, fixed].sum(axis=1) if len(fixed) else np.zeros(n, dtype=np.complex128)
    a, b = _pair_columns(t)
    exponents = []
    for block in subset_chunks(rest, t):
        s = base + to_fixed[block].sum(axis=1)
        if t >= 2:
            s = s + z[block[:, a], block[:, b]].sum(axis=1)
        exponents.append(s)
    if not exponents:
        return 0j
    x = np.concatenate(exponents)
    top = x.real.max()
    return complex(math.exp(top) * np.exp(x - top).sum())


def _elementary_symmetric(values: np.ndarray) -> np.ndarray:
    """Row-wise coefficients of ``prod_p (1 + z * values[:, p])``."""
    rows, p = values.shape
    e = np.zeros((rows, p + 1), dtype=values.dtype)
    e[:, 0] = 1
    for col in range(p):
        v = values[:, col : col + 1]
        e[:, 1 : col + 2] = e[:, 1 : col + 2] + v * e[:, : col + 1]
    return e


def h_coeffs_exact(w, m: int, budget: int = H_SUBSET_BUDGET) -> PolyCoeffs:
    """Coefficients of ``h(z) = C(n,m)^-1 sum_S prod_{pairs in S} (1 + z w_ij)``."""
    w = as_weight_matrix(w).entries
    n = w.shape[0]
    if not 2 <= m <= n:
        raise ValueError(f"m must satisfy 2 <= m <= n={n}, got {m}")
    _check_budget(math.comb(n, m), budget, "h_coeffs_exact")
    if math.comb(m, 2) > 64:
        raise BudgetExceededError(f"degree C({m},2) exceeds 64")
    a, b = _pair_columns(m)
    total = np.zeros(math.comb(m, 2) + 1, dtype=w.dtype)
    for block in subset_chunks(range(n), m):
        total += _elementary_symmetric(w[block[:, a], block[:, b]]).sum(axis=0)
    return PolyCoeffs(total / math.comb(n, m))


def poly_roots(p: PolyCoeffs | np.ndarray, max_polish: int = 8) -> np.ndarray:
    """All complex roots of ``sum c_k z^k`` (ascending coefficients).

    Companion-matrix eigenvalues followed by a few Newton steps per root.
    Every root must satisfy ``|p(root)| <= 1e-8 * max|c_k|``.
    """
    c = np.asarray(p.coeffs if isinstance(p, PolyCoeffs) else p, dtype=np.complex128)
    nz = np.nonzero(np.abs(c) >= 1e-14)[0]
    if nz.size == 0 or nz[-1] < 1:
        raise ValueError("polynomial must have degree >= 1")
    c = c[: nz[-1] + 1]
    scale = np.abs(c).max()
    desc = c[::-1]
    roots = np.roots(desc)
    dp = np.polyder(desc)
    for _ in range(max_polish):
        val = np.polyval(desc, roots)
        der = np.polyval(dp, roots)
        ok = np.abs(der) > 0
        step = np.zeros_like(roots)
        step[ok] = val[ok] / der[ok]
        trial = roots - step
        better = np.abs(np.polyval(desc, trial)) < np.abs(val)
        roots = np.where(better, trial, roots)
    residual = np.abs(np.polyval(desc, roots))
    bad = residual > 1e-8 * scale
    if np.any(bad) or not np.all(np.isfinite(roots)):
        raise RootFindingError(
            f"{int(bad.sum())} of {len(roots)} roots miss the residual bound (max {residual.max():.3e})"
        )
    return roots
