"""Derivatives at zero of the univariate partition polynomial

    h(z) = C(n,m)^-1 * sum_{|S|=m} prod_{pairs {i,j} in S} (1 + z w_ij).

Orders 1-3 have closed forms in terms of weighted counts of small connected
subgraphs (edges, cherries, triangles, stars, 3-paths). Any order can be
obtained by enumerating collections of distinct pairs, weighted by how many
m-subsets contain them.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError
from .graph import as_weight_matrix

DEFAULT_BUDGET = 10**8
_FRONTIER_LIMIT = 1 << 20


def default_budget() -> int:
    env = os.environ.get("DENSEPART_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class ConnectedSums:
    A1: complex
    B1: complex
    B2: complex
    C1: complex
    C2: complex
    C3: complex
    C4: complex
    C5: complex


@dataclass(frozen=True, eq=False)
class MomentVector:
    """``values[k]`` is the k-th derivative at 0; ``values[0] == 1``."""

    values: np.ndarray

    @property
    def order(self) -> int:
        return len(self.values) - 1


def _scalar(x):
    x = x.item() if hasattr(x, "item") else x
    return x


def connected_sums(w) -> ConnectedSums:
    """Weighted subgraph sums for a symmetric zero-diagonal weight matrix.

    Multiplicities follow the definitions exactly: A1, B1, C1 run over
    unordered pairs; B2 over a centre plus an unordered pair of leaves;
    C2 over ordered triples; C3 over unordered triangles; C4 over ordered
    4-tuples (so each 3-edge path is counted twice); C5 over an apex plus
    an unordered triple of leaves.
    """
    W = as_weight_matrix(w).entries
    s = W.sum(axis=1)  # row sums
    q = (W * W).sum(axis=1)
    c = (W * W * W).sum(axis=1)
    W2 = W @ W
    tr3 = np.trace(W2 @ W)
    A1 = W.sum() / 2
    B1 = q.sum() / 2
    # centre j, unordered {i, k}: e2 of row j
    B2 = ((s * s - q) / 2).sum()
    C1 = c.sum() / 2
    # (i, j, k): w_ij^2 * sum_{k != i} w_jk
    C2 = (q * s - c).sum()
    C3 = tr3 / 6
    # walks i-j-k-l minus those with i=k, j=l or i=l (inclusion-exclusion)
    C4 = s @ W @ s - 2 * (q * s).sum() - tr3 + c.sum()
    # apex i, unordered triple of leaves: e3 of row i
    C5 = ((s**3 - 3 * s * q + 2 * c) / 6).sum()
    return ConnectedSums(*(_scalar(v) for v in (A1, B1, B2, C1, C2, C3, C4, C5)))


def falling(x: int, k: int) -> int:
    """``x (x-1) ... (x-k+1)``; zero as soon as a factor is non-positive."""
    if x - k + 1 <= 0:
        return 0
    return math.perm(x, k)


def subset_ratio(n: int, m: int, k: int) -> float:
    """``m↓k / n↓k``: fraction of m-subsets containing a fixed k-set."""
    num = falling(m, k)
    return 0.0 if num == 0 else num / falling(n, k)


def h_derivatives_closed(w, m: int, order: int = 3) -> MomentVector:
    """``h^(k)(0)`` for ``k <= order <= 3`` from the connected sums."""
    W = as_weight_matrix(w)
    n = W.n
    if order > 3:
        raise ValueError("closed forms exist only up to order 3; use h_derivatives_enumerated")
    if order < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    if not 2 <= m <= n:
        raise ValueError(f"m must satisfy 2 <= m <= n={n}, got {m}")
    S = connected_sums(W)
    r2, r3, r4, r5, r6 = (subset_ratio(n, m, k) for k in (2, 3, 4, 5, 6))
    vals = [1.0, r2 * S.A1]
    if order >= 2:
        vals.append(2 * r3 * S.B2 + r4 * (S.A1**2 - 2 * S.B2 - S.B1))
    if order >= 3:
        vals.append(
            6 * r3 * S.C3
            + r4 * (6 * S.C5 + 3 * S.C4)
            + 6 * r5 * (S.A1 * S.B2 - 3 * S.C5 - 3 * S.C3 - S.C4 - S.C2)
            + r6
            * (
                S.A1**3
                + 12 * S.C3
                - 6 * S.A1 * S.B2
                + 12 * S.C5
                + 3 * S.C4
                + 6 * S.C2
                - 3 * S.A1 * S.B1
                + 2 * S.C1
            )
        )
    dtype = np.complex128 if W.is_complex else np.float64
    return MomentVector(np.array(vals, dtype=dtype))


def _log_ratio_table(n: int, m: int, max_nu: int) -> np.ndarray:
    """``C(n-nu, m-nu) / C(n, m)`` for ``nu = 0 .. max_nu`` via log-gamma."""
    out = np.zeros(max_nu + 1)
    for nu in range(max_nu + 1):
        if nu > m:
            continue
        lr = math.lgamma(n - nu + 1) - math.lgamma(n + 1) + math.lgamma(m + 1) - math.lgamma(m - nu + 1)
        out[nu] = math.exp(lr)
    return out


def collection_sums(ends: np.ndarray, weights: np.ndarray, k_max: int, max_nu: int) -> np.ndarray:
    """Sum of weight products over unordered collections of distinct items.

    ``ends[e]`` lists the two vertices an item covers (a vertex item uses the
    same vertex twice). Returns ``out[d, nu]``: the sum over d-subsets of
    items covering exactly ``nu`` distinct vertices. Work proceeds depth-first
    over fixed-size frontier chunks, so the reduction order is deterministic.
    """
    n_items = len(weights)
    is_complex = np.iscomplexobj(weights)
    out = np.zeros((k_max + 1, max_nu + 1), dtype=np.complex128 if is_complex else np.float64)
    out[0, 0] = 1
    if n_items == 0 or k_max == 0:
        return out
    ends = np.asarray(ends, dtype=np.int64)

    def accumulate(d, cov, prod):
        srt = np.sort(cov, axis=1)
        nu = 1 + np.count_nonzero(np.diff(srt, axis=1), axis=1)
        if is_complex:
            out[d] += np.bincount(nu, prod.real, minlength=max_nu + 1)[: max_nu + 1]
            out[d] += 1j * np.bincount(nu, prod.imag, minlength=max_nu + 1)[: max_nu + 1]
        else:
            out[d] += np.bincount(nu, prod, minlength=max_nu + 1)[: max_nu + 1]

    def expand(d, last, cov, prod):
        accumulate(d, cov, prod)
        if d == k_max:
            return
        counts = n_items - 1 - last
        cum = np.cumsum(counts)
        start = 0
        while start < len(last):
            # take parents until the child frontier reaches the limit
            base = cum[start - 1] if start else 0
            stop = int(np.searchsorted(cum, base + _FRONTIER_LIMIT, side="right"))
            stop = max(stop, start + 1)
            c = counts[start:stop]
            total = int(c.sum())
            if total:
                parent = np.repeat(np.arange(start, stop), c)
                offset = np.arange(total) - np.repeat(np.cumsum(c) - c, c)
                child = last[parent] + 1 + offset
                expand(
                    d + 1,
                    child,
                    np.concatenate([cov[parent], ends[child]], axis=1),
                    prod[parent] * weights[child],
                )
            start = stop

    expand(1, np.arange(n_items), ends.copy(), np.asarray(weights).copy())
    return out


def _check_collection_budget(n_items: int, k_max: int, budget: int) -> int:
    work = sum(math.comb(n_items, d) for d in range(1, k_max + 1))
    if work > budget:
        raise BudgetExceededError(
            f"order {k_max} needs {work} weighted products over {n_items} pairs (budget {budget}); "
            "reduce the order or the graph size"
        )
    return work


def h_derivatives_enumerated(w, m: int, k_max: int, budget: int | None = None) -> MomentVector:
    """``h^(k)(0)`` for ``k = 0 .. k_max`` by enumerating collections of pairs.

    ``h^(k)(0) = k! * sum_I C(n - nu(I), m - nu(I)) / C(n, m) * prod_{e in I} w_e``
    over unordered k-sets I of distinct nonzero-weight pairs, nu(I) being
    the number of vertices they cover.
    """
    W = as_weight_matrix(w)
    n = W.n
    if k_max < 1:
        raise ValueError(f"k_max must be at least 1, got {k_max}")
    if not 2 <= m <= n:
        raise ValueError(f"m must satisfy 2 <= m <= n={n}, got {m}")
    budget = default_budget() if budget is None else budget
    iu, ju = np.triu_indices(n, k=1)
    wt = W.entries[iu, ju]
    keep = wt != 0
    ends = np.stack([iu[keep], ju[keep]], axis=1)
    wt = wt[keep]
    _check_collection_budget(len(wt), k_max, budget)
    max_nu = min(2 * k_max, n)
    sums = collection_sums(ends, wt, k_max, max_nu)
    ratio = _log_ratio_table(n, m, max_nu)
    vals = np.array([math.factorial(d) * (sums[d] * ratio).sum() for d in range(k_max + 1)])
    vals[0] = 1
    return MomentVector(vals.astype(sums.dtype))


def restricted_h_derivatives(w, m: int, omega, k_max: int, budget: int | None = None):
    """Derivatives at 0 of the conditional polynomial given ``omega ⊂ S``.

    With ``S = omega ∪ T`` the product over pairs of S splits into a constant
    (pairs inside omega), a per-vertex factor ``x_j = prod_{i in omega}(1 + w_ij) - 1``
    for ``j`` in T, and the pairs inside T. Scaling every factor by z gives

        h_omega(z) = C(R, t)^-1 sum_{|T|=t} prod_{j in T} (1 + z x_j) prod_{pairs in T} (1 + z w_jl)

    with ``R = n - |omega|`` and ``t = m - |omega|``; its derivatives come
    from the same collection enumeration with vertex items covering one
    vertex. Returns ``(MomentVector, log_const)`` where ``log_const`` is the
    log of the constant factor from the pairs inside ``omega``.
    """
    W = as_weight_matrix(w).entries
    n = W.shape[0]
    omega = sorted(set(int(v) for v in omega))
    budget = default_budget() if budget is None else budget
    rest = np.array([v for v in range(n) if v not in set(omega)], dtype=np.int64)
    R, t = len(rest), m - len(omega)
    if t < 0:
        raise ValueError("omega larger than m")
    fixed = np.array(omega, dtype=np.int64)
    log_const = 0.0
    if len(fixed) >= 2:
        a, b = np.triu_indices(len(fixed), k=1)
        log_const = float(np.log1p(W[fixed[a], fixed[b]]).sum())
    x = np.prod(1 + W[np.ix_(rest, fixed)], axis=1) - 1 if len(fixed) else np.zeros(R)
    local = np.arange(R)
    iu, ju = np.triu_indices(R, k=1)
    ends = np.concatenate([np.stack([local, local], 1), np.stack([iu, ju], 1)])
    wt = np.concatenate([x, W[rest[iu], rest[ju]]])
    keep = wt != 0
    ends, wt = ends[keep], wt[keep]
    _check_collection_budget(len(wt), k_max, budget)
    max_nu = min(2 * k_max, R)
    sums = collection_sums(ends, wt, k_max, max_nu)
    ratio = _log_ratio_table(R, t, max_nu)
    vals = np.array([math.factorial(d) * (sums[d] * ratio).sum() for d in range(k_max + 1)])
    vals[0] = 1
    return MomentVector(vals), log_const
