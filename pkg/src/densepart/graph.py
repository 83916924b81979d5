"""Graphs, subset densities and the edge-weight matrices built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import DuplicateEdgeError, LoopEdgeError, MalformedLineError, VertexRangeError

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0 .. n-1``.

    ``edges`` holds pairs ``(i, j)`` with ``i < j``. Use :meth:`from_edges`
    to build one from arbitrary pairs.
    """

    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex count must be positive, got {self.n}")
        for i, j in self.edges:
            if not (0 <= i < j < self.n):
                raise ValueError(f"invalid edge ({i}, {j}) for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Graph":
        edges = set()
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            edges.add((min(u, v), max(u, v)))
        return cls(n, frozenset(edges))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, frozenset())

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple:
        """Per-vertex neighbour bitsets (bit ``j`` of entry ``i`` set iff ``{i,j}`` is an edge)."""
        bits = [0] * self.n
        for i, j in self.edges:
            bits[i] |= 1 << j
            bits[j] |= 1 << i
        return tuple(bits)

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        if self.edges:
            idx = np.array(sorted(self.edges), dtype=np.int64)
            a[idx[:, 0], idx[:, 1]] = True
            a[idx[:, 1], idx[:, 0]] = True
        a.setflags(write=False)
        return a

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i] >> j & 1)

    def complement(self) -> "Graph":
        return Graph(
            self.n,
            frozenset(
                (i, j) for i in range(self.n) for j in range(i + 1, self.n) if (i, j) not in self.edges
            ),
        )

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of range(n)")
        return Graph.from_edges(self.n, ((perm[i], perm[j]) for i, j in self.edges))

    def to_edge_list(self) -> str:
        """Canonical 1-based edge-list text (edges sorted lexicographically)."""
        lines = [f"{self.n} {self.num_edges}"]
        lines.extend(f"{i + 1} {j + 1}" for i, j in sorted(self.edges))
        return "\n".join(lines) + "\n"


def parse_edge_list(text: str | TextIO) -> Graph:
    """Parse the 1-based edge-list format.

    The first non-comment line is ``n m_edges``; each following line is
    ``u v``. Blank lines and lines starting with ``#`` are skipped. The
    number of edge lines must equal ``m_edges``.
    """
    if not isinstance(text, str):
        text = text.read()
    n = None
    expected = 0
    header_line = 0
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLineError(lineno, f"expected two integers, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLineError(lineno, f"expected two integers, got {line!r}") from None
        if n is None:
            if a < 1 or b < 0:
                raise MalformedLineError(lineno, f"bad header {line!r}: need n >= 1 and m_edges >= 0")
            n, expected, header_line = a, b, lineno
            continue
        for v in (a, b):
            if not 1 <= v <= n:
                raise VertexRangeError(lineno, f"vertex {v} out of range [1, {n}]")
        if a == b:
            raise LoopEdgeError(lineno, f"loop edge at vertex {a}")
        key = (min(a, b) - 1, max(a, b) - 1)
        if key in seen:
            raise DuplicateEdgeError(lineno, f"edge {a} {b} duplicates line {seen[key]}")
        seen[key] = lineno
    if n is None:
        raise MalformedLineError(0, "missing 'n m_edges' header")
    if len(seen) != expected:
        raise MalformedLineError(header_line, f"header declares {expected} edges, found {len(seen)}")
    return Graph(n, frozenset(seen))


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = x + np.uint64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def pair_uniforms(n: int, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Uniform [0, 1) draw for every pair ``i < j``, keyed only by ``(seed, i, j)``.

    Returns ``(i, j, u)`` arrays in lexicographic pair order.
    """
    i, j = np.triu_indices(n, k=1)
    i = i.astype(np.uint64)
    j = j.astype(np.uint64)
    key = _splitmix64(np.full(i.shape, seed & _MASK64, dtype=np.uint64))
    key = _splitmix64(key ^ i)
    key = _splitmix64(key ^ j)
    u = (key >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return i.astype(np.int64), j.astype(np.int64), u


def random_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi graph; each pair is an edge with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    i, j, u = pair_uniforms(n, seed)
    keep = u < p
    return Graph(n, frozenset(zip(i[keep].tolist(), j[keep].tolist())))


@dataclass(frozen=True)
class SubsetDensity:
    subset: tuple
    edges_spanned: int
    sigma: Fraction

    @property
    def value(self) -> float:
        return float(self.sigma)


def density(g: Graph, subset: Iterable[int]) -> SubsetDensity:
    """Fraction of the pairs of ``subset`` that are edges of ``g`` (exact)."""
    s = sorted(int(v) for v in subset)
    if len(set(s)) != len(s):
        raise ValueError("subset has duplicate vertices")
    if len(s) < 2:
        raise ValueError("subset needs at least two vertices")
    if s[0] < 0 or s[-1] >= g.n:
        raise ValueError("subset vertex out of range")
    mask = 0
    for v in s:
        mask |= 1 << v
    spanned = sum((g.adjacency[v] & mask).bit_count() for v in s) // 2
    return SubsetDensity(tuple(s), spanned, Fraction(spanned, math.comb(len(s), 2)))


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Symmetric zero-diagonal matrix of edge weights.

    ``provenance`` is ``"from_gamma"``, ``"from_alpha"`` or ``"raw"``.
    """

    entries: np.ndarray
    provenance: str = "raw"

    def __post_init__(self):
        w = np.array(self.entries, copy=True)
        if w.dtype.kind not in "fc":
            w = w.astype(np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        if np.any(np.diagonal(w) != 0):
            raise ValueError("weight matrix must have zero diagonal")
        if not np.array_equal(w, w.T):
            raise ValueError("weight matrix must be symmetric")
        w.setflags(write=False)
        object.__setattr__(self, "entries", w)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_complex(self) -> bool:
        return self.entries.dtype.kind == "c"

    def __neg__(self) -> "WeightMatrix":
        return WeightMatrix(-self.entries, "raw")

    def permuted(self, perm: Sequence[int]) -> "WeightMatrix":
        """Simultaneous row/column relabelling: vertex ``v`` becomes ``perm[v]``."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return WeightMatrix(self.entries[np.ix_(inv, inv)], self.provenance)


def as_weight_matrix(w) -> WeightMatrix:
    return w if isinstance(w, WeightMatrix) else WeightMatrix(np.asarray(w), "raw")


def _signed_matrix(g: Graph, on_edge: float, off_edge: float) -> np.ndarray:
    w = np.where(g.adjacency_matrix, on_edge, off_edge).astype(np.float64)
    np.fill_diagonal(w, 0.0)
    return w


def weights_from_gamma(g: Graph, m: int, gamma: float) -> WeightMatrix:
    """``exp(±gamma/(m-1)) - 1`` on edges / non-edges.

    ``gamma = 0`` is accepted (all-zero matrix) for degenerate checks.
    """
    if not 2 <= m <= g.n:
        raise ValueError(f"m must satisfy 2 <= m <= n={g.n}, got {m}")
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    t = gamma / (m - 1)
    return WeightMatrix(_signed_matrix(g, math.expm1(t), math.expm1(-t)), "from_gamma")


def weights_from_alpha(g: Graph, alpha: float) -> WeightMatrix:
    """``+alpha`` on edges, ``-alpha`` on non-edges."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return WeightMatrix(_signed_matrix(g, alpha, -alpha), "from_alpha")


def alpha_to_gamma(alpha: float, m: int) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    # (m-1)/2 * ln((1+a)/(1-a)) == (m-1) * atanh(a)
    return (m - 1) * math.atanh(alpha)


def gamma_to_alpha(gamma: float, m: int) -> float:
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    return math.tanh(gamma / (m - 1))


def gamma_alpha_convert(value: float, m: int, direction: str) -> float:
    """Convert between the tilt ``gamma`` and the edge weight ``alpha``.

    ``direction`` is ``"alpha_to_gamma"`` or ``"gamma_to_alpha"``.
    """
    if direction == "alpha_to_gamma":
        return alpha_to_gamma(value, m)
    if direction == "gamma_to_alpha":
        return gamma_to_alpha(value, m)
    raise ValueError(f"unknown direction {direction!r}")
