"""Monte Carlo and exact-enumeration experiments.

* zero locations of ``h_W`` for random ±1 weight matrices versus the
  ``1/tau`` probability bound,
* the closed form of the second moment ``E |h_W(r e^{i theta})|^2``,
* convergence of the direct estimator against brute force.

Outputs carry no timing so that identical seeds give identical files.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import oracle
from .errors import BudgetExceededError, RootFindingError
from .graph import Graph, alpha_to_gamma, random_gnp
from .pipeline import ApproxConfig, approx_direct

IDENTITY_PAIR_LIMIT = 20


@dataclass
class ZeroExperimentRecord:
    trial_seed: int
    n: int
    m: int
    r_param: float
    tau: float
    min_root_modulus: float
    in_disc: bool
    converged: bool = True
    roots: list = field(default_factory=list)
    wall_time: float = 0.0


@dataclass
class ZeroExperimentSummary:
    n: int
    m: int
    r_param: float
    tau: float
    seed: int
    trials: int
    radius: float
    threshold_n: float
    above_threshold: bool
    in_disc: int
    failures: int
    frequency: float
    bound: float


def zero_threshold(m: int, r_param: float) -> float:
    """Smallest n for which the probability bound is proved: ``2 m^2 (1+r^2)^m + 2m``."""
    return 2 * m * m * (1 + r_param * r_param) ** m + 2 * m


def disc_radius(r_param: float, tau: float) -> float:
    return r_param / math.sqrt(2 * tau)


def random_sign_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    i, j = np.triu_indices(n, k=1)
    s = np.where(rng.random(len(i)) < 0.5, 1.0, -1.0)
    w = np.zeros((n, n))
    w[i, j] = s
    w[j, i] = s
    return w


def _one_trial(n, m, r_param, tau, seed, trial) -> ZeroExperimentRecord:
    start = time.perf_counter()
    rng = np.random.default_rng([seed, trial])
    w = random_sign_matrix(n, rng)
    coeffs = oracle.h_coeffs_exact(w, m)
    radius = disc_radius(r_param, tau)
    rec = ZeroExperimentRecord(trial, n, m, r_param, tau, math.inf, False)
    c = coeffs.coeffs
    if np.all(np.abs(c[1:]) < 1e-14):
        rec.wall_time = time.perf_counter() - start
        return rec  # constant polynomial: no roots
    try:
        roots = oracle.poly_roots(coeffs)
    except RootFindingError:
        rec.converged = False
        rec.min_root_modulus = math.nan
    else:
        mods = np.abs(roots)
        rec.min_root_modulus = float(mods.min())
        # roots exactly on the circle count as inside
        rec.in_disc = bool(rec.min_root_modulus <= radius)
        rec.roots = [complex(z) for z in roots[np.argsort(mods, kind="stable")]]
    rec.wall_time = time.perf_counter() - start
    return rec


def run_zero_experiment(
    n: int, m: int, r_param: float, tau: float, trials: int, seed: int, threads: int = 1
) -> tuple[list[ZeroExperimentRecord], ZeroExperimentSummary]:
    """Sample ±1 matrices, locate the smallest root of ``h_W``, count hits of
    the disc ``|z| < r/sqrt(2 tau)``. Trial ``t`` draws from a generator seeded
    by ``(seed, t)``, so results do not depend on ``threads``."""
    if not 2 <= m <= n:
        raise ValueError(f"need 2 <= m <= n, got n={n}, m={m}")
    if r_param <= 0 or tau <= 1:
        raise ValueError("need r > 0 and tau > 1")
    if math.comb(n, m) > oracle.H_SUBSET_BUDGET:
        raise BudgetExceededError(f"C({n},{m}) exceeds the subset budget {oracle.H_SUBSET_BUDGET}")
    args = [(n, m, r_param, tau, seed, t) for t in range(trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda a: _one_trial(*a), args))
    else:
        records = [_one_trial(*a) for a in args]
    ok = [r for r in records if r.converged]
    hits = sum(r.in_disc for r in ok)
    threshold = zero_threshold(m, r_param)
    summary = ZeroExperimentSummary(
        n=n,
        m=m,
        r_param=r_param,
        tau=tau,
        seed=seed,
        trials=trials,
        radius=disc_radius(r_param, tau),
        threshold_n=threshold,
        above_threshold=n >= threshold,
        in_disc=hits,
        failures=len(records) - len(ok),
        frequency=hits / len(ok) if ok else math.nan,
        bound=1 / tau,
    )
    return records, summary


def expectation_rhs(n: int, m: int, radius: float) -> float:
    """``C(n,m)^-2 sum_l C(n,l) C(n-l,m-l) C(n-m,m-l) (1+radius^2)^C(l,2)``."""
    total = sum(
        math.comb(n, l) * math.comb(n - l, m - l) * math.comb(n - m, m - l) * (1 + radius**2) ** math.comb(l, 2)
        for l in range(m + 1)
    )
    return total / math.comb(n, m) ** 2


def expectation_identity_check(n: int, m: int, radius: float, theta: float) -> tuple[float, float]:
    """Average of ``|h_W(radius e^{i theta})|^2`` over all ±1 sign patterns,
    next to its closed form."""
    pairs = math.comb(n, 2)
    if pairs > IDENTITY_PAIR_LIMIT:
        raise BudgetExceededError(f"2^{pairs} sign matrices exceed the enumeration limit 2^{IDENTITY_PAIR_LIMIT}")
    if not 2 <= m <= n:
        raise ValueError(f"need 2 <= m <= n, got n={n}, m={m}")
    z = radius * complex(math.cos(theta), math.sin(theta))
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=pairs)))  # (2^P, P)
    index = {p: k for k, p in enumerate(itertools.combinations(range(n), 2))}
    h = np.zeros(len(signs), dtype=np.complex128)
    for s in itertools.combinations(range(n), m):
        cols = [index[p] for p in itertools.combinations(s, 2)]
        h += np.prod(1 + z * signs[:, cols], axis=1)
    h /= math.comb(n, m)
    lhs = float(np.mean(np.abs(h) ** 2))
    return lhs, expectation_rhs(n, m, radius)


@dataclass
class SweepRecord:
    graph: str
    seed: int | None
    n: int
    m: int
    alpha: float
    order: int
    estimate: float
    oracle: float
    error: float
    status: str = "ok"


def make_graph(spec: dict) -> Graph:
    kind = spec.get("kind", "gnp")
    n = int(spec["n"])
    if kind == "gnp":
        return random_gnp(n, float(spec.get("p", 0.5)), int(spec["seed"]))
    if kind == "complete":
        return Graph.complete(n)
    if kind == "empty":
        return Graph.empty(n)
    raise ValueError(f"unknown graph kind {kind!r}")


def oracle_log_h1(g: Graph, m: int, alpha: float) -> float:
    """Exact ``ln h(1)`` for ``±alpha`` weights, via ``h(1) = (1-alpha)^C(m,2) den``."""
    return oracle.den_exact(g, m, alpha_to_gamma(alpha, m)) + math.comb(m, 2) * math.log1p(-alpha)


def convergence_sweep(grid: dict) -> list[SweepRecord]:
    """Direct-estimate error against brute force over a grid.

    ``grid`` has ``graphs`` (list of graph specs, or ``{"kind", "n", "p",
    "seeds": [...]}`` shorthands), ``m`` (list), ``alpha`` (list) and
    ``orders`` (list). A point whose oracle exceeds its budget is recorded
    with ``status = "budget"`` and the sweep continues.
    """
    specs = []
    for spec in grid["graphs"]:
        if "seeds" in spec:
            specs.extend({**{k: v for k, v in spec.items() if k != "seeds"}, "seed": s} for s in spec["seeds"])
        else:
            specs.append(spec)
    out = []
    for spec in specs:
        g = make_graph(spec)
        label = spec.get("kind", "gnp")
        for m in grid["m"]:
            for alpha in grid["alpha"]:
                try:
                    truth = oracle_log_h1(g, m, alpha)
                except BudgetExceededError:
                    truth = None
                for order in grid["orders"]:
                    seed = spec.get("seed")
                    if truth is None:
                        out.append(SweepRecord(label, seed, g.n, m, alpha, order, math.nan, math.nan, math.nan, "budget"))
                        continue
                    try:
                        est = approx_direct(g, ApproxConfig(m=m, alpha=alpha, order=order)).ln_h1
                    except BudgetExceededError:
                        out.append(SweepRecord(label, seed, g.n, m, alpha, order, math.nan, truth, math.nan, "budget"))
                        continue
                    out.append(SweepRecord(label, seed, g.n, m, alpha, order, est, truth, abs(est - truth)))
    return out


def _plain(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


def records_to_csv(records, exclude: tuple = ("roots", "wall_time")) -> str:
    """RFC-4180 CSV, header row first."""
    if not records:
        return ""
    names = [f.name for f in fields(records[0]) if f.name not in exclude]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(names)
    for rec in records:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in (getattr(rec, k) for k in names)])
    return buf.getvalue()


def records_to_json(records, summary=None, exclude: tuple = ("wall_time",)) -> str:
    rows = [{k: _plain(v) for k, v in asdict(r).items() if k not in exclude} for r in records]
    payload = {"records": rows}
    if summary is not None:
        payload["summary"] = {k: _plain(v) for k, v in asdict(summary).items()}
    return json.dumps(payload, indent=2)
