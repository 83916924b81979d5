"""Truncated power series: log transform, Taylor evaluation, the strip-mapping
polynomial phi, and truncated composition by Horner's scheme."""

from __future__ import annotations

import cmath
import decimal
import math
from dataclasses import dataclass

import numpy as np

from .moments import MomentVector

# Largest phi degree whose coefficients are ever materialised in full.
PHI_MATERIALIZE_LIMIT = 10**7
PHI_MIN_RHO = 0.05


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Coefficients ``c_0 .. c_r`` of a series truncated after ``z^r``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, copy=True)
        if c.dtype.kind not in "fc":
            c = c.astype(np.float64)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("series needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def r(self) -> int:
        return len(self.coeffs) - 1

    def truncate(self, r: int) -> "TruncatedSeries":
        c = np.zeros(r + 1, dtype=self.coeffs.dtype)
        k = min(r, self.r) + 1
        c[:k] = self.coeffs[:k]
        return TruncatedSeries(c)

    @classmethod
    def from_derivatives(cls, moments: MomentVector) -> "TruncatedSeries":
        vals = np.asarray(moments.values)
        fact = np.array([math.factorial(k) for k in range(len(vals))], dtype=np.float64)
        return cls(vals / fact)

    def derivatives(self) -> np.ndarray:
        fact = np.array([math.factorial(k) for k in range(self.r + 1)], dtype=np.float64)
        return self.coeffs * fact


def _mul_trunc(a: np.ndarray, b: np.ndarray, r: int) -> np.ndarray:
    return np.convolve(a[: r + 1], b[: r + 1])[: r + 1]


def log_series(g: TruncatedSeries) -> TruncatedSeries:
    """Taylor coefficients of ``ln g`` from those of ``g`` (principal branch at 0).

    Solves ``g' = f' g`` order by order: with ``g = sum a_k z^k`` and
    ``f = sum b_k z^k``, ``k a_k = sum_{j=1..k} j b_j a_{k-j}``.
    """
    a = g.coeffs
    if a[0] == 0:
        raise ValueError("g(0) = 0: logarithm undefined at the expansion point")
    complex_mode = a.dtype.kind == "c" or a[0].real < 0
    dtype = np.complex128 if complex_mode else np.float64
    a = a.astype(dtype)
    b = np.zeros_like(a)
    b[0] = cmath.log(a[0]) if complex_mode else math.log(a[0])
    for k in range(1, len(a)):
        j = np.arange(1, k)
        acc = k * a[k] - np.dot(j * b[1:k], a[k - 1 : 0 : -1]) if k > 1 else k * a[k]
        b[k] = acc / (k * a[0])
    return TruncatedSeries(b)


def exp_series(f: TruncatedSeries) -> TruncatedSeries:
    """Inverse of :func:`log_series`: coefficients of ``exp f``."""
    b = f.coeffs
    a = np.zeros_like(b)
    a[0] = np.exp(b[0])
    for k in range(1, len(b)):
        j = np.arange(1, k + 1)
        a[k] = np.dot(j * b[1 : k + 1], a[k - 1 :: -1][:k]) / k
    return TruncatedSeries(a)


def log_from_derivatives(g_derivs: MomentVector) -> TruncatedSeries:
    """Taylor coefficients ``f^(k)(0)/k!`` of ``f = ln g`` given ``g^(k)(0)``."""
    return log_series(TruncatedSeries.from_derivatives(g_derivs))


def taylor_eval(f_coeffs: TruncatedSeries, at):
    """Horner evaluation of ``sum c_k at^k``."""
    out = 0
    for c in f_coeffs.coeffs[::-1]:
        out = out * at + c
    return out.item() if hasattr(out, "item") else out


def lemma_log_bound(log_degree: float, log_beta: float, log_beta_minus_one: float, r: int) -> float:
    """Natural log of ``deg / (beta^r (beta - 1) (r + 1))``."""
    return log_degree - r * log_beta - log_beta_minus_one - math.log(r + 1)


def choose_r_log(log_degree: float, log_beta: float, log_beta_minus_one: float, log_eps: float) -> int:
    """Smallest ``r >= 0`` meeting the Taylor error bound, everything in log scale.

    Works when ``beta - 1`` is far below double resolution, where ``r`` can
    be astronomically large (the result is then a Python int).
    """
    if log_beta <= 0:
        raise ValueError("beta must exceed 1")

    def ok(r):
        return lemma_log_bound(log_degree, log_beta, log_beta_minus_one, r) <= log_eps

    if ok(0):
        return 0
    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2  # ok(lo) is False
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def choose_r(poly_degree: int, beta: float, eps: float) -> int:
    """Smallest ``r`` with ``poly_degree / (beta^r (beta-1) (r+1)) <= eps``."""
    if not beta > 1:
        raise ValueError(f"beta must exceed 1, got {beta}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return choose_r_log(math.log(poly_degree), math.log(beta), math.log(beta - 1), math.log(eps))


@dataclass(frozen=True)
class PhiPolynomial:
    """``phi(z) = sigma^-1 * sum_{k=1..N} (alpha z)^k / k``.

    Maps the disc ``|z| <= beta`` into a thin strip around ``[0, 1]`` with
    ``phi(0) = 0`` and ``phi(1) = 1``. ``beta_minus_one`` and ``log_beta``
    are kept separately because for small ``rho`` the gap ``beta - 1`` is
    below double resolution. ``N`` is a Python int and may be huge; only
    truncations are materialised in that case.
    """

    rho: float
    alpha_phi: float
    beta: float
    beta_minus_one: float
    log_beta: float
    N: int
    sigma_phi: float

    @property
    def log_beta_minus_one(self) -> float:
        return _log_beta_minus_one(self.rho)

    def truncated(self, r: int) -> TruncatedSeries:
        """Coefficients of ``phi`` up to ``z^r`` (zero past degree N)."""
        c = np.zeros(r + 1)
        k = np.arange(1, min(r, self.N) + 1)
        c[1 : len(k) + 1] = self.alpha_phi**k / (k * self.sigma_phi)
        return TruncatedSeries(c)

    @property
    def coeffs(self) -> np.ndarray:
        if self.N > PHI_MATERIALIZE_LIMIT:
            raise OverflowError(f"phi has degree {self.N}; only truncations are available")
        return self.truncated(self.N).coeffs

    def __call__(self, z):
        z = np.asarray(z)
        out = np.zeros(z.shape, dtype=np.result_type(z, np.float64))
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out


def _log_beta_minus_one(rho: float) -> float:
    # beta - 1 = e^{-1/rho} (1 - e^{-1}) / (1 - e^{-1/rho})
    return -1.0 / rho + math.log(-math.expm1(-1.0)) - math.log(-math.expm1(-1.0 / rho))


def _phi_degree(inv_rho: float) -> int:
    log_n = math.log1p(inv_rho) + 1.0 + inv_rho
    if log_n < 36:
        return math.floor((1.0 + inv_rho) * math.exp(1.0 + inv_rho))
    # beyond 2^53 a float floor is not the integer floor
    with decimal.localcontext() as ctx:
        ctx.prec = int(log_n / 2.3) + 30
        x = decimal.Decimal(inv_rho) + 1
        return int((x * x.exp()).to_integral_value(rounding=decimal.ROUND_FLOOR))


def build_phi(rho: float, *, lazy: bool = False) -> PhiPolynomial:
    """Construct the strip-mapping polynomial for ``0 < rho <= 1``.

    ``rho = 1`` is allowed for testing. Below ``rho = 0.05`` the degree
    ``N ~ (1/rho) e^{1/rho}`` is beyond any use of the full polynomial and
    the call is rejected unless ``lazy=True``, in which case only
    truncations are available and ``sigma`` is taken from its closed-form
    limit ``1/rho`` (the neglected tail is below double resolution).
    """
    if not 0 < rho <= 1:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    if rho < PHI_MIN_RHO and not lazy:
        raise OverflowError(
            f"rho={rho} < {PHI_MIN_RHO}: phi would have degree ~{(1 + 1 / rho) * math.exp(1 + 1 / rho):.3e}; "
            "pass lazy=True to work with truncations only"
        )
    inv = 1.0 / rho
    alpha_phi = -math.expm1(-inv)
    log_bm1 = _log_beta_minus_one(rho)
    beta_minus_one = math.exp(log_bm1)
    log_beta = math.log1p(beta_minus_one)
    beta = 1.0 + beta_minus_one
    if log_bm1 < -700:
        raise OverflowError(f"rho={rho} is too small: beta - 1 underflows double precision")
    N = _phi_degree(inv)
    if N <= PHI_MATERIALIZE_LIMIT:
        k = np.arange(1, N + 1)
        sigma = float(np.sum(alpha_phi**k / k))
    else:
        # sum_{k>N} alpha^k/k <= alpha^{N+1} / ((N+1)(1-alpha)), which is
        # about exp(-e(1+1/rho)) here: far below one ulp of 1/rho.
        sigma = inv
    return PhiPolynomial(rho, alpha_phi, beta, beta_minus_one, log_beta, N, sigma)


def truncated_compose(outer: TruncatedSeries, inner: TruncatedSeries, r: int) -> TruncatedSeries:
    """Coefficients ``0..r`` of ``outer(inner(z))`` by Horner's scheme.

    ``inner`` must vanish at 0. Monomials above ``z^r`` are dropped after
    every multiplication, so the cost is O(r^3).
    """
    if inner.coeffs[0] != 0:
        raise ValueError("inner series must have zero constant term")
    b = outer.truncate(r).coeffs
    p = inner.truncate(r).coeffs
    acc = np.zeros(r + 1, dtype=np.result_type(b, p))
    acc[0] = b[r]
    for k in range(r - 1, -1, -1):
        acc = _mul_trunc(acc, p, r)
        acc[0] += b[k]
    return TruncatedSeries(acc)
