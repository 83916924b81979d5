"""Explicit parameters for the zero-free region of the multivariate partition
function, and the strip half-width ``rho`` used by the interpolation method.

Only existence of these constants is guaranteed mathematically; the slack
split below (tenths, doubling of the ratio bound, 10% margin on omega) is
one admissible, deterministic choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .graph import as_weight_matrix

OMEGA_MARGIN = 1.1


@dataclass(frozen=True)
class ZeroFreeParams:
    delta: float
    theta: float
    eta: float
    lam: float
    omega: float
    m: int
    rho: float | None = None

    def min_n(self) -> int:
        """Smallest vertex count the guarantee covers for this ``m``."""
        return math.ceil(self.omega * self.m)

    def angle_budget(self, n: int) -> float:
        """``2 delta tan(theta/2) + 5 eta + 10 delta lam m / (n-1)``; must stay <= theta."""
        return 2 * self.delta * math.tan(self.theta / 2) + 5 * self.eta + self._drift(n)

    def ratio_budget(self, n: int) -> float:
        """``exp(6 delta + 10 delta lam m / (n-1))``; must stay <= lam."""
        return math.exp(6 * self.delta + self._drift(n))

    def _drift(self, n: int) -> float:
        return 10 * self.delta * self.lam * self.m / (n - 1)

    def check(self, n: int) -> dict:
        """Truth value of each of the four defining inequalities at ``n``."""
        base = 2 * self.delta * math.tan(self.theta / 2)
        return {
            "angle_strict": base + 5 * self.eta < self.theta,
            "lambda_lower": self.lam > math.exp(6 * self.delta),
            "angle_budget": self.angle_budget(n) <= self.theta,
            "ratio_budget": self.ratio_budget(n) <= self.lam,
        }


def _angle_slack(delta: float, theta: float) -> float:
    return theta - 2 * delta * math.tan(theta / 2)


def feasible_theta_limit(delta: float, tol: float = 1e-15) -> float:
    """Right end of ``{theta in (0, pi/2): 2 delta tan(theta/2) < theta}``.

    The slack is concave and positive near 0, so the feasible set is an
    interval starting at 0; its right end is found by bisection.
    """
    hi = math.pi / 2
    if _angle_slack(delta, hi) > 0:
        return hi
    lo = 1e-12
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _angle_slack(delta, mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo


def solve_params(delta: float, m: int) -> ZeroFreeParams:
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if m < 4:
        raise ValueError(f"m must be at least 4, got {m}")
    theta = feasible_theta_limit(delta) / 2
    slack = _angle_slack(delta, theta)
    eta = slack / 10
    lam = 2 * math.exp(6 * delta)
    # n - 1 >= 10 delta lam m / budget for each inequality
    angle_room = slack - 5 * eta
    ratio_room = math.log(lam) - 6 * delta
    n_req = 1 + 10 * delta * lam * m / min(angle_room, ratio_room)
    omega = OMEGA_MARGIN * n_req / m
    return ZeroFreeParams(delta, theta, eta, lam, omega, m)


def rho_for(params: ZeroFreeParams, gamma: float, m: int) -> float:
    """Strip half-width keeping ``ln(1 + z w_ij)`` inside the zero-free box.

    For ``|z| <= 2`` and ``m >= 4`` the derivative of ``ln(1 + z w_ij)`` is at
    most ``10/(m-1)``, and on ``[0, 1]`` the real part is within
    ``gamma/(m-1)``; a tenth of the remaining room is taken.
    """
    if m < 4:
        raise ValueError(f"m must be at least 4, got {m}")
    if not 0 < gamma < params.delta:
        raise ValueError(f"need 0 < gamma < delta={params.delta}, got gamma={gamma}")
    return min((params.delta - gamma) / 10, params.eta / 10, 0.9)


def with_rho(params: ZeroFreeParams, gamma: float) -> ZeroFreeParams:
    return replace(params, rho=rho_for(params, gamma, params.m))


def strip_points(rho: float, count: int) -> np.ndarray:
    """``count`` points evenly spaced (by arc length) on the boundary of
    ``[-rho, 1+rho] x [-rho, rho]``."""
    corners = np.array([-rho - 1j * rho, 1 + rho - 1j * rho, 1 + rho + 1j * rho, -rho + 1j * rho])
    sides = np.abs(np.roll(corners, -1) - corners)
    s = np.linspace(0, sides.sum(), count, endpoint=False)
    out = np.empty(count, dtype=np.complex128)
    edge_start = np.concatenate([[0], np.cumsum(sides)[:-1]])
    for k in range(4):
        sel = (s >= edge_start[k]) & (s < edge_start[k] + sides[k])
        t = (s[sel] - edge_start[k]) / sides[k]
        out[sel] = corners[k] + t * (corners[(k + 1) % 4] - corners[k])
    return out


def strip_violations(params: ZeroFreeParams, gamma: float, m: int, rho: float, samples: int = 10_000) -> int:
    """Count boundary points of the rho-strip where ``ln(1 + z w)`` leaves the box.

    Both extreme weights ``exp(±gamma/(m-1)) - 1`` are checked; the map is
    analytic, so the boundary carries the extremes of its real and
    imaginary parts.
    """
    z = strip_points(rho, samples)
    t = gamma / (m - 1)
    bad = 0
    for w in (math.expm1(t), math.expm1(-t)):
        v = np.log(1 + z * w)
        bad += int(np.count_nonzero((np.abs(v.real) > params.delta / (m - 1)) | (np.abs(v.imag) > params.eta / (m - 1))))
    return bad


def in_domain(z_matrix, delta: float, eta: float, m: int) -> bool:
    """True iff every off-diagonal ``z_ij`` has ``|Re| <= delta/(m-1)`` and ``|Im| <= eta/(m-1)``."""
    z = as_weight_matrix(z_matrix).entries
    off = ~np.eye(z.shape[0], dtype=bool)
    vals = z[off]
    return bool(
        np.all(np.abs(vals.real) <= delta / (m - 1)) and np.all(np.abs(np.imag(vals)) <= eta / (m - 1))
    )


def sample_domain(n: int, delta: float, eta: float, m: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random symmetric zero-diagonal complex matrix inside the box."""
    i, j = np.triu_indices(n, k=1)
    re = rng.uniform(-delta, delta, size=len(i)) / (m - 1)
    im = rng.uniform(-eta, eta, size=len(i)) / (m - 1)
    z = np.zeros((n, n), dtype=np.complex128)
    z[i, j] = re + 1j * im
    z[j, i] = z[i, j]
    return z
