"""Per-interferer interference moments and the Gaussian QoS condition.

With uplink power control, an interferer in a co-channel cell contributes
x = (r_l / r_j)^(2 gamma) to the normalized interference at the base
station of interest (r_l: distance to its own base station, r_j: distance
to ours).  Under the circular-cell approximation the two are linked by the
law of cosines through the cell separation, and the mean and variance of x
reduce to smooth 2-D integrals over the interferer's polar position, which
are evaluated here by adaptive tensor-product Gauss-Legendre quadrature.

Pilot weighting turns (mu_x, var_x) into per-user moments (mu_y, var_y);
summing tiers gives a Gaussian interference total whose tail against the
SIR target S and outage alpha is the admission feasibility condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import erfc

from .geometry import CirclePatch
from .pilots import PilotScheme


@dataclass(frozen=True)
class TierMoments:
    """Interference moments for one co-channel tier.

    mu_x / var_x describe a single full-collision interferer; mu_y / var_y
    fold in the pilot cross-correlation and describe a single interfering
    user under the configured scheme.
    """

    tier_index: int
    mu_x: float
    var_x: float
    mu_y: float
    var_y: float


@dataclass(frozen=True)
class GaussianInterference:
    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("variance must be non-negative")


@dataclass(frozen=True)
class QosTarget:
    """Minimum SIR (linear) and allowed outage probability."""

    min_sir_linear: float
    outage: float

    def __post_init__(self):
        if not self.min_sir_linear > 0.0:
            raise ValueError("SIR threshold must be positive")
        if not 0.0 < self.outage < 0.5:
            raise ValueError("outage must lie in (0, 0.5)")

    @classmethod
    def from_db(cls, min_sir_db: float, outage: float) -> "QosTarget":
        return cls(min_sir_linear=10.0 ** (min_sir_db / 10.0), outage=outage)

    @property
    def min_sir_db(self) -> float:
        return 10.0 * math.log10(self.min_sir_linear)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge; carries the last estimate."""

    def __init__(self, message: str, estimate: float, residual: float):
        super().__init__(message)
        self.estimate = estimate
        self.residual = residual


def interference_ratio(r_l, theta, separation: float, gamma: float):
    """x = (r_l / r_j)^(2 gamma) with r_j from the law of cosines.

    Vectorized over r_l and theta.  r_l must stay below the separation so
    the interferer cannot sit on top of the target base station.
    """
    r_l = np.asarray(r_l, dtype=float)
    if np.any(r_l < 0.0):
        raise ValueError("r_l must be non-negative")
    if np.any(r_l >= separation):
        raise ValueError("r_l must be smaller than the separation")
    r2 = r_l * r_l
    rj2 = r2 + separation * separation - 2.0 * separation * r_l * np.cos(theta)
    return (r2 / rj2) ** gamma


def _disc_average(fn, radius: float, order: int) -> float:
    """Average of fn(r, theta) over the disc density 2r/b^2 x 1/pi."""
    xr, wr = leggauss(order)
    r = 0.5 * radius * (xr + 1.0)
    wr = 0.5 * radius * wr * (2.0 * r / radius**2)
    xt, wt = leggauss(order)
    theta = 0.5 * math.pi * (xt + 1.0)
    wt = 0.5 * math.pi * wt / math.pi
    vals = fn(r[:, None], theta[None, :])
    return float(wr @ vals @ wt)


def _adaptive_disc_average(fn, radius: float, rtol: float) -> float:
    """Refine the Gauss-Legendre order until two estimates agree to rtol."""
    order = 16
    prev = _disc_average(fn, radius, order)
    while order <= 1024:
        order *= 2
        cur = _disc_average(fn, radius, order)
        scale = max(abs(cur), abs(prev), 1e-300)
        resid = abs(cur - prev) / scale
        if resid <= rtol:
            return cur
        prev = cur
    raise QuadratureError(
        f"quadrature did not reach rtol={rtol:g} by order {order}",
        estimate=prev,
        residual=resid,
    )


def compute_tier_moments(
    patch: CirclePatch,
    gamma: float,
    pilot_dim: int,
    scheme: PilotScheme,
    tier_index: int = 1,
    exact_phi_variance: bool = False,
    rtol: float = 1e-8,
) -> TierMoments:
    """Quadrature moments of x over the circular cell, then pilot weighting.

    Reused sets keep (mu_x, var_x) unchanged (phi is the constant 1).
    Different sets give mu_y = mu_x / K and, with the default Var[phi] =
    1/K^2 convention, var_y = (2 var_x + mu_x^2) / K^2; exact_phi_variance
    swaps in the Beta-law Var[phi] = (K-1)/(K^2 (K+1)) instead.
    """
    if pilot_dim < 1:
        raise ValueError("pilot dimension must be >= 1")
    b = patch.circle_radius_m
    sep = patch.separation_m

    def integrand(r, theta):
        return interference_ratio(r, theta, sep, gamma)

    mu_x = _adaptive_disc_average(integrand, b, rtol)
    var_x = _adaptive_disc_average(
        lambda r, theta: (integrand(r, theta) - mu_x) ** 2, b, rtol
    )

    if scheme is PilotScheme.REUSED_SETS:
        mu_y, var_y = mu_x, var_x
    else:
        k = pilot_dim
        mu_y = mu_x / k
        if exact_phi_variance:
            # Var[phi x] = E[phi^2] E[x^2] - (E[phi] E[x])^2 with the exact
            # second moment E[phi^2] = 2 / (K (K+1)).
            second = 2.0 / (k * (k + 1.0)) * (var_x + mu_x * mu_x)
            var_y = second - (mu_x / k) ** 2
        else:
            var_y = (2.0 * var_x + mu_x * mu_x) / (k * k)
    return TierMoments(tier_index=tier_index, mu_x=mu_x, var_x=var_x, mu_y=mu_y, var_y=var_y)


def q_function(x) -> float | np.ndarray:
    """Standard normal tail probability Q(x) = 1 - Phi(x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def q_inverse(alpha: float) -> float:
    """Inverse of the normal tail, by root finding on an erfc evaluation.

    Bisection-grade accuracy is what the capacity figures need at small
    alpha; a low-order rational approximation is not good enough there.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    return brentq(lambda z: q_function(z) - alpha, -40.0, 40.0, xtol=1e-12, rtol=8.9e-16)


def total_interference(load) -> GaussianInterference:
    """Gaussian total for a load of (count, TierMoments) pairs."""
    mean = 0.0
    var = 0.0
    for count, tm in load:
        if count < 0:
            raise ValueError("interferer counts must be non-negative")
        mean += count * tm.mu_y
        var += count * tm.var_y
    return GaussianInterference(mean=mean, variance=var)


def qos_feasible(load, qos: QosTarget) -> tuple[bool, float]:
    """Gaussian admission condition for a multi-tier load.

    Returns (feasible, slack) where slack is the left side of

        (1/S - sum n_t mu_y_t) / sqrt(sum n_t var_y_t) >= Qinv(alpha)

    minus the right side.  A zero-variance load degenerates to the direct
    mean comparison, reported with infinite slack magnitude.
    """
    gi = total_interference(load)
    budget = 1.0 / qos.min_sir_linear
    if gi.variance == 0.0:
        ok = budget >= gi.mean
        return ok, math.inf if ok else -math.inf
    slack = (budget - gi.mean) / math.sqrt(gi.variance) - q_inverse(qos.outage)
    return slack >= 0.0, slack


def sir_outage_gaussian(sir_linear, interference: GaussianInterference):
    """P(SIR <= s) under the Gaussian interference approximation.

    SIR = 1 / Y with Y ~ N(mean, variance), so the CDF at s is
    P(Y >= 1/s) = Q((1/s - mean) / sigma).  Vectorized over s.
    """
    s = np.asarray(sir_linear, dtype=float)
    if np.any(s <= 0.0):
        raise ValueError("SIR values must be positive")
    if interference.variance == 0.0:
        return np.where(1.0 / s <= interference.mean, 1.0, 0.0)
    sigma = math.sqrt(interference.variance)
    return q_function((1.0 / s - interference.mean) / sigma)
