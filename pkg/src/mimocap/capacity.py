"""Per-cell user capacity from interference moments and a QoS target.

The admission budget comes from the Gaussian feasibility condition: each
admitted interferer is charged an effective interference y_E between the
mean and the worst case, chosen so that n interferers with n * y_E * S <= 1
exactly meet the SIR/outage target.  Under the different-pilot-sets scheme
every co-channel user is an interferer, so the per-cell capacity scales
with the budget; under reused sets each co-channel cell contributes exactly
one full-strength interferer no matter how loaded it is, so a reuse factor
either supports its whole pilot budget or nothing at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import NetworkGeometry, build_layout, circle_approximation, tier_specs
from .interference import QosTarget, TierMoments, compute_tier_moments, q_inverse, qos_feasible
from .pilots import PilotScheme

# Tolerance absorbed before flooring so that closed-form values that are
# integers up to rounding error do not lose a whole interferer.
_FLOOR_GUARD = 1e-9


@dataclass(frozen=True)
class CapacityReport:
    """Capacity figures for one (scheme, reuse factor, QoS) operating point."""

    effective_interference: float
    n_max: int
    k_u: float
    k_max: int
    chosen_reuse: int
    pilot_budget: int
    feasible: bool


def effective_interference(moments: TierMoments, qos: QosTarget) -> float:
    """Per-interferer effective interference y_E.

    Closed form of the feasibility equality: with z = 4 mu / (Qinv(alpha)^2
    sigma^2 S), y_E = mu / (1 + (2/z)(1 - sqrt(1+z))), evaluated as
    mu (sqrt(1+z) + 1) / (sqrt(1+z) - 1) which is the same expression
    without the small-z cancellation.  Zero variance (or alpha -> 0.5)
    degenerates to the mean.
    """
    mu = moments.mu_y
    var = moments.var_y
    if mu <= 0.0:
        raise ValueError("mean interference must be positive")
    if var < 0.0:
        raise ValueError("interference variance must be non-negative")
    q = q_inverse(qos.outage)
    if var == 0.0 or q == 0.0:
        return mu
    z = 4.0 * mu / (q * q * var * qos.min_sir_linear)
    root = math.sqrt(1.0 + z)
    return mu * (root + 1.0) / (root - 1.0)


def max_interferers(effective: float, sir_linear: float) -> int:
    """n_max = floor(1 / (y_E S)); the only place a floor is applied."""
    if effective <= 0.0 or sir_linear <= 0.0:
        raise ValueError("effective interference and SIR must be positive")
    return int(math.floor(1.0 / (effective * sir_linear) + _FLOOR_GUARD))


def tier1_moments(
    geometry: NetworkGeometry,
    scheme: PilotScheme,
    pilot_budget: int,
    reuse: int,
    circle_mode: str = "equal_area",
    exact_phi_variance: bool = False,
    tier_count: int = 1,
) -> list[tuple[int, TierMoments]]:
    """(cell count, moments) per co-channel tier at the given reuse factor.

    The pilot dimension available per cell shrinks with the reuse factor
    (the training resource is split w ways), so the different-sets pilot
    weighting uses floor(K / w).
    """
    geo = geometry.with_reuse(reuse)
    pilot_dim = max(1, pilot_budget // reuse)
    out = []
    for tier in tier_specs(geo, tier_count):
        patch = circle_approximation(geo, tier, circle_mode)
        tm = compute_tier_moments(
            patch,
            geo.path_loss_exponent,
            pilot_dim,
            scheme,
            tier_index=tier.tier_index,
            exact_phi_variance=exact_phi_variance,
        )
        out.append((tier.cell_count, tm))
    return out


def capacity_for_reuse(
    geometry: NetworkGeometry,
    scheme: PilotScheme,
    qos: QosTarget,
    pilot_budget: int,
    reuse: int,
    circle_mode: str = "equal_area",
    exact_phi_variance: bool = False,
    tier_count: int = 1,
    moments: list[tuple[int, TierMoments]] | None = None,
) -> CapacityReport:
    """Capacity report for one reuse factor.

    moments may carry precomputed tier1_moments output (grid sweeps reuse
    the quadrature results; they do not depend on the QoS point).
    """
    if pilot_budget < 1:
        raise ValueError("pilot budget must be >= 1")
    if moments is None:
        moments = tier1_moments(
            geometry, scheme, pilot_budget, reuse, circle_mode, exact_phi_variance, tier_count
        )
    budget = pilot_budget // reuse
    tier1_count, tm1 = moments[0]
    s = qos.min_sir_linear

    y_e = effective_interference(tm1, qos)
    n_max = max_interferers(y_e, s)
    k_u = n_max / tier1_count

    if scheme is PilotScheme.REUSED_SETS:
        # One interferer per co-channel cell regardless of load: a reuse
        # factor is either feasible at full pilot budget or not at all.
        feasible, _ = qos_feasible([(count, tm) for count, tm in moments], qos)
        k_max = budget if feasible else 0
    else:
        if tier_count == 1 and len(moments) == 1:
            k_cap = int(math.floor(k_u + _FLOOR_GUARD))
        else:
            # Outer tiers scale with the per-cell load as well; solve the
            # feasibility equality in k through the aggregate moments.
            agg = TierMoments(
                tier_index=0,
                mu_x=math.nan,
                var_x=math.nan,
                mu_y=sum(c * tm.mu_y for c, tm in moments),
                var_y=sum(c * tm.var_y for c, tm in moments),
            )
            k_root = 1.0 / (effective_interference(agg, qos) * s)
            k_cap = int(math.floor(k_root + _FLOOR_GUARD))
        k_max = min(k_cap, budget)
        feasible = k_max >= 1

    return CapacityReport(
        effective_interference=y_e,
        n_max=n_max,
        k_u=k_u,
        k_max=max(k_max, 0),
        chosen_reuse=reuse,
        pilot_budget=budget,
        feasible=feasible,
    )


def best_reuse(
    geometry: NetworkGeometry,
    scheme: PilotScheme,
    qos: QosTarget,
    pilot_budget: int,
    reuse_factors: tuple[int, ...] = (1, 3, 7),
    circle_mode: str = "equal_area",
    exact_phi_variance: bool = False,
    tier_count: int = 1,
    moments_by_reuse: dict[int, list[tuple[int, TierMoments]]] | None = None,
) -> CapacityReport:
    """Report for the reuse factor maximizing k_max, ties toward smaller w."""
    best: CapacityReport | None = None
    for w in reuse_factors:
        rep = capacity_for_reuse(
            geometry,
            scheme,
            qos,
            pilot_budget,
            w,
            circle_mode,
            exact_phi_variance,
            tier_count,
            moments=None if moments_by_reuse is None else moments_by_reuse[w],
        )
        if best is None or rep.k_max > best.k_max:
            best = rep
    assert best is not None
    return best


def root_interferer_count(moments: TierMoments, qos: QosTarget) -> float:
    """Numeric root n of the feasibility equality (1/S - n mu) / sqrt(n var)
    = Qinv(alpha), solved through the quadratic in sqrt(n).

    This is the quantity whose closed form is effective_interference; kept
    separate so the two can be cross-checked.
    """
    mu = moments.mu_y
    var = moments.var_y
    q = q_inverse(qos.outage)
    budget = 1.0 / qos.min_sir_linear
    if var == 0.0 or q == 0.0:
        return budget / mu
    sig = math.sqrt(var)
    # conjugate form of (-q sig + sqrt(q^2 var + 4 mu budget)) / (2 mu),
    # which cancels badly when q sig dominates
    root = 2.0 * budget / (q * sig + math.sqrt(q * q * var + 4.0 * mu * budget))
    return root * root


def cooperative_admission_check(
    per_cell_counts,
    geometry: NetworkGeometry,
    n_max: int,
    per_cell_cap: int,
) -> bool:
    """Cooperative admission: for every cell, the summed load of its tier-1
    co-channel set must stay within n_max.

    per_cell_counts aligns with build_layout(geometry) ordering.  Counts
    above the per-cell pilot cap are rejected outright (they violate the
    k <= K/w constraint the policy presumes).
    """
    layout = build_layout(geometry)
    if len(per_cell_counts) != len(layout):
        raise ValueError(
            f"expected {len(layout)} per-cell counts, got {len(per_cell_counts)}"
        )
    counts = [int(c) for c in per_cell_counts]
    if any(c < 0 for c in counts):
        raise ValueError("user counts must be non-negative")
    if any(c > per_cell_cap for c in counts):
        raise ValueError(f"user count exceeds the per-cell pilot budget {per_cell_cap}")

    tier1 = tier_specs(geometry, 1)[0].separation_m
    tol = tier1 * 1e-9
    for j, cell in enumerate(layout):
        total = 0
        for l, other in enumerate(layout):
            if l == j or other.resource != cell.resource:
                continue
            dist = math.hypot(
                other.center[0] - cell.center[0], other.center[1] - cell.center[1]
            )
            if dist <= tier1 + tol:
                total += counts[l]
        if total > n_max:
            return False
    return True
