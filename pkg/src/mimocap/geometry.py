"""Hexagonal cellular layout, frequency reuse partitioning and user placement.

Cells sit on a triangular lattice with center spacing sqrt(3) * cell_radius
(cell_radius is the hexagon circumradius).  Co-channel cells under reuse
factor w form a scaled copy of the same lattice with spacing sqrt(3*w) * a,
so the nearest co-channel "tier" sits at that distance with 6 members.

All objects here are immutable and safe to share across workers; samplers
take an explicit numpy Generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

# Axial shift vectors generating the co-channel sublattice for each
# supported reuse factor (i^2 + i*j + j^2 = w).
REUSE_SHIFTS = {1: (1, 0), 3: (1, 1), 7: (2, 1)}

SUPPORTED_REUSE = tuple(sorted(REUSE_SHIFTS))


@dataclass(frozen=True)
class NetworkGeometry:
    """Hexagonal network scenario parameters.

    cell_radius_m is the hexagon circumradius; users are excluded within
    hole_radius_m of their serving base station.
    """

    cell_radius_m: float = 1600.0
    hole_radius_m: float = 100.0
    reuse_factor: int = 1
    ring_count: int = 2
    path_loss_exponent: float = 4.0

    def __post_init__(self):
        if self.reuse_factor not in REUSE_SHIFTS:
            raise ValueError(
                f"unsupported reuse factor {self.reuse_factor}; "
                f"supported: {SUPPORTED_REUSE}"
            )
        if not 0.0 <= self.hole_radius_m < self.cell_radius_m:
            raise ValueError("hole radius must satisfy 0 <= a_h < a")
        if self.ring_count < 1:
            raise ValueError("ring_count must be >= 1")
        if self.path_loss_exponent <= 2.0:
            raise ValueError(
                "path loss exponent must exceed 2 for finite interference moments"
            )

    @property
    def center_spacing_m(self) -> float:
        """Distance between adjacent cell centers."""
        return math.sqrt(3.0) * self.cell_radius_m

    def with_reuse(self, reuse_factor: int) -> "NetworkGeometry":
        return replace(self, reuse_factor=reuse_factor)


@dataclass(frozen=True)
class Cell:
    """One cell of the built lattice."""

    axial: tuple[int, int]
    center: tuple[float, float]
    resource: int  # frequency resource index, 1..w; center cell uses 1
    ring: int


@dataclass(frozen=True)
class CirclePatch:
    """Circular-cell approximation of an interfering cell.

    circle_radius_m is the cell-disc radius; separation_m the distance from
    the interfering cell center to the base station of interest.
    """

    circle_radius_m: float
    separation_m: float

    def __post_init__(self):
        if not self.circle_radius_m < self.separation_m:
            raise ValueError("circle radius must be smaller than the separation")


@dataclass(frozen=True)
class TierSpec:
    """Co-channel cells at the tier_index-th co-channel distance."""

    tier_index: int
    cell_count: int
    separation_m: float


def hex_ring(m: int, n: int) -> int:
    """Hexagonal (ring) distance of axial coordinate (m, n) from the origin."""
    return (abs(m) + abs(n) + abs(m + n)) // 2


def axial_to_xy(m: int, n: int, spacing: float) -> tuple[float, float]:
    return spacing * (m + 0.5 * n), spacing * (math.sqrt(3.0) / 2.0) * n


def is_cochannel_offset(dm: int, dn: int, reuse_factor: int) -> bool:
    """True if the axial offset (dm, dn) lies on the reuse-w sublattice."""
    i, j = REUSE_SHIFTS[reuse_factor]
    w = reuse_factor
    return ((i + j) * dm + j * dn) % w == 0 and (i * dn - j * dm) % w == 0


def min_rings_for_cochannel(reuse_factor: int) -> int:
    """Smallest ring count whose lattice contains tier-1 co-channel cells."""
    return hex_ring(*REUSE_SHIFTS[reuse_factor])


def build_layout(geometry: NetworkGeometry) -> list[Cell]:
    """Build the hexagonal lattice with reuse coloring.

    Returns 1 + sum(6r, r=1..ring_count) cells ordered by (ring, angle).
    Resource indices are the cosets of the reuse sublattice, numbered in
    order of first appearance; the center cell always gets resource 1.
    """
    w = geometry.reuse_factor
    d = geometry.center_spacing_m
    coords = []
    for m in range(-geometry.ring_count, geometry.ring_count + 1):
        for n in range(-geometry.ring_count, geometry.ring_count + 1):
            if hex_ring(m, n) <= geometry.ring_count:
                coords.append((m, n))

    def sort_key(c):
        m, n = c
        x, y = axial_to_xy(m, n, d)
        return (hex_ring(m, n), math.atan2(y, x) % (2 * math.pi))

    coords.sort(key=sort_key)
    assert coords[0] == (0, 0)

    reps: list[tuple[int, int]] = []  # coset representatives, index = resource - 1
    cells = []
    for m, n in coords:
        resource = None
        for idx, (rm, rn) in enumerate(reps):
            if is_cochannel_offset(m - rm, n - rn, w):
                resource = idx + 1
                break
        if resource is None:
            reps.append((m, n))
            resource = len(reps)
        cells.append(
            Cell(
                axial=(m, n),
                center=axial_to_xy(m, n, d),
                resource=resource,
                ring=hex_ring(m, n),
            )
        )
    return cells


def cochannel_cells(geometry: NetworkGeometry, max_tier: int | None = None) -> list[Cell]:
    """Co-channel cells of the center cell, excluding the center itself.

    The lattice is extended beyond geometry.ring_count when needed so that
    at least the tier-1 co-channel cells are present (a ring-2 lattice has
    no reuse-7 co-channel cell at all).  max_tier additionally truncates to
    the first max_tier co-channel distances.
    """
    rings = max(geometry.ring_count, min_rings_for_cochannel(geometry.reuse_factor))
    layout = build_layout(replace(geometry, ring_count=rings))
    out = [c for c in layout if c.resource == 1 and c.axial != (0, 0)]
    if max_tier is not None:
        if max_tier < 1:
            return []
        tiers = tier_specs(geometry, max_tier)
        cutoff = tiers[-1].separation_m * (1.0 + 1e-9)
        out = [c for c in out if math.hypot(*c.center) <= cutoff]
    return out


def tier_specs(geometry: NetworkGeometry, max_tier: int) -> list[TierSpec]:
    """Count and separation of co-channel cells at each of the first
    max_tier co-channel distances.

    Tier-1 separation is a*sqrt(3w); outer tiers follow the shells of the
    co-channel sublattice (squared-distance multiples 1, 3, 4, 7, ... of
    the tier-1 value).
    """
    if max_tier < 1:
        raise ValueError("max_tier must be >= 1")
    # Shells of a triangular lattice: norms^2 are the Loeschian numbers
    # p^2 + p q + q^2.  Enumerate a patch large enough for max_tier shells.
    reach = 2 * max_tier + 4
    counts: dict[int, int] = {}
    for p in range(-reach, reach + 1):
        for q in range(-reach, reach + 1):
            if (p, q) == (0, 0):
                continue
            norm2 = p * p + p * q + q * q
            counts[norm2] = counts.get(norm2, 0) + 1
    tier1 = math.sqrt(3.0 * geometry.reuse_factor) * geometry.cell_radius_m
    shells = sorted(counts)[:max_tier]
    return [
        TierSpec(tier_index=t + 1, cell_count=counts[n2], separation_m=tier1 * math.sqrt(n2))
        for t, n2 in enumerate(shells)
    ]


def equal_area_radius(cell_radius_m: float) -> float:
    """Radius of the disc with the same area as the hexagon."""
    return cell_radius_m * math.sqrt(3.0 * math.sqrt(3.0) / (2.0 * math.pi))


def circle_approximation(
    geometry: NetworkGeometry, tier: TierSpec, mode: str = "equal_area"
) -> CirclePatch:
    """Circular-cell approximation of a co-channel tier.

    mode "equal_area" matches the hexagon area (default); "match_radius"
    uses the circumradius directly, for sensitivity checks.
    """
    if mode == "equal_area":
        b = equal_area_radius(geometry.cell_radius_m)
    elif mode == "match_radius":
        b = geometry.cell_radius_m
    else:
        raise ValueError(f"unknown circle approximation mode {mode!r}")
    return CirclePatch(circle_radius_m=b, separation_m=tier.separation_m)


def point_in_hexagon(x, y, circumradius: float):
    """Pointy-top hexagon membership test (vectorized)."""
    r3 = math.sqrt(3.0)
    return (np.abs(x) <= r3 * circumradius / 2.0 + 1e-12) & (
        np.abs(x) + r3 * np.abs(y) <= r3 * circumradius + 1e-9
    )


def sample_circle_position(
    radius_m: float, rng: np.random.Generator, size: int | None = None
):
    """Uniform draw over a disc, returned as (r, theta).

    Radius density is 2r/b^2, the angle uniform on [0, 2*pi).
    """
    n = 1 if size is None else size
    r = radius_m * np.sqrt(rng.random(n))
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    if size is None:
        return float(r[0]), float(theta[0])
    return r, theta


def sample_hexagon_position(
    geometry: NetworkGeometry, rng: np.random.Generator, size: int | None = None
):
    """Uniform draw over the hexagonal cell with the hole disc excluded.

    Rejection sampling from the bounding box; returns cartesian offsets
    (x, y) from the cell center.
    """
    a = geometry.cell_radius_m
    hole2 = geometry.hole_radius_m**2
    n = 1 if size is None else size
    xs = np.empty(n)
    ys = np.empty(n)
    pending = np.arange(n)
    r3 = math.sqrt(3.0)
    while pending.size:
        x = rng.uniform(-r3 * a / 2.0, r3 * a / 2.0, pending.size)
        y = rng.uniform(-a, a, pending.size)
        ok = point_in_hexagon(x, y, a) & (x * x + y * y >= hole2)
        hit = pending[ok]
        xs[hit] = x[ok]
        ys[hit] = y[ok]
        pending = pending[~ok]
    if size is None:
        return float(xs[0]), float(ys[0])
    return xs, ys


def sample_user_position(region, rng: np.random.Generator, size: int | None = None):
    """Uniform user placement over a cell region.

    A CirclePatch (or plain radius) gives polar (r, theta) draws over the
    disc; a NetworkGeometry gives cartesian draws over the hexagon with the
    cell hole excluded.
    """
    if isinstance(region, CirclePatch):
        return sample_circle_position(region.circle_radius_m, rng, size)
    if isinstance(region, (int, float)):
        return sample_circle_position(float(region), rng, size)
    if isinstance(region, NetworkGeometry):
        return sample_hexagon_position(region, rng, size)
    raise TypeError(f"cannot sample a position from {type(region).__name__}")
