"""Monte Carlo validation of the analytic capacity pipeline.

Three samplers share one trial framework:

* sample_sir_limit        - limiting (large antenna count) SIR where only
                            pilot contamination survives,
* sample_sir_limit_shadowed - the same with log-normal shadowing and
                            best-base-station selection,
* sample_sir_finite_m     - a finite-antenna MRC link simulator with all
                            intra- and inter-cell cross terms and noise.

Randomness is drawn from counter-based Philox streams keyed by
(seed, trial index, role), so trials are independent, reproducible
bit-for-bit, and insensitive to chunking or worker count.  The samplers
consume the position and pilot roles identically, which makes paired
comparisons across samplers (same user drops, same pilot collisions)
possible by reusing a seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import NetworkGeometry, cochannel_cells, equal_area_radius, tier_specs
from .interference import QosTarget
from .pilots import PilotBook, PilotScheme

_ROLE_POSITIONS = 1
_ROLE_PILOTS = 2
_ROLE_SHADOW = 3
_ROLE_FADING = 4
_ROLE_NOISE = 5
_ROLE_TAGGED = 6

_WILSON_Z = 1.959963984540054  # 95% normal quantile


def trial_rng(seed: int, trial: int, role: int) -> np.random.Generator:
    """Philox stream for one (seed, trial, role) triple."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, 0], dtype=np.uint64)
    counter = np.array([0, 0, trial, role], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


@dataclass(frozen=True, eq=False)
class SirSampleSet:
    """SIR realizations (linear scale) for one scenario, in trial order."""

    samples: np.ndarray
    scenario_tag: str
    seed: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.size and not np.all(arr > 0.0):
            raise ValueError("SIR samples must be positive")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "_sorted", np.sort(arr))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def sorted_samples(self) -> np.ndarray:
        return self._sorted

    @property
    def sir_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.samples)

    def empirical_cdf(self, sir_linear) -> np.ndarray:
        """Fraction of samples <= the query value(s)."""
        q = np.atleast_1d(np.asarray(sir_linear, dtype=float))
        out = np.searchsorted(self._sorted, q, side="right") / max(len(self), 1)
        return out if np.ndim(sir_linear) else float(out[0])

    def quantile(self, p) -> np.ndarray:
        return np.quantile(self._sorted, p)

    def to_csv(self, stream) -> None:
        """Write (trial_index, sir_linear, sir_db) rows plus provenance."""
        print(f"# scenario: {self.scenario_tag}", file=stream)
        print(f"# seed: {self.seed}", file=stream)
        print("trial_index,sir_linear,sir_db", file=stream)
        for i, s in enumerate(self.samples):
            print(f"{i},{s:.10g},{10.0 * math.log10(s):.10g}", file=stream)


@dataclass(frozen=True)
class FiniteMConfig:
    """Finite-antenna MRC scenario; SNRs are cell-edge values with uplink
    power control, None disables the corresponding noise term."""

    antennas: int = 500
    pilot_length: int = 42
    ul_snr_db: float | None = 10.0
    pilot_snr_db: float | None = 10.0
    detector: str = "mrc"

    def __post_init__(self):
        if self.antennas < 1:
            raise ValueError("antenna count must be >= 1")
        if self.pilot_length < 1:
            raise ValueError("pilot length must be >= 1")
        if self.detector != "mrc":
            raise ValueError("only the MRC detector is supported")


@dataclass(frozen=True)
class ShadowDiagnostics:
    tier_shares: dict[int, float]
    max_interference_ratio: float


@dataclass(frozen=True)
class _Scenario:
    """Everything a trial needs; immutable and picklable for workers."""

    centers: np.ndarray  # (n_cells, 2) co-channel cell centers
    tiers: np.ndarray  # (n_cells,) tier index per cell
    users_per_cell: int
    gamma: float
    cell_radius: float
    hole_radius: float
    scheme: PilotScheme
    pilot_dim: int
    region: str
    circle_radius: float
    power_control: bool = True
    shadow_sigma_db: float = 0.0
    collect_shadow_stats: bool = False
    # finite-M extras
    antennas: int = 0
    ul_snr: float = math.inf
    pilot_snr: float = math.inf
    # optional fixed pilot book (different-sets validation path)
    book_grams: np.ndarray | None = None  # (n_cells, K, K) |<psi_c, psi_l>|^2
    book_dim: int = 0

    @property
    def n_cells(self) -> int:
        return int(self.centers.shape[0])


def _hex_offsets(scn: _Scenario, rng: np.random.Generator, count: int):
    """Uniform offsets within the pointy-top hexagon minus the hole disc."""
    a = scn.cell_radius
    hole2 = scn.hole_radius**2
    r3 = math.sqrt(3.0)
    xs = np.empty(count)
    ys = np.empty(count)
    pending = np.arange(count)
    while pending.size:
        x = rng.uniform(-r3 * a / 2.0, r3 * a / 2.0, pending.size)
        y = rng.uniform(-a, a, pending.size)
        ok = (
            (np.abs(x) <= r3 * a / 2.0)
            & (np.abs(x) + r3 * np.abs(y) <= r3 * a)
            & (x * x + y * y >= hole2)
        )
        hit = pending[ok]
        xs[hit] = x[ok]
        ys[hit] = y[ok]
        pending = pending[~ok]
    return xs, ys


def _draw_distances(scn: _Scenario, rng: np.random.Generator):
    """Distances (to own base station, to the center one) per interferer.

    Shapes (n_cells, users_per_cell).  The circle region reproduces the
    analytic disc density; the hexagon region is the physical cell with the
    hole excluded.
    """
    n, k = scn.n_cells, scn.users_per_cell
    if scn.region == "circle":
        r_own = scn.circle_radius * np.sqrt(rng.random((n, k)))
        ang = rng.uniform(0.0, 2.0 * math.pi, (n, k))
        d = np.hypot(scn.centers[:, 0], scn.centers[:, 1])[:, None]
        r_ctr = np.sqrt(r_own**2 + d**2 - 2.0 * d * r_own * np.cos(ang))
        return r_own, r_ctr, None
    xs, ys = _hex_offsets(scn, rng, n * k)
    xs = xs.reshape(n, k)
    ys = ys.reshape(n, k)
    r_own = np.hypot(xs, ys)
    r_ctr = np.hypot(xs + scn.centers[:, 0][:, None], ys + scn.centers[:, 1][:, None])
    return r_own, r_ctr, (xs, ys)


def _draw_pilot_vector(scn: _Scenario, rng: np.random.Generator):
    """Complex cross-correlation coefficients of every interfering user's
    pilot against the tagged user's pilot, drawn fresh per trial.

    For independent Haar books the coefficient vector of one cell is the
    first users_per_cell coordinates of a Haar unit vector, sampled as a
    normalized complex Gaussian row.  Reused sets need no draw: exactly
    the same-index user of each cell collides, with coefficient 1.
    """
    n, k, dim = scn.n_cells, scn.users_per_cell, scn.pilot_dim
    if scn.scheme is PilotScheme.REUSED_SETS:
        return None
    if scn.book_grams is not None:
        K = scn.book_dim
        tagged_col = int(rng.integers(K))
        phi = np.empty((n, k))
        for l in range(n):
            cols = rng.permutation(K)[:k]
            phi[l] = scn.book_grams[l][tagged_col, cols]
        return np.sqrt(phi).astype(complex)  # phases irrelevant downstream
    z = rng.standard_normal((n, 2 * dim)).view(np.complex128)
    norm = np.sqrt((z.real**2 + z.imag**2).sum(axis=1, keepdims=True))
    return z[:, :k] / norm


def _limit_trial(scn: _Scenario, seed: int, trial: int) -> float:
    rng_pos = trial_rng(seed, trial, _ROLE_POSITIONS)
    r_own, r_ctr, _ = _draw_distances(scn, rng_pos)
    x = (r_own / r_ctr) ** (2.0 * scn.gamma)
    coeff = _draw_pilot_vector(scn, trial_rng(seed, trial, _ROLE_PILOTS))
    if scn.power_control:
        if scn.scheme is PilotScheme.REUSED_SETS:
            total = float(x[:, 0].sum()) if scn.n_cells else 0.0
        else:
            phi = coeff.real**2 + coeff.imag**2
            total = float((phi * x).sum()) if scn.n_cells else 0.0
        return 1.0 / total if total > 0.0 else math.inf
    # no power control: ratio of squared slow gains to the center station
    rng_tag = trial_rng(seed, trial, _ROLE_TAGGED)
    if scn.region == "circle":
        r_tag = scn.circle_radius * math.sqrt(rng_tag.random())
    else:
        xt, yt = _hex_offsets(scn, rng_tag, 1)
        r_tag = math.hypot(xt[0], yt[0])
    num = r_tag ** (-2.0 * scn.gamma)
    beta2 = r_ctr ** (-2.0 * scn.gamma)
    if scn.scheme is PilotScheme.REUSED_SETS:
        total = float(beta2[:, 0].sum()) if scn.n_cells else 0.0
    else:
        phi = coeff.real**2 + coeff.imag**2
        total = float((phi * beta2).sum()) if scn.n_cells else 0.0
    return num / total if total > 0.0 else math.inf


def _shadow_trial(scn: _Scenario, seed: int, trial: int):
    """Shadowed trial: returns (sir, per-tier interference, max term)."""
    rng_pos = trial_rng(seed, trial, _ROLE_POSITIONS)
    r_own, r_ctr, offsets = _draw_distances(scn, rng_pos)
    coeff = _draw_pilot_vector(scn, trial_rng(seed, trial, _ROLE_PILOTS))
    n, k = scn.n_cells, scn.users_per_cell
    reused = scn.scheme is PilotScheme.REUSED_SETS

    if scn.shadow_sigma_db > 0.0:
        xs, ys = offsets
        # distances from every user to every candidate base station:
        # column 0 is the center station, column 1+l the co-channel ones.
        bs_x = np.concatenate(([0.0], scn.centers[:, 0]))
        bs_y = np.concatenate(([0.0], scn.centers[:, 1]))
        dx = xs[:, :, None] + scn.centers[:, 0][:, None, None] - bs_x[None, None, :]
        dy = ys[:, :, None] + scn.centers[:, 1][:, None, None] - bs_y[None, None, :]
        dist = np.hypot(dx, dy)
        rng_sh = trial_rng(seed, trial, _ROLE_SHADOW)
        z_db = scn.shadow_sigma_db * rng_sh.standard_normal((n, k, n + 1))
        beta = 10.0 ** (z_db / 10.0) * dist ** (-scn.gamma)
        serving = np.argmax(beta, axis=2)
        idx = np.ogrid[:n, :k]
        beta_serv = beta[idx[0], idx[1], serving]
        ratio = (beta[:, :, 0] / beta_serv) ** 2
        ratio[serving == 0] = 0.0  # handed over to the center station
        if reused:
            terms = ratio[:, 0]
        else:
            phi = coeff.real**2 + coeff.imag**2
            terms = phi * ratio
        counted = ratio[:, 0] if reused else ratio
    else:
        # Degenerate shadowing: nearest-station service keeps every user on
        # its own cell, and the expressions below match _limit_trial
        # bit-for-bit (same draws, same arithmetic).
        x = (r_own / r_ctr) ** (2.0 * scn.gamma)
        if reused:
            terms = x[:, 0]
        else:
            phi = coeff.real**2 + coeff.imag**2
            terms = phi * x
        counted = x[:, 0] if reused else x
    total = float(terms.sum()) if scn.n_cells else 0.0
    sir = 1.0 / total if total > 0.0 else math.inf
    per_tier = None
    if scn.collect_shadow_stats:
        per_tier = {}
        for t in np.unique(scn.tiers):
            per_tier[int(t)] = float(terms[scn.tiers == t].sum())
    max_term = float(counted.max()) if counted.size else 0.0
    return sir, per_tier, max_term


def _finite_trial(scn: _Scenario, seed: int, trial: int) -> float:
    rng_pos = trial_rng(seed, trial, _ROLE_POSITIONS)
    r_own, r_ctr, _ = _draw_distances(scn, rng_pos)
    coeff = _draw_pilot_vector(scn, trial_rng(seed, trial, _ROLE_PILOTS))
    n, k, m = scn.n_cells, scn.users_per_cell, scn.antennas
    n_users = (n + 1) * k

    # ULPC effective channel amplitude at the center station is
    # sqrt(beta_center / beta_own); beta = r^-gamma is a power gain, so the
    # coherent interference scales as amp^4 = (r_own / r_center)^(2 gamma),
    # matching the limiting SIR terms.  Center-cell users come first.
    amp = np.empty(n_users, dtype=np.float32)
    amp[:k] = 1.0
    amp[k:] = ((r_own / r_ctr) ** (scn.gamma / 2.0)).ravel()

    # pilot-matched-filter weights: own-cell pilots are orthogonal, so only
    # the tagged user survives from the center cell.
    c = np.zeros(n_users, dtype=np.complex64)
    c[0] = 1.0
    if scn.scheme is PilotScheme.REUSED_SETS:
        c[k + np.arange(n) * k] = 1.0
    else:
        c[k:] = coeff.astype(np.complex64).ravel()

    rng_fad = trial_rng(seed, trial, _ROLE_FADING)
    h = rng_fad.standard_normal(size=(n_users, 2 * m), dtype=np.float32).view(np.complex64)
    h *= np.float32(math.sqrt(0.5))

    ghat = h.T @ (c * amp)
    if math.isfinite(scn.pilot_snr):
        rng_noise = trial_rng(seed, trial, _ROLE_NOISE)
        npil = rng_noise.standard_normal(size=2 * m, dtype=np.float32).view(np.complex64)
        npil *= np.float32(math.sqrt(0.5))
        ghat = ghat + npil / np.float32(math.sqrt(scn.pilot_dim * scn.pilot_snr))

    dots = np.abs(h @ np.conj(ghat)).astype(np.float64) ** 2
    dots *= amp.astype(np.float64) ** 2
    num = dots[0]
    den = float(dots[1:].sum())
    if math.isfinite(scn.ul_snr):
        den += float(np.vdot(ghat, ghat).real) / scn.ul_snr
    return num / den


def _chunk_worker(args):
    kind, scn, seed, start, stop = args
    if kind == "limit":
        return np.array([_limit_trial(scn, seed, t) for t in range(start, stop)])
    if kind == "finite":
        return np.array([_finite_trial(scn, seed, t) for t in range(start, stop)])
    if kind == "shadow":
        sirs = np.empty(stop - start)
        tier_sums: dict[int, float] = {}
        max_term = 0.0
        for i, t in enumerate(range(start, stop)):
            sir, per_tier, mt = _shadow_trial(scn, seed, t)
            sirs[i] = sir
            max_term = max(max_term, mt)
            if per_tier:
                for tier, val in per_tier.items():
                    tier_sums[tier] = tier_sums.get(tier, 0.0) + val
        return sirs, tier_sums, max_term
    raise ValueError(kind)


def _run_trials(kind: str, scn: _Scenario, seed: int, start: int, stop: int, workers):
    if workers is None or workers <= 1 or stop - start < 64:
        return _chunk_worker((kind, scn, seed, start, stop))
    chunk = max(64, (stop - start + 4 * workers - 1) // (4 * workers))
    ranges = [(s, min(s + chunk, stop)) for s in range(start, stop, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_chunk_worker, [(kind, scn, seed, s, e) for s, e in ranges]))
    if kind == "shadow":
        sirs = np.concatenate([p[0] for p in parts])
        tier_sums: dict[int, float] = {}
        max_term = 0.0
        for _, sums, mt in parts:
            max_term = max(max_term, mt)
            for tier, val in sums.items():
                tier_sums[tier] = tier_sums.get(tier, 0.0) + val
        return sirs, tier_sums, max_term
    return np.concatenate(parts)


def _cochannel_scenario(
    geometry: NetworkGeometry,
    scheme: PilotScheme,
    users_per_cell: int,
    pilot_dim: int | None,
    region: str,
    max_tier: int | None,
) -> _Scenario:
    if users_per_cell < 1:
        raise ValueError("users_per_cell must be >= 1")
    if region not in ("hexagon", "circle"):
        raise ValueError(f"unknown sampling region {region!r}")
    cells = cochannel_cells(geometry, max_tier)
    centers = np.array([c.center for c in cells]).reshape(-1, 2)
    rings_eff = max(geometry.ring_count, 3)
    specs = tier_specs(geometry, rings_eff * rings_eff + 4)
    tiers = np.empty(len(cells), dtype=int)
    for i, c in enumerate(cells):
        dist = math.hypot(*c.center)
        match = [
            t.tier_index for t in specs if abs(dist - t.separation_m) <= 1e-6 * t.separation_m
        ]
        if not match:
            raise RuntimeError(f"could not classify co-channel cell at {dist:.1f} m into a tier")
        tiers[i] = match[0]
    if scheme is PilotScheme.DIFFERENT_SETS:
        if pilot_dim is None:
            raise ValueError("different-sets sampling needs the pilot dimension")
        if users_per_cell > pilot_dim:
            raise ValueError(
                f"cannot admit {users_per_cell} users on {pilot_dim} pilot sequences"
            )
        dim = pilot_dim
    else:
        dim = pilot_dim if pilot_dim is not None else users_per_cell
        if users_per_cell > dim:
            raise ValueError(
                f"cannot admit {users_per_cell} users on {dim} pilot sequences"
            )
    return _Scenario(
        centers=centers,
        tiers=tiers,
        users_per_cell=users_per_cell,
        gamma=geometry.path_loss_exponent,
        cell_radius=geometry.cell_radius_m,
        hole_radius=geometry.hole_radius_m,
        scheme=scheme,
        pilot_dim=dim,
        region=region,
        circle_radius=equal_area_radius(geometry.cell_radius_m),
    )


def _attach_book(scn: _Scenario, book: PilotBook | None) -> _Scenario:
    if book is None or scn.scheme is PilotScheme.REUSED_SETS:
        return scn
    if book.sequence_length < scn.users_per_cell:
        raise ValueError("pilot book is too short for the per-cell load")
    if book.cell_count < scn.n_cells + 1:
        raise ValueError("pilot book does not cover every co-channel cell")
    center = book.matrices[0]
    grams = np.empty((scn.n_cells, book.sequence_length, book.sequence_length))
    for l in range(scn.n_cells):
        grams[l] = np.abs(center.conj().T @ book.matrices[l + 1]) ** 2
    return replace(scn, book_grams=grams, book_dim=book.sequence_length)


def sample_sir_limit(
    geometry: NetworkGeometry,
    scheme: PilotScheme,
    users_per_cell: int,
    trials: int,
    seed: int,
    pilot_dim: int | None = None,
    pilot_book: PilotBook | None = None,
    power_control: bool = True,
    region: str = "hexagon",
    max_tier: int | None = None,
    workers: int | None = None,
) -> SirSampleSet:
    """Limiting-SIR samples: per trial, drop users in every co-channel cell
    of the built lattice, draw pilot collisions per scheme, and evaluate the
    contamination-only SIR (with or without uplink power control).

    pilot_book fixes the different-sets pilot matrices across trials (only
    the column assignment is redrawn); by default pilots are redrawn every
    trial, matching the analytic averaging over the Haar measure.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    scn = _cochannel_scenario(geometry, scheme, users_per_cell, pilot_dim, region, max_tier)
    scn = replace(scn, power_control=power_control)
    scn = _attach_book(scn, pilot_book)
    samples = _run_trials("limit", scn, seed, 0, trials, workers)
    tag = (
        f"{scheme.value}|w={geometry.reuse_factor}|k={users_per_cell}|limit"
        f"|pc={int(power_control)}|region={region}"
    )
    return SirSampleSet(samples=samples, scenario_tag=tag, seed=seed)


def sample_sir_limit_shadowed(
    geometry: NetworkGeometry,
    scheme: PilotScheme,
    users_per_cell: int,
    shadow_sigma_db: float,
    trials: int,
    seed: int,
    pilot_dim: int | None = None,
    region: str = "hexagon",
    max_tier: int | None = None,
    workers: int | None = None,
    diagnostics: bool = False,
):
    """Shadowed limiting-SIR samples with best-station selection.

    Every user draws independent log-normal shadow gains to all co-channel
    stations and is served by the strongest one, so every interference term
    satisfies (z_j/z_l)^2 (r_l/r_j)^(2 gamma) < 1 by construction; users
    captured by the center station stop interfering (they would be trained
    on the center cell's own orthogonal pilots).

    With shadow_sigma_db = 0 and hexagon sampling this reproduces
    sample_sir_limit bit-for-bit for equal seeds.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if shadow_sigma_db < 0.0:
        raise ValueError("shadow standard deviation must be >= 0 dB")
    scn = _cochannel_scenario(geometry, scheme, users_per_cell, pilot_dim, region, max_tier)
    scn = replace(scn, shadow_sigma_db=shadow_sigma_db, collect_shadow_stats=diagnostics)
    samples, tier_sums, max_term = _run_trials("shadow", scn, seed, 0, trials, workers)
    if shadow_sigma_db > 0.0 and max_term > 1.0 + 1e-9:
        raise RuntimeError(
            f"interference ratio {max_term} exceeds 1; best-station selection is broken"
        )
    tag = (
        f"{scheme.value}|w={geometry.reuse_factor}|k={users_per_cell}|limit"
        f"|shadow={shadow_sigma_db:g}dB|region={region}"
    )
    sample_set = SirSampleSet(samples=samples, scenario_tag=tag, seed=seed)
    if not diagnostics:
        return sample_set
    total = sum(tier_sums.values())
    shares = {t: v / total for t, v in sorted(tier_sums.items())} if total > 0 else {}
    return sample_set, ShadowDiagnostics(tier_shares=shares, max_interference_ratio=max_term)


def sample_sir_finite_m(
    geometry: NetworkGeometry,
    scheme: PilotScheme,
    users_per_cell: int,
    config: FiniteMConfig,
    trials: int,
    seed: int,
    max_tier: int | None = 1,
    workers: int | None = None,
) -> SirSampleSet:
    """Finite-antenna uplink SINR of the tagged user under pilot-matched
    channel estimation and MRC detection.

    The training resource shrinks with the reuse factor, so the per-cell
    pilot space has dimension pilot_length // reuse_factor and the load
    must satisfy users_per_cell * reuse_factor <= pilot_length.  All cross
    terms are present: contaminating pilots add coherently, every user in
    the co-channel network (own cell included) adds non-coherent
    interference, and the SNRs set the pilot and data noise levels.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    w = geometry.reuse_factor
    dim = config.pilot_length // w
    if users_per_cell * w > config.pilot_length:
        raise ValueError(
            f"pilot budget infeasible: {users_per_cell} users need "
            f"{users_per_cell * w} of {config.pilot_length} training dimensions"
        )
    scn = _cochannel_scenario(
        geometry, scheme, users_per_cell, dim, "hexagon", max_tier
    )
    if (
        scn.n_cells == 0
        and users_per_cell == 1
        and config.ul_snr_db is None
        and config.pilot_snr_db is None
    ):
        raise ValueError("SINR is undefined with no interferers and no noise")
    scn = replace(
        scn,
        antennas=config.antennas,
        ul_snr=math.inf if config.ul_snr_db is None else 10.0 ** (config.ul_snr_db / 10.0),
        pilot_snr=math.inf if config.pilot_snr_db is None else 10.0 ** (config.pilot_snr_db / 10.0),
    )
    samples = _run_trials("finite", scn, seed, 0, trials, workers)
    tag = f"{scheme.value}|w={w}|k={users_per_cell}|M={config.antennas}"
    return SirSampleSet(samples=samples, scenario_tag=tag, seed=seed)


def wilson_interval(failures: int, n: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("need at least one sample")
    p = failures / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    lo = 0.0 if failures == 0 else max(0.0, center - half)
    hi = 1.0 if failures == n else min(1.0, center + half)
    return lo, hi


def empirical_outage(sample_set: SirSampleSet, qos: QosTarget):
    """Fraction of samples below the SIR target, with a Wilson 95% interval."""
    n = len(sample_set)
    if n == 0:
        raise ValueError("cannot estimate outage from an empty sample set")
    failures = int(np.searchsorted(sample_set.sorted_samples, qos.min_sir_linear, side="left"))
    return failures / n, wilson_interval(failures, n)


@dataclass(frozen=True)
class CapacitySearchResult:
    per_reuse: dict[int, int]
    outage_at_k: dict[int, tuple[float, tuple[float, float]]] = field(repr=False)
    best_reuse: int = 0
    best_k: int = 0


def empirical_capacity_search(
    geometry: NetworkGeometry,
    scheme: PilotScheme,
    qos: QosTarget,
    trials: int,
    seed: int,
    sampler: str = "limit",
    pilot_budget: int = 42,
    finite_m: FiniteMConfig | None = None,
    reuse_factors: tuple[int, ...] = (1, 3, 7),
    region: str = "hexagon",
    max_tier: int | None = None,
    workers: int | None = None,
) -> CapacitySearchResult:
    """Largest admissible per-cell load per reuse factor, by descending scan
    from the pilot budget.

    A load is accepted when its empirical outage over the full trial count
    is <= alpha; hopeless loads are rejected early once the Wilson lower
    bound clears alpha, which keeps the scan cheap far from the boundary.
    """
    if sampler not in ("limit", "finite_m"):
        raise ValueError(f"unknown sampler {sampler!r}")
    if sampler == "finite_m" and finite_m is None:
        finite_m = FiniteMConfig()
    threshold = qos.min_sir_linear
    per_reuse: dict[int, int] = {}
    outage_at_k: dict[int, tuple[float, tuple[float, float]]] = {}
    for w in reuse_factors:
        geo = geometry.with_reuse(w)
        if sampler == "finite_m":
            budget = finite_m.pilot_length // w
        else:
            budget = pilot_budget // w
        found = 0
        found_stats = (math.nan, (math.nan, math.nan))
        for k in range(budget, 0, -1):
            if sampler == "finite_m":
                dim = finite_m.pilot_length // w
                scn = _cochannel_scenario(geo, scheme, k, dim, "hexagon", 1 if max_tier is None else max_tier)
                scn = replace(
                    scn,
                    antennas=finite_m.antennas,
                    ul_snr=math.inf if finite_m.ul_snr_db is None else 10.0 ** (finite_m.ul_snr_db / 10.0),
                    pilot_snr=math.inf if finite_m.pilot_snr_db is None else 10.0 ** (finite_m.pilot_snr_db / 10.0),
                )
                kind = "finite"
            else:
                scn = _cochannel_scenario(geo, scheme, k, pilot_budget // w, region, max_tier)
                kind = "limit"
            failures = 0
            done = 0
            block = min(128, trials)
            rejected = False
            while done < trials:
                stop = min(done + block, trials)
                chunk = _run_trials(kind, scn, seed, done, stop, workers)
                failures += int(np.count_nonzero(chunk < threshold))
                done = stop
                block = min(4 * block, trials - done) if done < trials else 0
                lo, _hi = wilson_interval(failures, done)
                if lo > qos.outage:
                    rejected = True
                    break
            if not rejected:
                p = failures / trials
                if p <= qos.outage:
                    found = k
                    found_stats = (p, wilson_interval(failures, trials))
                    break
        per_reuse[w] = found
        outage_at_k[w] = found_stats
    best_w = max(reuse_factors, key=lambda w: (per_reuse[w], -w))
    return CapacitySearchResult(
        per_reuse=per_reuse,
        outage_at_k=outage_at_k,
        best_reuse=best_w,
        best_k=per_reuse[best_w],
    )
