"""Command line interface.

Four commands, all driven by one config file plus --set overrides:

  capacity-table   analytic k_u / k_max sweep over the QoS grid
  sir-cdf          empirical vs Gaussian-approximation SIR CDFs (w=7 preset)
  finite-m-table   admissible users per cell from the finite-M simulator
  validate         self-check suite (oracles, identities, round trips)

CSV output starts with '#' comment lines carrying the command, config hash
and seed, so reruns with the same inputs are byte-identical.  Exit codes:
0 success, 1 validation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys

import numpy as np

from . import capacity as cap
from . import interference as intf
from .config import ConfigError, ScenarioConfig, config_hash, load_config
from .geometry import tier_specs
from .interference import QosTarget
from .pilots import PilotScheme, cross_correlation, generate_pilot_book
from .simulate import empirical_capacity_search, sample_sir_limit

_QOS_PRESETS = (
    ("low", 0.0, 0.01),
    ("medium", 10.0, 0.05),
    ("high", 25.0, 0.05),
    ("very_high", 30.0, 0.005),
)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def _header(command: str, config: ScenarioConfig) -> list[str]:
    return [
        f"# mimocap {command}",
        f"# config-hash: {config_hash(config)}",
        f"# seed: {config.seed}",
        "# units: sir in dB, distances in meters, probabilities linear",
    ]


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_rows(stream, comments, header, rows):
    for line in comments:
        print(line, file=stream)
    print(",".join(header), file=stream)
    for row in rows:
        print(",".join(_fmt(v) for v in row), file=stream)


def _workers(config: ScenarioConfig):
    return config.workers if config.workers > 0 else None


def cmd_capacity_table(config: ScenarioConfig, out: str, diagnostics: str | None) -> int:
    sir_values = config.qos.sir_db_values()
    rows = []
    diag_rows = []
    switch_notes = []
    for scheme_name in config.schemes:
        scheme = PilotScheme.parse(scheme_name)
        moments = {
            w: cap.tier1_moments(
                config.geometry,
                scheme,
                config.pilot_budget,
                w,
                config.circle_mode,
                tier_count=config.tier_count,
            )
            for w in (1, 3, 7)
        }
        for alpha in config.qos.alphas:
            prev_w = None
            for sir_db in sir_values:
                qos = QosTarget.from_db(sir_db, alpha)
                per_w = {
                    w: cap.capacity_for_reuse(
                        config.geometry,
                        scheme,
                        qos,
                        config.pilot_budget,
                        w,
                        config.circle_mode,
                        tier_count=config.tier_count,
                        moments=moments[w],
                    )
                    for w in (1, 3, 7)
                }
                best = max(per_w.values(), key=lambda r: (r.k_max, -r.chosen_reuse))
                rows.append(
                    (
                        sir_db,
                        alpha,
                        scheme_name,
                        best.chosen_reuse,
                        best.k_u,
                        best.k_max,
                        best.effective_interference,
                        best.n_max,
                    )
                )
                if prev_w is not None and best.chosen_reuse != prev_w:
                    switch_notes.append(
                        f"# switch: scheme={scheme_name} alpha={_fmt(alpha)} "
                        f"w{prev_w}->w{best.chosen_reuse} at {_fmt(sir_db)} dB"
                    )
                prev_w = best.chosen_reuse
                for w, rep in per_w.items():
                    diag_rows.append(
                        (
                            sir_db,
                            alpha,
                            scheme_name,
                            w,
                            int(rep.feasible),
                            rep.k_u,
                            rep.k_max,
                            rep.effective_interference,
                            rep.n_max,
                            rep.pilot_budget,
                        )
                    )
    comments = _header("capacity-table", config) + switch_notes
    with _open_out(out) as fh:
        _write_rows(
            fh,
            comments,
            ("sir_db", "alpha", "scheme", "w_best", "k_u", "k_max", "y_e", "n_max"),
            rows,
        )
    if diagnostics is not None:
        with _open_out(diagnostics) as fh:
            _write_rows(
                fh,
                _header("capacity-table-diagnostics", config),
                (
                    "sir_db",
                    "alpha",
                    "scheme",
                    "w",
                    "feasible",
                    "k_u",
                    "k_max",
                    "y_e",
                    "n_max",
                    "pilot_budget",
                ),
                diag_rows,
            )
    return 0


def cmd_sir_cdf(config: ScenarioConfig, out: str) -> int:
    """Empirical and Gaussian-approximation SIR CDFs at the worst-case
    preset: reuse factor 7 with the full per-cell budget of 6 users."""
    w = 7
    geo = config.geometry.with_reuse(w)
    k = config.pilot_budget // w
    rows = []
    for scheme_name in config.schemes:
        scheme = PilotScheme.parse(scheme_name)
        samples = sample_sir_limit(
            geo,
            scheme,
            k,
            trials=config.trials,
            seed=config.seed,
            pilot_dim=config.pilot_budget // w,
            region=config.region,
            max_tier=config.tier_count,
            workers=_workers(config),
        )
        count, tm = cap.tier1_moments(
            geo, scheme, config.pilot_budget, w, config.circle_mode,
            tier_count=config.tier_count,
        )[0]
        n_terms = count * (k if scheme is PilotScheme.DIFFERENT_SETS else 1)
        gi = intf.total_interference([(n_terms, tm)])
        n = len(samples)
        step = max(1, n // 1000)
        idx = np.arange(step - 1, n, step)
        sirs = samples.sorted_samples[idx]
        cdf = (idx + 1) / n
        approx = intf.sir_outage_gaussian(sirs, gi)
        sir_db = 10.0 * np.log10(sirs)
        for i in range(len(idx)):
            rows.append((f"{scheme_name}-empirical", float(sir_db[i]), float(cdf[i])))
        for i in range(len(idx)):
            rows.append((f"{scheme_name}-approx", float(sir_db[i]), float(approx[i])))
    with _open_out(out) as fh:
        _write_rows(fh, _header("sir-cdf", config), ("curve", "sir_db", "cdf"), rows)
    return 0


def cmd_finite_m_table(config: ScenarioConfig, out: str) -> int:
    rows = []
    for scheme_name in config.schemes:
        scheme = PilotScheme.parse(scheme_name)
        for label, sir_db, alpha in _QOS_PRESETS:
            qos = QosTarget.from_db(sir_db, alpha)
            result = empirical_capacity_search(
                config.geometry,
                scheme,
                qos,
                trials=config.finite_m_trials,
                seed=config.seed,
                sampler="finite_m",
                finite_m=config.finite_m,
                max_tier=config.tier_count,
                workers=_workers(config),
            )
            outage, interval = result.outage_at_k[result.best_reuse]
            rows.append(
                (
                    label,
                    sir_db,
                    alpha,
                    scheme_name,
                    result.best_reuse,
                    result.best_k,
                    result.per_reuse[1],
                    result.per_reuse[3],
                    result.per_reuse[7],
                    outage,
                    interval[0],
                    interval[1],
                )
            )
    with _open_out(out) as fh:
        _write_rows(
            fh,
            _header("finite-m-table", config),
            (
                "qos",
                "sir_db",
                "alpha",
                "scheme",
                "w_best",
                "k_max",
                "k_w1",
                "k_w3",
                "k_w7",
                "outage",
                "wilson_lo",
                "wilson_hi",
            ),
            rows,
        )
    return 0


def _validation_checks(config: ScenarioConfig, scale: float):
    """Yield (name, passed, detail) for the invariant suite.

    scale multiplies every tolerance; injecting a tiny scale must make the
    suite fail, which is itself part of the contract.
    """
    rng = np.random.default_rng(config.seed)

    # pilot completeness: correlations of one pilot against a full book sum to 1
    book = generate_pilot_book(PilotScheme.DIFFERENT_SETS, 16, 2, rng)
    probe = book.pilot(0, 3)
    total = sum(cross_correlation(probe, book.matrices[1][:, j]) for j in range(16))
    err = abs(total - 1.0)
    tol = 1e-10 * scale
    yield "pilot-completeness", err <= tol, f"|sum(phi)-1|={err:.3e} tol={tol:.3e}"

    # inverse Q round trip
    zs = np.linspace(0.0, 6.0, 61)
    err = max(abs(intf.q_inverse(float(intf.q_function(z))) - z) for z in zs)
    tol = 1e-8 * scale
    yield "q-inverse-roundtrip", err <= tol, f"max|err|={err:.3e} tol={tol:.3e}"

    # closed-form effective interference vs numeric root of the equality
    worst = 0.0
    for mu in (1e-4, 1e-2, 0.5):
        for var_ratio in (0.1, 1.0, 10.0):
            for sir_db in (0.0, 10.0, 25.0):
                for alpha in (0.005, 0.05, 0.2):
                    tm = intf.TierMoments(1, mu, 0.0, mu, var_ratio * mu * mu)
                    qos = QosTarget.from_db(sir_db, alpha)
                    y_e = cap.effective_interference(tm, qos)
                    n_root = cap.root_interferer_count(tm, qos)
                    ref = 1.0 / (n_root * qos.min_sir_linear)
                    worst = max(worst, abs(y_e - ref) / ref)
    tol = 1e-9 * scale
    yield "closed-form-vs-root", worst <= tol, f"max rel err={worst:.3e} tol={tol:.3e}"

    # pilot-weighting identities (different sets, default variance form)
    scheme = PilotScheme.DIFFERENT_SETS
    moments = cap.tier1_moments(config.geometry, scheme, config.pilot_budget, 1, config.circle_mode)
    _count, tm = moments[0]
    kdim = config.pilot_budget
    id_err = max(
        abs(tm.mu_y * kdim - tm.mu_x) / tm.mu_x,
        abs(tm.var_y * kdim * kdim - (2.0 * tm.var_x + tm.mu_x**2)) / (2.0 * tm.var_x + tm.mu_x**2),
    )
    tol = 1e-12 * scale
    yield "pilot-weighting-identities", id_err <= tol, f"max rel err={id_err:.3e} tol={tol:.3e}"

    # quadrature moments vs direct Monte Carlo over the disc
    spec = tier_specs(config.geometry, 1)[0]
    patch = cap.circle_approximation(config.geometry, spec, config.circle_mode)
    n = 1_000_000
    r = patch.circle_radius_m * np.sqrt(rng.random(n))
    th = rng.uniform(0.0, 2.0 * math.pi, n)
    x = intf.interference_ratio(r, th, patch.separation_m, config.geometry.path_loss_exponent)
    mu_hat = float(x.mean())
    se_mu = float(x.std(ddof=1)) / math.sqrt(n)
    dev = abs(tm.mu_x - mu_hat)
    tol = 4.0 * se_mu * scale
    yield "quadrature-vs-sampling", dev <= tol, f"|mu-mc|={dev:.3e} tol={tol:.3e}"

    # moments strictly decreasing in separation
    mus = []
    for frac in (1.0, 1.3, 1.6):
        p = intf.CirclePatch(patch.circle_radius_m, patch.separation_m * frac)
        mus.append(
            intf.compute_tier_moments(p, config.geometry.path_loss_exponent, kdim, scheme).mu_x
        )
    ok = mus[0] > mus[1] > mus[2]
    yield "moment-monotonicity", ok, f"mu_x over growing separation: {[f'{m:.3e}' for m in mus]}"


def cmd_validate(config: ScenarioConfig, out: str, tolerance_scale: float) -> int:
    failures = 0
    with _open_out(out) as fh:
        for line in _header("validate", config):
            print(line, file=fh)
        for name, passed, detail in _validation_checks(config, tolerance_scale):
            status = "PASS" if passed else "FAIL"
            if not passed:
                failures += 1
            print(f"{status}: {name} ({detail})", file=fh)
        print(f"# {'OK' if failures == 0 else f'{failures} check(s) failed'}", file=fh)
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mimocap",
        description="Uplink user capacity for pilot-contamination-limited massive MIMO",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("config", help="path to the scenario config file")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override one config value (repeatable)",
        )
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")

    p = sub.add_parser("capacity-table", help="analytic capacity sweep over the QoS grid")
    add_common(p)
    p.add_argument("--diagnostics", default=None, help="also write per-reuse-factor rows here")

    p = sub.add_parser("sir-cdf", help="empirical vs Gaussian SIR CDFs (reuse 7 preset)")
    add_common(p)

    p = sub.add_parser("finite-m-table", help="finite-M admissible users per cell")
    add_common(p)

    p = sub.add_parser("validate", help="run the invariant / oracle suite")
    add_common(p)
    p.add_argument(
        "--tolerance-scale",
        type=float,
        default=1.0,
        help="multiply every validation tolerance (debugging aid)",
    )

    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, tuple(args.overrides))
        if args.command == "capacity-table":
            return cmd_capacity_table(config, args.out, args.diagnostics)
        if args.command == "sir-cdf":
            return cmd_sir_cdf(config, args.out)
        if args.command == "finite-m-table":
            return cmd_finite_m_table(config, args.out)
        if args.command == "validate":
            return cmd_validate(config, args.out, args.tolerance_scale)
        raise AssertionError(args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
