"""Command-line front end: sample ensembles, run the verification battery,
aggregate trend reports.

Exit codes: 0 success (all checks pass for `verify`), 1 at least one
verification check failed, 2 configuration/usage error, 3 numeric failure
(eigensolver non-convergence and friends).

Outputs are deterministic: a (command line, seed) pair reproduces files
byte for byte, and --threads only changes wall time. CSV files carry the
data columns only, with the run metadata in a `<out>.meta.json` sidecar;
JSON files embed the same metadata inline.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .eig import ConvergenceError
from .equilibrium import equilibrium_for, euler_lagrange_residual
from .exactlaws import (
    Gamma,
    Gumbel,
    beta_ginibre_laws,
    gumbel_normalization,
    kostlan_moduli,
    spectral_radius_cdf,
    spectral_radius_sample,
)
from .detkernel import (
    density_kpoint,
    envelope_gap,
    gamma_poisson_tail,
    kernel_K,
    polar_quadrature,
    scaled_one_point,
    two_point_defect,
)
from .kernel import GasParameters, Quadratic
from .rmt import (
    ginibre_eigs,
    product_ginibre_eigs,
    spherical_eigs,
    stereographic_lift,
    truncated_unitary_eigs,
)
from .sampler import SamplerConfig, run_hermite_chain, run_parallel_chains
from .stats import clt_variance, harmonic, ks_test, ks_two_sample, sphere_z_uniformity, w1_radial

ENSEMBLES = ("coulomb", "ginibre", "spherical", "truncated", "product", "hermite")
FORMATS = ("csv", "json")
SUITES = ("default", "selftest")

# checks executed by `verify --suite default`, in order
DEFAULT_SUITE_SIZE = 15


class ConfigError(ValueError):
    """Invalid run configuration; maps to exit code 2."""


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _read_config_file(path: str) -> dict:
    values = {}
    known = {
        "ensemble", "n", "beta", "seed", "chains", "samples",
        "burn_in", "thin", "out", "format", "threads", "suite", "m", "dim",
    }
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        values[key] = value
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coulombgas",
        description="Sample Coulomb gases and matrix ensembles; verify them against exact laws.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--ensemble", choices=ENSEMBLES, default=None)
        p.add_argument("--n", type=int, default=None, help="particle count / matrix size")
        p.add_argument("--beta", type=float, default=None, help="inverse temperature")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--chains", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--burn-in", dest="burn_in", type=int, default=None)
        p.add_argument("--thin", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=FORMATS, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--suite", choices=SUITES, default=None)
        p.add_argument("--m", type=int, default=None,
                       help="host unitary size (truncated) or factor count (product)")
        p.add_argument("--dim", type=int, default=None, help="ambient dimension (coulomb)")
        p.add_argument("--config", default=None, help="key=value file; flags win")

    for name in ("sample", "verify"):
        add_common(sub.add_parser(name))
    rep = sub.add_parser("report")
    add_common(rep)
    rep.add_argument("inputs", nargs="*", help="sample files to aggregate")
    return parser


_DEFAULTS = {
    "ensemble": "ginibre",
    "n": 8,
    "beta": 2.0,
    "seed": 0,
    "chains": 1,
    "samples": 100,
    "burn_in": 10_000,
    "thin": 100,
    "out": None,
    "format": "csv",
    "threads": 1,
    "suite": "default",
    "m": None,
    "dim": 2,
}

_INT_KEYS = {"n", "seed", "chains", "samples", "burn_in", "thin", "threads", "m", "dim"}


def _resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS)
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            if key in _INT_KEYS:
                cfg[key] = int(raw)
            elif key == "beta":
                cfg[key] = float(raw)
            else:
                cfg[key] = raw
    for key in cfg:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            cfg[key] = flag_val
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    if cfg["ensemble"] not in ENSEMBLES:
        raise ConfigError(f"ensemble: unknown value {cfg['ensemble']!r}")
    if cfg["n"] < 1:
        raise ConfigError(f"n: must be >= 1, got {cfg['n']}")
    if not cfg["beta"] > 0:
        raise ConfigError(f"beta: must be positive, got {cfg['beta']}")
    if cfg["samples"] < 1:
        raise ConfigError(f"samples: must be >= 1, got {cfg['samples']}")
    if cfg["chains"] < 1:
        raise ConfigError(f"chains: must be >= 1, got {cfg['chains']}")
    if cfg["burn_in"] < 0:
        raise ConfigError(f"burn_in: must be >= 0, got {cfg['burn_in']}")
    if cfg["thin"] < 1:
        raise ConfigError(f"thin: must be >= 1, got {cfg['thin']}")
    if cfg["threads"] < 1:
        raise ConfigError(f"threads: must be >= 1, got {cfg['threads']}")
    if cfg["format"] not in FORMATS:
        raise ConfigError(f"format: unknown value {cfg['format']!r}")
    if cfg["ensemble"] in ("ginibre", "spherical", "truncated", "product") and cfg["beta"] != 2.0:
        raise ConfigError(f"beta: matrix ensembles are beta = 2 only, got {cfg['beta']}")
    if cfg["ensemble"] == "truncated":
        m = cfg["m"] if cfg["m"] is not None else 2 * cfg["n"]
        if m <= cfg["n"]:
            raise ConfigError(f"m: truncation needs m > n, got m={m}, n={cfg['n']}")
        cfg["m"] = m
    if cfg["ensemble"] == "product" and cfg["m"] is None:
        cfg["m"] = 2
    if cfg["dim"] < 1 or (cfg["ensemble"] == "coulomb" and cfg["dim"] < 2):
        raise ConfigError(f"dim: must be >= 2 for the coulomb ensemble, got {cfg['dim']}")


def _metadata(cfg: dict) -> dict:
    meta = {k: cfg[k] for k in sorted(cfg) if k != "out"}
    meta["version"] = __version__
    return meta


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


def _spectrum_task(ensemble: str, n: int, m, seed_seq) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    if ensemble == "ginibre":
        return ginibre_eigs(n, rng).eigenvalues
    if ensemble == "spherical":
        return spherical_eigs(n, rng).eigenvalues
    if ensemble == "truncated":
        return truncated_unitary_eigs(n, m, rng).eigenvalues
    if ensemble == "product":
        return product_ginibre_eigs(n, m, rng).eigenvalues
    raise ValueError(ensemble)


def _sample_rows(cfg: dict) -> tuple[list, int]:
    """Return (rows, d) with rows [sample_index, particle_index, coords...]."""
    ensemble = cfg["ensemble"]
    n = cfg["n"]
    rows = []
    if ensemble == "coulomb":
        p = GasParameters(cfg["dim"], n, cfg["beta"], Quadratic(0.5))
        sc = SamplerConfig(
            step=0.3, burn_in=cfg["burn_in"], thin=cfg["thin"], seed=cfg["seed"]
        )
        outputs = run_parallel_chains(p, sc, cfg["chains"], cfg["samples"], cfg["threads"])
        d = cfg["dim"]
        s_idx = 0
        for out in outputs:
            for sample in out.samples:
                for j in range(n):
                    rows.append([s_idx, j, *sample.points[j]])
                s_idx += 1
        return rows, d
    if ensemble == "hermite":
        sc = SamplerConfig(
            step=0.5, burn_in=cfg["burn_in"], thin=cfg["thin"], seed=cfg["seed"]
        )
        xs, _ = run_hermite_chain(n, cfg["beta"], sc, cfg["samples"] * cfg["chains"])
        for s_idx in range(xs.shape[0]):
            for j in range(n):
                rows.append([s_idx, j, xs[s_idx, j]])
        return rows, 1
    # matrix ensembles: one independent spectrum per sample, spawned seeds
    seeds = np.random.SeedSequence(cfg["seed"]).spawn(cfg["samples"])
    tasks = [(ensemble, n, cfg["m"], s) for s in seeds]
    if cfg["threads"] > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg["threads"]) as pool:
            spectra = list(pool.map(_spectrum_task_star, tasks))
    else:
        spectra = [_spectrum_task_star(t) for t in tasks]
    for s_idx, eigs in enumerate(spectra):
        for j in range(n):
            rows.append([s_idx, j, eigs[j].real, eigs[j].imag])
    return rows, 2


def _spectrum_task_star(task):
    return _spectrum_task(*task)


def _write_rows(cfg: dict, rows: list, d: int) -> None:
    columns = ["sample_index", "particle_index"] + [f"coord_{k + 1}" for k in range(d)]
    meta = _metadata(cfg)
    out = cfg["out"]
    if out is None:
        raise ConfigError("out: an output path is required for `sample`")
    path = Path(out)
    if cfg["format"] == "csv":
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([row[0], row[1]] + [_fmt(float(v)) for v in row[2:]])
        path.with_suffix(path.suffix + ".meta.json").write_text(
            json.dumps(meta, sort_keys=True, indent=2) + "\n"
        )
    else:
        doc = {
            "metadata": meta,
            "columns": columns,
            "rows": [[row[0], row[1]] + [float(v) for v in row[2:]] for row in rows],
        }
        path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def cmd_sample(cfg: dict) -> int:
    rows, d = _sample_rows(cfg)
    _write_rows(cfg, rows, d)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _check(check_id, statistic, p_or_res, threshold, passed):
    return {
        "check_id": check_id,
        "statistic": float(statistic),
        "p_value_or_residual": float(p_or_res),
        "threshold": float(threshold),
        "pass": bool(passed),
    }


def _verify_checks(seed: int, corrupt: bool = False) -> list[dict]:
    """The battery behind `verify`: oracle identities plus sampled laws.

    With corrupt=True the radial-law oracle is deliberately mis-shaped
    (shape + 1) to prove the harness reports failures.
    """
    checks = []

    # sampled beta-Ginibre laws (Metropolis chain vs exact Gamma/Gaussian)
    n = 8
    p = GasParameters(2, n, 2.0, Quadratic(0.5))
    sc = SamplerConfig(step=0.3, burn_in=20_000, thin=160, seed=seed)
    out = run_parallel_chains(p, sc, 1, 4_000)[0]
    coord_law, radial_law = beta_ginibre_laws(n, 2.0)
    if corrupt:
        radial_law = Gamma(radial_law.shape + 1.0, radial_law.rate)
    rep = ks_test(out.diagnostics["sum_sq"], radial_law)
    checks.append(_check("exact_radial_law", rep.statistic, rep.p_value, 0.01, rep.p_value > 0.01))
    rep = ks_test(out.diagnostics["sum_coord"][:, 0], coord_law)
    checks.append(_check("exact_gaussian_sum", rep.statistic, rep.p_value, 0.01, rep.p_value > 0.01))

    # moduli decomposition vs eigensolved matrices
    rng = np.random.Generator(np.random.PCG64(seed + 1))
    mat_moduli = np.concatenate(
        [ginibre_eigs(16, rng).moduli * math.sqrt(16) for _ in range(100)]
    )
    kos_moduli = np.concatenate([kostlan_moduli(16, rng) for _ in range(100)])
    rep = ks_two_sample(mat_moduli, kos_moduli)
    checks.append(_check("kostlan_matrix_crosscheck", rep.statistic, rep.p_value, 0.01, rep.p_value > 0.01))

    # deterministic one-point density limits
    n_det = 200
    bulk = max(abs(math.pi * scaled_one_point(n_det, r) - 1.0) for r in np.linspace(0.0, 0.8, 33))
    outside = max(scaled_one_point(n_det, r) for r in np.linspace(1.2, 2.0, 33))
    checks.append(_check("circular_law_bulk", bulk, bulk, 1e-6, bulk <= 1e-6))
    checks.append(_check("circular_law_outside", outside, outside, 1e-6, outside <= 1e-6))

    # truncated-exponential envelope on a modulus/phase grid
    violations = 0
    worst = -math.inf
    for n_env in (2, 5, 10, 30):
        for r in np.linspace(0.0, 2.0, 40):
            for t in np.linspace(0.0, 2.0 * math.pi, 40, endpoint=False):
                z = r * complex(math.cos(t), math.sin(t))
                lhs, bound = envelope_gap(n_env, z)
                slack = lhs - bound
                worst = max(worst, slack)
                if slack > 0.0:
                    violations += 1
    checks.append(_check("series_envelope_grid", worst, violations, 0.0, violations == 0))

    # Gamma-Poisson tail identity
    gap = max(
        abs(np.subtract(*gamma_poisson_tail(k, r)))
        for k in range(1, 31)
        for r in (0.5, 1.0, 2.0, 5.0, 10.0)
    )
    checks.append(_check("gamma_poisson_identity", gap, gap, 1e-12, gap <= 1e-12))

    # variational residual of the disc law under quadratic confinement
    disc = equilibrium_for("uniform_disc")
    grid_r = np.linspace(0.05, 0.95, 10)
    grid_t = np.linspace(0.0, 2.0 * math.pi, 10, endpoint=False)
    grid = np.array([[r * math.cos(t), r * math.sin(t)] for r in grid_r for t in grid_t])
    res = euler_lagrange_residual(Quadratic(0.5), disc, grid)
    checks.append(_check("euler_lagrange_disc", res, res, 1e-12, res <= 1e-12))

    # kernel trace identity, n = 5
    trace = polar_quadrature(lambda z: kernel_K(5, z, z).real, 7.0, n_r=120, n_theta=64)
    checks.append(_check("kernel_trace", trace, abs(trace - 5.0), 1e-6, abs(trace - 5.0) <= 1e-6))

    # pair marginal consistency at n = 2
    z1 = 0.4 + 0.1j
    marg = polar_quadrature(lambda z2: density_kpoint(2, [z1, z2]), 7.0, n_r=120, n_theta=64)
    gap = abs(marg - density_kpoint(2, [z1]))
    checks.append(_check("pair_marginal", marg, gap, 1e-6, gap <= 1e-6))

    # factorization defect shrinks with n
    grid_pts = [0.1 + 0.0j, -0.5 + 0.3j, 0.2 - 0.6j, 0.7 + 0.1j]
    sups = []
    for n_def in (10, 20, 40):
        sup = max(
            abs(two_point_defect(n_def, a, b))
            for i, a in enumerate(grid_pts)
            for b in grid_pts[i + 1 :]
        )
        sups.append(sup)
    decreasing = sups[0] > sups[1] > sups[2]
    checks.append(_check("chaoticity_decrease", sups[-1], sups[0], sups[0], decreasing))

    # spectral radius: sampler against its exact finite-n law
    rng = np.random.Generator(np.random.PCG64(seed + 2))
    draws = np.array([spectral_radius_sample(1000, rng) for _ in range(2000)])
    rep = ks_test(draws, lambda r: spectral_radius_cdf(1000, r))
    checks.append(
        _check("spectral_radius_exact_law", rep.statistic, rep.p_value, 0.01, rep.p_value > 0.01)
    )

    # deterministic distance to the limiting Gumbel shrinks with n
    zs = np.linspace(-3.0, 8.0, 60)
    dists = []
    for n_edge in (1000, 10_000):
        center, scale = gumbel_normalization(n_edge)
        gap = max(
            abs(spectral_radius_cdf(n_edge, center + scale * z) - Gumbel().cdf(z)) for z in zs
        )
        dists.append(gap)
    checks.append(_check("gumbel_edge_trend", dists[-1], dists[0], dists[0], dists[1] < dists[0]))

    # limiting variance of Re z
    var = clt_variance(harmonic(1, "re"))
    checks.append(_check("clt_variance_re_z", var, abs(var - 0.5), 1e-8, abs(var - 0.5) <= 1e-8))

    # spherical ensemble: uniform z-coordinate on the sphere
    rng = np.random.Generator(np.random.PCG64(seed + 3))
    lifted = []
    for _ in range(50):
        eigs = spherical_eigs(16, rng).eigenvalues
        lifted.extend(stereographic_lift(z) for z in eigs)
    rep = sphere_z_uniformity(np.array(lifted))
    checks.append(_check("spherical_z_uniform", rep.statistic, rep.p_value, 0.01, rep.p_value > 0.01))

    return checks


def cmd_verify(cfg: dict) -> int:
    corrupt = cfg["suite"] == "selftest"
    checks = _verify_checks(cfg["seed"], corrupt=corrupt)
    out = cfg["out"]
    if out is not None:
        path = Path(out)
        if cfg["format"] == "csv":
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    ["check_id", "statistic", "p_value_or_residual", "threshold", "pass"]
                )
                for c in checks:
                    writer.writerow(
                        [
                            c["check_id"],
                            _fmt(c["statistic"]),
                            _fmt(c["p_value_or_residual"]),
                            _fmt(c["threshold"]),
                            c["pass"],
                        ]
                    )
        else:
            path.write_text(json.dumps({"metadata": _metadata(cfg), "checks": checks},
                                       sort_keys=True, indent=2) + "\n")
    all_pass = all(c["pass"] for c in checks)
    for c in checks:
        status = "PASS" if c["pass"] else "FAIL"
        print(
            f"[{status}] {c['check_id']}: statistic={c['statistic']:.6g} "
            f"p/residual={c['p_value_or_residual']:.6g} threshold={c['threshold']:.6g}"
        )
    print(f"{sum(c['pass'] for c in checks)}/{len(checks)} checks passed")
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _load_sample_file(path: Path) -> tuple[dict, np.ndarray, int]:
    """Return (metadata, points array (n_rows, d), d)."""
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        meta = doc["metadata"]
        rows = doc["rows"]
        d = len(doc["columns"]) - 2
        pts = np.array([r[2:] for r in rows], dtype=float)
        return meta, pts, d
    meta_path = path.with_suffix(path.suffix + ".meta.json")
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    particle_max = 0
    with path.open() as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = len(header) - 2
        data = []
        for row in reader:
            particle_max = max(particle_max, int(row[1]))
            data.append([float(v) for v in row[2:]])
    pts = np.array(data, dtype=float)
    meta.setdefault("n", particle_max + 1)
    return meta, pts, d


def _limit_measure(meta: dict):
    ensemble = meta.get("ensemble")
    if ensemble in ("coulomb", "ginibre"):
        return equilibrium_for("uniform_disc")
    if ensemble == "spherical":
        return equilibrium_for("spherical_heavy_tail")
    if ensemble == "truncated":
        return equilibrium_for("truncation_limit", alpha=meta["n"] / meta["m"])
    if ensemble == "product":
        return equilibrium_for("product_limit", m=meta["m"])
    if ensemble == "hermite":
        return equilibrium_for("semicircle")
    raise ConfigError(f"ensemble: cannot infer a limit law for {ensemble!r}")


def cmd_report(cfg: dict, inputs: list[str]) -> int:
    if not inputs:
        raise ConfigError("inputs: report needs at least one sample file")
    rows = []
    for raw in inputs:
        path = Path(raw)
        if not path.exists():
            print(f"error: missing input file {raw}", file=sys.stderr)
            return 2
        meta, pts, d = _load_sample_file(path)
        measure = _limit_measure(meta)
        n = meta.get("n")
        if measure.is_radial:
            w1 = w1_radial(pts, measure)
            rep = ks_test(np.linalg.norm(pts, axis=1), measure.radial_cdf)
        else:
            w1 = float("nan")
            rep = ks_test(pts[:, 0], measure.radial_cdf)
        rows.append(
            {
                "file": str(path),
                "ensemble": meta.get("ensemble"),
                "n": n,
                "beta": meta.get("beta"),
                "n_points": int(pts.shape[0]),
                "w1_radial": float(w1),
                "ks_stat": float(rep.statistic),
                "ks_p": float(rep.p_value),
            }
        )
    rows.sort(key=lambda r: (r["n"] is None, r["n"]))
    series = [r["w1_radial"] if not math.isnan(r["w1_radial"]) else r["ks_stat"] for r in rows]
    decreasing = all(a > b for a, b in zip(series, series[1:])) if len(series) > 1 else True
    for r in rows:
        r["trend_decreasing"] = decreasing

    out = cfg["out"]
    if out is not None:
        path = Path(out)
        keys = ["file", "ensemble", "n", "beta", "n_points", "w1_radial", "ks_stat", "ks_p", "trend_decreasing"]
        if cfg["format"] == "csv":
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(keys)
                for r in rows:
                    writer.writerow([_fmt(r[k]) if isinstance(r[k], float) else r[k] for k in keys])
        else:
            path.write_text(json.dumps({"rows": rows}, sort_keys=True, indent=2) + "\n")
    for r in rows:
        print(f"{r['file']}: n={r['n']} w1={r['w1_radial']:.6g} ks={r['ks_stat']:.6g} p={r['ks_p']:.3g}")
    print(f"trend_decreasing={decreasing}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "sample":
            return cmd_sample(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "report":
            return cmd_report(cfg, args.inputs)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
