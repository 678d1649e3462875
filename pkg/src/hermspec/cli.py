"""Config-driven batch front-end.

Usage: hermspec <subcommand> --config <path> [--set key=value]...

Config files are flat `key = value` lines with `#` comments; `region` may
repeat to describe an inline sensor set.  Every subcommand writes
`<out_dir>/<subcommand>.csv` plus `<out_dir>/manifest.txt` with one
`criterion_id status value tolerance` line per asserted check.  Exit code 0
iff every asserted check passes, 1 on a numerical verification failure, 2 on
a config parse error.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import acceptance
from .acceptance import CriterionResult, results_csv, run_criteria, criterion_13
from .basis import BasisIndexSet, HermiteVector, derivative_operator
from .bounds import (
    BoundParams,
    bernstein_CB_log,
    cobs_bound_log,
    delta_choice,
    thm_balls_bound,
    thm_cubes_bound,
    thm_general_bound,
)
from .control import ControlProblem, hum_control, worst_case_initial_state
from .errors import ConfigError, VerificationError
from .geometry import (
    BallDensitySpec,
    CubeDensitySpec,
    Region,
    SensorSet,
    besicovitch_covering,
    example_finite_measure_set,
    lattice_covering,
)
from .gram import QuadratureRule, gram_over_set, gram_fullspace_weighted
from .rng import SplitMix64
from .spectral import (
    CellContext,
    classify_cells,
    counterexample_growth,
    spectral_constant,
    spectral_report,
)

_SCHEMA = {
    "dimension": int,
    "degree_max": int,
    "seed": int,
    "samples": int,
    "nodes": int,
    "m_max": int,
    "K": int,
    "N_min": int,
    "N_max": int,
    "quad_tol": float,
    "delta": float,
    "T": float,
    "C1": float,
    "C2": float,
    "C3": float,
    "gamma": float,
    "beta": float,
    "alpha": float,
    "rho": float,
    "R": float,
    "eps": float,
    "kappa": float,
    "eta": float,
    "D": float,
    "zeta": float,
    "d0": float,
    "d1": float,
    "M": float,
    "weight": float,
    "window_radius": float,
    "set": str,
    "covering": str,
    "profile": str,
    "out_dir": str,
    "region": str,  # repeatable
}

_DEFAULTS = {
    "seed": acceptance.DEFAULT_SEED,
    "samples": 20,
    "m_max": 5,
    "T": 1.0,
    "K": 16,
    "C1": 1.0,
    "C2": 1.0,
    "C3": 1.0,
    "out_dir": "out",
    "covering": "lattice",
    "set": "inline",
}


def parse_config(text):
    """Flat key = value parser; raises ConfigError with line/column."""
    cfg = {"region": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'", lineno, 1)
        key, value = line.split("=", 1)
        col = len(line) - len(line.lstrip()) + 1
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key '{key}'", lineno, col)
        if key == "region":
            cfg["region"].append(value)
            continue
        try:
            cfg[key] = _SCHEMA[key](value)
        except ValueError:
            vcol = line.index("=") + 2
            raise ConfigError(
                f"line {lineno}: bad value for '{key}': {value!r}", lineno, vcol
            ) from None
    return cfg


def apply_overrides(cfg, overrides):
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}': expected key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"override: unknown key '{key}'")
        if key == "region":
            cfg["region"].append(value.strip())
        else:
            cfg[key] = _SCHEMA[key](value.strip())
    return cfg


def _get(cfg, key, required_by=None):
    if key in cfg:
        return cfg[key]
    if key in _DEFAULTS:
        return _DEFAULTS[key]
    raise ConfigError(f"missing required key '{key}' for subcommand '{required_by}'")


def _quad_rule(cfg):
    if "quad_tol" in cfg or "nodes" in cfg:
        return QuadratureRule(
            tol=cfg.get("quad_tol", 1e-11), nodes=cfg.get("nodes", 64)
        )
    return QuadratureRule()


def _sensor_set(cfg, sub):
    kind = _get(cfg, "set", sub)
    d = _get(cfg, "dimension", sub)
    N = _get(cfg, "degree_max", sub)
    if kind == "inline":
        regions = cfg.get("region", [])
        if not regions:
            raise ConfigError(f"subcommand '{sub}': set=inline needs region lines")
        return SensorSet(tuple(Region.from_line(r, d) for r in regions))
    if kind == "fullspace_window":
        half = cfg.get("window_radius", max(20.0, math.sqrt(2.0 * N + d) + 8.0))
        return SensorSet((Region.box((0.0,) * d, (half,) * d),))
    if kind == "halfline_window":
        if d != 1:
            raise ConfigError("set=halfline_window requires dimension=1")
        return SensorSet((Region.interval(0.0, 64.0 * math.sqrt(N + 1.0)),))
    if kind == "finite_measure":
        spec = CubeDensitySpec(
            gamma=_get(cfg, "gamma", sub), beta=_get(cfg, "beta", sub),
            rho=cfg.get("rho", 1.0), d=d,
        )
        S, _ = example_finite_measure_set(spec, cfg.get("window_radius", 16.0))
        return S
    raise ConfigError(f"unknown set kind '{kind}'")


def _write(outdir, name, text):
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, name)
    with open(path, "w") as fh:
        fh.write(text)
    return path


def _emit(cfg, sub, header, rows, checks):
    """Write <sub>.csv and manifest.txt; return the failing checks."""
    outdir = _get(cfg, "out_dir", sub)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            v if isinstance(v, str) else format(float(v), ".17g") for v in row
        ))
    _write(outdir, f"{sub}.csv", "\n".join(lines) + "\n")
    _write(outdir, "manifest.txt", "".join(c.manifest_line() + "\n" for c in checks))
    return [c for c in checks if not c.passed]


def _check(name, passed, value, tolerance):
    return CriterionResult(0, name, bool(passed), float(value), float(tolerance))


def cmd_basis_check(cfg):
    d = _get(cfg, "dimension", "basis-check")
    N = _get(cfg, "degree_max", "basis-check")
    basis = BasisIndexSet(d, N)
    size_ok = basis.size == math.comb(N + d, d)
    half = max(20.0, math.sqrt(2.0 * N + d) + 8.0)
    G = gram_over_set(basis, SensorSet((Region.box((0.0,) * d, (half,) * d),)))
    dev = float(np.max(np.abs(G.entries - np.eye(basis.size))))
    rng = SplitMix64(_get(cfg, "seed", "basis-check"))
    f = HermiteVector(basis, rng.unit_coeffs(basis.size))
    df = derivative_operator(f, 0)
    # ladder consistency: d/dx phi_k norms from coefficients match |f|-scale
    ladder_ok = math.isfinite(df.norm2())
    rows = [
        ("size", basis.size, float(size_ok)),
        ("gram_deviation", dev, 1e-10),
        ("derivative_norm2", df.norm2(), float(ladder_ok)),
    ]
    checks = [
        _check("basis-size", size_ok, basis.size, 0.0),
        _check("orthonormality", dev <= 1e-10, dev, 1e-10),
    ]
    return _emit(cfg, "basis-check", ("check", "value", "tolerance"), rows, checks)


def cmd_decay(cfg):
    d = _get(cfg, "dimension", "decay")
    N = _get(cfg, "degree_max", "decay")
    w = cfg.get("weight", 1.0 / (64.0 * d))
    samples = _get(cfg, "samples", "decay")
    basis = BasisIndexSet(d, N)
    Gw = gram_fullspace_weighted(basis, w)
    bound = 2.0 ** (2 * (d + 1) + N)
    rng = SplitMix64(_get(cfg, "seed", "decay"))
    rows = []
    worst = 0.0
    # sample 0 is the pure ground state (analytic reference case)
    for i in range(samples):
        c = np.zeros(basis.size)
        if i == 0:
            c[0] = 1.0
        else:
            c = rng.unit_coeffs(basis.size)
        ratio = float(c @ Gw.entries @ c)
        worst = max(worst, ratio)
        rows.append((i, ratio, bound))
    checks = [_check("decay-ratio", worst <= bound - 1e-6, worst, bound)]
    return _emit(cfg, "decay", ("sample", "ratio", "bound"), rows, checks)


def cmd_bernstein(cfg):
    from .spectral import derivative_columns

    d = _get(cfg, "dimension", "bernstein")
    N = _get(cfg, "degree_max", "bernstein")
    m_max = _get(cfg, "m_max", "bernstein")
    samples = _get(cfg, "samples", "bernstein")
    delta = cfg.get("delta", delta_choice(cfg.get("D", 1.0), N, cfg.get("eps", 1.0)))
    basis = BasisIndexSet(d, N)
    rng = SplitMix64(_get(cfg, "seed", "bernstein"))
    rows = []
    worst = float("-inf")
    for i in range(samples):
        f = HermiteVector(basis, rng.unit_coeffs(basis.size))
        columns, group = derivative_columns(f, m_max)
        for m in range(1, m_max + 1):
            lhs = float(np.sum(columns[:, group == m] ** 2))
            log_lhs = math.log(lhs) if lhs > 0 else float("-inf")
            log_rhs = (bernstein_CB_log(m, N, d, delta) - math.lgamma(m + 1)
                       + math.log(f.norm2()))
            worst = max(worst, log_lhs - log_rhs)
            rows.append((i, m, log_lhs, log_rhs))
    checks = [_check("bernstein-margin", worst <= 0.0, worst, 0.0)]
    return _emit(cfg, "bernstein", ("sample", "m", "log_lhs", "log_rhs"), rows, checks)


def cmd_gram(cfg):
    d = _get(cfg, "dimension", "gram")
    N = _get(cfg, "degree_max", "gram")
    basis = BasisIndexSet(d, N)
    S = _sensor_set(cfg, "gram")
    G = gram_over_set(basis, S, _quad_rule(cfg))
    outdir = _get(cfg, "out_dir", "gram")
    _write(outdir, "gram.csv", G.to_csv())
    defect = G.symmetry_defect()
    checks = [_check("gram-symmetry", defect <= 1e-12, defect, 1e-12)]
    _write(outdir, "manifest.txt", "".join(c.manifest_line() + "\n" for c in checks))
    return [c for c in checks if not c.passed]


def cmd_spectral(cfg):
    d = _get(cfg, "dimension", "spectral")
    N = _get(cfg, "degree_max", "spectral")
    basis = BasisIndexSet(d, N)
    S = _sensor_set(cfg, "spectral")
    report = spectral_report(basis, S, _quad_rule(cfg))
    rows = [(report.N, report.d, report.set_hash, report.lam_min)]
    checks = [_check("spectral-positive", report.lam_min > 0, report.lam_min, 0.0)]
    return _emit(cfg, "spectral", ("N", "d", "set_hash", "lam_min"), rows, checks)


def cmd_classify(cfg):
    d = _get(cfg, "dimension", "classify")
    N = _get(cfg, "degree_max", "classify")
    m_max = _get(cfg, "m_max", "classify")
    samples = _get(cfg, "samples", "classify")
    basis = BasisIndexSet(d, N)
    if _get(cfg, "covering", "classify") == "besicovitch":
        spec = BallDensitySpec(
            gamma=_get(cfg, "gamma", "classify"), alpha=cfg.get("alpha", 0.0),
            eps=cfg.get("eps", 0.5), R=cfg.get("R", 1.0),
            profile=cfg.get("profile", "power"),
        )
        cov = besicovitch_covering(spec, d, N, K=_get(cfg, "K", "classify"))
    else:
        cov = lattice_covering(cfg.get("rho", 1.0), d, N, kappa=int(cfg.get("kappa", 1)))
    ctx = CellContext(cov, d, N + m_max, _quad_rule(cfg), nodes=48)
    rng = SplitMix64(_get(cfg, "seed", "classify"))
    rows = []
    worst_bad = 0.0
    worst_far = 0.0
    for i in range(samples):
        f = HermiteVector(basis, rng.unit_coeffs(basis.size))
        cls = classify_cells(f, cov, m_max=m_max, delta=cfg.get("delta"), ctx=ctx)
        worst_bad = max(worst_bad, cls.bad_mass_fraction)
        worst_far = max(worst_far, cls.far_mass_fraction)
        rows.append((i, cls.bad_mass_fraction, cls.far_mass_fraction,
                     int(np.sum(cls.good)), cls.max_flip_m))
    checks = [
        _check("bad-mass", worst_bad <= 0.5 + 1e-8, worst_bad, 0.5 + 1e-8),
        _check("far-mass", worst_far <= 0.25 + 1e-8, worst_far, 0.25 + 1e-8),
    ]
    return _emit(cfg, "classify",
                 ("sample", "bad_mass_fraction", "far_mass_fraction",
                  "good_cells", "max_flip_m"), rows, checks)


def cmd_besicovitch(cfg):
    d = _get(cfg, "dimension", "besicovitch")
    N = _get(cfg, "degree_max", "besicovitch")
    K = _get(cfg, "K", "besicovitch")
    spec = BallDensitySpec(
        gamma=_get(cfg, "gamma", "besicovitch"), alpha=cfg.get("alpha", 0.0),
        eps=cfg.get("eps", 0.5), R=cfg.get("R", 1.0),
        profile=cfg.get("profile", "power"),
    )
    cov = besicovitch_covering(spec, d, N, K=K)
    rows = [
        (k, *r.center, r.radius, int(k in cov.central))
        for k, r in enumerate(cov.elements)
    ]
    kappa_meas = cov.meta["kappa_measured"]
    cap = 2.0 * spec.R * cov.meta["C"] * N ** ((1.0 - spec.eps) / 2.0)
    max_r = max(r.radius for r in cov.elements)
    checks = [
        _check("overlap", kappa_meas <= K ** d, kappa_meas, float(K ** d)),
        _check("radius-cap", max_r <= cap * (1 + 1e-12), max_r, cap),
    ]
    header = ("index", *(f"c{j}" for j in range(d)), "radius", "central")
    return _emit(cfg, "besicovitch", header, rows, checks)


def cmd_bounds(cfg):
    d = _get(cfg, "dimension", "bounds")
    N = _get(cfg, "degree_max", "bounds")
    rows = []
    params = BoundParams(
        d=d, N=N, gamma=_get(cfg, "gamma", "bounds"),
        beta=cfg.get("beta"), alpha=cfg.get("alpha"),
        rho=cfg.get("rho"), R=cfg.get("R"),
        eps=cfg.get("eps", 1.0), kappa=cfg.get("kappa", 1.0),
        eta=cfg.get("eta", 1.0), D=cfg.get("D", 1.0), K=_get(cfg, "K", "bounds"),
    )
    rows.append(("general", thm_general_bound(params).log_value))
    if params.beta is not None and params.rho is not None:
        rows.append(("cubes", thm_cubes_bound(params).log_value))
    if params.alpha is not None and params.R is not None:
        rows.append(("balls", thm_balls_bound(params).log_value))
    if "zeta" in cfg:
        rows.append(("cobs", cobs_bound_log(
            _get(cfg, "d0", "bounds"), _get(cfg, "d1", "bounds"), cfg["zeta"],
            _get(cfg, "T", "bounds"), _get(cfg, "C1", "bounds"),
            _get(cfg, "C2", "bounds"), _get(cfg, "C3", "bounds"),
        )))
    finite = all(math.isfinite(v) for _, v in rows)
    checks = [_check("bounds-finite", finite, float(finite), 1.0)]
    return _emit(cfg, "bounds", ("bound", "log_value"), rows, checks)


def cmd_counterexample(cfg):
    M = _get(cfg, "M", "counterexample")
    n0 = cfg.get("N_min", 10)
    n1 = cfg.get("N_max", 40)
    rows_data, fitted_c = counterexample_growth(M, list(range(n0, n1 + 1)))
    rows = [(r.N, r.log_norm_full, r.log_norm_restricted, r.log_ratio)
            for r in rows_data]
    diffs = [b.log_ratio - a.log_ratio for a, b in zip(rows_data, rows_data[1:])]
    super_linear = all(d > 0 for d in diffs) and all(
        d2 > d1 for d1, d2 in zip(diffs, diffs[1:])
    )
    cap_ok = all(
        r.log_norm_restricted <= 0.5 * math.log(math.pi) + 2.0 * r.N * math.log(M)
        for r in rows_data
    )
    checks = [
        _check("growth-monotone-superlinear", super_linear, fitted_c, 0.0),
        _check("window-cap", cap_ok, float(cap_ok), 1.0),
    ]
    return _emit(cfg, "counterexample",
                 ("N", "log_norm_full", "log_norm_restricted", "log_ratio"),
                 rows, checks)


def cmd_control(cfg):
    d = _get(cfg, "dimension", "control")
    N = _get(cfg, "degree_max", "control")
    T = _get(cfg, "T", "control")
    samples = _get(cfg, "samples", "control")
    basis = BasisIndexSet(d, N)
    S = _sensor_set(cfg, "control")
    G = gram_over_set(basis, S, _quad_rule(cfg))
    rng = SplitMix64(_get(cfg, "seed", "control"))
    rows = []
    worst_resid = 0.0
    cobs = float("nan")
    for i in range(samples):
        phi0 = HermiteVector(basis, rng.unit_coeffs(basis.size))
        res = hum_control(ControlProblem(basis, G, T, phi0),
                          with_trajectory=(i == 0))
        cobs = res.c_obs_num
        worst_resid = max(worst_resid, res.terminal_residual, res.simulated_residual)
        rows.append((i, res.cost, res.terminal_residual, res.simulated_residual,
                     res.c_obs_num))
        if i == 0:
            _write(_get(cfg, "out_dir", "control"), "trajectory.csv",
                   res.trajectory_csv())
    phi_w = worst_case_initial_state(G, basis, T)
    res_w = hum_control(ControlProblem(basis, G, T, HermiteVector(basis, phi_w)))
    rel = abs(res_w.cost - cobs) / cobs
    checks = [
        _check("terminal-residual", worst_resid <= 1e-8, worst_resid, 1e-8),
        _check("worst-case-duality", rel <= 1e-6, rel, 1e-6),
    ]
    return _emit(cfg, "control",
                 ("sample", "cost", "terminal_residual", "simulated_residual",
                  "c_obs_num"), rows, checks)


def cmd_report(cfg):
    seed = _get(cfg, "seed", "report")
    results = run_criteria(seed)
    results.append(criterion_13(seed))
    outdir = _get(cfg, "out_dir", "report")
    _write(outdir, "report.csv", results_csv(results))
    _write(outdir, "manifest.txt",
           "".join(r.manifest_line() + "\n" for r in results))
    return [r for r in results if not r.passed]


_COMMANDS = {
    "basis-check": cmd_basis_check,
    "decay": cmd_decay,
    "bernstein": cmd_bernstein,
    "gram": cmd_gram,
    "spectral": cmd_spectral,
    "classify": cmd_classify,
    "besicovitch": cmd_besicovitch,
    "bounds": cmd_bounds,
    "counterexample": cmd_counterexample,
    "control": cmd_control,
    "report": cmd_report,
}


def main(argv=None):
    parser = argparse.ArgumentParser(prog="hermspec", description=__doc__)
    parser.add_argument("subcommand", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="key=value")
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        apply_overrides(cfg, args.overrides)
        failures = _COMMANDS[args.subcommand](cfg)
    except ConfigError as exc:
        loc = ""
        if exc.line is not None:
            loc = f" (line {exc.line}, column {exc.column})"
        print(f"config error{loc}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        if exc.ledger:
            print(exc.ledger, file=sys.stderr)
        return 1
    if failures:
        for c in failures:
            print(f"verification failure: {c.manifest_line()}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
