"""Command-line front end.

Subcommands: cumulants, density, expect, simulate, validate, theta-hat,
converge.  One JSON config file drives everything; individual keys can be
overridden with repeated `--set dot.path=value` flags.  Exit codes:
0 success, 2 config error, 3 model degeneracy, 4 strict-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, apply_override, load_config, validate_config
from .cumulants import (
    cumulant_table,
    normalized_cumulant_limit,
    stationary_cumulants,
)
from .edgeworth import (
    TestFunction,
    cdf,
    density,
    expansion_coefficients,
    expect,
    negative_density_report,
)
from .harness import (
    ExperimentConfig,
    convergence_study,
    mean_estimator_demo,
    run_validation,
)
from .simulate import driver_cumulants, sample_path, write_path_csv

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_DEGENERATE = 3
_EXIT_STRICT = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levyou",
        description="Cumulants, Edgeworth expansions, and exact Monte Carlo "
                    "for the integrated Levy-driven OU model.",
    )
    parser.add_argument("subcommand", choices=[
        "cumulants", "density", "expect", "simulate", "validate",
        "theta-hat", "converge",
    ])
    parser.add_argument("--config", required=True, help="path to JSON config file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry by dot path (repeatable)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", choices=["csv", "json", "table"], default="csv")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--workers", type=int, default=None,
                        help="override worker count (0 = hardware parallelism)")
    parser.add_argument("--strict", action="store_true",
                        help="exit nonzero when any internal report check fails")
    return parser


def _experiment_config(cfg: dict) -> ExperimentConfig:
    return ExperimentConfig.from_dict(cfg)


def _write_rows(rows: list[dict], columns: list[str], out_dir: Path, stem: str,
                fmt: str) -> None:
    if fmt == "table":
        widths = [max(len(c), 14) for c in columns]
        print("  ".join(c.ljust(w) for c, w in zip(columns, widths)))
        for row in rows:
            print("  ".join(str(row[c]).ljust(w) for c, w in zip(columns, widths)))
        return
    if fmt == "json":
        path = out_dir / f"{stem}.json"
        path.write_text(json.dumps({"rows": rows}, indent=2) + "\n")
    else:
        path = out_dir / f"{stem}.csv"
        with path.open("w") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(repr(float(row[c])) if isinstance(row[c], float)
                                  else str(row[c]) for c in columns) + "\n")
    print(f"wrote {path}")


def _model_pieces(cfg: dict):
    ecfg = _experiment_config(cfg)
    max_p = max(max(ecfg.p_orders), 4)
    kappa_f = stationary_cumulants(driver_cumulants(ecfg.driver, max_p), ecfg.params.lam)
    return ecfg, max_p, kappa_f


def cmd_cumulants(cfg: dict, args) -> int:
    ecfg, max_p, kappa_f = _model_pieces(cfg)
    override = dict(ecfg.cumulant_override)
    rows = []
    for T in ecfg.T_grid:
        table = cumulant_table(max_p, ecfg.params, kappa_f, T, override=override)
        for r in range(2, max_p + 1):
            value = table.get(r)
            rows.append({
                "T": T, "r": r,
                "cumulant": value,
                "scaled": T ** ((r - 2) / 2.0) * value,
                "limit": normalized_cumulant_limit(r, ecfg.params, kappa_f),
            })
    _write_rows(rows, ["T", "r", "cumulant", "scaled", "limit"],
                Path(args.out), "cumulants", args.format)
    return _EXIT_OK


def cmd_density(cfg: dict, args) -> int:
    ecfg, max_p, kappa_f = _model_pieces(cfg)
    if ecfg.params.degenerate:
        print("model is degenerate (beta + rho*lam = 0): the limiting variance "
              "vanishes and no expansion density is emitted", file=sys.stderr)
        return _EXIT_DEGENERATE
    grid_cfg = cfg.get("density_grid", {"lo": -6.0, "hi": 6.0, "n": 241})
    ys = np.linspace(grid_cfg["lo"], grid_cfg["hi"], grid_cfg["n"])
    override = dict(ecfg.cumulant_override)
    out_dir = Path(args.out)
    for T in ecfg.T_grid:
        table = cumulant_table(max_p, ecfg.params, kappa_f, T, override=override)
        sigma = table.get(2)
        if not sigma > 0:
            print(f"variance {sigma!r} at T={T} is not positive; no density",
                  file=sys.stderr)
            return _EXIT_DEGENERATE
        ecs = {p: expansion_coefficients(p, table) for p in ecfg.p_orders}
        cols = {p: density(ys, ec) for p, ec in ecs.items()}
        path = out_dir / f"density_T{T:g}.csv"
        with path.open("w") as fh:
            fh.write("y," + ",".join(f"g_{p}" for p in ecfg.p_orders) + "\n")
            for i, y in enumerate(ys):
                vals = ",".join(repr(float(cols[p][i])) for p in ecfg.p_orders)
                fh.write(f"{float(y)!r},{vals}\n")
        print(f"wrote {path}")
        for p in ecfg.p_orders:
            mn, at = negative_density_report(ecs[p])
            if mn < 0:
                print(f"  T={T:g} p={p}: density dips to {mn:.3e} at y={at:.3f} "
                      "(signed measure, not clipped)")
    return _EXIT_OK


def cmd_expect(cfg: dict, args) -> int:
    ecfg, max_p, kappa_f = _model_pieces(cfg)
    override = dict(ecfg.cumulant_override)
    moments = cfg.get("moments", [1, 2, 3])
    rows = []
    for T in ecfg.T_grid:
        table = cumulant_table(max_p, ecfg.params, kappa_f, T, override=override)
        for p in ecfg.p_orders:
            ec = expansion_coefficients(p, table)
            for a in ecfg.test_points:
                rows.append({"T": T, "p": p, "kind": "indicator_le", "arg": a,
                             "value": cdf(a, ec)})
            for m in moments:
                f = TestFunction.polynomial([0.0] * m + [1.0])
                rows.append({"T": T, "p": p, "kind": "moment", "arg": float(m),
                             "value": expect(f, ec)})
    _write_rows(rows, ["T", "p", "kind", "arg", "value"],
                Path(args.out), "expect", args.format)
    return _EXIT_OK


def cmd_simulate(cfg: dict, args) -> int:
    ecfg, _, _ = _model_pieces(cfg)
    sim = cfg.get("sim", {})
    n_steps = int(sim.get("n_steps", 64))
    n_paths = int(sim.get("n_paths", 1))
    T = ecfg.T_grid[0]
    out_dir = Path(args.out)
    deviations = []
    for i in range(n_paths):
        child = int(np.random.SeedSequence(ecfg.seed, spawn_key=(i,)).generate_state(1)[0])
        path = sample_path(ecfg.params, ecfg.driver, T, n_steps, seed=child)
        fname = out_dir / f"path_{i:03d}.csv"
        with fname.open("w") as fh:
            write_path_csv(path, fh)
        deviations.append(path.deviation)
    summary = out_dir / "simulate_summary.json"
    summary.write_text(json.dumps({
        "config_hash": ecfg.config_hash(),
        "T": T, "n_steps": n_steps, "n_paths": n_paths,
        "deviations": deviations,
    }, indent=2) + "\n")
    print(f"wrote {n_paths} path file(s) and {summary}")
    return _EXIT_OK


def cmd_validate(cfg: dict, args) -> int:
    ecfg = _experiment_config(cfg)
    report = run_validation(ecfg)
    out_dir = Path(args.out)
    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
    csv_path = out_dir / "report.csv"
    with csv_path.open("w") as fh:
        report.write_cells_csv(fh)
    print(f"wrote {json_path} and {csv_path}")
    for check in report.checks:
        status = "ok" if check["passed"] else "FAILED"
        print(f"  check {check['name']}: {status} ({check.get('detail', '')})")
    if report.degenerate:
        print("  note: parameters are degenerate (beta + rho*lam = 0)")
    if args.strict and not report.all_checks_passed():
        return _EXIT_STRICT
    return _EXIT_OK


def cmd_theta_hat(cfg: dict, args) -> int:
    ecfg = _experiment_config(cfg)
    try:
        result = mean_estimator_demo(ecfg.params, ecfg.driver, ecfg.T_grid[0],
                                     ecfg.n_samples, ecfg.seed,
                                     workers=ecfg.resolved_workers())
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return _EXIT_CONFIG
    out_path = Path(args.out) / "theta_hat.json"
    out_path.write_text(json.dumps({
        "theta_hat": result.theta_hat,
        "theta0": result.theta0,
        "summary": result.summary,
    }, indent=2) + "\n")
    print(f"wrote {out_path}")
    return _EXIT_OK


def cmd_converge(cfg: dict, args) -> int:
    ecfg = _experiment_config(cfg)
    try:
        study = convergence_study(ecfg)
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return _EXIT_CONFIG
    _write_rows(study.rows, ["r", "T", "scaled", "limit", "gap"],
                Path(args.out), "converge", args.format)
    slopes_path = Path(args.out) / "converge_slopes.json"
    slopes_path.write_text(json.dumps(
        {str(r): s for r, s in study.slopes.items()}, indent=2) + "\n")
    print(f"wrote {slopes_path}")
    return _EXIT_OK


_DISPATCH = {
    "cumulants": cmd_cumulants,
    "density": cmd_density,
    "expect": cmd_expect,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "theta-hat": cmd_theta_hat,
    "converge": cmd_converge,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        for assignment in args.set:
            apply_override(cfg, assignment)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.workers is not None:
            cfg["workers"] = args.workers
        validate_config(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return _EXIT_CONFIG
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        return _DISPATCH[args.subcommand](cfg, args)
    except (ValueError, ConfigError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return _EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
