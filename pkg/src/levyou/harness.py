"""Monte Carlo validation harness.

Draws exact samples of the normalized terminal deviation across a horizon
grid, compares empirical indicator expectations against the normal and
higher-order expansion predictions, matches sample k-statistics against the
closed-form cumulants, and packages everything into a reproducible report.

Reproducibility contract: replicate draws are organized in fixed-size chunks
whose RNG streams derive from (seed, horizon index, chunk index) only, and
results are written into preallocated slots, so reports are byte-identical
for any worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cumulants import (
    R_MAX,
    ModelParams,
    cumulant_table,
    normalized_cumulant,
    normalized_cumulant_limit,
    stationary_cumulants,
)
from .edgeworth import cdf, expansion_coefficients
from .simulate import DriverSpec, driver_cumulants, sample_deviation

__all__ = [
    "CHUNK",
    "ExperimentConfig",
    "KStatistics",
    "MCReport",
    "MeanEstimatorResult",
    "ConvergenceStudy",
    "estimate_indicator",
    "k_statistics",
    "draw_normalized_samples",
    "run_validation",
    "mean_estimator_demo",
    "convergence_study",
]

# Replicates per RNG stream.  Fixed so that the sample array depends only on
# (seed, horizon index) and never on scheduling or worker count.
CHUNK = 4096

# Stream tag reserved for the bootstrap generator (disjoint from chunk ids).
_BOOT_TAG = 1 << 30

_FOOTNOTES = (
    "Remainder constants of the expansion error bound are not computable; "
    "comparisons use Monte Carlo standard-error bands and ordering tests, "
    "not rate checks.",
    "Indicator test functions evaluated away from mass concentration are "
    "insensitive to the smoothing modulus; that term is treated as "
    "negligible and is not quantified.",
    "Cells with |empirical - normal prediction| <= 4 SE are marked "
    "non-informative and excluded from ordering comparisons.",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one validation experiment."""

    params: ModelParams
    driver: DriverSpec
    T_grid: tuple[float, ...]
    p_orders: tuple[int, ...] = (2, 3, 4)
    n_samples: int = 100_000
    seed: int = 0
    test_points: tuple[float, ...] = (-1.0, 0.0, 1.0)
    workers: int = 0  # 0 -> hardware parallelism
    cumulant_override: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if len(self.T_grid) < 1 or any(t <= 0 for t in self.T_grid):
            raise ValueError("T_grid must contain positive horizons")
        if any(p < 2 for p in self.p_orders):
            raise ValueError("expansion orders must be >= 2")
        if max(self.p_orders) > R_MAX:
            raise ValueError(f"max expansion order {max(self.p_orders)} exceeds {R_MAX}")
        if self.n_samples < 100:
            raise ValueError("n_samples must be >= 100")
        if self.workers < 0:
            raise ValueError("workers must be >= 0")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        params = ModelParams(**{k: float(v) for k, v in d["params"].items()})
        drv = dict(d["driver"])
        variant = drv.pop("variant")
        driver = DriverSpec(variant=variant, **{k: float(v) for k, v in drv.items()})
        override = tuple(sorted((int(r), float(v))
                                for r, v in d.get("chi_override", {}).items()))
        return cls(
            params=params,
            driver=driver,
            T_grid=tuple(float(t) for t in d["T_grid"]),
            p_orders=tuple(int(p) for p in d.get("p_orders", (2, 3, 4))),
            n_samples=int(d["n_samples"]),
            seed=int(d["seed"]),
            test_points=tuple(float(a) for a in d.get("test_points", (-1.0, 0.0, 1.0))),
            workers=int(d.get("workers", 0)),
            cumulant_override=override,
        )

    def canonical_dict(self) -> dict:
        """Result-determining fields in canonical form (workers excluded:
        the worker count never changes outputs)."""
        return {
            "params": {"lam": self.params.lam, "gamma": self.params.gamma,
                       "beta": self.params.beta, "rho": self.params.rho},
            "driver": {"variant": self.driver.variant, "b": self.driver.b,
                       "C": self.driver.C, "c": self.driver.c,
                       "alpha": self.driver.alpha},
            "T_grid": list(self.T_grid),
            "p_orders": list(self.p_orders),
            "n_samples": self.n_samples,
            "seed": self.seed,
            "test_points": list(self.test_points),
            "chi_override": {str(r): v for r, v in self.cumulant_override},
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def resolved_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class KStatistics:
    """Unbiased cumulant estimates k_1..k_r with bootstrap standard errors."""

    values: np.ndarray
    se: np.ndarray


def estimate_indicator(samples: np.ndarray, a: float) -> tuple[float, float]:
    """Proportion of samples <= a with its binomial standard error."""
    n = samples.size
    if n < 2:
        raise ValueError("need at least two samples")
    p_hat = float(np.count_nonzero(samples <= a)) / n
    return p_hat, math.sqrt(p_hat * (1.0 - p_hat) / n)


def _kstats_from_moments(n: int, mean: float, m2: float, m3: float, m4: float,
                         r_max: int) -> np.ndarray:
    out = np.empty(r_max)
    out[0] = mean
    if r_max >= 2:
        out[1] = n * m2 / (n - 1)
    if r_max >= 3:
        out[2] = n * n * m3 / ((n - 1) * (n - 2))
    if r_max >= 4:
        out[3] = n * n * ((n + 1) * m4 - 3 * (n - 1) * m2 * m2) / ((n - 1) * (n - 2) * (n - 3))
    return out


def k_statistics(samples: np.ndarray, r_max: int = 4, n_boot: int = 200,
                 rng: np.random.Generator | None = None) -> KStatistics:
    """k-statistics (unbiased cumulant estimators) with bootstrap SEs.

    k2 = n*m2/(n-1), k3 = n^2*m3/((n-1)(n-2)),
    k4 = n^2*((n+1)*m4 - 3*(n-1)*m2^2)/((n-1)(n-2)(n-3)) with central moments
    m_r; standard errors from a nonparametric bootstrap (default 200
    resamples).
    """
    if not 1 <= r_max <= 4:
        raise ValueError("r_max must be between 1 and 4")
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n < max(2, r_max):
        raise ValueError(f"need at least {max(2, r_max)} samples, got {n}")
    if rng is None:
        rng = np.random.default_rng()
    mean = float(samples.mean())
    d = samples - mean
    d2 = d * d
    values = _kstats_from_moments(n, mean, float(d2.mean()),
                                  float((d2 * d).mean()), float((d2 * d2).mean()), r_max)
    boots = np.empty((n_boot, r_max))
    for bi in range(n_boot):
        idx = rng.integers(0, n, n)
        m1, m2, m3, m4 = _kernels.gathered_central_moments(samples, idx)
        boots[bi] = _kstats_from_moments(n, m1, m2, m3, m4, r_max)
    return KStatistics(values=values, se=boots.std(axis=0, ddof=1))


def draw_normalized_samples(params: ModelParams, driver: DriverSpec, T: float,
                            n: int, seed: int, workers: int = 1,
                            stream_tag: int = 0) -> np.ndarray:
    """n exact draws of the normalized deviation T^{-1/2}(Y_T - E[Y_T]).

    Chunked into fixed CHUNK-sized blocks with per-block streams keyed by
    (seed, stream_tag, block index); output is independent of `workers`.
    """
    out = np.empty(n)
    jobs = [(ci, lo, min(lo + CHUNK, n))
            for ci, lo in enumerate(range(0, n, CHUNK))]

    def work(job):
        ci, lo, hi = job
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream_tag, ci)))
        out[lo:hi] = sample_deviation(params, driver, T, rng, size=hi - lo)

    if workers <= 1 or len(jobs) == 1:
        for job in jobs:
            work(job)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(work, jobs))
    out /= math.sqrt(T)
    return out


@dataclass
class MCReport:
    """Validation results: indicator cells, cumulant matches, internal checks."""

    config_hash: str
    degenerate: bool
    partial: bool
    backend: str
    cells: list[dict]
    cumulants: list[dict]
    checks: list[dict]
    footnotes: tuple[str, ...]
    wall_time_s: float

    def to_json_dict(self, include_timing: bool = True) -> dict:
        d = {
            "config_hash": self.config_hash,
            "degenerate": self.degenerate,
            "partial": self.partial,
            "backend": self.backend,
            "cells": self.cells,
            "cumulants": self.cumulants,
            "checks": self.checks,
            "footnotes": list(self.footnotes),
        }
        if include_timing:
            d["meta"] = {"wall_time_s": self.wall_time_s}
        return d

    def write_cells_csv(self, fileobj) -> None:
        fileobj.write("T,a,p,empirical,se,psi_p,gap,informative\n")
        for c in self.cells:
            fileobj.write(
                f"{c['T']!r},{c['a']!r},{c['p']},{c['empirical']!r},"
                f"{c['se']!r},{c['psi_p']!r},{c['gap']!r},{int(c['informative'])}\n"
            )

    def all_checks_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)


def run_validation(cfg: ExperimentConfig) -> MCReport:
    """Run the full experiment described by cfg; deterministic given the seed.

    On KeyboardInterrupt the horizons completed so far are kept and the
    report is marked partial.
    """
    t0 = time.perf_counter()
    workers = cfg.resolved_workers()
    max_p = max(max(cfg.p_orders), 4)
    kappa_z = driver_cumulants(cfg.driver, max_p)
    kappa_f = stationary_cumulants(kappa_z, cfg.params.lam)
    override = dict(cfg.cumulant_override)
    cells: list[dict] = []
    cumulant_rows: list[dict] = []
    partial = False
    mass_err = 0.0
    comp_err = 0.0
    cum_fail: list[str] = []
    try:
        for t_idx, T in enumerate(cfg.T_grid):
            samples = draw_normalized_samples(cfg.params, cfg.driver, T,
                                              cfg.n_samples, cfg.seed,
                                              workers=workers, stream_tag=t_idx)
            table = cumulant_table(max_p, cfg.params, kappa_f, T, override=override)
            ecs = {p: expansion_coefficients(p, table)
                   for p in set(cfg.p_orders) | {2}}
            for p, ec in ecs.items():
                mass_err = max(mass_err, abs(cdf(math.inf, ec) - 1.0))
            for a in cfg.test_points:
                emp, se = estimate_indicator(samples, a)
                psi2 = cdf(a, ecs[2])
                informative = abs(emp - psi2) > 4.0 * se
                for p in cfg.p_orders:
                    below = cdf(a, ecs[p])
                    above = cdf(math.inf, ecs[p]) - below
                    comp_err = max(comp_err, abs(below + above - 1.0))
                    cells.append({
                        "T": T, "a": a, "p": p,
                        "empirical": emp, "se": se,
                        "psi_p": below, "gap": abs(emp - below),
                        "informative": bool(informative),
                    })
            boot_rng = np.random.default_rng(
                np.random.SeedSequence(cfg.seed, spawn_key=(t_idx, _BOOT_TAG)))
            ks = k_statistics(samples, r_max=4, rng=boot_rng)
            for r in range(1, 5):
                pred = 0.0 if r == 1 else table.get(r)
                row = {"T": T, "r": r, "k_stat": float(ks.values[r - 1]),
                       "se_boot": float(ks.se[r - 1]), "predicted": pred}
                cumulant_rows.append(row)
                if r <= 3 and abs(row["k_stat"] - pred) > 5.0 * row["se_boot"]:
                    cum_fail.append(f"T={T} r={r}")
    except KeyboardInterrupt:
        partial = True
    checks = [
        {"name": "expansion_total_mass", "passed": mass_err <= 1e-12,
         "detail": f"max |mass - 1| = {mass_err:.3e}"},
        {"name": "indicator_complement", "passed": comp_err <= 1e-12,
         "detail": f"max |below + above - 1| = {comp_err:.3e}"},
        {"name": "cumulant_match", "passed": not cum_fail,
         "detail": "k_r within 5 bootstrap SE of prediction for r <= 3"
                   + ("" if not cum_fail else f"; failed: {', '.join(cum_fail)}")},
    ]
    return MCReport(
        config_hash=cfg.config_hash(),
        degenerate=cfg.params.degenerate,
        partial=partial,
        backend=_kernels.BACKEND,
        cells=cells,
        cumulants=cumulant_rows,
        checks=checks,
        footnotes=_FOOTNOTES,
        wall_time_s=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class MeanEstimatorResult:
    """Distributional summary of the time-average estimator of the stationary mean."""

    theta_hat: float
    theta0: float
    summary: dict


def _ks_distance(sorted_samples: np.ndarray, cdf_fn) -> float:
    n = sorted_samples.size
    fx = np.asarray([cdf_fn(x) for x in sorted_samples])
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(max(np.max(np.abs(upper - fx)), np.max(np.abs(fx - lower))))


def mean_estimator_demo(params: ModelParams, driver: DriverSpec, T: float,
                        n_samples: int, seed: int, workers: int = 1) -> MeanEstimatorResult:
    """Monte Carlo study of the time-average estimator theta_hat = Y_T / T.

    Requires beta = 1, gamma = 0, rho = 0, in which case sqrt(T) times the
    estimation error equals the normalized deviation exactly.  Reports the
    bias, the variance of the scaled error against the closed-form variance,
    and Kolmogorov-Smirnov distances of the scaled error to the normal and
    the order-3 expansion.
    """
    if not (params.beta == 1.0 and params.gamma == 0.0 and params.rho == 0.0):
        raise ValueError("mean-estimator demo requires beta=1, gamma=0, rho=0")
    kappa_f = stationary_cumulants(driver_cumulants(driver, 4), params.lam)
    theta0 = kappa_f.get(1)
    scaled = draw_normalized_samples(params, driver, T, n_samples, seed,
                                     workers=workers, stream_tag=0)
    theta_hats = theta0 + scaled / math.sqrt(T)
    bias = float(theta_hats.mean() - theta0)
    bias_se = float(theta_hats.std(ddof=1) / math.sqrt(n_samples))
    boot_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, _BOOT_TAG)))
    ks = k_statistics(scaled, r_max=2, rng=boot_rng)
    var_scaled = float(ks.values[1])
    var_se = float(ks.se[1])
    sigma_t = normalized_cumulant(2, params, kappa_f, T)
    table = cumulant_table(3, params, kappa_f, T)
    ec3 = expansion_coefficients(3, table)
    ec2 = expansion_coefficients(2, table)
    s = np.sort(scaled)
    ks_normal = _ks_distance(s, lambda x: cdf(x, ec2))
    ks_order3 = _ks_distance(s, lambda x: cdf(x, ec3))
    return MeanEstimatorResult(
        theta_hat=float(theta_hats.mean()),
        theta0=theta0,
        summary={
            "T": T, "n_samples": n_samples,
            "bias": bias, "bias_se": bias_se,
            "var_scaled_error": var_scaled, "var_se_boot": var_se,
            "var_predicted": sigma_t,
            "ks_normal": ks_normal, "ks_order3": ks_order3,
        },
    )


@dataclass(frozen=True)
class ConvergenceStudy:
    """Closed-form decay of the rescaled cumulants toward their limits."""

    rows: list[dict]
    slopes: dict[int, float | None]


def convergence_study(cfg: ExperimentConfig) -> ConvergenceStudy:
    """Tabulate T^{(r-2)/2} * cumulant against its limit over the horizon grid.

    For each r in {2,3,4} reports the rescaled value, the limit, the absolute
    gap, and the fitted log-log decay slope of the gap (None when the gap is
    identically zero, e.g. odd orders under a Gaussian driver).
    """
    if len(cfg.T_grid) < 3:
        raise ValueError("convergence study needs at least 3 horizons")
    kappa_f = stationary_cumulants(driver_cumulants(cfg.driver, 4), cfg.params.lam)
    rows: list[dict] = []
    slopes: dict[int, float | None] = {}
    for r in (2, 3, 4):
        gaps = []
        for T in cfg.T_grid:
            scaled = T ** ((r - 2) / 2.0) * normalized_cumulant(r, cfg.params, kappa_f, T)
            limit = normalized_cumulant_limit(r, cfg.params, kappa_f)
            gap = abs(scaled - limit)
            rows.append({"r": r, "T": T, "scaled": scaled, "limit": limit, "gap": gap})
            gaps.append(gap)
        if all(g > 0 for g in gaps):
            slope = float(np.polyfit(np.log(cfg.T_grid), np.log(gaps), 1)[0])
        else:
            slope = None
        slopes[r] = slope
    return ConvergenceStudy(rows=rows, slopes=slopes)
