"""Exact sampling for the integrated Levy-driven OU model.

Drivers are restricted to families with closed-form cumulants and exact
samplers: Brownian motion with drift, compound Poisson with exponential
jumps, and their independent mixture.  For these, both the terminal
deviation Y_T - E[Y_T] and grid paths of (X, Y) are drawn from their exact
laws; there is no discretization bias at any step size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cumulants import (
    CumulantKind,
    CumulantVector,
    ModelParams,
    integrated_decay,
    kernel_weight_integral,
)

__all__ = [
    "DriverSpec",
    "PathSample",
    "driver_cumulants",
    "sample_stationary_state",
    "sample_deviation",
    "sample_path",
    "expected_terminal",
    "write_path_csv",
]


@dataclass(frozen=True)
class DriverSpec:
    """A concrete Levy driver, identified by its generating triplet.

    Cumulant convention (compensated-jump form): kappa^(1) = b is the total
    mean of the unit-time increment, kappa^(2) = C + c*2!/alpha**2, and
    kappa^(k) = c*k!/alpha**k for k >= 3.  The raw drift of the sampled path
    is then b0 = b - c/alpha.
    """

    variant: str  # "gaussian" | "cpexp" | "mixed"
    b: float = 0.0
    C: float = 0.0
    c: float = 0.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.variant not in ("gaussian", "cpexp", "mixed"):
            raise ValueError(f"unknown driver variant {self.variant!r}")
        if self.variant in ("gaussian", "mixed") and not self.C > 0:
            raise ValueError("gaussian component requires C > 0")
        if self.variant == "cpexp" and self.C != 0:
            raise ValueError("cpexp driver must have C = 0")
        if self.variant in ("cpexp", "mixed"):
            if not (self.c > 0 and self.alpha > 0):
                raise ValueError("jump component requires c > 0 and alpha > 0")

    @classmethod
    def gaussian(cls, b: float, C: float) -> "DriverSpec":
        return cls(variant="gaussian", b=float(b), C=float(C))

    @classmethod
    def cpexp(cls, b: float, c: float, alpha: float) -> "DriverSpec":
        return cls(variant="cpexp", b=float(b), c=float(c), alpha=float(alpha))

    @classmethod
    def mixed(cls, b: float, C: float, c: float, alpha: float) -> "DriverSpec":
        return cls(variant="mixed", b=float(b), C=float(C), c=float(c), alpha=float(alpha))

    @property
    def has_jumps(self) -> bool:
        return self.variant in ("cpexp", "mixed")

    @property
    def b0(self) -> float:
        """Raw path drift: total mean minus the jump-part mean c/alpha."""
        return self.b - self.c / self.alpha if self.has_jumps else self.b


@dataclass(frozen=True)
class PathSample:
    """One grid path of (X, Y) with the exact terminal deviation."""

    times: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    deviation: float  # Y_T - E[Y_T]
    seed: int


def driver_cumulants(driver: DriverSpec, r_max: int) -> CumulantVector:
    """Cumulants kappa^(1..r_max) of the unit-time driver increment."""
    if r_max < 2:
        raise ValueError("r_max must be >= 2")
    vals = [driver.b]
    for k in range(2, r_max + 1):
        v = driver.C if k == 2 else 0.0
        if driver.has_jumps:
            v += driver.c * math.factorial(k) / driver.alpha ** k
        vals.append(v)
    return CumulantVector(CumulantKind.DRIVER, tuple(vals))


def sample_stationary_state(driver: DriverSpec, lam: float, rng: np.random.Generator,
                            size: int | None = None):
    """Draw from the stationary law of X.

    Gaussian driver: Normal(b/lam, C/(2*lam)).  Exponential-jump driver:
    b0/lam plus Gamma(shape c/lam, rate alpha).  Mixed: independent sum.
    Draw order per call: one normal block (when C > 0), then one gamma block
    (when jumps are present).
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    n = 1 if size is None else int(size)
    out = np.full(n, driver.b0 / lam)
    if driver.C > 0:
        out += rng.normal(0.0, math.sqrt(driver.C / (2.0 * lam)), n)
    if driver.has_jumps:
        out += rng.gamma(driver.c / lam, 1.0 / driver.alpha, n)
    return float(out[0]) if size is None else out


def expected_terminal(params: ModelParams, driver: DriverSpec, T: float) -> float:
    """E[Y_T] = gamma*T + T*(beta + rho*lam)*kappa_F^(1)."""
    kf1 = driver.b / params.lam
    return params.gamma * T + T * (params.beta + params.rho * params.lam) * kf1


def sample_deviation(params: ModelParams, driver: DriverSpec, T: float,
                     rng: np.random.Generator, size: int | None = None):
    """Exact draw of Y_T - E[Y_T] via the kernel representation.

    Composition: beta*k(T)*X_0 from the stationary start, the deterministic
    centering -T*(beta+rho*lam)*kappa_F^(1) plus the raw drift b0 times the
    order-1 kernel-weight integral (which folds the jump compensator, so the
    draw has exact mean zero), a Gaussian part with variance C times the
    order-2 kernel-weight integral, and the jump sum over Poisson(c*T) jumps
    with Uniform(0,T) arrival times and Exp(alpha) sizes.

    Draw order per call: stationary block(s) for X_0, one standard-normal
    block (when C > 0), one Poisson block, then arrival times and jump sizes
    (when jumps are present).
    """
    if T <= 0:
        raise ValueError("T must be positive")
    n = 1 if size is None else int(size)
    lam, beta, rho = params.lam, params.beta, params.rho
    kf1 = driver.b / lam
    w1 = kernel_weight_integral(1, params, T)
    x0 = np.atleast_1d(sample_stationary_state(driver, lam, rng, size=n))
    out = beta * integrated_decay(lam, T) * x0 - T * (beta + rho * lam) * kf1 + driver.b0 * w1
    if driver.C > 0:
        w2 = kernel_weight_integral(2, params, T)
        out = out + math.sqrt(driver.C * w2) * rng.standard_normal(n)
    if driver.has_jumps:
        counts = rng.poisson(driver.c * T, n)
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        total = int(offsets[-1])
        tau = rng.uniform(0.0, T, total)
        sizes = rng.exponential(1.0 / driver.alpha, total)
        out = out + _kernels.segment_weighted_sums(tau, sizes, offsets, lam, beta, rho, T)
    return float(out[0]) if size is None else out


def _step_gaussian_cholesky(C: float, lam: float, dt: float) -> tuple[float, float, float]:
    """Cholesky factors of the exact 2x2 covariance of the per-step Gaussian
    pair (increment of X, step integral of X).

    v11 = C*(1-exp(-2*lam*dt))/(2*lam)
    cov = C*(1-exp(-lam*dt))**2/(2*lam**2)
    v22 = C*(dt - 2*k(dt) + (1-exp(-2*lam*dt))/(2*lam))/lam**2
    """
    if C <= 0:
        return 0.0, 0.0, 0.0
    e1 = -math.expm1(-lam * dt)       # 1 - exp(-lam*dt)
    e2 = -math.expm1(-2.0 * lam * dt)  # 1 - exp(-2*lam*dt)
    v11 = C * e2 / (2.0 * lam)
    cov = C * e1 * e1 / (2.0 * lam ** 2)
    v22 = C * (dt - 2.0 * e1 / lam + e2 / (2.0 * lam)) / lam ** 2
    a11 = math.sqrt(v11)
    a21 = cov / a11
    a22 = math.sqrt(max(v22 - a21 * a21, 0.0))
    return a11, a21, a22


def sample_path(params: ModelParams, driver: DriverSpec, T: float, n_steps: int,
                seed: int, x0: float | None = None) -> PathSample:
    """Grid-exact joint path of (X, Y) on n_steps uniform steps.

    Each step draws the exact joint law of (X increment, step integral of X)
    - Gaussian part via the closed 2x2 covariance, jump part via exact jump
    times within the step - and recovers the driver increment exactly from
    the state equation, so the law of the path is independent of n_steps.
    Y starts at zero; X starts from the stationary law unless x0 overrides
    it (diagnostics hook).
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if T <= 0:
        raise ValueError("T must be positive")
    rng = np.random.default_rng(seed)
    lam, beta, gamma, rho = params.lam, params.beta, params.gamma, params.rho
    dt = T / n_steps
    x_start = sample_stationary_state(driver, lam, rng) if x0 is None else float(x0)
    n = n_steps
    if driver.C > 0:
        g1 = rng.standard_normal(n)
        g2 = rng.standard_normal(n)
    else:
        g1 = np.zeros(n)
        g2 = np.zeros(n)
    if driver.has_jumps:
        counts = rng.poisson(driver.c * dt, n)
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        total = int(offsets[-1])
        jt = rng.uniform(0.0, dt, total)
        js = rng.exponential(1.0 / driver.alpha, total)
        dxj, ij = _kernels.jump_step_sums(jt, js, offsets, lam, dt)
    else:
        dxj = np.zeros(n)
        ij = np.zeros(n)
    q = math.exp(-lam * dt)
    eta_d = integrated_decay(lam, dt)
    b0 = driver.b0
    drift_x = b0 * eta_d
    drift_i = b0 * (dt - eta_d) / lam
    a11, a21, a22 = _step_gaussian_cholesky(driver.C, lam, dt)
    X, Y = _kernels.path_recursion(x_start, q, eta_d, drift_x, drift_i,
                                   a11, a21, a22, g1, g2, dxj, ij,
                                   lam, beta, gamma, rho, dt)
    times = np.linspace(0.0, T, n + 1)
    deviation = float(Y[-1]) - expected_terminal(params, driver, T)
    return PathSample(times=times, X=X, Y=Y, deviation=deviation, seed=int(seed))


def write_path_csv(path: PathSample, fileobj) -> None:
    """Dump a path as CSV with header t,X,Y, one row per grid point."""
    fileobj.write("t,X,Y\n")
    for t, x, y in zip(path.times, path.X, path.Y):
        fileobj.write(f"{float(t)!r},{float(x)!r},{float(y)!r}\n")
