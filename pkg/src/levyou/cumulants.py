"""Closed-form cumulants of the normalized integrated OU functional.

The model is the bivariate system

    X_t = X_0 - lam * int_0^t X_s ds + Z_t
    Y_t = int_0^t (gamma + beta * X_s) ds + rho * Z_t

driven by a Levy process Z.  Everything in this module is a deterministic
function of the model parameters, the cumulants of the stationary law of X,
and the horizon T.  The central quantity is the r-th cumulant of
T^{-1/2} * (Y_T - E[Y_T]), available in closed form because the integrated
OU process admits the kernel representation

    int_0^t X_s ds = k(t) X_0 + int_0^t k(t - s) dZ_s,

with k(u) = (1 - exp(-lam*u)) / lam the integrated exponential decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "R_MAX",
    "DEGENERACY_RTOL",
    "ModelParams",
    "CumulantKind",
    "CumulantVector",
    "CumulantTable",
    "integrated_decay",
    "decay_power_mean",
    "stationary_cumulants",
    "kernel_weight_integral",
    "normalized_cumulant",
    "normalized_cumulant_limit",
    "cumulant_table",
    "wiener_nondegeneracy_det",
]

# Highest cumulant order supported.  Binomial coefficients and the
# composition counts of the expansion stay exactly representable up to here.
R_MAX = 12

# Relative tolerance deciding when beta + rho*lam counts as zero.
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Parameter vector (lam, gamma, beta, rho) of the bivariate model.

    lam is the mean-reversion rate (must be positive), gamma the drift of the
    integrated component, beta the coupling to X (must be nonzero), rho the
    direct loading on the driver.
    """

    lam: float
    gamma: float
    beta: float
    rho: float

    def __post_init__(self):
        for name in ("lam", "gamma", "beta", "rho"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam!r}")
        if self.beta == 0:
            raise ValueError("beta must be nonzero")

    @property
    def degenerate(self) -> bool:
        """True when beta + rho*lam vanishes (relative tolerance 1e-12).

        In the degenerate regime the limiting variance of the normalized
        functional is zero; construction still succeeds and the flag is
        propagated into reports.
        """
        s = abs(self.beta) + abs(self.rho * self.lam)
        return abs(self.beta + self.rho * self.lam) <= DEGENERACY_RTOL * s


class CumulantKind(Enum):
    """Which law a cumulant vector describes."""

    STATIONARY = "stationary"  # stationary law of X
    DRIVER = "driver"          # unit-time increment of the driver Z


@dataclass(frozen=True)
class CumulantVector:
    """Cumulants kappa^(1)..kappa^(r_max) of a distribution."""

    kind: CumulantKind
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("need at least two cumulant orders")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("cumulants must be finite")
        if self.values[1] < 0:
            raise ValueError("second cumulant must be nonnegative")

    @property
    def order(self) -> int:
        return len(self.values)

    def get(self, k: int) -> float:
        """kappa^(k), 1-based order."""
        if not 1 <= k <= len(self.values):
            raise ValueError(f"cumulant order {k} not available (have 1..{len(self.values)})")
        return self.values[k - 1]


@dataclass(frozen=True)
class CumulantTable:
    """Cumulants of the normalized functional for orders 2..p at horizon T."""

    T: float
    values: tuple[float, ...]  # order r = 2 .. p

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("T must be positive")
        if len(self.values) < 1:
            raise ValueError("table must contain at least the variance")

    @property
    def order(self) -> int:
        """Largest order p covered by the table."""
        return len(self.values) + 1

    def get(self, r: int) -> float:
        if not 2 <= r <= self.order:
            raise ValueError(f"order {r} outside table range 2..{self.order}")
        return self.values[r - 2]


def integrated_decay(lam: float, u):
    """int_0^u exp(-lam*s) ds = (1 - exp(-lam*u)) / lam.

    Monotone nondecreasing in u and bounded by 1/lam.  Accepts scalar or
    array u.  expm1 keeps the small-lam*u regime accurate and saturates
    exactly at 1/lam once lam*u underflows the exponential.
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam!r}")
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0):
        raise ValueError("u must be nonnegative")
    out = -np.expm1(-lam * u_arr) / lam
    return float(out) if np.isscalar(u) or u_arr.ndim == 0 else out


def decay_power_mean(r: int, j: int, lam: float, T: float) -> float:
    """Time average (1/T) int_0^T integrated_decay(lam, v)**j dv, closed form.

    Equals 1 for j = 0 and

        lam**-j - T**-1 * lam**-(j+1) * sum_{k=1}^{j} (lam*k(T))**k / k

    for j >= 1; tends to lam**-j as T grows.  The order r only bounds the
    admissible j (the value itself does not depend on r).
    """
    if not isinstance(j, int) or not isinstance(r, int):
        raise ValueError("r and j must be integers")
    if r < 1 or not 0 <= j <= r:
        raise ValueError(f"need 1 <= r and 0 <= j <= r, got r={r}, j={j}")
    if lam <= 0 or T <= 0:
        raise ValueError("lam and T must be positive")
    if j == 0:
        return 1.0
    x = -math.expm1(-lam * T)  # lam * integrated_decay(lam, T), in [0, 1)
    # Horner accumulation of sum_{k=1}^{j} x**k / k.
    s = 0.0
    for k in range(j, 0, -1):
        s = x * (1.0 / k + s)
    return lam ** (-j) - s / (T * lam ** (j + 1))


def stationary_cumulants(driver_cum: CumulantVector, lam: float) -> CumulantVector:
    """Cumulants of the stationary law from driver cumulants: kappa_F^(k) = kappa_Z^(k) / (k*lam)."""
    if driver_cum.kind is not CumulantKind.DRIVER:
        raise ValueError("expected driver cumulants")
    if lam <= 0:
        raise ValueError("lam must be positive")
    vals = tuple(v / (k * lam) for k, v in enumerate(driver_cum.values, start=1))
    return CumulantVector(CumulantKind.STATIONARY, vals)


def kernel_weight_integral(r: int, params: ModelParams, T: float) -> float:
    """int_0^T (rho + beta * integrated_decay(lam, v))**r dv, closed form.

    This is T times the binomial combination of decay_power_mean values; the
    r = 1 and r = 2 cases are the drift and Gaussian-variance weights used by
    the exact sampler.
    """
    if not isinstance(r, int) or r < 1:
        raise ValueError(f"r must be a positive integer, got {r!r}")
    if r > R_MAX:
        raise ValueError(f"r={r} exceeds supported maximum {R_MAX}")
    if T <= 0:
        raise ValueError("T must be positive")
    lam, beta, rho = params.lam, params.beta, params.rho
    total = 0.0
    for j in range(r + 1):
        total += math.comb(r, j) * rho ** (r - j) * beta ** j * decay_power_mean(r, j, lam, T)
    return T * total


def normalized_cumulant(r: int, params: ModelParams, kappa_f: CumulantVector, T: float) -> float:
    """r-th cumulant of T^{-1/2} (Y_T - E[Y_T]), exact closed form.

    For r = 2 this is the exact finite-horizon variance of the normalized
    functional.
    """
    if not isinstance(r, int) or r < 2:
        raise ValueError(f"r must be an integer >= 2, got {r!r}")
    if r > R_MAX:
        raise ValueError(f"r={r} exceeds supported maximum {R_MAX}")
    if kappa_f.kind is not CumulantKind.STATIONARY:
        raise ValueError("expected stationary cumulants")
    if r > kappa_f.order:
        raise ValueError(f"cumulant order {r} not available (have 1..{kappa_f.order})")
    if T <= 0:
        raise ValueError("T must be positive")
    lam, beta = params.lam, params.beta
    k_T = integrated_decay(lam, T)
    bracket = (beta * k_T) ** r / T + lam * r * kernel_weight_integral(r, params, T) / T
    return T ** (-(r - 2) / 2.0) * bracket * kappa_f.get(r)


def normalized_cumulant_limit(r: int, params: ModelParams, kappa_f: CumulantVector) -> float:
    """Large-T limit of T^{(r-2)/2} times the r-th normalized cumulant.

    The binomial sum collapses to lam * r * (rho + beta/lam)**r * kappa_F^(r);
    for r = 2 this equals 2 * (beta + rho*lam)**2 * kappa_F^(2) / lam.
    Identically zero in the degenerate regime beta + rho*lam = 0.
    """
    if not isinstance(r, int) or r < 2:
        raise ValueError(f"r must be an integer >= 2, got {r!r}")
    if r > R_MAX:
        raise ValueError(f"r={r} exceeds supported maximum {R_MAX}")
    if kappa_f.kind is not CumulantKind.STATIONARY:
        raise ValueError("expected stationary cumulants")
    if r > kappa_f.order:
        raise ValueError(f"cumulant order {r} not available (have 1..{kappa_f.order})")
    lam = params.lam
    return lam * r * (params.rho + params.beta / lam) ** r * kappa_f.get(r)


def cumulant_table(
    p: int,
    params: ModelParams,
    kappa_f: CumulantVector,
    T: float,
    override: dict[int, float] | None = None,
) -> CumulantTable:
    """Table of normalized cumulants for orders 2..p at horizon T.

    `override` maps an order r to a replacement value; it exists as a
    diagnostics hook (e.g. for exercising strict-mode failure paths) and is
    never applied implicitly.
    """
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"p must be an integer >= 2, got {p!r}")
    vals = [normalized_cumulant(r, params, kappa_f, T) for r in range(2, p + 1)]
    if override:
        for r, v in override.items():
            r = int(r)
            if 2 <= r <= p:
                vals[r - 2] = float(v)
    return CumulantTable(T=float(T), values=tuple(vals))


def wiener_nondegeneracy_det(C: float, params: ModelParams, t0: float) -> float:
    """Determinant lower bound for the joint-law covariance of (X, deviation).

    Evaluates

        C^2 * lam^-4 * (beta + rho*lam)^2
            * { (lam*t0/2) * (exp(2*lam*t0) - 1) - (exp(lam*t0) - 1)^2 }

    which is strictly positive whenever beta + rho*lam != 0 and lam*t0 != 0.
    Useful as a diagnostic for joint-distribution non-degeneracy when the
    driver has a Gaussian component.
    """
    if C <= 0:
        raise ValueError("C must be positive")
    if t0 <= 0:
        raise ValueError("t0 must be positive")
    lam = params.lam
    x = lam * t0
    brace = 0.5 * x * math.expm1(2.0 * x) - math.expm1(x) ** 2
    return C ** 2 * lam ** -4 * (params.beta + params.rho * lam) ** 2 * brace
