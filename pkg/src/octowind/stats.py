"""Monte Carlo estimators and distributional tests for winding samples.

Estimators accept either a list of :class:`~octowind.engine.WindingSample`
or the batched arrays produced by the drivers in :mod:`octowind.mc`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, stats as spstats

from .errors import DomainError
from .geometry import ModelSpace

DEFAULT_KS_THRESHOLD = 0.02
DEFAULT_DIAG_RTOL = 0.05
DEFAULT_OFFDIAG_ATOL = 0.1


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_samples: int


@dataclass(frozen=True)
class GaussTestReport:
    ks_per_marginal: np.ndarray       # 7 KS statistics vs the standard normal
    cov_matrix: np.ndarray            # 7x7 sample covariance
    max_offdiag: float
    passed: bool
    ks_threshold: float
    diag_rtol: float
    offdiag_atol: float

    def to_dict(self) -> dict:
        return {
            "ks_per_marginal": [float(k) for k in self.ks_per_marginal],
            "cov_matrix": [[float(v) for v in row] for row in self.cov_matrix],
            "max_offdiag": float(self.max_offdiag),
            "pass": bool(self.passed),
            "ks_threshold": self.ks_threshold,
            "diag_rtol": self.diag_rtol,
            "offdiag_atol": self.offdiag_atol,
        }


def _gather(samples) -> tuple[np.ndarray, Optional[np.ndarray]]:
    """Extract (zeta (n,7), clock (n,) or None) from either input form."""
    if hasattr(samples, "zeta"):  # a batched MC result
        zeta = samples.zeta
        clock = getattr(samples, "clock_end", None)
        if zeta is None and clock is None:
            raise DomainError("result carries neither windings nor clock values")
        n = len(zeta) if zeta is not None else len(clock)
        return (zeta if zeta is not None else np.zeros((n, 7))), clock
    samples = list(samples)
    if not samples:
        raise DomainError("empty sample list")
    zeta = np.stack([s.zeta for s in samples])
    clocks = [s.clock_end for s in samples]
    clock = np.array(clocks, dtype=float) if all(c is not None for c in clocks) else None
    return zeta, clock


def mc_charfn(samples, lam) -> McEstimate:
    """Monte Carlo estimate of the characteristic function E[exp(i lam . zeta)].

    When clock values are attached, the conditional (Rao-Blackwellized)
    estimator exp(-|lam|^2 A_t / 2) is used; otherwise cos(lam . zeta).
    Either way the estimator is real and even in lam.
    """
    zeta, clock = _gather(samples)
    lam = np.asarray(lam, dtype=float)
    if lam.ndim == 0:
        direction = np.zeros(7)
        direction[0] = 1.0
        lam = abs(float(lam)) * direction
    if lam.shape != (7,):
        raise DomainError("lambda must be a scalar norm or a 7-vector")
    if clock is not None:
        draws = np.exp(-0.5 * float(lam @ lam) * clock)
    else:
        draws = np.cos(zeta @ lam)
    n = draws.size
    value = float(draws.mean())
    se = float(draws.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(value=value, std_error=se, n_samples=n)


def empirical_cov(samples) -> np.ndarray:
    """Unbiased sample covariance of the 7 winding coordinates."""
    zeta, _ = _gather(samples)
    if len(zeta) < 2:
        raise DomainError("need at least two samples for a covariance")
    return np.cov(zeta, rowvar=False)


def gaussian_test(
    samples,
    target_cov,
    ks_threshold: float = DEFAULT_KS_THRESHOLD,
    diag_rtol: float = DEFAULT_DIAG_RTOL,
    offdiag_atol: float = DEFAULT_OFFDIAG_ATOL,
) -> GaussTestReport:
    """Test winding samples against N(0, target_cov).

    Each marginal is standardized by the target standard deviation and
    compared to the standard normal CDF by a one-sample KS statistic; the
    sample covariance must match the target within the stated tolerances.
    """
    zeta, _ = _gather(samples)
    if len(zeta) < 100:
        raise DomainError("gaussian_test needs at least 100 samples")
    target_cov = np.asarray(target_cov, dtype=float)
    if np.isscalar(target_cov) or target_cov.ndim == 0:
        target_cov = float(target_cov) * np.eye(7)
    diag = np.diag(target_cov)
    if np.any(diag <= 0):
        raise DomainError("target covariance is degenerate")
    ks = np.array([
        spstats.kstest(zeta[:, i] / math.sqrt(diag[i]), "norm").statistic
        for i in range(7)
    ])
    cov = np.cov(zeta, rowvar=False)
    off = cov - np.diag(np.diag(cov))
    max_offdiag = float(np.abs(off).max())
    diag_ok = bool(np.all(np.abs(np.diag(cov) - diag) <= diag_rtol * diag))
    off_ok = bool(np.abs(off - (target_cov - np.diag(diag))).max() <= offdiag_atol)
    passed = bool(np.all(ks < ks_threshold)) and diag_ok and off_ok
    return GaussTestReport(
        ks_per_marginal=ks,
        cov_matrix=cov,
        max_offdiag=max_offdiag,
        passed=passed,
        ks_threshold=ks_threshold,
        diag_rtol=diag_rtol,
        offdiag_atol=offdiag_atol,
    )


def ks_vs_cdf(values: np.ndarray, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a callable CDF."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - f), np.max(f - (grid - 1.0 / n))))


# ---------------------------------------------------------------------------
# Projective stationary law

def _sin7_norm() -> float:
    value, _ = integrate.quad(lambda u: math.sin(2 * u) ** 7, 0.0, math.pi / 2,
                              epsabs=1e-14, epsrel=1e-13)
    return value


def projective_stationary_cdf(r) -> np.ndarray:
    """CDF of the stationary radial density proportional to sin^7(2r)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    norm = _sin7_norm()
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        ri = min(max(ri, 0.0), math.pi / 2)
        val, _ = integrate.quad(lambda u: math.sin(2 * u) ** 7, 0.0, ri,
                                epsabs=1e-14, epsrel=1e-13, limit=200)
        out[i] = val / norm
    return out


def stationary_mean_clock_rate() -> float:
    """Mean of the clock rate under the projective stationary law (quadrature)."""
    norm = _sin7_norm()
    val, _ = integrate.quad(lambda u: 4.0 / math.sin(2 * u) ** 2 * math.sin(2 * u) ** 7,
                            0.0, math.pi / 2, epsabs=1e-14, epsrel=1e-13)
    return val / norm


def stationary_density_check(radial_samples, space: ModelSpace) -> float:
    """KS distance of long-run radial samples to the stationary density.

    Only the projective space has a stationary radial law.
    """
    if space is not ModelSpace.PROJECTIVE:
        raise DomainError("stationary density check applies to the projective space only")
    samples = np.asarray(radial_samples, dtype=float)
    if samples.size == 0:
        raise DomainError("no radial samples given")
    # One quadrature per unique grid cell would be slow for 1e5 samples; use
    # a dense precomputed CDF and interpolate (grid error ~1e-9 << KS scale).
    grid = np.linspace(0.0, math.pi / 2, 4097)
    pdf = np.sin(2 * grid) ** 7
    cdf = np.concatenate([[0.0], integrate.cumulative_simpson(pdf, x=grid)])
    cdf /= cdf[-1]
    return ks_vs_cdf(samples, lambda x: np.interp(x, grid, cdf))
