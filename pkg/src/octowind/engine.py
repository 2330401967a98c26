"""Path simulation for the radial diffusions and the winding functionals.

Two routes produce winding samples:

* time change: simulate the radial diffusion, accumulate the angular clock
  A_t by the trapezoidal rule, then draw zeta ~ N(0, A_t I_7) conditionally
  on the path (the skew-product decomposition makes this the exact law);
* line integral: simulate the coordinate process w(t) and accumulate the
  winding one-form along the path with midpoint (Stratonovich) evaluation.

The radial integrator is Euler-Maruyama with an implicit-drift substep
whenever an explicit step would leave the open radial domain; the noise is
additive, so the Ito and Stratonovich readings of the radial SDE coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, SimulationError
from .geometry import (
    ModelSpace,
    RADIAL_DOMAIN,
    clock_rate,
    coord_radius,
    sde_coefficients,
    stratonovich_drift_factor,
)
from .octonion import winding_form_array

EULER_MARUYAMA = "euler_maruyama"
STRATONOVICH_HEUN = "stratonovich_heun"
SCHEMES = (EULER_MARUYAMA, STRATONOVICH_HEUN)

#: Fixed default seed so out-of-the-box runs are reproducible.
DEFAULT_SEED = 20240817


def make_rng(seed: int, stream: tuple[int, ...] = ()) -> np.random.Generator:
    """Counter-based generator for a (seed, stream) pair.

    Distinct streams are statistically independent; results assembled in
    stream order are independent of scheduling.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=tuple(stream))))


@dataclass(frozen=True)
class SimConfig:
    """One path-simulation request."""

    space: ModelSpace
    t_end: float
    dt: float = 1e-3
    r0: Optional[float] = None
    w0: Optional[np.ndarray] = None
    scheme: str = STRATONOVICH_HEUN
    seed: int = DEFAULT_SEED
    r_min: float = 1e-6
    r_max: float = 1.45

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError("dt must be positive")
        if self.t_end < self.dt:
            raise DomainError("t_end must be at least dt")
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        if self.r0 is None and self.w0 is None:
            raise DomainError("either r0 or w0 must be given")
        if self.r0 is not None:
            lo, hi = RADIAL_DOMAIN[self.space]
            hi = min(hi, self.r_max) if self.space is ModelSpace.PROJECTIVE else hi
            if not (self.r_min < self.r0 < hi):
                raise DomainError(f"r0 = {self.r0} outside ({self.r_min}, {hi}) for {self.space.value}")
        if self.w0 is not None:
            w0 = np.asarray(self.w0, dtype=float)
            if w0.shape != (8,):
                raise DomainError("w0 must have 8 components")
            object.__setattr__(self, "w0", w0)
            r = coord_radius(self.space, float(np.linalg.norm(w0)))
            hi = self.r_max if self.space is ModelSpace.PROJECTIVE else math.inf
            if not (self.r_min < r < hi):
                raise DomainError(f"w0 at radius {r:.4g} outside the chart of {self.space.value}")


@dataclass(frozen=True)
class RadialPath:
    """Discretized radial trajectory with its accumulated clock."""

    space: ModelSpace
    times: np.ndarray
    r: np.ndarray
    clock: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.clock) < 0):
            raise ValueError("clock must be nondecreasing")


@dataclass(frozen=True)
class WindingSample:
    """One Monte Carlo draw of the winding functional zeta(t)."""

    zeta: np.ndarray
    t_end: float
    clock_end: Optional[float]
    provenance: str  # "time_change" or "line_integral"
    seed: Optional[int] = None


@dataclass(frozen=True)
class CoordinatePath:
    """Discretized coordinate trajectory with the running winding integral."""

    space: ModelSpace
    times: np.ndarray
    w: np.ndarray      # (n_steps + 1, 8)
    zeta: np.ndarray   # (n_steps + 1, 7)


# ---------------------------------------------------------------------------
# Radial drifts and the implicit-drift guard

def _drift_fn(space: ModelSpace, tilt) -> Callable[[np.ndarray], np.ndarray]:
    if space is ModelSpace.FLAT:
        mu = 0.0 if tilt is None else float(tilt)
        k = (7.0 + 2.0 * mu) / 2.0
        if k <= 0:
            raise DomainError("flat tilt must keep the Bessel drift positive (mu > -3.5)")
        return lambda r: k / r
    if space is ModelSpace.PROJECTIVE:
        if tilt is not None:
            raise DomainError("tilted simulation is not defined for the projective space")
        return lambda r: 7.0 / np.tan(2.0 * r)
    if tilt is None:
        p, q = 3.5, 3.5  # (a_hat, b_hat) = (0, 0): 7 coth(2r) = 3.5 (coth r + tanh r)
    else:
        a_hat, b_hat = tilt
        p, q = float(a_hat) + 3.5, float(b_hat) + 3.5
    return lambda r: p / np.tanh(r) + q * np.tanh(r)


def _implicit_step(space: ModelSpace, drift, target: np.ndarray, dt: float, tilt) -> np.ndarray:
    """Solve x - drift(x) * dt = target on the open radial domain.

    The drifts are strictly decreasing in x, so the root is unique; the flat
    case has a closed form, the others use bisection.
    """
    if space is ModelSpace.FLAT:
        mu = 0.0 if tilt is None else float(tilt)
        k = (7.0 + 2.0 * mu) / 2.0
        return 0.5 * (target + np.sqrt(target * target + 4.0 * k * dt))
    lo = np.full_like(target, 1e-14)
    if space is ModelSpace.PROJECTIVE:
        hi = np.full_like(target, math.pi / 2 - 1e-14)
    else:
        hi = np.maximum(np.abs(target) + 1.0, 2.0)
        for _ in range(200):
            g = hi - drift(hi) * dt - target
            if np.all(g > 0):
                break
            hi = np.where(g > 0, hi, 2.0 * hi)
        else:
            raise SimulationError("implicit radial step failed to bracket a root")
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        neg = mid - drift(mid) * dt - target < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


def _radial_step(space, drift, tilt, r, noise, dt, lo_guard, hi_guard, t_now):
    prop = r + drift(r) * dt + noise
    bad = (prop <= lo_guard) | (prop >= hi_guard)
    if np.any(bad):
        prop = prop.copy()
        prop[bad] = _implicit_step(space, drift, (r + noise)[bad], dt, tilt)
        out = (prop <= lo_guard) | (prop >= hi_guard)
        if np.any(out):
            raise SimulationError(
                f"radial path left ({lo_guard:.3g}, {hi_guard:.3g}) at t = {t_now:.6g}",
                exit_time=t_now,
            )
    return prop


def _time_steps(t_end: float, dt: float):
    n_full = int(t_end / dt)
    rem = t_end - n_full * dt
    steps = [dt] * n_full
    if rem > 1e-12 * dt:
        steps.append(rem)
    return steps


# ---------------------------------------------------------------------------
# Radial simulation

def simulate_radial(cfg: SimConfig, tilt=None, rng: Optional[np.random.Generator] = None) -> RadialPath:
    """One radial trajectory on the time grid, with the clock accumulated
    by the trapezoidal rule."""
    if cfg.r0 is None:
        raise DomainError("radial simulation needs r0")
    if rng is None:
        rng = make_rng(cfg.seed)
    drift = _drift_fn(cfg.space, tilt)
    lo_guard = cfg.r_min
    hi_guard = (math.pi / 2 - cfg.r_min) if cfg.space is ModelSpace.PROJECTIVE else math.inf

    steps = _time_steps(cfg.t_end, cfg.dt)
    times = np.concatenate([[0.0], np.cumsum(steps)])
    r_hist = np.empty(len(steps) + 1)
    clock_hist = np.empty(len(steps) + 1)
    r = np.array([cfg.r0])
    r_hist[0] = cfg.r0
    clock_hist[0] = 0.0
    rate = clock_rate(cfg.space, r)
    a = 0.0
    for i, h in enumerate(steps):
        noise = rng.standard_normal(1) * math.sqrt(h)
        r = _radial_step(cfg.space, drift, tilt, r, noise, h, lo_guard, hi_guard, times[i + 1])
        new_rate = clock_rate(cfg.space, r)
        a += 0.5 * h * float(rate[0] + new_rate[0])
        rate = new_rate
        r_hist[i + 1] = r[0]
        clock_hist[i + 1] = a
    return RadialPath(cfg.space, times, r_hist, clock_hist)


def simulate_tilted_radial(cfg: SimConfig, tilt, rng: Optional[np.random.Generator] = None) -> RadialPath:
    """Radial trajectory under the exponentially tilted measure.

    ``tilt`` is the drift parameter mu for the flat space or the pair
    (a_hat, b_hat) for the hyperbolic space.  A zero tilt reproduces
    :func:`simulate_radial` path for path at equal seed.
    """
    return simulate_radial(cfg, tilt=tilt, rng=rng)


def simulate_radial_batch(
    space: ModelSpace,
    r0: float,
    t_end: float,
    dt: float,
    n_paths: int,
    rng: np.random.Generator,
    tilt=None,
    r_min: float = 1e-6,
    stop_rate_tol: Optional[float] = None,
):
    """Vectorized radial endpoints: returns (r_end, clock_end, t_reached).

    With ``stop_rate_tol`` set, stepping stops early once every path's clock
    rate has fallen below the tolerance (transient spaces only); the clock is
    then final up to a bias below ``stop_rate_tol * (t_end - t_reached)``.
    """
    drift = _drift_fn(space, tilt)
    lo_guard = r_min
    hi_guard = (math.pi / 2 - r_min) if space is ModelSpace.PROJECTIVE else math.inf
    r = np.full(n_paths, float(r0))
    rate = clock_rate(space, r)
    clock = np.zeros(n_paths)
    t_now = 0.0
    for h in _time_steps(t_end, dt):
        noise = rng.standard_normal(n_paths) * math.sqrt(h)
        t_now += h
        r = _radial_step(space, drift, tilt, r, noise, h, lo_guard, hi_guard, t_now)
        new_rate = clock_rate(space, r)
        clock += 0.5 * h * (rate + new_rate)
        rate = new_rate
        if stop_rate_tol is not None and float(rate.max()) < stop_rate_tol:
            break
    return r, clock, t_now


def accumulate_clock(path: RadialPath) -> float:
    """Trapezoidal value of the clock A_t over the whole path."""
    return float(np.trapezoid(clock_rate(path.space, path.r), path.times))


def sample_winding_timechange(path: RadialPath, rng: np.random.Generator) -> WindingSample:
    """Draw zeta(t) ~ N(0, A_t I_7) conditionally on the radial path."""
    a_t = float(path.clock[-1])
    zeta = rng.standard_normal(7) * math.sqrt(a_t)
    return WindingSample(zeta=zeta, t_end=float(path.times[-1]), clock_end=a_t,
                         provenance="time_change")


def sample_windings_timechange(clock_end: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Batched conditional Gaussian draws, one 7-vector per clock value."""
    clock_end = np.asarray(clock_end, dtype=float)
    return rng.standard_normal((clock_end.size, 7)) * np.sqrt(clock_end)[:, None]


# ---------------------------------------------------------------------------
# Coordinate simulation with Stratonovich line integration

def _coordinate_step(space: ModelSpace, w: np.ndarray, dw_noise: np.ndarray, h: float, scheme: str) -> np.ndarray:
    wn = np.linalg.norm(w, axis=-1)
    if scheme == EULER_MARUYAMA:
        factor, sig = sde_coefficients(space, wn)
        return w + factor[..., None] * w * h + sig[..., None] * dw_noise
    bs = stratonovich_drift_factor(space, wn)
    sig = sde_coefficients(space, wn)[1]
    pred = w + bs[..., None] * w * h + sig[..., None] * dw_noise
    pn = np.linalg.norm(pred, axis=-1)
    bs2 = stratonovich_drift_factor(space, pn)
    sig2 = sde_coefficients(space, pn)[1]
    drift_avg = 0.5 * (bs[..., None] * w + bs2[..., None] * pred)
    return w + drift_avg * h + 0.5 * (sig + sig2)[..., None] * dw_noise


def _chart_ceiling(space: ModelSpace, r_max: float) -> float:
    # Radius beyond which coordinate stepping is abandoned.  The projective
    # chart genuinely degenerates near pi/2; the hyperbolic one only loses
    # floating-point resolution as |w| -> 1, and the flat one never does,
    # but by then the clock rate is ~1e-12 and the radial route is cheaper.
    if space is ModelSpace.PROJECTIVE:
        return r_max
    return 15.0


def simulate_coordinate(cfg: SimConfig, rng: Optional[np.random.Generator] = None):
    """One coordinate trajectory and its line-integral winding sample.

    Raises :class:`SimulationError` if the path leaves the chart; the batch
    simulator falls back to the skew-product representation instead.
    """
    if cfg.w0 is None:
        raise DomainError("coordinate simulation needs w0")
    if rng is None:
        rng = make_rng(cfg.seed)
    steps = _time_steps(cfg.t_end, cfg.dt)
    times = np.concatenate([[0.0], np.cumsum(steps)])
    w_hist = np.empty((len(steps) + 1, 8))
    z_hist = np.zeros((len(steps) + 1, 7))
    w = cfg.w0.copy()
    w_hist[0] = w
    ceiling = _chart_ceiling(cfg.space, cfg.r_max)
    max_radial_step = 0.5  # ~15 standard deviations of one radial increment at dt = 1e-3
    for i, h in enumerate(steps):
        wn = float(np.linalg.norm(w))
        r = _safe_radius(cfg.space, np.array([wn]))[0]
        if r >= ceiling or wn <= cfg.r_min:
            raise SimulationError(
                f"coordinate path left the chart (radius {r:.4g}) at t = {times[i]:.6g}",
                exit_time=float(times[i]),
            )
        noise = rng.standard_normal(8) * math.sqrt(h)
        w_new = _coordinate_step(cfg.space, w[None, :], noise[None, :], h, cfg.scheme)[0]
        dw = w_new - w
        if not np.all(np.isfinite(w_new)):
            raise SimulationError(
                f"coordinate step produced non-finite values at t = {times[i + 1]:.6g}; reduce dt",
                exit_time=float(times[i + 1]),
            )
        r_new = _safe_radius(cfg.space, np.array([np.linalg.norm(w_new)]))[0]
        if abs(r_new - r) > max_radial_step:
            raise SimulationError(
                f"coordinate step rejected (radius jump {abs(r_new - r):.3g}) at t = {times[i + 1]:.6g}; reduce dt",
                exit_time=float(times[i + 1]),
            )
        mid = 0.5 * (w + w_new)
        z_hist[i + 1] = z_hist[i] + winding_form_array(mid, dw)
        w = w_new
        w_hist[i + 1] = w
    path = CoordinatePath(cfg.space, times, w_hist, z_hist)
    sample = WindingSample(zeta=z_hist[-1].copy(), t_end=float(times[-1]), clock_end=None,
                           provenance="line_integral", seed=cfg.seed)
    return path, sample


def _safe_radius(space: ModelSpace, w_norm: np.ndarray) -> np.ndarray:
    """coord_radius with the hyperbolic boundary clamped instead of raised."""
    if space is ModelSpace.HYPERBOLIC:
        return np.arctanh(np.minimum(w_norm, 1.0 - 1e-15))
    return np.asarray(coord_radius(space, w_norm), dtype=float)


def simulate_coordinate_batch(
    space: ModelSpace,
    w0: np.ndarray,
    t_end: float,
    dt: float,
    n_paths: int,
    rng: np.random.Generator,
    scheme: str = STRATONOVICH_HEUN,
    r_min: float = 1e-6,
    r_max: float = 1.45,
    max_radial_step: float = 0.5,
):
    """Vectorized line-integral windings: returns (zeta, n_switched).

    Paths that leave the safe chart region (or whose step is rejected)
    switch to the skew-product representation: the radial part continues in
    r, the residual clock is accumulated, and the remaining winding
    increment is drawn as N(0, dA I_7), which is its exact conditional law.
    """
    w0 = np.asarray(w0, dtype=float)
    r0 = _safe_radius(space, np.array([np.linalg.norm(w0)]))[0]
    ceiling = _chart_ceiling(space, r_max)
    if not (r_min < r0 < ceiling):
        raise DomainError(f"w0 at radius {r0:.4g} outside the usable chart of {space.value}")

    drift = _drift_fn(space, None)
    lo_guard = r_min
    hi_guard = (math.pi / 2 - r_min) if space is ModelSpace.PROJECTIVE else math.inf

    w = np.tile(w0, (n_paths, 1))
    zeta = np.zeros((n_paths, 7))
    switched = np.zeros(n_paths, dtype=bool)
    r_sw = np.zeros(n_paths)
    rate_sw = np.zeros(n_paths)
    clock_sw = np.zeros(n_paths)

    t_now = 0.0
    for h in _time_steps(t_end, dt):
        noise = rng.standard_normal((n_paths, 8)) * math.sqrt(h)
        t_now += h
        act = ~switched
        if np.any(act):
            wa = w[act]
            wn = np.linalg.norm(wa, axis=1)
            ra = _safe_radius(space, wn)
            exiting = (ra >= ceiling) | (wn <= r_min)
            w_new = _coordinate_step(space, wa, noise[act], h, scheme)
            dw = w_new - wa
            finite = np.all(np.isfinite(w_new), axis=1)
            r_new = np.where(finite, _safe_radius(space, np.where(finite, np.linalg.norm(w_new, axis=1), 0.0)), np.inf)
            rejected = ~finite | (np.abs(r_new - ra) > max_radial_step)
            bad = exiting | rejected
            good = ~bad
            if np.any(good):
                mid = 0.5 * (wa[good] + w_new[good])
                inc = winding_form_array(mid, dw[good])
                idx = np.flatnonzero(act)
                zeta[idx[good]] += inc
                w[idx[good]] = w_new[good]
            if np.any(bad):
                idx = np.flatnonzero(act)[bad]
                switched[idx] = True
                r_here = np.clip(ra[bad], lo_guard * 2.0, hi_guard - lo_guard if math.isfinite(hi_guard) else np.inf)
                r_sw[idx] = r_here
                rate_sw[idx] = clock_rate(space, r_here)
        sw = switched.copy()
        if np.any(sw):
            r_prev = r_sw[sw]
            r_next = _radial_step(space, drift, None, r_prev, noise[sw, 0], h, lo_guard, hi_guard, t_now)
            new_rate = clock_rate(space, r_next)
            clock_sw[sw] += 0.5 * h * (rate_sw[sw] + new_rate)
            r_sw[sw] = r_next
            rate_sw[sw] = new_rate
    if np.any(switched):
        k = int(switched.sum())
        zeta[switched] += rng.standard_normal((k, 7)) * np.sqrt(clock_sw[switched])[:, None]
    return zeta, int(switched.sum())


# ---------------------------------------------------------------------------
# Exact flat-space transitions for very long horizons

def log_time_grid(t_end: float, t_init: float = 1e-4, per_decade: int = 128) -> np.ndarray:
    """Time grid [0, t_init, ...geometric..., t_end] for long flat runs."""
    if not (0 < t_init < t_end):
        raise DomainError("need 0 < t_init < t_end")
    decades = math.log10(t_end / t_init)
    n = max(2, int(math.ceil(decades * per_decade)))
    return np.concatenate([[0.0], np.geomspace(t_init, t_end, n + 1)])


def simulate_flat_exact_batch(rho: float, times: np.ndarray, n_paths: int, rng: np.random.Generator):
    """Exact squared-radius transitions of the flat radial process.

    The squared radius is sampled step by step from its noncentral
    chi-square (8 degrees of freedom) transition kernel; only the clock uses
    the trapezoidal rule on the grid.  Returns (r_end, clock_end).
    """
    if rho <= 0:
        raise DomainError("rho must be positive")
    times = np.asarray(times, dtype=float)
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise DomainError("times must start at 0 and be strictly increasing")
    x = np.full(n_paths, rho * rho)
    clock = np.zeros(n_paths)
    for i in range(len(times) - 1):
        delta = times[i + 1] - times[i]
        x_new = rng.noncentral_chisquare(8.0, x / delta, size=n_paths) * delta
        clock += 0.5 * delta * (1.0 / x + 1.0 / x_new)
        x = x_new
    return np.sqrt(x), clock
