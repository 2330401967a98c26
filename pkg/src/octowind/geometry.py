"""Coordinate geometry of the three octonionic model spaces.

Each space is described by its radial domain, the drift of its radial
diffusion, the rate of the angular clock, and the coordinate chart linking
the inhomogeneous coordinate w to the geodesic distance r from the origin:

* flat:        r in (0, inf),   drift 7/(2r),       clock 1/r^2,          r = |w|
* projective:  r in (0, pi/2),  drift 7 cot(2r),    clock 4/sin^2(2r),    r = arctan|w|
* hyperbolic:  r in (0, inf),   drift 7 coth(2r),   clock 4/sinh^2(2r),   r = artanh|w|

All functions accept scalars or numpy arrays for r / w_norm.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import DomainError
from .octonion import Octonion


class ModelSpace(enum.Enum):
    FLAT = "flat"
    PROJECTIVE = "projective"
    HYPERBOLIC = "hyperbolic"

    @classmethod
    def parse(cls, name: str) -> "ModelSpace":
        try:
            return cls(name.lower())
        except ValueError:
            raise DomainError(f"unknown model space {name!r}") from None


#: Open radial domain (lo, hi) of each space.
RADIAL_DOMAIN = {
    ModelSpace.FLAT: (0.0, math.inf),
    ModelSpace.PROJECTIVE: (0.0, math.pi / 2),
    ModelSpace.HYPERBOLIC: (0.0, math.inf),
}


def _check_radial(space: ModelSpace, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    lo, hi = RADIAL_DOMAIN[space]
    if np.any(r <= lo) or np.any(r >= hi):
        raise DomainError(f"radius outside the open domain ({lo}, {hi}) of {space.value}")
    return r


def radial_drift(space: ModelSpace, r):
    """Drift b(r) of the radial diffusion dr = b(r) dt + dB."""
    r = _check_radial(space, r)
    if space is ModelSpace.FLAT:
        out = 3.5 / r
    elif space is ModelSpace.PROJECTIVE:
        out = 7.0 / np.tan(2.0 * r)
    else:
        out = 7.0 / np.tanh(2.0 * r)
    return out if out.ndim else float(out)


def clock_rate(space: ModelSpace, r):
    """Integrand of the angular clock A_t = int_0^t clock_rate(r(s)) ds."""
    r = _check_radial(space, r)
    if space is ModelSpace.FLAT:
        out = 1.0 / (r * r)
    elif space is ModelSpace.PROJECTIVE:
        out = 4.0 / np.sin(2.0 * r) ** 2
    else:
        out = 4.0 / np.sinh(2.0 * r) ** 2
    return out if out.ndim else float(out)


def coord_radius(space: ModelSpace, w_norm):
    """Geodesic distance r from the origin for a coordinate of norm |w|."""
    w_norm = np.asarray(w_norm, dtype=float)
    if np.any(w_norm < 0):
        raise DomainError("coordinate norm must be nonnegative")
    if space is ModelSpace.FLAT:
        out = w_norm.copy()
    elif space is ModelSpace.PROJECTIVE:
        out = np.arctan(w_norm)
    else:
        if np.any(w_norm >= 1.0):
            raise DomainError("hyperbolic chart requires |w| < 1")
        out = np.arctanh(w_norm)
    return out if out.ndim else float(out)


def coord_norm(space: ModelSpace, r):
    """Inverse of :func:`coord_radius`: the coordinate norm at distance r."""
    r = _check_radial(space, r)
    if space is ModelSpace.FLAT:
        out = r.copy()
    elif space is ModelSpace.PROJECTIVE:
        out = np.tan(r)
    else:
        out = np.tanh(r)
    return out if out.ndim else float(out)


def sde_coefficients(space: ModelSpace, w_norm):
    """Scalar coefficients (drift_factor, diffusion) of the coordinate SDE.

    The Ito SDE reads dw = diffusion * dW + drift_factor * w dt, with

    * flat:        (0, 1)
    * projective:  (-6 sec^2 r, sec^2 r)
    * hyperbolic:  (+6 sech^2 r, sech^2 r)

    evaluated at r = coord_radius(space, |w|).
    """
    r = coord_radius(space, w_norm)
    if space is ModelSpace.FLAT:
        shaped = np.zeros_like(np.asarray(r, dtype=float))
        return (shaped if shaped.ndim else 0.0,
                shaped + 1.0 if shaped.ndim else 1.0)
    if space is ModelSpace.PROJECTIVE:
        sig = 1.0 / np.cos(r) ** 2
        factor = -6.0 * sig
    else:
        sig = 1.0 / np.cosh(r) ** 2
        factor = 6.0 * sig
    if np.ndim(sig):
        return factor, sig
    return float(factor), float(sig)


def stratonovich_drift_factor(space: ModelSpace, w_norm):
    """Drift factor of the Stratonovich form of the coordinate SDE.

    The Ito-to-Stratonovich correction for the isotropic diffusion
    sigma(|w|) I_8 is (1/2) sigma sigma'(|w|) w/|w|, which shifts the drift
    factor by -sec^2 r (projective) and +sech^2 r (hyperbolic).
    """
    if space is ModelSpace.FLAT:
        return sde_coefficients(space, w_norm)[0]
    factor, sig = sde_coefficients(space, w_norm)
    if space is ModelSpace.PROJECTIVE:
        return factor - sig
    return factor + sig


def coordinate_sde_coeffs(space: ModelSpace, w: Octonion) -> tuple[Octonion, float]:
    """Drift octonion and scalar diffusion of the coordinate SDE at w."""
    wn = float(np.linalg.norm(w.c))
    factor, sig = sde_coefficients(space, wn)
    return Octonion(w.c * factor), float(sig)
