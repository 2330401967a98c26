"""Radial drifts, clocks and coordinate charts of the three model spaces."""

import math

import numpy as np
import pytest

from octowind import Octonion
from octowind.errors import DomainError
from octowind.geometry import (
    RADIAL_DOMAIN,
    ModelSpace,
    clock_rate,
    coord_norm,
    coord_radius,
    coordinate_sde_coeffs,
    radial_drift,
    sde_coefficients,
    stratonovich_drift_factor,
)

SPACES = (ModelSpace.FLAT, ModelSpace.PROJECTIVE, ModelSpace.HYPERBOLIC)


def test_parse():
    assert ModelSpace.parse("Flat") is ModelSpace.FLAT
    assert ModelSpace.parse("hyperbolic") is ModelSpace.HYPERBOLIC
    with pytest.raises(DomainError):
        ModelSpace.parse("euclidean")


def test_radial_drift_values():
    r = 0.8
    assert radial_drift(ModelSpace.FLAT, r) == pytest.approx(7.0 / (2.0 * r))
    assert radial_drift(ModelSpace.PROJECTIVE, r) == pytest.approx(7.0 / math.tan(2 * r))
    assert radial_drift(ModelSpace.HYPERBOLIC, r) == pytest.approx(7.0 / math.tanh(2 * r))


def test_hyperbolic_drift_splits_into_coth_tanh():
    # 7 coth(2r) = 3.5 (coth r + tanh r): the identity behind the zero tilt.
    r = np.linspace(0.1, 5.0, 50)
    lhs = radial_drift(ModelSpace.HYPERBOLIC, r)
    rhs = 3.5 * (1.0 / np.tanh(r) + np.tanh(r))
    assert np.allclose(lhs, rhs, rtol=1e-14)


def test_clock_rates():
    r = 0.6
    assert clock_rate(ModelSpace.FLAT, r) == pytest.approx(1.0 / r**2)
    assert clock_rate(ModelSpace.PROJECTIVE, r) == pytest.approx(4.0 / math.sin(2 * r) ** 2)
    assert clock_rate(ModelSpace.HYPERBOLIC, r) == pytest.approx(4.0 / math.sinh(2 * r) ** 2)


def test_hyperbolic_clock_identity():
    # 4 / sinh^2(2r) = coth^2 r + tanh^2 r - 2
    r = np.linspace(0.2, 4.0, 40)
    lhs = clock_rate(ModelSpace.HYPERBOLIC, r)
    rhs = 1.0 / np.tanh(r) ** 2 + np.tanh(r) ** 2 - 2.0
    assert np.allclose(lhs, rhs, rtol=1e-12)


@pytest.mark.parametrize("space", SPACES)
def test_domain_checks(space):
    lo, hi = RADIAL_DOMAIN[space]
    with pytest.raises(DomainError):
        radial_drift(space, lo)
    with pytest.raises(DomainError):
        clock_rate(space, -0.1)
    if math.isfinite(hi):
        with pytest.raises(DomainError):
            radial_drift(space, hi)


@pytest.mark.parametrize("space", SPACES)
def test_chart_round_trip(space):
    r = np.linspace(0.05, 1.4, 30)
    assert np.allclose(coord_radius(space, coord_norm(space, r)), r, rtol=1e-12)
    # scalar in, scalar out
    assert isinstance(coord_norm(space, 0.5), float)
    assert isinstance(coord_radius(space, 0.5), float)


def test_chart_values():
    assert coord_radius(ModelSpace.FLAT, 0.7) == pytest.approx(0.7)
    assert coord_radius(ModelSpace.PROJECTIVE, 1.0) == pytest.approx(math.pi / 4)
    assert coord_radius(ModelSpace.HYPERBOLIC, math.tanh(1.0)) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        coord_radius(ModelSpace.HYPERBOLIC, 1.0)
    with pytest.raises(DomainError):
        coord_radius(ModelSpace.FLAT, -0.1)


def test_sde_coefficients_values():
    assert sde_coefficients(ModelSpace.FLAT, 0.3) == (0.0, 1.0)
    r = 0.9
    factor, sig = sde_coefficients(ModelSpace.PROJECTIVE, math.tan(r))
    assert sig == pytest.approx(1.0 / math.cos(r) ** 2)
    assert factor == pytest.approx(-6.0 / math.cos(r) ** 2)
    factor, sig = sde_coefficients(ModelSpace.HYPERBOLIC, math.tanh(r))
    assert sig == pytest.approx(1.0 / math.cosh(r) ** 2)
    assert factor == pytest.approx(6.0 / math.cosh(r) ** 2)


def test_stratonovich_correction():
    r = 0.7
    assert stratonovich_drift_factor(ModelSpace.FLAT, 0.5) == 0.0
    assert stratonovich_drift_factor(ModelSpace.PROJECTIVE, math.tan(r)) == pytest.approx(
        -7.0 / math.cos(r) ** 2
    )
    assert stratonovich_drift_factor(ModelSpace.HYPERBOLIC, math.tanh(r)) == pytest.approx(
        7.0 / math.cosh(r) ** 2
    )


@pytest.mark.parametrize("space", SPACES)
def test_radial_drift_consistent_with_coordinate_sde(space):
    # Independent consistency check: push the coordinate SDE through Ito's
    # formula for r = g(|w|) and recover the radial drift and unit diffusion.
    # For dw = sigma(|w|) dW + f(|w|) w dt in 8 dimensions,
    #   d|w| has drift f |w| + 7 sigma^2 / (2 |w|) and diffusion sigma,
    #   dr = g'(|w|) d|w| + (1/2) g''(|w|) sigma^2 dt.
    for r in (0.3, 0.8, 1.3):
        u = coord_norm(space, r)
        f, sig = sde_coefficients(space, u)
        h = 1e-5
        g1 = (coord_radius(space, u + h) - coord_radius(space, u - h)) / (2 * h)
        g2 = (coord_radius(space, u + h) - 2 * r + coord_radius(space, u - h)) / h**2
        drift_u = f * u + 7.0 * sig**2 / (2.0 * u)
        drift_r = g1 * drift_u + 0.5 * g2 * sig**2
        assert g1 * sig == pytest.approx(1.0, abs=1e-7)
        assert drift_r == pytest.approx(radial_drift(space, r), rel=1e-4)


def test_coordinate_sde_coeffs_octonion():
    w = Octonion(np.array([0.3, 0.1, 0.0, 0.0, -0.2, 0.0, 0.0, 0.0]))
    wn = float(np.linalg.norm(w.c))
    drift, sig = coordinate_sde_coeffs(ModelSpace.HYPERBOLIC, w)
    factor, sig_ref = sde_coefficients(ModelSpace.HYPERBOLIC, wn)
    assert sig == pytest.approx(sig_ref)
    assert np.allclose(drift.c, factor * w.c)


def test_array_shapes():
    r = np.array([[0.2, 0.4], [0.6, 0.8]])
    for space in SPACES:
        assert radial_drift(space, r).shape == (2, 2)
        assert clock_rate(space, r).shape == (2, 2)
