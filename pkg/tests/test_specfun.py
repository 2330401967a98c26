"""Closed-form special functions, with mpmath and calculus-based oracles."""

import math

import mpmath
import numpy as np
import pytest

from octowind import specfun
from octowind.errors import DomainError, QuadratureError


# ---------------------------------------------------------------------------
# Bessel series

@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 3.0, 3.0413812651491097, 7.25])
@pytest.mark.parametrize("x", [1e-8, 0.1, 1.0, 10.0, 80.0, 400.0])
def test_bessel_i_vs_mpmath(nu, x):
    ref = float(mpmath.besseli(nu, x))
    assert specfun.bessel_i(nu, x) == pytest.approx(ref, rel=1e-12)


def test_bessel_i_half_order_closed_form():
    # I_{1/2}(x) = sqrt(2 / (pi x)) sinh(x)
    for x in (0.3, 1.0, 5.0):
        ref = math.sqrt(2.0 / (math.pi * x)) * math.sinh(x)
        assert specfun.bessel_i(0.5, x) == pytest.approx(ref, rel=1e-13)


def test_bessel_i_edge_cases():
    assert specfun.bessel_i(0.0, 0.0) == 1.0
    assert specfun.bessel_i(2.5, 0.0) == 0.0
    with pytest.raises(DomainError):
        specfun.bessel_i(-1.0, 1.0)
    with pytest.raises(DomainError):
        specfun.bessel_i(1.0, -1.0)
    with pytest.raises(QuadratureError):
        specfun.bessel_i(3.0, 701.0)


# ---------------------------------------------------------------------------
# Tilt parameters

def test_order_and_tilts():
    assert specfun.order_from_lambda(0.0) == pytest.approx(3.0)
    assert specfun.order_from_lambda(4.0) == pytest.approx(5.0)
    assert specfun.flat_tilt(4.0) == pytest.approx(2.0)
    for ln in (0.5, 1.0, 2.0):
        a_hat, b_hat = specfun.hyperbolic_tilt(ln)
        # roots of x^2 + 6x - |lambda|^2
        assert a_hat + b_hat == pytest.approx(-6.0)
        assert a_hat * b_hat == pytest.approx(-(ln**2))
        assert a_hat > 0 > b_hat


# ---------------------------------------------------------------------------
# Hartman-Watson ratio and the finite-time flat transform

def test_hartman_watson_basic():
    assert specfun.hartman_watson_ratio(0.0, 1.0, 2.0, 3.0) == 1.0
    vals = [specfun.hartman_watson_ratio(ln, 1.0, 2.0, 3.0) for ln in (0.0, 0.5, 1.0, 2.0)]
    assert all(0.0 < v <= 1.0 for v in vals)
    assert vals == sorted(vals, reverse=True)
    with pytest.raises(DomainError):
        specfun.hartman_watson_ratio(1.0, 0.0, 1.0, 1.0)


def test_flat_laplace_normalization_and_monotonicity():
    assert specfun.flat_laplace(1.0, 10.0, 0.0) == pytest.approx(1.0, abs=1e-8)
    vals = [specfun.flat_laplace(1.0, 10.0, ln) for ln in (0.0, 0.5, 1.0, 2.0)]
    assert vals == sorted(vals, reverse=True)
    with pytest.raises(DomainError):
        specfun.flat_laplace(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        specfun.flat_laplace(1.0, 0.0, 1.0)


def test_flat_laplace_vs_mpmath_quadrature():
    # Fully independent evaluation of the same transform: mpmath Bessel and
    # mpmath quadrature.
    rho, t, ln = 1.0, 10.0, 1.0
    nu = math.sqrt(9.0 + ln * ln)
    c = rho / math.sqrt(t)
    integral = mpmath.quad(
        lambda r: r**4 * mpmath.exp(-0.5 * r * r) * mpmath.besseli(nu, c * r), [0, 25]
    )
    ref = float(mpmath.exp(-0.5 * rho * rho / t) * t**1.5 / rho**3 * integral)
    assert specfun.flat_laplace(rho, t, ln) == pytest.approx(ref, rel=1e-7)


def test_flat_laplace_short_time_expansion():
    # For small t the clock is nearly t / rho^2, so the transform is close to
    # exp(-|lambda|^2 t / (2 rho^2)).
    val = specfun.flat_laplace(3.0, 0.2, 1.0)
    assert val == pytest.approx(math.exp(-0.5 * 0.2 / 9.0), rel=2e-3)


def test_flat_laplace_extreme_regime_raises_cleanly():
    # Very small t with rho away from 0 pushes the Bessel argument past the
    # double-precision series range; the failure must be a QuadratureError,
    # not a wrong number.
    with pytest.raises(QuadratureError):
        specfun.flat_laplace(2.0, 1e-3, 1.0)


def test_flat_laplace_accepts_lambda_vector():
    v = np.array([0.6, 0.0, 0.8, 0.0, 0.0, 0.0, 0.0])
    assert specfun.flat_laplace(1.0, 10.0, v) == pytest.approx(
        specfun.flat_laplace(1.0, 10.0, 1.0), rel=1e-12
    )


# ---------------------------------------------------------------------------
# Limiting characteristic functions

def test_limit_charfns_values():
    assert specfun.flat_limit_charfn(1.0) == pytest.approx(math.exp(-0.5))
    assert specfun.op1_limit_charfn(1.0) == pytest.approx(math.exp(-7.0 / 3.0))
    assert specfun.flat_limit_charfn(0.0) == 1.0
    assert specfun.op1_limit_charfn(0.0) == 1.0


def test_oh1_limit_at_zero_lambda():
    # nu = 3 at lambda = 0: the transform degenerates to 1 (total mass).
    for r0 in (0.5, 1.0, 2.0):
        assert specfun.oh1_limit_charfn(0.0, r0) == pytest.approx(1.0, rel=1e-12)


def test_oh1_factored_and_expanded_agree():
    for ln in (0.5, 1.0, 2.0):
        for r0 in (0.5, 1.0, 2.0):
            a = specfun.oh1_limit_charfn(ln, r0)
            b = specfun.oh1_limit_charfn_expanded(ln, r0)
            assert abs(a - b) < 1e-12
    with pytest.raises(DomainError):
        specfun.oh1_limit_charfn(1.0, 0.0)


def test_oh1_limit_bounds():
    vals = [specfun.oh1_limit_charfn(ln, 1.0) for ln in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(0.0 < v <= 1.0 for v in vals)
    assert vals == sorted(vals, reverse=True)


# ---------------------------------------------------------------------------
# Hyperbolic moment cascade

def _generator_apply(k, a_hat, b_hat, r):
    """L cosh^{2k} evaluated with exact calculus derivatives.

    L = (1/2) d^2/dr^2 + [(a_hat + 7/2) coth r + (b_hat + 7/2) tanh r] d/dr.
    """
    ch, sh = math.cosh(r), math.sinh(r)
    f1 = 2 * k * ch ** (2 * k - 1) * sh
    f2 = 2 * k * (2 * k - 1) * ch ** (2 * k - 2) * sh**2 + 2 * k * ch ** (2 * k)
    drift = (a_hat + 3.5) * ch / sh + (b_hat + 3.5) * sh / ch
    return 0.5 * f2 + drift * f1


@pytest.mark.parametrize("k,lead", [(1, 4.0), (2, 12.0), (3, 24.0)])
def test_cascade_ode_coefficients_from_generator(k, lead):
    # Applying the generator to cosh^{2k} must give the cascade right-hand
    # side: lead * cosh^{2k} - const * cosh^{2k-2} with const = 2b+8, 4b+20,
    # 6b+36 for k = 1, 2, 3.  This pins the ODE coefficients independently
    # of the closed-form solution.
    for ln in (0.7, 1.3):
        a_hat, b_hat = specfun.hyperbolic_tilt(ln)
        const = {1: 2 * b_hat + 8, 2: 4 * b_hat + 20, 3: 6 * b_hat + 36}[k]
        for r in (0.4, 1.1, 2.2):
            got = _generator_apply(k, a_hat, b_hat, r)
            ch2 = math.cosh(r) ** 2
            want = lead * ch2**k - const * ch2 ** (k - 1)
            assert got == pytest.approx(want, rel=1e-11)


def test_cascade_satisfies_its_odes():
    # Finite-difference time derivative of the closed-form moments.
    a_hat, b_hat = specfun.hyperbolic_tilt(1.0)
    r0, t, h = 1.0, 0.6, 1e-6
    m2p, m4p, m6p = specfun.oh1_moment_cascade(a_hat, b_hat, r0, t + h)
    m2m, m4m, m6m = specfun.oh1_moment_cascade(a_hat, b_hat, r0, t - h)
    m2, m4, m6 = specfun.oh1_moment_cascade(a_hat, b_hat, r0, t)
    assert (m2p - m2m) / (2 * h) == pytest.approx(4 * m2 - (2 * b_hat + 8), rel=1e-7)
    assert (m4p - m4m) / (2 * h) == pytest.approx(12 * m4 - (4 * b_hat + 20) * m2, rel=1e-7)
    assert (m6p - m6m) / (2 * h) == pytest.approx(24 * m6 - (6 * b_hat + 36) * m4, rel=1e-7)


def test_cascade_initial_values():
    a_hat, b_hat = specfun.hyperbolic_tilt(0.8)
    r0 = 1.3
    m2, m4, m6 = specfun.oh1_moment_cascade(a_hat, b_hat, r0, 0.0)
    assert m2 == pytest.approx(math.cosh(r0) ** 2, rel=1e-12)
    assert m4 == pytest.approx(math.cosh(r0) ** 4, rel=1e-12)
    assert m6 == pytest.approx(math.cosh(r0) ** 6, rel=1e-12)


def test_cascade_limit_reproduces_oh1_limit():
    # tanh(r0)^(nu-3) / cosh^6(r0) * lim e^{-24 t} m6(t) equals the limiting
    # characteristic function: consistency of the cascade with the theorem.
    for ln in (0.5, 1.0, 2.0):
        for r0 in (0.5, 1.0, 2.0):
            nu = specfun.order_from_lambda(ln)
            a_hat, b_hat = specfun.hyperbolic_tilt(ln)
            s6_inf = specfun.oh1_moment_cascade_scaled(a_hat, b_hat, r0, 50.0)[2]
            val = math.tanh(r0) ** (nu - 3.0) / math.cosh(r0) ** 6 * s6_inf
            assert val == pytest.approx(specfun.oh1_limit_charfn(ln, r0), rel=1e-12)


def test_cascade_scaled_is_finite_for_long_horizons():
    a_hat, b_hat = specfun.hyperbolic_tilt(1.0)
    s2, s4, s6 = specfun.oh1_moment_cascade_scaled(a_hat, b_hat, 1.0, 500.0)
    assert all(math.isfinite(v) for v in (s2, s4, s6))
    with pytest.raises(DomainError):
        specfun.oh1_moment_cascade(a_hat, b_hat, -1.0, 1.0)
    with pytest.raises(DomainError):
        specfun.oh1_moment_cascade(a_hat, b_hat, 1.0, -1.0)
