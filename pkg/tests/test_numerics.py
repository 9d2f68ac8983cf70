import math

import numpy as np
import pytest

from cherenkov_wigner.numerics import (DiffSpec, NoSignChange,
                                       NonFiniteIntegrand, NonFiniteSample,
                                       differentiate, find_root,
                                       integrate_adaptive, integrate_signed)


def gauss_legendre_reference(f, a, b, n=2000):
    """Brute-force fixed-order quadrature oracle."""
    x, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (b - a) * x + 0.5 * (a + b)
    return 0.5 * (b - a) * float(w @ f(t))


def test_polynomial():
    res = integrate_adaptive(lambda x: x ** 2, 0.0, 1.0)
    assert abs(res.value - 1.0 / 3.0) < 1e-12
    assert res.converged


def test_full_periods_cancel():
    res = integrate_adaptive(np.cos, 0.0, 10 * math.pi, abs_tol=1e-10)
    assert abs(res.value) < 1e-10


def test_oscillatory_vs_gauss_legendre():
    f = lambda x: np.exp(-x ** 2) * np.cos(50 * x)
    res = integrate_adaptive(f, -6.0, 6.0, abs_tol=1e-13, rel_tol=1e-12,
                             phase_rate_hint=50.0)
    ref = gauss_legendre_reference(f, -6.0, 6.0)
    assert abs(res.value - ref) < 1e-10


def test_linearity(rng):
    # I(a f + b g) = a I(f) + b I(g) on random smooth integrands
    for _ in range(10):
        c = rng.normal(size=4)
        d = rng.normal(size=4)
        al, be = rng.normal(size=2)
        f = lambda x: c[0] + c[1] * x + c[2] * np.sin(3 * x) + c[3] * np.exp(-x ** 2)
        g = lambda x: d[0] + d[1] * x ** 2 + d[2] * np.cos(2 * x) + d[3] * x ** 3
        h = lambda x: al * f(x) + be * g(x)
        i_f = integrate_adaptive(f, -1.0, 2.0, abs_tol=1e-13, rel_tol=1e-13)
        i_g = integrate_adaptive(g, -1.0, 2.0, abs_tol=1e-13, rel_tol=1e-13)
        i_h = integrate_adaptive(h, -1.0, 2.0, abs_tol=1e-13, rel_tol=1e-13)
        combined = al * i_f.value + be * i_g.value
        tol = (abs(al) * i_f.error_estimate + abs(be) * i_g.error_estimate
               + i_h.error_estimate + 1e-12)
        assert abs(i_h.value - combined) <= 10 * tol


def test_reversal_signed_wrapper():
    f = lambda x: np.sin(x) + x ** 2
    fwd = integrate_signed(f, 0.0, 2.0)
    rev = integrate_signed(f, 2.0, 0.0)
    assert fwd.value == -rev.value


def test_scalar_integrand_fallback():
    res = integrate_adaptive(lambda x: float(x) ** 2, 0.0, 1.0)
    assert abs(res.value - 1.0 / 3.0) < 1e-12


def test_budget_exhaustion_returns_flagged_estimate():
    res = integrate_adaptive(lambda x: np.cos(100 * x), 0.0, 10.0,
                             abs_tol=1e-14, rel_tol=1e-14, max_panels=4)
    assert not res.converged
    assert res.panels_used == 4
    assert math.isfinite(res.value)


def test_non_finite_integrand():
    with pytest.raises(NonFiniteIntegrand):
        integrate_adaptive(lambda x: np.where(x < 0.5, np.nan, 1.0), 0.0, 1.0)


def test_precondition_errors():
    with pytest.raises(ValueError):
        integrate_adaptive(np.cos, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate_adaptive(np.cos, 0.0, 1.0, abs_tol=0.0)


def test_differentiate_sin():
    assert abs(differentiate(math.sin, 0.0) - 1.0) < 1e-10


def test_differentiate_second_order():
    # double-precision cancellation in the second difference needs a wider
    # step than the first-derivative default
    d2 = differentiate(lambda x: x ** 3, 2.0, DiffSpec(order=2, base_step=1e-3))
    assert abs(d2 - 12.0) < 1e-8


def test_differentiate_even_function_at_zero():
    assert abs(differentiate(math.cosh, 0.0)) < 1e-12


def test_differentiate_non_finite():
    with pytest.raises(NonFiniteSample):
        differentiate(lambda x: float("nan") if x < 0 else x, 0.0)


def test_diffspec_validation():
    with pytest.raises(ValueError):
        DiffSpec(order=3)
    with pytest.raises(ValueError):
        DiffSpec(base_step=0.0)
    with pytest.raises(ValueError):
        DiffSpec(richardson_levels=0)


def test_differentiate_amplitude_phase_vs_polyfit():
    # slope of the amplitude phase over the emission angle, checked against
    # a dense local polynomial fit
    from conftest import triangle_from_beta
    from cherenkov_wigner.amplitudes import helicity_amplitude

    theta0 = math.radians(35.0)

    def zeta(theta_k):
        geom, _ = triangle_from_beta(0.9, 1.5, 1e-5, 1e-5, theta_k)
        return helicity_amplitude(geom).phase

    slope = differentiate(zeta, theta0, DiffSpec(base_step=1e-6))
    window = np.linspace(theta0 - 5e-4, theta0 + 5e-4, 21)
    fit = np.polyfit(window - theta0, [zeta(t) for t in window], 4)
    slope_fit = fit[-2]
    assert abs(slope - slope_fit) < 1e-6 * abs(slope_fit)


def test_find_root_simple():
    assert abs(find_root(lambda x: x - 0.5, 0.0, 1.0, 1e-14) - 0.5) < 1e-12
    assert abs(find_root(math.cos, 0.0, math.pi, 1e-14) - math.pi / 2) < 1e-12


def test_find_root_no_sign_change():
    with pytest.raises(NoSignChange):
        find_root(lambda x: x * x + 1.0, -1.0, 1.0)


def test_find_root_bisection_guarantee():
    # a step function defeats the secant; the eval count stays within the
    # factor-2-shrink-per-iteration budget
    calls = {"n": 0}

    def f(x):
        calls["n"] += 1
        return 1.0 if x > 0.3 else -1.0

    tol = 1e-10
    root = find_root(f, 0.0, 1.0, tol)
    assert abs(root - 0.3) < tol
    assert calls["n"] <= 2 * (math.ceil(math.log2(1.0 / tol)) + 2)


def test_find_root_matches_singular_angle():
    # zeros of 1/t_d located by the root finder coincide with the exact
    # closed-form singular angles
    from cherenkov_wigner.kinematics import lorentz_gamma
    from cherenkov_wigner.observables import (singular_angles,
                                              spread_times_at_angle)

    beta, n, omega = 0.9, 1.5, 1e-6
    eps = lorentz_gamma(beta)
    lo, hi, width = singular_angles(beta, n, omega, eps)

    def inv_td(theta):
        return spread_times_at_angle(beta, n, omega, eps, 1e-5, theta).inv_t_d

    root = find_root(inv_td, lo - 0.4 * width, lo + 0.4 * width, 1e-12)
    assert abs(root - lo) < 1e-8
