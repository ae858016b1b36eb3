import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from loewner_range import (
    DomainError, NoRoot, ProblemParams, RootNearOne, coeffs_forward, coeffs_inverse,
    forward_sigma_argmax, free_time_modulus, hyp_dist, psi, sigma_forward, sigma_inverse,
    solve_radius_forward, solve_radius_inverse, t_star, theta, x_along,
)
from loewner_range.scalar import (
    Direction, FORWARD_PLUS, INVERSE_PLUS, psi_prime, theta_complement, theta_prime,
)

LN2 = math.log(2.0)
SQ5 = math.sqrt(5.0)

z0s = st.floats(0.02, 0.98)
x0s = st.floats(-1.0, 1.0)
times = st.floats(0.0, 4.0)


# --- coefficients ----------------------------------------------------------

def test_coeffs_forward_examples():
    c = coeffs_forward(0.5, 1.0)
    assert (c.A, c.B) == (0.25, 0.25)
    c = coeffs_forward(0.3, 0.0)
    assert c.A == pytest.approx(-0.6) and c.B == pytest.approx(1.09)
    c = coeffs_forward(0.65, -1.0)
    assert c.A + c.B == pytest.approx(0.0, abs=1e-15)
    assert c.B - c.A == pytest.approx(2 * 1.65 ** 2)


def test_coeffs_inverse_examples():
    c = coeffs_inverse(0.5, 1.0)
    assert (c.G, c.H) == (2.25, 2.25)
    c = coeffs_inverse(0.3, -1.0)
    assert c.G + c.H == pytest.approx(0.0, abs=1e-15)
    assert c.H - c.G == pytest.approx(2 * 0.7 ** 2)
    c = coeffs_inverse(0.4, 0.0)
    assert c.G == pytest.approx(0.8) and c.H == pytest.approx(1.16)


@given(z0s, x0s)
def test_coefficient_factorisations(z0, x0):
    f = coeffs_forward(z0, x0)
    assert f.B > 0
    assert f.A + f.B == pytest.approx((1 + x0) * (1 - z0) ** 2, abs=1e-14)
    assert f.B - f.A == pytest.approx((1 - x0) * (1 + z0) ** 2, abs=1e-14)
    g = coeffs_inverse(z0, x0)
    assert g.H > 0
    assert g.H - g.G == pytest.approx((1 - x0) * (1 - z0) ** 2, abs=1e-14)
    assert g.G + g.H == pytest.approx((1 + x0) * (1 + z0) ** 2, abs=1e-14)


@pytest.mark.parametrize("z0,x0", [(0.0, 0.0), (1.0, 0.0), (0.5, 1.2), (0.5, float("nan"))])
def test_coefficient_domain(z0, x0):
    with pytest.raises(DomainError):
        coeffs_forward(z0, x0)


# --- potentials ------------------------------------------------------------

def test_psi_example_and_blowup():
    c = coeffs_forward(0.5, 0.0)
    expected = 0.25 * math.log(0.5) - 1.25 * math.log(0.5) + 2.25 * math.log(1.5)
    assert psi(0.5, c) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(1.60544, abs=1e-5)
    assert psi(1e-300, c) > psi(1e-100, c) > psi(1e-10, c)


def test_theta_examples():
    c = coeffs_inverse(0.5, 1.0)
    assert theta(0.5, c) == pytest.approx(2.25 * (2 * math.log(1.5) - math.log(0.5)), rel=1e-15)
    assert theta(0.5, c) == pytest.approx(3.38418, abs=1e-5)
    y = np.linspace(0.05, 0.95, 7)
    np.testing.assert_allclose(theta(y, c), c.H * (2 * np.log1p(y) - np.log(y)), rtol=1e-14)
    c = coeffs_inverse(0.5, 0.2)
    assert theta(1 - 1e-15, c) < theta(0.999, c) < theta(0.5, c)


@pytest.mark.parametrize("y", [0.0, 1.0, -0.1, 1.5])
def test_potential_domain(y):
    with pytest.raises(DomainError):
        psi(y, coeffs_forward(0.5, 0.0))
    with pytest.raises(DomainError):
        theta(y, coeffs_inverse(0.5, 0.0))


@given(z0s, x0s)
def test_potentials_decrease(z0, x0):
    y = np.linspace(1e-6, 1 - 1e-6, 50)
    assert np.all(np.diff(psi(y, coeffs_forward(z0, x0))) < 0)
    assert np.all(np.diff(theta(y, coeffs_inverse(z0, x0))) < 0)
    assert np.all(psi_prime(y, coeffs_forward(z0, x0)) < 0)
    assert np.all(theta_prime(y, coeffs_inverse(z0, x0)) < 0)


def test_theta_complement_matches_theta():
    c = coeffs_inverse(0.4, 0.3)
    u = np.array([0.5, 0.1, 1e-3])
    np.testing.assert_allclose(theta_complement(u, c), theta(1 - u, c), rtol=1e-13)


# --- radius solvers --------------------------------------------------------

def test_forward_radius_examples():
    assert solve_radius_forward(ProblemParams(0.5, 0.0), 0.3) == 0.5
    p = ProblemParams(0.5, LN2)
    assert solve_radius_forward(p, 1.0) == pytest.approx((3 - SQ5) / 2, abs=1e-14)
    assert solve_radius_forward(p, -1.0) == pytest.approx((7 - 3 * SQ5) / 2, abs=1e-14)


def test_forward_radius_quadratic_oracle():
    for z0, T in [(0.3, 0.7), (0.9, 2.5), (0.05, 0.1)]:
        p = ProblemParams(z0, T)
        k = math.exp(-T)
        assert solve_radius_forward(p, 1.0) == pytest.approx(
            float(oracles.koebe_minus(k * z0 / (1 - z0) ** 2)), abs=1e-13)
        assert solve_radius_forward(p, -1.0) == pytest.approx(
            float(oracles.koebe_plus(k * z0 / (1 + z0) ** 2)), abs=1e-13)


@pytest.mark.parametrize("z0,T,x0", [(0.5, LN2, 0.0), (0.95, 3.5, 0.3), (0.1, 2.0, -0.7), (0.65, 1.2, 0.9)])
def test_forward_radius_mp_oracle(z0, T, x0):
    assert solve_radius_forward(ProblemParams(z0, T), x0) == pytest.approx(
        float(oracles.radius_forward(z0, T, x0)), rel=1e-12)


def test_inverse_radius_examples():
    for x0 in (-1.0, 0.0, 1.0):
        assert solve_radius_inverse(ProblemParams(0.3, 0.0), x0) == 0.3
    # dual of the forward x0 = 1 case
    assert solve_radius_inverse(ProblemParams((3 - SQ5) / 2, LN2), -1.0) == pytest.approx(0.5, abs=1e-14)
    r = solve_radius_inverse(ProblemParams(0.4, 0.1), 1.0)
    assert r == pytest.approx(float(oracles.koebe_plus(math.exp(0.1) * 0.4 / 1.96)), abs=1e-14)
    assert r == pytest.approx(0.5235061636564583, abs=1e-14)


@pytest.mark.parametrize("z0,T,x0", [(0.4, 0.1, 0.0), (0.4, 0.3, 0.9), (0.8, 1.0, -0.5), (0.2, 0.5, 0.9)])
def test_inverse_radius_mp_oracle(z0, T, x0):
    r_ref, u_ref = oracles.radius_inverse(z0, T, x0)
    p = ProblemParams(z0, T)
    assert solve_radius_inverse(p, x0) == pytest.approx(float(r_ref), rel=1e-13)
    assert solve_radius_inverse(p, x0, complement=True) == pytest.approx(float(u_ref), rel=1e-9)


def test_inverse_no_root_and_near_one():
    z0 = 0.4
    with pytest.raises(NoRoot):
        solve_radius_inverse(ProblemParams(z0, t_star(z0) + 0.01), 1.0)
    with pytest.raises(RootNearOne) as info:
        solve_radius_inverse(ProblemParams(z0, 0.3), 0.999)
    assert info.value.estimate == 1 - 1e-12
    # just below the threshold the root exists but is close to 1
    r = solve_radius_inverse(ProblemParams(z0, t_star(z0) - 1e-6), 1.0)
    assert 0.99 < r < 1.0


@settings(max_examples=60, deadline=None)
@given(z0s, times, x0s)
def test_forward_residual_and_bounds(z0, T, x0):
    p = ProblemParams(z0, T)
    r = solve_radius_forward(p, x0)
    c = coeffs_forward(z0, x0)
    assert 0.0 < r <= z0
    assert abs(psi(r, c) - (c.B * T + psi(z0, c))) < 1e-10
    assert (r == z0) == (T == 0.0)


@settings(max_examples=60, deadline=None)
@given(z0s, times, x0s)
def test_inverse_residual_and_bounds(z0, T, x0):
    p = ProblemParams(z0, T)
    c = coeffs_inverse(z0, x0)
    try:
        u = solve_radius_inverse(p, x0, complement=True)
    except (NoRoot, RootNearOne):
        return
    target = theta(z0, c) - c.H * T
    assert abs(theta_complement(u, c) - target) < 1e-10
    assert z0 <= solve_radius_inverse(p, x0) < 1.0
    assert 0.0 < u <= 1 - z0 + 1e-15


@settings(max_examples=30, deadline=None)
@given(z0s, st.floats(0.01, 3.0))
def test_radius_monotone_in_x0(z0, T):
    p = ProblemParams(z0, T)
    x = np.linspace(-1, 1, 41)
    assert np.all(np.diff(solve_radius_forward(p, x)) > 0)
    x = np.linspace(-1, 0.5, 31)
    try:
        u = solve_radius_inverse(p, x, complement=True)
    except RootNearOne:
        return
    assert np.all(np.diff(u) < 0)


@settings(max_examples=40, deadline=None)
@given(z0s, st.floats(0.0, 3.0))
def test_duality(z0, T):
    p = ProblemParams(z0, T)
    for x0 in (1.0, -1.0):
        r = solve_radius_forward(p, x0)
        assert solve_radius_inverse(ProblemParams(r, T), -x0) == pytest.approx(z0, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(z0s, st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.floats(-0.99, 0.99))
def test_forward_semigroup(z0, t1, t2, x0):
    r1 = solve_radius_forward(ProblemParams(z0, t1), x0)
    x1 = float(x_along(r1, z0, x0))
    direct = solve_radius_forward(ProblemParams(z0, t1 + t2), x0)
    assert solve_radius_forward(ProblemParams(r1, t2), x1) == pytest.approx(direct, rel=1e-9, abs=1e-12)


# --- angles ----------------------------------------------------------------

def test_sigma_forward_examples():
    p = ProblemParams(0.5, LN2)
    assert sigma_forward(p, 1.0) == 0.0 and sigma_forward(p, -1.0) == 0.0
    assert sigma_forward(ProblemParams(0.5, 0.0), 0.3) == 0.0
    assert solve_radius_forward(p, 0.0) == pytest.approx(float(oracles.radius_forward(0.5, LN2, 0.0)), rel=1e-13)
    assert sigma_forward(p, 0.0) == pytest.approx(float(oracles.sigma_forward(0.5, LN2, 0.0)), rel=1e-12)
    assert sigma_forward(p, 0.0) == pytest.approx(0.4421, abs=1e-4)


def test_sigma_inverse_examples():
    p = ProblemParams(0.4, 0.1)
    assert sigma_inverse(p, -1.0) == 0.0
    assert sigma_inverse(ProblemParams(0.4, 0.0), 0.2) == 0.0
    s = sigma_inverse(p, 0.0)
    assert s > 0
    assert s == pytest.approx(float(oracles.sigma_inverse(0.4, 0.1, 0.0)), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.02, 0.9), st.floats(0.01, 6.0))
def test_sigma_below_pi_under_threshold(z0, T):
    x = np.linspace(-1, 1, 201)
    s = sigma_forward(ProblemParams(z0, T), x)
    assert np.all(s >= 0)
    assert s.max() < min(math.pi, 2 * math.atanh(z0)) + 1e-12


def test_sigma_argmax():
    p = ProblemParams(0.65, 1.2)
    xs = forward_sigma_argmax(p)
    grid = np.linspace(-1, 1, 4001)
    s = sigma_forward(p, grid)
    assert sigma_forward(p, xs) >= s.max() - 1e-12
    assert abs(xs - grid[np.argmax(s)]) < 2e-3


# --- thresholds and helpers -----------------------------------------------

def test_t_star():
    assert t_star(0.4) == pytest.approx(math.log(1.225), abs=1e-14)
    assert t_star(0.4) == pytest.approx(0.202941, abs=1e-6)
    assert t_star(0.5) == pytest.approx(0.117783, abs=1e-6)
    assert t_star(1 - 1e-9) < 1e-15
    z = np.linspace(0.01, 0.99, 50)
    assert np.all(np.diff([t_star(v) for v in z]) < 0)


def test_hyp_dist():
    assert hyp_dist(0.0) == 0.0
    assert hyp_dist(math.tanh(1.0)) == pytest.approx(2.0, rel=1e-15)
    assert hyp_dist(0.4) == pytest.approx(math.log(7 / 3), rel=1e-15)
    with pytest.raises(DomainError):
        hyp_dist(1.0)


def test_x_along_examples():
    v = x_along(0.25, 0.5, 0.0)
    assert v == pytest.approx(math.tanh(2 * math.atanh(0.25) - 2 * math.atanh(0.5)), abs=1e-15)
    assert v == pytest.approx(-0.528302, abs=1e-6)
    for d in (FORWARD_PLUS, INVERSE_PLUS):
        for w in (0.1, 0.5, 0.9):
            assert x_along(w, 0.5, 1.0, d) == pytest.approx(1.0, abs=1e-15)
            assert x_along(w, 0.5, -1.0, d) == pytest.approx(-1.0, abs=1e-15)


@given(z0s, x0s)
def test_x_along_initial_value_and_monotone(z0, x0):
    for d in (FORWARD_PLUS, INVERSE_PLUS):
        assert abs(x_along(z0, z0, x0, d) - x0) < 1e-12
    if abs(x0) < 0.999:
        w = np.linspace(0.01, 0.99, 60)
        dx = np.diff(x_along(w, z0, x0))
        assert np.all(dx >= -1e-15) or np.all(dx <= 1e-15)


def test_inverse_x_along_tanh_form():
    z0, x0 = 0.4, 0.3
    w = np.linspace(0.41, 0.95, 9)
    expected = np.tanh(np.arctanh(x0) + 2 * np.arctanh(z0) - 2 * np.arctanh(w))
    np.testing.assert_allclose(x_along(w, z0, x0, INVERSE_PLUS), expected, atol=1e-14)


def test_free_time_modulus():
    for z0 in (0.1, 0.4, 0.9):
        assert free_time_modulus(z0, 0.0) == z0
        for t in (0.1, 1.0, 3.0):
            assert free_time_modulus(z0, t) == pytest.approx(float(oracles.free_time_modulus(z0, t)), rel=1e-14)
    v = free_time_modulus(0.4, np.linspace(0, 12, 50))
    assert np.all(np.diff(v) > 0) and v[-1] > 1 - 1e-3 and v[-1] < 1
