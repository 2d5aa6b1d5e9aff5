import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings, strategies as st

from spheremax.errors import PreconditionError
from spheremax.specfun import (
    DECAY_EXPONENT,
    bessel_j,
    check_fourier_decay,
    fourier_sigma,
    fourier_sphere,
    krawtchouk,
    krawtchouk_bound_scan,
    sphere_area,
)


def scipy_fourier(r, rho):
    nu = r / 2 - 1
    u = 2 * math.pi * rho
    return sp.gamma(r / 2) * (u / 2) ** -nu * sp.jv(nu, u)


def test_sphere_area():
    assert math.isclose(sphere_area(2), 2 * math.pi)
    assert math.isclose(sphere_area(3), 4 * math.pi)
    assert math.isclose(sphere_area(4), 2 * math.pi**2)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 40))
def test_three_dimensional_closed_form(rho):
    u = 2 * math.pi * rho
    for method in ("interval_quadrature", "bessel_formula"):
        assert abs(fourier_sphere(3, rho, method) - math.sin(u) / u) < 1e-11


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.floats(0.01, 20))
def test_interval_matches_scipy(r, rho):
    ref = scipy_fourier(r, rho)
    assert abs(fourier_sphere(r, rho) - ref) <= 1e-9 * max(1.0, abs(ref)) + 1e-14


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 30), st.floats(0.05, 50))
def test_methods_agree(r, rho):
    a = fourier_sphere(r, rho, "interval_quadrature")
    b = fourier_sphere(r, rho, "bessel_formula")
    assert abs(a - b) <= 1e-8 * max(abs(a), abs(b), 1e-300) or abs(a - b) < 1e-15


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 4.5), st.floats(0.1, 40))
def test_bessel_matches_scipy(nu, u):
    assert abs(bessel_j(nu, u) - sp.jv(nu, u)) < 1e-11


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 50), st.floats(0.0, 1.0))
def test_quadratic_bound(r, frac):
    rho = frac * math.sqrt(r)
    assert abs(fourier_sphere(r, rho) - 1) <= 2 * math.pi**2 * rho**2 / r * (1 + 1e-12) + 1e-15


def test_even_and_normalized():
    assert fourier_sphere(7, 0.0) == 1.0
    assert fourier_sphere(7, -1.3) == fourier_sphere(7, 1.3)
    assert math.isclose(fourier_sigma(5, 0.7), sphere_area(5) * fourier_sphere(5, 0.7))


def test_preconditions():
    with pytest.raises(PreconditionError):
        fourier_sphere(1, 0.5)
    with pytest.raises(PreconditionError):
        fourier_sphere(5, 0.5, "bogus")
    with pytest.raises(PreconditionError):
        krawtchouk(4, 5, 0)


def test_decay_constants_finite():
    rep = check_fourier_decay(10, np.linspace(0, 50, 201))
    assert math.isfinite(rep.a_exp) and math.isfinite(rep.a_pow)
    assert rep.a_exp >= 1 / (1 + math.exp(-DECAY_EXPONENT * 10))  # value at rho = 0


# ---- Krawtchouk -----------------------------------------------------------------


def test_krawtchouk_small_table():
    # K_1^(n)(x) = 1 - 2x/n
    for n in range(1, 12):
        for x in range(n + 1):
            assert krawtchouk(n, 1, x).value == 1 - Fraction(2 * x, n)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 64), st.data())
def test_krawtchouk_symmetries(n, data):
    k = data.draw(st.integers(0, n))
    x = data.draw(st.integers(0, n))
    v = krawtchouk(n, k, x).value
    assert krawtchouk(n, k, 0).value == 1
    assert v == krawtchouk(n, x, k).value
    assert krawtchouk(n, k, n - x).value == (-1) ** k * v
    assert abs(v) <= 1


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 24), st.data())
def test_krawtchouk_orthogonality(n, data):
    k = data.draw(st.integers(0, n))
    l = data.draw(st.integers(0, n))
    s = sum(math.comb(n, x) * krawtchouk(n, k, x).value * krawtchouk(n, l, x).value for x in range(n + 1))
    assert s == (Fraction(2**n, math.comb(n, k)) if k == l else 0)


def test_krawtchouk_scan():
    scan = krawtchouk_bound_scan(64)
    assert scan.c_min >= 0.2
    assert math.isclose(scan.c_min, math.log(3))
    assert scan.argmin == (4, 2, 2)


def test_documented_values():
    assert fourier_sphere(5, 0.0) == 1.0
    first_zero = sp.jn_zeros(0, 1)[0] / (2 * math.pi)
    assert abs(fourier_sphere(2, first_zero)) < 1e-6
    assert abs(fourier_sphere(10, 1.0) - 1) <= 2 * math.pi**2 / 10
    assert krawtchouk(4, 1, 1).value == Fraction(1, 2)
    assert krawtchouk(6, 2, 4).value == krawtchouk(6, 2, 2).value


def test_decay_constants_documented_grids():
    assert check_fourier_decay(10, np.linspace(0, 30, 301)).a_exp <= 10
    assert check_fourier_decay(25, np.linspace(0, 100, 401)).a_pow <= 10
    # rho = 0 alone leaves the power bound vacuous
    rep = check_fourier_decay(2, [0.0])
    assert rep.a_pow == 0.0 and math.isnan(rep.pow_argmax)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.floats(0, 60))
def test_transform_bounded_by_one(r, rho):
    assert abs(fourier_sphere(r, rho)) <= 1 + 1e-12


def test_small_scan_and_zero_count():
    small = krawtchouk_bound_scan(4)
    assert small.c_min > 0
    # K_1^(2)(1) = 0 is the first zero met by the scan
    assert krawtchouk(2, 1, 1).value == 0 and small.zeros >= 1
