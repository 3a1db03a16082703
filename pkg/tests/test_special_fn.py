"""Normalized Bessel function and Stirling tables against mpmath."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genfourier.errors import CapacityError, ConvergenceError, DomainError
from genfourier.special_fn import (
    SERIES_RADIUS,
    Z_MAX,
    BesselOrder,
    falling_factorial_coeffs,
    gamma,
    normalized_bessel,
    normalized_bessel_derivative,
    stirling_table,
)

mp.mp.dps = 40


def oracle(nu, z):
    if z == 0:
        return 1.0
    return float(mp.gamma(nu + 1) * (2 / mp.mpf(z)) ** nu * mp.besselj(nu, z))


@pytest.mark.parametrize("nu", [-0.49, -0.25, 0.0, 0.3, 0.5, 1.0, 2.5, 7.0])
@pytest.mark.parametrize("z", [0.0, 1e-8, 0.5, 3.0, SERIES_RADIUS, 6.01, 20.0, 150.0, 599.0])
def test_bessel_matches_mpmath(nu, z):
    assert normalized_bessel(nu, z) == pytest.approx(oracle(nu, z), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(nu=st.floats(-0.49, 12.0), z=st.floats(0.0, 60.0))
def test_bessel_random_orders(nu, z):
    assert abs(normalized_bessel(nu, z) - oracle(nu, z)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(nu=st.floats(-0.49, 8.0), z=st.floats(0.0, Z_MAX))
def test_bessel_bounded_by_one(nu, z):
    # |j_nu| <= 1 for nu >= -1/2
    assert abs(normalized_bessel(nu, z)) <= 1 + 1e-12


def test_bessel_vectorizes_and_is_even():
    z = np.linspace(-40, 40, 81)
    vals = normalized_bessel(1.5, z)
    assert vals.shape == z.shape
    np.testing.assert_array_equal(vals, vals[::-1])


def test_bessel_derivative_matches_finite_difference():
    z, h = 2.3, 1e-5
    fd = (normalized_bessel(0.7, z + h) - normalized_bessel(0.7, z - h)) / (2 * h)
    assert normalized_bessel_derivative(0.7, z) == pytest.approx(fd, rel=1e-8)


def test_bessel_domain_errors():
    with pytest.raises(DomainError):
        BesselOrder(-0.5)
    with pytest.raises(DomainError):
        normalized_bessel(-0.6, 1.0)
    with pytest.raises(ConvergenceError):
        normalized_bessel(0.5, Z_MAX * 1.01)
    with pytest.raises(DomainError):
        normalized_bessel(0.5, np.nan)


def test_gamma():
    for x in (0.5, 1.0, 3.7, 10.0):
        assert gamma(x) == pytest.approx(float(mp.gamma(x)), rel=1e-14)


def test_stirling_small_values():
    t = stirling_table(5)
    assert [t.S(4, j) for j in range(5)] == [0, 1, 7, 6, 1]
    assert [t.s(4, j) for j in range(5)] == [0, -6, 11, -6, 1]
    assert t.S(3, 7) == 0


@given(l=st.integers(0, 20))
def test_stirling_against_mpmath(l):
    t = stirling_table(l)
    for j in range(l + 1):
        assert t.S(l, j) == int(mp.stirling2(l, j))
        assert t.s(l, j) == int(mp.stirling1(l, j))


@given(l=st.integers(0, 15))
def test_stirling_kinds_are_inverse(l):
    # sum_j S(l, j) s(j, m) = delta_{l m}
    t = stirling_table(l)
    for m in range(l + 1):
        total = sum(t.S(l, j) * t.s(j, m) for j in range(m, l + 1))
        assert total == (1 if m == l else 0)


@given(l=st.integers(0, 12), lam=st.integers(-20, 20))
def test_falling_factorial_coeffs(l, lam):
    coeffs = falling_factorial_coeffs(l)
    direct = math.prod(lam - i for i in range(l))
    assert sum(c * lam**j for j, c in enumerate(coeffs)) == direct


def test_stirling_capacity():
    with pytest.raises(CapacityError):
        stirling_table(21)
    with pytest.raises(CapacityError):
        stirling_table(3).S(4, 1)
    with pytest.raises(DomainError):
        stirling_table(-1)


def test_closed_form_examples():
    assert gamma(1.5) == pytest.approx(0.8862269255, abs=1e-10)
    assert normalized_bessel(0.5, math.pi) == pytest.approx(0.0, abs=1e-14)
    assert normalized_bessel(1.5, 1.0) == pytest.approx(3 * (math.sin(1) - math.cos(1)), abs=1e-14)
    assert normalized_bessel(1.5, 1.0) == pytest.approx(0.903506, abs=1e-6)
    assert normalized_bessel_derivative(0.5, math.pi) == pytest.approx(-1 / math.pi, abs=1e-14)
    assert normalized_bessel_derivative(1.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        gamma(0.0)
