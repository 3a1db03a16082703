"""Exact atom algebra: pointwise oracles via mpmath and coefficient identities."""

from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genfourier import AtomSum, Params, gaussian
from genfourier.atoms import (
    Atom,
    apply_E_minus,
    apply_E_plus,
    apply_euler,
    apply_H,
    atom_suite,
    commutator_residuals,
    euler_power,
    f_tilde_agreement,
    ladder_recursion_residual,
    max_coeff_diff,
    normal_ordered_euler,
    sequence_f_m,
    sequence_f_tilde,
    sequence_g_m,
    x_power_derivative,
)
from genfourier.errors import DomainError
from genfourier.special_fn import stirling_table

import oracles

mp.mp.dps = 30
TABLE = stirling_table(8)
as_mp = oracles.atom


def dunkl_laplacian_oracle(f, k, x):
    g = as_mp(f)
    x = mp.mpf(x)
    return mp.diff(g, x, 2) + 2 * k / x * mp.diff(g, x) - k * (g(x) - g(-x)) / x**2


@pytest.mark.parametrize("name", ["gauss_s0.5", "odd_s0.5", "even_pow_s0.5", "odd_pow_s1", "mixed"])
@pytest.mark.parametrize("x", [-1.7, -0.4, 0.6, 2.2])
def test_E_minus_matches_numeric_dunkl_laplacian(params, name, x):
    f = atom_suite(params.n)[name]
    n, k = params.n, params.k
    expect = n * abs(x) ** (2 - 2 / n) * dunkl_laplacian_oracle(f, k, x)
    assert complex(apply_E_minus(f, params)(x)) == pytest.approx(complex(expect), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("x", [-1.3, 0.8])
def test_euler_and_derivatives_match_mpmath(params, x):
    f = atom_suite(params.n)["mixed"]
    g = as_mp(f)
    assert complex(apply_euler(f)(x)) == pytest.approx(complex(x * mp.diff(g, x)), rel=1e-12)
    for j in range(4):
        assert complex(x_power_derivative(f, j)(x)) == pytest.approx(
            complex(mp.mpf(x) ** j * mp.diff(g, x, j)), rel=1e-9, abs=1e-12
        )


def test_E_plus_and_H_pointwise(params):
    f = gaussian(params.n, 0.7, parity=1)
    x = np.array([-2.0, -0.3, 0.5, 1.9])
    np.testing.assert_allclose(apply_E_plus(f, params)(x), params.n * np.abs(x) ** (2 / params.n) * f(x))
    Hf = apply_H(f, params)(x)
    np.testing.assert_allclose(Hf, params.n * apply_euler(f)(x) + params.euler_shift * f(x))


def test_canonical_form_and_serialization():
    a = gaussian(2, 1.0, coeff=2.0) + gaussian(2, 1.0, coeff=-2.0)
    assert a.is_zero
    f = gaussian(3, 0.5, parity=1, exponent=Fraction(2, 3)) + gaussian(3, 1.0, coeff=1 - 2j)
    back = AtomSum.from_json(f.to_json(), 3)
    assert max_coeff_diff(f, back) == 0
    with pytest.raises(DomainError):
        gaussian(1, 1.0) + gaussian(2, 1.0)
    with pytest.raises(DomainError):
        Atom(1.0, 2, 0, 1.0)
    with pytest.raises(DomainError):
        Atom(1.0, 0, 0, -1.0)


def test_evaluation_at_origin():
    assert gaussian(1, 1.0)(0.0) == 1
    assert gaussian(1, 1.0, parity=1)(0.0) == 0
    with pytest.raises(DomainError):
        gaussian(3, 1.0, exponent=Fraction(2, 3))(0.0)


# ---- identities on random atom sums -----------------------------------------

atom_st = st.builds(
    lambda c, p, a, s: (c, p, a, s),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.integers(0, 1),
    st.integers(0, 3),
    st.sampled_from([0.25, 0.5, 1.0, 1.5]),
)


@st.composite
def atom_sums(draw):
    k, n = draw(st.sampled_from([(1.0, 1), (0.8, 2), (1.0, 3), (2.5, 2)]))
    terms = draw(st.lists(atom_st, min_size=1, max_size=4))
    f = AtomSum([Atom(c, p, Fraction(2 * a, n), s) for c, p, a, s in terms], n)
    return f, Params(k, n)


@settings(max_examples=60, deadline=None)
@given(atom_sums())
def test_sl2_commutators(fp):
    f, params = fp
    assert max(commutator_residuals(f, params).values()) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(atom_sums(), st.integers(1, 4))
def test_ladder_recursion(fp, beta):
    f, params = fp
    assert ladder_recursion_residual(f, beta, params) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(atom_sums(), st.integers(0, 6))
def test_normal_ordering(fp, l):
    f, _ = fp
    assert max_coeff_diff(euler_power(f, l), normal_ordered_euler(f, l, TABLE)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(atom_sums(), st.integers(0, 5))
def test_H_power_is_f_m(fp, m):
    f, params = fp
    g = f
    for _ in range(m):
        g = apply_H(g, params)
    assert max_coeff_diff(g, sequence_f_m(f, m, params, TABLE)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(atom_sums(), st.integers(0, 4))
def test_g_m_is_shifted_euler_power(fp, m):
    f, params = fp
    g = f
    for _ in range(m):
        g = apply_euler(g) + g.scale(params.lp_shift)
    assert max_coeff_diff(g, sequence_g_m(f, m, params)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(atom_sums(), atom_sums(), st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_operators_are_linear(fp, gq, c):
    f, params = fp
    g, _ = gq
    if g.n != f.n:
        return
    for op in (apply_E_plus, apply_E_minus, apply_H):
        assert max_coeff_diff(op(f + g.scale(c), params), op(f, params) + op(g, params).scale(c)) <= 1e-12


def test_f_tilde_stirling_is_falling_product(params):
    """The Stirling construction equals (-1)^l (beta + H)_l; all agree at l = 0."""
    f = atom_suite(params.n)["mixed"]
    beta = 3
    for l in range(beta + 1):
        g = f
        for i in range(l):
            g = g.scale(beta - i) + apply_H(g, params)
        stir = sequence_f_tilde(f, beta, l, params, TABLE, "stirling")
        assert max_coeff_diff(stir, g.scale((-1) ** l)) <= 1e-12
    for m in ("recursion", "falling_factorial"):
        assert max_coeff_diff(sequence_f_tilde(f, beta, 0, params, TABLE, m), f) == 0


def test_f_tilde_constructions_disagree(params):
    """The three published constructions of f~ differ from l = 1 on (see notes)."""
    f = atom_suite(params.n)["gauss_s0.5"]
    assert f_tilde_agreement(f, 0, params, TABLE) == 0
    assert f_tilde_agreement(f, 2, params, TABLE) > 0.5


def test_sequence_errors(params):
    f = gaussian(params.n, 1.0)
    with pytest.raises(DomainError):
        sequence_f_tilde(f, 2, 3, params, TABLE)
    with pytest.raises(DomainError):
        sequence_f_tilde(f, 2, 1, params, TABLE, method="bogus")
    with pytest.raises(DomainError):
        sequence_g_m(f, -1, params)
