"""Exact algebra of deformed-Gaussian atoms.

An atom is ``c * x^p * |x|^a * exp(-s n |x|^(2/n))`` with parity ``p`` in
{0, 1}, a rational exponent ``a`` and a rate ``s > 0``.  Finite sums of atoms
are closed under multiplication by ``|x|^(2/n)``, the Euler operator
``x d/dx``, plain differentiation and ``|x|^(2-2/n) Delta_k``, so every
operator sequence built from them is computed coefficient-exactly (up to
floating rounding of the coefficients).

Working in ``r = |x|`` with ``theta = r d/dr``, one has

    theta (r^b E) = b r^b E - 2s r^(b + 2/n) E,          E = exp(-s n r^(2/n))
    r^2 Delta_k   = theta^2 + (2k - 1) theta - 2k p,

where ``b = a + p`` and the last term is the reflection part of the Dunkl
Laplacian, which vanishes on even and equals ``-2k/x^2`` on odd functions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable

import numpy as np

from .errors import CapacityError, DomainError
from .params import Params
from .special_fn import StirlingTable

__all__ = [
    "Atom",
    "AtomSum",
    "gaussian",
    "apply_mult",
    "apply_euler",
    "apply_L",
    "apply_H",
    "apply_E_plus",
    "apply_E_minus",
    "apply_derivative",
    "multiply_x",
    "x_power_derivative",
    "euler_power",
    "normal_ordered_euler",
    "sequence_f_m",
    "sequence_f_tilde",
    "sequence_g_m",
    "sequence_h",
    "max_coeff_diff",
    "atom_suite",
    "commutator_residuals",
    "ladder_recursion_residual",
    "f_tilde_agreement",
    "F_TILDE_METHODS",
]


@dataclass(frozen=True)
class Atom:
    coeff: complex
    parity: int
    exponent: Fraction
    rate: float

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise DomainError(f"parity must be 0 or 1, got {self.parity!r}")
        if not self.rate > 0:
            raise DomainError(f"rate must be positive, got {self.rate!r}")
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "coeff", complex(self.coeff))

    @property
    def key(self):
        return (self.parity, self.exponent, self.rate)


class AtomSum:
    """Immutable canonical sum of atoms sharing the deformation ``n``."""

    __slots__ = ("n", "terms")

    def __init__(self, terms: Iterable[Atom] = (), n: int = 1):
        merged: dict = {}
        for t in terms:
            merged[t.key] = merged.get(t.key, 0j) + t.coeff
        canon = [
            Atom(c, p, a, s)
            for (p, a, s), c in sorted(merged.items(), key=lambda kv: kv[0])
            if c != 0
        ]
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "terms", tuple(canon))

    def __setattr__(self, name, value):
        raise AttributeError("AtomSum is immutable")

    @classmethod
    def zero(cls, n: int = 1) -> "AtomSum":
        return cls((), n)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __repr__(self):
        body = " + ".join(
            f"({t.coeff:.6g})x^{t.parity}|x|^{t.exponent}e^(-{t.rate:g}n|x|^(2/n))"
            for t in self.terms
        )
        return f"AtomSum[n={self.n}]({body or '0'})"

    def _same_n(self, other):
        if other.n != self.n:
            raise DomainError(f"cannot combine atom sums with n={self.n} and n={other.n}")

    def __add__(self, other):
        if not isinstance(other, AtomSum):
            return NotImplemented
        self._same_n(other)
        return AtomSum(self.terms + other.terms, self.n)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if not isinstance(other, AtomSum):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "AtomSum":
        c = complex(c)
        return AtomSum((Atom(t.coeff * c, t.parity, t.exponent, t.rate) for t in self.terms), self.n)

    def __mul__(self, c):
        if isinstance(c, AtomSum):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def shift_exponent(self, delta) -> "AtomSum":
        delta = Fraction(delta)
        return AtomSum(
            (Atom(t.coeff, t.parity, t.exponent + delta, t.rate) for t in self.terms), self.n
        )

    @property
    def singular(self) -> bool:
        """True when some term has a negative exponent (blows up at the origin)."""
        return any(t.exponent < 0 for t in self.terms)

    @property
    def min_rate(self) -> float:
        return min((t.rate for t in self.terms), default=math.inf)

    def chop(self, tol: float = 1e-14) -> "AtomSum":
        """Drop terms whose coefficient is below ``tol`` times the largest one."""
        if not self.terms:
            return self
        big = max(abs(t.coeff) for t in self.terms)
        return AtomSum((t for t in self.terms if abs(t.coeff) > tol * big), self.n)

    def evaluate(self, x):
        """Pointwise value; scalar in, complex scalar out; arrays vectorize."""
        xa = np.asarray(x, dtype=float)
        scalar = xa.ndim == 0
        xa = np.atleast_1d(xa)
        if not self.terms:
            out = np.zeros(xa.shape, dtype=complex)
            return complex(out[0]) if scalar else out
        at_zero = xa == 0
        if at_zero.any():
            for t in self.terms:
                if t.exponent.denominator != 1 or t.exponent < 0:
                    raise DomainError(
                        f"evaluation at x=0 undefined for the term with exponent {t.exponent}"
                    )
        ax = np.abs(xa)
        n = self.n
        out = np.zeros(xa.shape, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            for t in self.terms:
                gauss = np.exp(-t.rate * n * ax ** (2.0 / n))
                if t.exponent == 0:
                    power = np.ones_like(ax)
                else:
                    power = ax ** float(t.exponent)
                val = power * gauss
                if t.parity:
                    val = xa * val
                if at_zero.any():
                    limit = 1.0 if (t.exponent == 0 and t.parity == 0) else 0.0
                    val = np.where(at_zero, limit, val)
                out += t.coeff * val
        return complex(out[0]) if scalar else out

    __call__ = evaluate

    # ---- serialization -------------------------------------------------
    def to_records(self) -> list[dict]:
        return [
            {
                "coeff_re": t.coeff.real,
                "coeff_im": t.coeff.imag,
                "parity": t.parity,
                "exponent_num": t.exponent.numerator,
                "exponent_den": t.exponent.denominator,
                "rate": t.rate,
            }
            for t in self.terms
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_records())

    @classmethod
    def from_records(cls, records, n: int) -> "AtomSum":
        terms = []
        for r in records:
            try:
                terms.append(
                    Atom(
                        complex(r["coeff_re"], r.get("coeff_im", 0.0)),
                        int(r["parity"]),
                        Fraction(int(r["exponent_num"]), int(r.get("exponent_den", 1))),
                        float(r["rate"]),
                    )
                )
            except KeyError as exc:
                raise DomainError(f"atom record missing field {exc.args[0]!r}: {r!r}") from None
        return cls(terms, n)

    @classmethod
    def from_json(cls, text: str, n: int) -> "AtomSum":
        return cls.from_records(json.loads(text), n)


def gaussian(n: int, s: float, coeff=1.0, parity: int = 0, exponent=0) -> AtomSum:
    """Single atom ``coeff * x^parity |x|^exponent exp(-s n |x|^(2/n))``."""
    return AtomSum([Atom(coeff, parity, Fraction(exponent), s)], n)


def max_coeff_diff(a: AtomSum, b: AtomSum, relative: bool = True) -> float:
    """Largest coefficient difference over the union of keys.

    With ``relative=True`` the result is divided by ``max(1, largest |coeff|)``.
    """
    diff = a - b
    worst = max((abs(t.coeff) for t in diff.terms), default=0.0)
    if not relative:
        return worst
    scale = max([1.0] + [abs(t.coeff) for t in a.terms] + [abs(t.coeff) for t in b.terms])
    return worst / scale


# ---- elementary operators ----------------------------------------------


def apply_mult(f: AtomSum, params: Params | None = None) -> AtomSum:
    """Multiplication by |x|^(2/n)."""
    return f.shift_exponent(Fraction(2, f.n))


def apply_euler(f: AtomSum) -> AtomSum:
    """Exact image under x d/dx."""
    q = Fraction(2, f.n)
    out = []
    for t in f.terms:
        b = float(t.exponent) + t.parity
        out.append(Atom(t.coeff * b, t.parity, t.exponent, t.rate))
        out.append(Atom(-2 * t.rate * t.coeff, t.parity, t.exponent + q, t.rate))
    return AtomSum(out, f.n)


def apply_L(f: AtomSum, params: Params) -> AtomSum:
    """Exact image under |x|^(2-2/n) Delta_k.

    The result may contain negative exponents; check ``.singular``.
    """
    _check_n(f, params)
    q = Fraction(2, f.n)
    qf = float(q)
    k = params.k
    out = []
    for t in f.terms:
        b = float(t.exponent) + t.parity
        s = t.rate
        low = b * b + (2 * k - 1) * b - 2 * k * t.parity
        mid = -2 * s * (2 * b + qf + 2 * k - 1)
        high = 4 * s * s
        out.append(Atom(t.coeff * low, t.parity, t.exponent - q, s))
        out.append(Atom(t.coeff * mid, t.parity, t.exponent, s))
        out.append(Atom(t.coeff * high, t.parity, t.exponent + q, s))
    return AtomSum(out, f.n)


def apply_H(f: AtomSum, params: Params) -> AtomSum:
    """H = n x d/dx + (kn + 1 - n/2)."""
    _check_n(f, params)
    return apply_euler(f).scale(params.n) + f.scale(params.euler_shift)


def apply_E_plus(f: AtomSum, params: Params) -> AtomSum:
    """n |x|^(2/n), the raising operator up to the factor i/2."""
    return apply_mult(f).scale(params.n)


def apply_E_minus(f: AtomSum, params: Params) -> AtomSum:
    """n |x|^(2-2/n) Delta_k, the lowering operator up to the factor i/2."""
    return apply_L(f, params).scale(params.n)


def multiply_x(f: AtomSum) -> AtomSum:
    """Multiplication by x."""
    out = []
    for t in f.terms:
        if t.parity == 0:
            out.append(Atom(t.coeff, 1, t.exponent, t.rate))
        else:
            out.append(Atom(t.coeff, 0, t.exponent + 2, t.rate))
    return AtomSum(out, f.n)


def _divide_x(f: AtomSum) -> AtomSum:
    out = []
    for t in f.terms:
        if t.parity == 1:
            out.append(Atom(t.coeff, 0, t.exponent, t.rate))
        else:
            out.append(Atom(t.coeff, 1, t.exponent - 2, t.rate))
    return AtomSum(out, f.n)


def apply_derivative(f: AtomSum) -> AtomSum:
    """d/dx, realized as x^{-1} (x d/dx); intermediate exponents may be negative."""
    return _divide_x(apply_euler(f))


def x_power_derivative(f: AtomSum, j: int) -> AtomSum:
    """x^j f^(j)."""
    if j < 0:
        raise DomainError("derivative order must be nonnegative")
    g = f
    for _ in range(j):
        g = apply_derivative(g)
    for _ in range(j):
        g = multiply_x(g)
    return g


def euler_power(f: AtomSum, l: int) -> AtomSum:
    """(x d/dx)^l f by direct iteration."""
    g = f
    for _ in range(l):
        g = apply_euler(g)
    return g


def normal_ordered_euler(f: AtomSum, l: int, table: StirlingTable) -> AtomSum:
    """sum_j S(l, j) x^j f^(j); equals (x d/dx)^l f."""
    _check_table(table, l)
    out = AtomSum.zero(f.n)
    for j in range(l + 1):
        S = table.S(l, j)
        if S:
            out = out + x_power_derivative(f, j).scale(S)
    return out


def _check_n(f: AtomSum, params: Params):
    if f.n != params.n:
        raise DomainError(f"atom sum built for n={f.n} used with n={params.n}")


def _check_table(table: StirlingTable, order: int):
    if order > table.max_order:
        raise CapacityError(f"Stirling table of order {table.max_order} cannot serve order {order}")


# ---- operator sequences ------------------------------------------------


def sequence_f_m(f: AtomSum, m: int, params: Params, table: StirlingTable) -> AtomSum:
    """f_m = sum_l sum_j C(m,l) (kn+1-n/2)^(m-l) n^l S(l,j) x^j f^(j)."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    _check_n(f, params)
    _check_table(table, m)
    shift = params.euler_shift
    xd = [x_power_derivative(f, j) for j in range(m + 1)]
    out = AtomSum.zero(f.n)
    for l in range(m + 1):
        outer = comb(m, l) * shift ** (m - l) * params.n ** l
        for j in range(l + 1):
            S = table.S(l, j)
            if S:
                out = out + xd[j].scale(outer * S)
    return out


F_TILDE_METHODS = ("stirling", "recursion", "falling_factorial")


def sequence_f_tilde(
    f: AtomSum,
    beta: int,
    l: int,
    params: Params,
    table: StirlingTable,
    method: str = "stirling",
) -> AtomSum:
    """The sequence f~_{beta,l}, built by one of three constructions.

    ``stirling``
        (-1)^l sum_j sum_m s(l,j) C(j,m) beta^(j-m) f_m.
    ``recursion``
        f~_0 = f, f~_l = ((beta - l) I + H) f~_{l-1}.
    ``falling_factorial``
        (-1)^l (-beta I - H)_l f with (lambda)_l the falling factorial.

    The three constructions coincide only at l = 0; see ``f_tilde_agreement``.
    """
    if not 0 <= l <= beta:
        raise DomainError(f"need 0 <= l <= beta, got l={l}, beta={beta}")
    _check_n(f, params)
    if method == "stirling":
        _check_table(table, l)
        fm = [sequence_f_m(f, m, params, table) for m in range(l + 1)]
        out = AtomSum.zero(f.n)
        for j in range(l + 1):
            s = table.s(l, j)
            if not s:
                continue
            for m in range(j + 1):
                out = out + fm[m].scale(s * comb(j, m) * beta ** (j - m))
        return out.scale((-1) ** l)
    if method == "recursion":
        g = f
        for i in range(1, l + 1):
            g = g.scale(beta - i) + apply_H(g, params)
        return g
    if method == "falling_factorial":
        # (-beta - H)_l = prod_{i<l} (-beta - i - H)
        g = f
        for i in range(l):
            g = g.scale(-beta - i) - apply_H(g, params)
        return g.scale((-1) ** l)
    raise DomainError(f"unknown method {method!r}; choose from {F_TILDE_METHODS}")


def sequence_g_m(f: AtomSum, m: int, params: Params) -> AtomSum:
    """g_m = sum_l C(m,l) (2k+2/n)^(m-l) (x d/dx)^l f."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    _check_n(f, params)
    lam = params.lp_shift
    out = AtomSum.zero(f.n)
    g = f
    for l in range(m + 1):
        out = out + g.scale(comb(m, l) * lam ** (m - l))
        g = apply_euler(g)
    return out


def sequence_h(f: AtomSum, alpha: int, beta: int, params: Params) -> AtomSum:
    """h_{alpha,beta} = (n|x|^(2-2/n) Delta_k)^alpha (n|x|^(2/n))^beta f."""
    if alpha < 0 or beta < 0:
        raise DomainError("alpha and beta must be nonnegative")
    _check_n(f, params)
    g = f
    for _ in range(beta):
        g = apply_E_plus(g, params)
    for _ in range(alpha):
        g = apply_E_minus(g, params)
    return g


def atom_suite(n: int) -> dict[str, AtomSum]:
    """Named even and odd test atoms, all smooth in the deformed variable."""
    q = Fraction(2, n)
    return {
        "gauss_s0.5": gaussian(n, 0.5),
        "gauss_s1": gaussian(n, 1.0),
        "odd_s0.5": gaussian(n, 0.5, parity=1),
        "even_pow_s0.5": gaussian(n, 0.5, exponent=q),
        "odd_pow_s1": gaussian(n, 1.0, parity=1, exponent=q),
        "mixed": gaussian(n, 0.5) + gaussian(n, 1.0, coeff=-0.5, parity=1),
    }


# ---- identity residuals ------------------------------------------------


def commutator_residuals(f: AtomSum, params: Params) -> dict[str, float]:
    """Coefficient residuals of [E-,E+] = 4H, [H,E+] = 2E+ and [H,E-] = -2E-."""
    Ep = lambda g: apply_E_plus(g, params)
    Em = lambda g: apply_E_minus(g, params)
    H = lambda g: apply_H(g, params)
    return {
        "[E-,E+]=4H": max_coeff_diff(Em(Ep(f)) - Ep(Em(f)), H(f).scale(4)),
        "[H,E+]=2E+": max_coeff_diff(H(Ep(f)) - Ep(H(f)), Ep(f).scale(2)),
        "[H,E-]=-2E-": max_coeff_diff(H(Em(f)) - Em(H(f)), Em(f).scale(-2)),
    }


def ladder_recursion_residual(f: AtomSum, beta: int, params: Params) -> float:
    """E-(E+)^beta f against (E+)^beta E- f + 4 beta (E+)^(beta-1) ((beta-1) f + H f)."""
    if beta < 1:
        raise DomainError("beta must be >= 1")
    up = f
    for _ in range(beta - 1):
        up = apply_E_plus(up, params)
    lhs = apply_E_minus(apply_E_plus(up, params), params)
    rhs_a = apply_E_minus(f, params)
    for _ in range(beta):
        rhs_a = apply_E_plus(rhs_a, params)
    inner = f.scale(beta - 1) + apply_H(f, params)
    for _ in range(beta - 1):
        inner = apply_E_plus(inner, params)
    return max_coeff_diff(lhs, rhs_a + inner.scale(4 * beta))


def f_tilde_agreement(f: AtomSum, beta: int, params: Params, table: StirlingTable) -> float:
    """Largest pairwise coefficient gap between the three f~_{beta,l} constructions, l <= beta."""
    worst = 0.0
    for l in range(beta + 1):
        built = [sequence_f_tilde(f, beta, l, params, table, m) for m in F_TILDE_METHODS]
        for i in range(3):
            for j in range(i + 1, 3):
                worst = max(worst, max_coeff_diff(built[i], built[j]))
    return worst
