"""Scalar special functions and the combinatorial numbers used throughout.

The normalized Bessel function

    j_nu(z) = Gamma(nu + 1) * sum_m (-1)^m / (m! Gamma(nu + m + 1)) * (z / 2)^(2m)

is summed directly from its power series for moderate arguments.  Beyond
``SERIES_RADIUS`` the alternating series loses digits to cancellation, so
the value is taken from ``J_nu`` instead via ``j_nu(z) = Gamma(nu+1) (2/z)^nu J_nu(z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import CapacityError, ConvergenceError, DomainError

__all__ = [
    "BesselOrder",
    "StirlingTable",
    "SERIES_RADIUS",
    "Z_MAX",
    "MAX_STIRLING_ORDER",
    "gamma",
    "normalized_bessel",
    "normalized_bessel_derivative",
    "stirling_table",
    "falling_factorial_coeffs",
]

#: Largest |z| summed by the power series; the largest term there is ~10,
#: which keeps the absolute error near 1e-14.
SERIES_RADIUS = 6.0
#: Validated argument range for normalized_bessel.
Z_MAX = 600.0
#: Stirling numbers up to this order fit comfortably in signed 64 bits.
MAX_STIRLING_ORDER = 20

_TERM_BUDGET = 200
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class BesselOrder:
    """Real Bessel order restricted to nu > -1/2."""

    nu: float

    def __post_init__(self):
        if not math.isfinite(self.nu) or self.nu <= -0.5:
            raise DomainError(f"Bessel order must satisfy nu > -1/2, got {self.nu!r}")

    def shifted(self, s: int) -> "BesselOrder":
        return BesselOrder(self.nu + s)


def _order_value(order) -> float:
    if isinstance(order, BesselOrder):
        return order.nu
    return BesselOrder(float(order)).nu


def gamma(x: float) -> float:
    """Gamma function on the positive reals."""
    if not isinstance(x, (int, float, np.floating, np.integer)) or not math.isfinite(x) or x <= 0:
        raise DomainError(f"gamma is defined here only for finite x > 0, got {x!r}")
    return math.gamma(float(x))


def _series(nu: float, z: np.ndarray) -> np.ndarray:
    """Kahan-compensated power series; all entries satisfy |z| <= SERIES_RADIUS."""
    q = -(z * z) / 4.0
    term = np.ones_like(z)
    total = np.ones_like(z)
    comp = np.zeros_like(z)
    below = np.zeros(z.shape, dtype=int)
    for m in range(1, _TERM_BUDGET + 1):
        term = term * q / (m * (nu + m))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        small = np.abs(term) <= _EPS * np.abs(total)
        below = np.where(small, below + 1, 0)
        # two consecutive negligible terms: the tail is dominated by them
        if np.all(below >= 2):
            return total
    bad = np.argmax(below < 2)
    raise ConvergenceError(
        "normalized Bessel series did not converge within the term budget",
        z=float(z.flat[bad]), nu=nu,
    )


def normalized_bessel(order, z):
    """Normalized Bessel function ``j_nu(z)`` with ``j_nu(0) = 1``.

    Accepts a scalar or an array for ``z``; returns the same shape.
    Raises ConvergenceError outside the validated domain ``|z| <= Z_MAX``.
    """
    nu = _order_value(order)
    za = np.abs(np.asarray(z, dtype=float))
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    if not np.all(np.isfinite(za)):
        raise DomainError("normalized_bessel needs finite arguments")
    if za.size and za.max() > Z_MAX:
        raise ConvergenceError(
            f"|z| = {za.max():g} exceeds the validated domain |z| <= {Z_MAX:g}",
            z=float(za.max()), nu=nu,
        )
    out = np.empty_like(za)
    near = za <= SERIES_RADIUS
    if near.any():
        out[near] = _series(nu, za[near])
    far = ~near
    if far.any():
        zf = za[far]
        scale = np.exp(sp.gammaln(nu + 1.0) + nu * np.log(2.0 / zf))
        out[far] = scale * sp.jv(nu, zf)
    return float(out[0]) if scalar else out


def normalized_bessel_derivative(order, z):
    """d/dz j_nu(z) = -z / (2 (nu + 1)) * j_{nu+1}(z)."""
    nu = _order_value(order)
    z = np.asarray(z, dtype=float)
    val = -z / (2.0 * (nu + 1.0)) * normalized_bessel(nu + 1.0, z)
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class StirlingTable:
    """Exact Stirling numbers S(l, j) (second kind) and s(l, j) (signed first kind)."""

    max_order: int
    second_kind: tuple
    first_kind_signed: tuple

    def S(self, l: int, j: int) -> int:
        self._check(l)
        return self.second_kind[l][j] if 0 <= j <= l else 0

    def s(self, l: int, j: int) -> int:
        self._check(l)
        return self.first_kind_signed[l][j] if 0 <= j <= l else 0

    def _check(self, l):
        if not 0 <= l <= self.max_order:
            raise CapacityError(f"order {l} outside table of order {self.max_order}")


def stirling_table(l_max: int) -> StirlingTable:
    if l_max < 0:
        raise DomainError("l_max must be nonnegative")
    if l_max > MAX_STIRLING_ORDER:
        raise CapacityError(f"l_max={l_max} exceeds the guarded maximum {MAX_STIRLING_ORDER}")
    S = [[0] * (l + 1) for l in range(l_max + 1)]
    s = [[0] * (l + 1) for l in range(l_max + 1)]
    S[0][0] = s[0][0] = 1
    for l in range(1, l_max + 1):
        for j in range(1, l + 1):
            prev_S = S[l - 1][j] if j <= l - 1 else 0
            prev_s = s[l - 1][j] if j <= l - 1 else 0
            S[l][j] = j * prev_S + S[l - 1][j - 1]
            s[l][j] = s[l - 1][j - 1] - (l - 1) * prev_s
    return StirlingTable(
        max_order=l_max,
        second_kind=tuple(tuple(r) for r in S),
        first_kind_signed=tuple(tuple(r) for r in s),
    )


def falling_factorial_coeffs(l: int) -> list[int]:
    """Monomial coefficients of lambda (lambda-1) ... (lambda-l+1), lowest degree first."""
    if l < 0:
        raise DomainError("l must be nonnegative")
    return list(stirling_table(l).first_kind_signed[l])
