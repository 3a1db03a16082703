"""The (k, n) parameter pair and its derived constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError

__all__ = ["Params", "minus_i_power"]

# (-i)^m for m mod 4, exact
_MINUS_I_POWERS = (1 + 0j, -1j, -1 + 0j, 1j)


def minus_i_power(m: int) -> complex:
    return _MINUS_I_POWERS[m % 4]


@dataclass(frozen=True)
class Params:
    """Multiplicity ``k`` and deformation denominator ``n`` (so that a = 2/n).

    Construction enforces ``n >= 1`` and the standing assumption
    ``nu = k n - n/2 > -1/2`` under which the kernel is uniformly bounded.
    """

    k: float
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not math.isfinite(self.k):
            raise DomainError("k must be finite")
        object.__setattr__(self, "k", float(self.k))
        if not self.nu > -0.5:
            raise DomainError(
                f"kn - n/2 = {self.nu:g} violates kn - n/2 > -1/2 (k={self.k:g}, n={self.n})"
            )

    @property
    def nu(self) -> float:
        return self.k * self.n - self.n / 2

    @property
    def two_over_n(self) -> Fraction:
        return Fraction(2, self.n)

    @property
    def measure_const(self) -> float:
        """c_{k,n} = (n/2)^nu / (2 Gamma(nu + 1))."""
        nu = self.nu
        return (self.n / 2) ** nu / (2 * math.gamma(nu + 1))

    @property
    def euler_shift(self) -> float:
        """kn + 1 - n/2, the constant part of H."""
        return self.nu + 1

    @property
    def lp_shift(self) -> float:
        """2k + 2/n, the constant inverted by the T operator."""
        return 2 * self.k + 2 / self.n

    @property
    def homogeneity(self) -> float:
        """2k + 2/n - 1: d mu(t x) = t^homogeneity d mu(x)."""
        return self.lp_shift - 1

    @property
    def parity_sign(self) -> int:
        """(-1)^n, the reflection used by the inversion formula."""
        return -1 if self.n % 2 else 1

    @property
    def odd_phase(self) -> complex:
        return minus_i_power(self.n)

    @property
    def odd_const(self) -> complex:
        """(-i)^n (n/2)^n Gamma(nu+1) / Gamma(nu+n+1), the odd-kernel prefactor."""
        nu, n = self.nu, self.n
        mag = math.exp(n * math.log(n / 2) + math.lgamma(nu + 1) - math.lgamma(nu + n + 1))
        return self.odd_phase * mag
