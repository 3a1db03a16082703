"""The kernel B_{k,n}(x, y) and its iterated-operator expansions.

With ``z = n |xy|^(1/n)`` and ``nu = kn - n/2``,

    B(x, y) = j_nu(z) + (-i)^n (n/2)^n Gamma(nu+1)/Gamma(nu+n+1) * xy * j_{nu+n}(z).

Applying ``x d/dx`` or ``n |x|^(2-2/n) Delta_k`` to B in the x variable keeps
it inside the span of terms ``(xy)^p |x|^(r/n) |y|^(q/n) j_{nu+s}(z)``; the
functions here manipulate that span symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isfinite

import numpy as np

from . import _fd
from ._parallel import fill_rows
from .errors import CapacityError, ConvergenceError, DomainError
from .params import Params
from .special_fn import Z_MAX, normalized_bessel

__all__ = [
    "KernelTerm",
    "KernelBoundReport",
    "DerivativeCoeffs",
    "kernel_even",
    "kernel_odd",
    "kernel",
    "kernel_matrix",
    "kernel_terms",
    "apply_theta_terms",
    "apply_lowering_terms",
    "iterated_kernel_terms",
    "evaluate_terms",
    "iterated_kernel_expansion",
    "derivative_coeffs",
    "expansion_from_coeffs",
    "kernel_bound_scan",
    "fd_iterated",
    "eigen_residual",
]

MAX_DERIVATIVE_ORDER = 12


def _z(params: Params, x, y):
    return params.n * np.abs(np.asarray(x, dtype=float) * np.asarray(y, dtype=float)) ** (1.0 / params.n)


def _check_domain(z):
    zmax = float(np.max(z)) if np.size(z) else 0.0
    if zmax > Z_MAX:
        raise ConvergenceError(f"kernel argument {zmax:g} outside validated domain", z=zmax)


def kernel_even(params: Params, x, y):
    """j_{kn-n/2}(n |xy|^(1/n))."""
    return normalized_bessel(params.nu, _z(params, x, y))


def kernel_odd(params: Params, x, y):
    """(-i)^n (n/2)^n Gamma(nu+1)/Gamma(nu+n+1) xy j_{kn+n/2}(n |xy|^(1/n))."""
    xy = np.asarray(x, dtype=float) * np.asarray(y, dtype=float)
    val = params.odd_const * xy * normalized_bessel(params.nu + params.n, _z(params, x, y))
    return complex(val) if np.ndim(val) == 0 else val


def kernel(params: Params, x, y):
    """B_{k,n}(x, y); exactly 1 whenever x = 0 or y = 0."""
    val = kernel_even(params, x, y) + kernel_odd(params, x, y)
    return complex(val) if np.ndim(val) == 0 else val


def kernel_matrix(params: Params, x, y) -> np.ndarray:
    """Matrix ``B(x_i, y_j)`` for 1-D node arrays, filled in row blocks."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ux = np.abs(x) ** (1.0 / params.n)
    uy = np.abs(y) ** (1.0 / params.n)
    if x.size and y.size:
        _check_domain(params.n * ux.max() * uy.max())
    nu, n, c_odd = params.nu, params.n, params.odd_const

    def block(a, b):
        z = n * np.outer(ux[a:b], uy)
        even = normalized_bessel(nu, z.ravel()).reshape(z.shape)
        odd = normalized_bessel(nu + n, z.ravel()).reshape(z.shape)
        return even + c_odd * np.outer(x[a:b], y) * odd

    return fill_rows(block, x.size)


# ---- symbolic expansions ------------------------------------------------


@dataclass(frozen=True)
class KernelTerm:
    """coeff * (xy)^odd_flag * |x|^(r/n) * |y|^(q/n) * j_{nu + s_shift}(n|xy|^(1/n))."""

    r: int
    q: int
    s_shift: int
    coeff: complex
    odd_flag: int

    @property
    def key(self):
        return (self.odd_flag, self.r, self.q, self.s_shift)


def _collect(pairs, chop=0.0):
    acc: dict = {}
    for key, c in pairs:
        acc[key] = acc.get(key, 0j) + c
    return [
        KernelTerm(r=key[1], q=key[2], s_shift=key[3], coeff=c, odd_flag=key[0])
        for key, c in sorted(acc.items())
        if c != 0
    ]


def kernel_terms(params: Params) -> list[KernelTerm]:
    """B itself: the even term and the odd term."""
    return [
        KernelTerm(0, 0, 0, 1.0 + 0j, 0),
        KernelTerm(0, 0, params.n, params.odd_const, 1),
    ]


def apply_theta_terms(params: Params, terms) -> list[KernelTerm]:
    """x d/dx in the x variable."""
    n, nu = params.n, params.nu
    out = []
    for t in terms:
        out.append((t.key, t.coeff * (t.odd_flag + t.r / n)))
        step = -n / (2 * (nu + t.s_shift + 1))
        out.append(((t.odd_flag, t.r + 2, t.q + 2, t.s_shift + 1), t.coeff * step))
    return _collect(out)


def apply_lowering_terms(params: Params, terms) -> list[KernelTerm]:
    """n |x|^(2-2/n) Delta_k in the x variable."""
    k = params.k
    th = apply_theta_terms(params, terms)
    th2 = apply_theta_terms(params, th)
    pairs = [(t.key, t.coeff) for t in th2]
    pairs += [(t.key, (2 * k - 1) * t.coeff) for t in th]
    pairs += [(t.key, -2 * k * t.odd_flag * t.coeff) for t in terms]
    return [
        KernelTerm(t.r - 2, t.q, t.s_shift, params.n * t.coeff, t.odd_flag)
        for t in _collect(pairs)
    ]


def iterated_kernel_terms(params: Params, alpha: int, l: int) -> list[KernelTerm]:
    """Terms of (n |x|^(2-2/n) Delta_k)^alpha (x d/dx)^l B(x, y)."""
    if alpha < 0 or l < 0:
        raise DomainError("alpha and l must be nonnegative")
    if alpha + l > MAX_DERIVATIVE_ORDER:
        raise CapacityError(f"alpha + l = {alpha + l} exceeds {MAX_DERIVATIVE_ORDER}")
    terms = kernel_terms(params)
    for _ in range(l):
        terms = apply_theta_terms(params, terms)
    for _ in range(alpha):
        terms = apply_lowering_terms(params, terms)
    return terms


def evaluate_terms(params: Params, terms, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = params.n
    ax, ay = np.abs(x), np.abs(y)
    z = n * (ax * ay) ** (1.0 / n)
    _check_domain(z)
    out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for t in terms:
            val = t.coeff * ax ** (t.r / n) * ay ** (t.q / n) * normalized_bessel(params.nu + t.s_shift, z)
            if t.odd_flag:
                val = val * x * y
            out = out + val
    return complex(out) if out.ndim == 0 else out


def iterated_kernel_expansion(params: Params, alpha: int, l: int, x, y):
    """(n |x|^(2-2/n) Delta_k)^alpha (x d/dx)^l B(x, y), evaluated pointwise."""
    return evaluate_terms(params, iterated_kernel_terms(params, alpha, l), x, y)


# ---- Bessel derivative coefficient tables -------------------------------


@dataclass(frozen=True)
class DerivativeCoeffs:
    """Tables c[j][l] (even part) and d[j][l] (odd part) for l <= l_max.

    ``base_case`` records the finite-difference decision for c_{1,1}.
    """

    params: Params
    l_max: int
    c: tuple
    d: tuple
    base_case: dict = field(compare=False)


def _fd_theta_even(params: Params, x: float, y: float, h: float = 1e-3) -> float:
    # 5-point central derivative in log x: theta f = d f(e^t)/dt
    t0 = np.log(abs(x))
    sgn = np.sign(x)
    f = lambda t: kernel_even(params, sgn * np.exp(t), y)
    return (f(t0 - 2 * h) - 8 * f(t0 - h) + 8 * f(t0 + h) - f(t0 + 2 * h)) / (12 * h)


def resolve_c11(params: Params, samples=((0.7, 1.3), (1.4, -0.9), (-2.1, 0.6), (0.45, 2.2))) -> dict:
    """Decide the base coefficient c_{1,1} between the two published candidates.

    Candidate ``nu+1`` is -n/(2(nu+1)); candidate ``nu`` is -n/(2 nu).  Each is
    compared pointwise against a finite difference of x d/dx j_nu(n|xy|^(1/n)).
    """
    n, nu = params.n, params.nu
    candidates = {"nu+1": -n / (2 * (nu + 1))}
    if nu != 0:
        candidates["nu"] = -n / (2 * nu)
    residuals = {}
    for name, c11 in candidates.items():
        worst = 0.0
        for x, y in samples:
            z = n * abs(x * y) ** (1 / n)
            pred = c11 * abs(x * y) ** (2 / n) * normalized_bessel(nu + 1, z)
            fd = _fd_theta_even(params, x, y)
            worst = max(worst, abs(pred - fd) / max(abs(fd), 1e-12))
        residuals[name] = worst
    if "nu" not in candidates:
        residuals["nu"] = float("inf")
    chosen = min(residuals, key=residuals.get)
    return {
        "chosen": chosen,
        "value": candidates[chosen],
        "residuals": residuals,
    }


def derivative_coeffs(params: Params, l_max: int, literal: bool = False) -> DerivativeCoeffs:
    """Coefficient tables of

        (x d/dx)^l j_nu(z)         = sum_{j=1}^{l} c[j][l] |xy|^(2j/n) j_{nu+j}(z)
        (x d/dx)^l (xy j_{nu+n}(z)) = sum_{j=0}^{l} d[j][l] |xy|^(2j/n) xy j_{nu+n+j}(z)

    The default recursions carry the factor ``2j/n`` from differentiating
    ``|xy|^(2j/n)`` and start from the finite-difference choice of c_{1,1}.
    ``literal=True`` instead uses ``2k/n`` for 2 <= j, ``2k/n + 1`` in the odd
    table and c_{1,1} = -n/(2 nu), kept only for comparison against the oracle.
    """
    if l_max < 1:
        raise DomainError("l_max must be at least 1")
    if l_max > MAX_DERIVATIVE_ORDER:
        raise CapacityError(f"l_max={l_max} exceeds {MAX_DERIVATIVE_ORDER}")
    n, nu, k = params.n, params.nu, params.k
    base = resolve_c11(params)
    c = [[0.0] * (l_max + 1) for _ in range(l_max + 1)]
    d = [[0.0] * (l_max + 1) for _ in range(l_max + 1)]
    c[1][1] = -n / (2 * nu) if literal and nu != 0 else base["value"]
    d[0][0] = 1.0
    for l in range(1, l_max + 1):
        for j in range(0, l + 1):
            grow_c = 2 * k / n if literal and j >= 2 else 2 * j / n
            grow_d = 2 * k / n + 1 if literal else 2 * j / n + 1
            if j >= 1 and not (j == 1 and l == 1):
                prev = c[j][l - 1] if j <= l - 1 else 0.0
                lower = c[j - 1][l - 1] if j >= 2 else 0.0
                c[j][l] = grow_c * prev - n / (2 * (nu + j)) * lower
            if j == 0:
                d[0][l] = 1.0
            else:
                prev = d[j][l - 1] if j <= l - 1 else 0.0
                d[j][l] = grow_d * prev - n / (2 * (nu + n + j)) * d[j - 1][l - 1]
    return DerivativeCoeffs(
        params=params,
        l_max=l_max,
        c=tuple(tuple(row) for row in c),
        d=tuple(tuple(row) for row in d),
        base_case=base,
    )


def expansion_from_coeffs(coeffs: DerivativeCoeffs, l: int, x, y):
    """(x d/dx)^l B(x, y) assembled from the c and d tables."""
    params = coeffs.params
    if not 0 <= l <= coeffs.l_max:
        raise CapacityError(f"order {l} outside table of order {coeffs.l_max}")
    n, nu = params.n, params.nu
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    axy = np.abs(x * y)
    z = n * axy ** (1 / n)
    if l == 0:
        even = normalized_bessel(nu, z)
    else:
        even = sum(coeffs.c[j][l] * axy ** (2 * j / n) * normalized_bessel(nu + j, z) for j in range(1, l + 1))
    odd = sum(coeffs.d[j][l] * axy ** (2 * j / n) * normalized_bessel(nu + n + j, z) for j in range(0, l + 1))
    val = even + params.odd_const * x * y * odd
    return complex(val) if np.ndim(val) == 0 else val


# ---- uniform bound -------------------------------------------------------


@dataclass(frozen=True)
class KernelBoundReport:
    m_estimate: float
    grid_spec: str
    refinements: tuple = ()

    @property
    def stable(self) -> bool:
        r = self.refinements
        return len(r) >= 3 and abs(r[-1] - r[-2]) < 1e-3 and abs(r[-2] - r[-3]) < 1e-3


def kernel_bound_scan(params: Params, u_max: float = 6.0, points: int = 121, levels: int = 3) -> KernelBoundReport:
    """Empirical sup |B(x, y)| over a square grid in the deformed variables.

    The grid is refined ``levels - 1`` times (points roughly doubled each time);
    the reported estimate is the finest one.  No particular bound is asserted.
    """
    if not (u_max > 0 and isfinite(u_max)):
        raise DomainError("u_max must be positive")
    if params.n * u_max * u_max > Z_MAX:
        raise DomainError("scan square leaves the validated kernel domain")
    estimates = []
    pts = points
    for _ in range(levels):
        u = np.linspace(-u_max, u_max, pts)
        x = np.sign(u) * np.abs(u) ** params.n
        estimates.append(float(np.abs(kernel_matrix(params, x, x)).max()))
        pts = 2 * pts - 1
    return KernelBoundReport(
        m_estimate=estimates[-1],
        grid_spec=f"u in [-{u_max:g}, {u_max:g}]^2, {points} points refined x{levels}",
        refinements=tuple(estimates),
    )


# ---- finite-difference oracles --------------------------------------------


def fd_iterated(params: Params, alpha: int, l: int, y: float, h: float = 0.02, x_max: float = 2.5):
    """(n |x|^(2-2/n) Delta_k)^alpha (x d/dx)^l B(., y) by nested 5-point differences.

    Returns the uniform symmetric x grid and the values (NaN near its ends).
    """
    x = _fd.symmetric_grid(x_max + 4 * (alpha + l + 1) * h, h)
    g = kernel(params, x, y)
    for _ in range(l):
        g = _fd.theta(x, g, h)
    for _ in range(alpha):
        g = _fd.lowering(params, x, g, h)
    return x, g


def eigen_residual(params: Params, y: float, h: float = 0.01, window=(0.5, 2.5)) -> float:
    """Relative residual of |x|^(2-2/n) Delta_k B(., y) = -|y|^(2/n) B(., y) on ``window``."""
    x, lhs = fd_iterated(params, 1, 0, y, h, window[1])
    rhs = -params.n * np.abs(y) ** (2 / params.n) * kernel(params, x, y)
    mask = (np.abs(x) >= window[0]) & (np.abs(x) <= window[1])
    return float(np.max(np.abs(lhs[mask] - rhs[mask])) / max(np.max(np.abs(rhs[mask])), 1e-300))
