"""Generalized translation, convolution and the approximate-identity machinery.

Translation and convolution act on the Fourier side,

    F(tau_x f)(y) = B((-1)^n x, y) F f(y),    F(f * g) = F f . F g,

so both reduce to a forward transform, a pointwise product and an inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate as sint
from scipy import special as sp

from .atoms import AtomSum, sequence_g_m
from .errors import DomainError
from .kernel import kernel
from .measure import GridFunction, QuadratureGrid, integrate, interpolate, lp_norm
from .params import Params
from .transform import TransformPlan, forward, inverse

__all__ = [
    "ApproxIdentity",
    "bump_profile",
    "bump_identity",
    "gaussian_identity",
    "translate",
    "convolve",
    "convolve_direct",
    "young_check",
    "translation_norm_ratios",
    "dilate",
    "approx_identity_convergence",
    "support_radius",
    "mass_outside",
    "t_operator",
    "gm_inequality",
    "T_NODES",
]

T_NODES = 64
SUPPORT_FLOOR = 1e-10


# ---- translation and convolution ----------------------------------------


def translate(plan: TransformPlan, f: GridFunction, x0: float) -> GridFunction:
    """tau_{x0} f, computed as inverse(B((-1)^n x0, .) forward(f))."""
    if x0 == 0:
        return inverse(plan, forward(plan, f))
    mult = kernel(plan.params, plan.params.parity_sign * x0, plan.target.x_nodes)
    F = forward(plan, f)
    return inverse(plan, GridFunction(plan.target, mult * F.values))


def convolve(plan: TransformPlan, f: GridFunction, g: GridFunction) -> GridFunction:
    Ff, Fg = forward(plan, f), forward(plan, g)
    return inverse(plan, GridFunction(plan.target, Ff.values * Fg.values))


def convolve_direct(plan: TransformPlan, f: GridFunction, g: GridFunction, xs) -> np.ndarray:
    """Slow oracle: (f * g)(x) = integral of f(y) (tau_x g)((-1)^n y) d mu(y).

    One translate per sample point, then one quadrature; reflection is an
    index reversal on the symmetric grid.
    """
    out = []
    for x in np.atleast_1d(xs):
        tg = translate(plan, g, float(x))
        if plan.params.parity_sign < 0:
            tg = tg.reflect()
        out.append(integrate(f * tg))
    return np.array(out)


def young_check(plan: TransformPlan, f: GridFunction, g: GridFunction, p: float, r: float, q: float) -> float:
    """||f * g||_q / (||f||_p ||g||_r) with 1/p + 1/r = 1/q + 1."""
    inv = lambda t: 0.0 if t == math.inf else 1.0 / t
    if abs(inv(p) + inv(r) - inv(q) - 1) > 1e-12:
        raise DomainError(f"exponents violate 1/p + 1/r = 1/q + 1 (p={p}, r={r}, q={q})")
    denom = lp_norm(f, p) * lp_norm(g, r)
    if denom == 0:
        raise DomainError("ratio undefined for a zero input")
    return lp_norm(convolve(plan, f, g), q) / denom


def translation_norm_ratios(plan: TransformPlan, f: GridFunction, xs, p: float) -> list[float]:
    """||tau_x f||_p / ||f||_p for each sampled x."""
    base = lp_norm(f, p)
    if base == 0:
        raise DomainError("ratio undefined for a zero input")
    return [lp_norm(translate(plan, f, float(x)), p) / base for x in xs]


# ---- support diagnostics ---------------------------------------------------


def support_radius(f: GridFunction, floor: float = SUPPORT_FLOOR) -> float:
    """Smallest R (among node radii) with |f| < floor at every node beyond R."""
    big = np.abs(f.values) >= floor
    if not big.any():
        return 0.0
    return float(np.abs(f.x[big]).max())


def mass_outside(f: GridFunction, radius: float) -> float:
    """Share of the L^1(d mu) mass of f carried by |x| > radius."""
    total = lp_norm(f, 1)
    if total == 0:
        return 0.0
    outside = GridFunction(f.grid, np.where(np.abs(f.x) > radius, f.values, 0))
    return lp_norm(outside, 1) / total


# ---- approximate identities ------------------------------------------------


def bump_profile(u0: float) -> Callable[[np.ndarray], np.ndarray]:
    """u -> exp(-1 / (1 - (u/u0)^2)) on |u| < u0, zero elsewhere."""

    def prof(u):
        t = np.asarray(u, dtype=float) / u0
        out = np.zeros_like(t)
        inside = np.abs(t) < 1
        out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
        return out

    return prof


@dataclass(frozen=True)
class ApproxIdentity:
    """A nonnegative unit-mass profile phi(x) and the schedule of dilations.

    ``profile`` is vectorized in x; ``dilate`` turns it into phi_r on a grid.
    """

    profile: Callable[[np.ndarray], np.ndarray]
    params: Params
    r_schedule: tuple = (1.0, 0.5, 0.25, 0.125)
    label: str = ""

    def __call__(self, x):
        return self.profile(np.asarray(x, dtype=float))


@lru_cache(maxsize=64)
def _bump_mass(params: Params, u0: float) -> float:
    expo = 2 * params.nu + 1
    prof = bump_profile(u0)
    val, _ = sint.quad(lambda u: prof(np.array([u]))[0] * u ** expo, 0, u0, epsabs=0, epsrel=1e-13, limit=200)
    return 2 * params.measure_const * params.n * val


def bump_identity(params: Params, u0: float = 1.0, r_schedule=(1.0, 0.5, 0.25, 0.125)) -> ApproxIdentity:
    """The bump c exp(-1/(1 - (u/u0)^2)) in the deformed variable, unit d mu mass."""
    if not u0 > 0:
        raise DomainError("u0 must be positive")
    c = 1.0 / _bump_mass(params, float(u0))
    prof = bump_profile(u0)
    n = params.n

    def phi(x):
        return c * prof(np.sign(x) * np.abs(x) ** (1.0 / n))

    return ApproxIdentity(phi, params, tuple(r_schedule), label=f"bump(u0={u0:g})")


def gaussian_identity(params: Params, r_schedule=(1.0, 0.5, 0.25, 0.125)) -> ApproxIdentity:
    """exp(-n |x|^(2/n) / 2), which already has unit mass for every (k, n)."""
    n = params.n
    return ApproxIdentity(
        lambda x: np.exp(-n * np.abs(x) ** (2.0 / n) / 2), params, tuple(r_schedule), label="gaussian"
    )


def dilate(phi: ApproxIdentity, r: float, params: Params, grid: QuadratureGrid) -> GridFunction:
    """phi_r(x) = r^-(2k+2/n-1) phi(x/r) sampled on ``grid``."""
    if not r > 0:
        raise DomainError(f"dilation r must be positive, got {r!r}")
    x = grid.x_nodes
    return GridFunction(grid, r ** (-params.homogeneity) * phi(x / r))


def approx_identity_convergence(plan: TransformPlan, f: GridFunction, phi: ApproxIdentity, p: float, r_schedule=None) -> list[float]:
    """||f * phi_r - f||_p over the schedule."""
    if not 1 <= p < math.inf:
        raise DomainError("p must satisfy 1 <= p < inf")
    sched = phi.r_schedule if r_schedule is None else tuple(r_schedule)
    errs = []
    for r in sched:
        phir = dilate(phi, r, plan.params, plan.source)
        errs.append(lp_norm(convolve(plan, f, phir) - f, p))
    return errs


# ---- the T operator and the g_m inequality -----------------------------


@lru_cache(maxsize=32)
def _t_rule(params: Params, nodes: int):
    # t = tau^n turns t^(2k+2/n-1) dt into n tau^(2kn+1) d tau and makes
    # f(t x) smooth in tau for every atom
    b = 2 * params.k * params.n + 1
    tj, wj = sp.roots_jacobi(nodes, 0.0, b)
    tau = (1 + tj) / 2
    w = params.n * wj / 2 ** (b + 1)
    return tau ** params.n, w


def t_operator(f, params: Params, nodes: int = T_NODES):
    """T f(x) = integral over [0, 1] of f(t x) t^(2k+2/n-1) dt.

    An AtomSum (or any vectorized callable) gives back a vectorized callable;
    a GridFunction gives a GridFunction on the same grid, with off-node values
    of f taken by panel interpolation.
    """
    t, w = _t_rule(params, nodes)
    if isinstance(f, GridFunction):
        x = f.x
        vals = interpolate(f, np.outer(x, t).ravel()).reshape(x.size, t.size)
        return GridFunction(f.grid, vals @ w)

    def Tf(x):
        x = np.asarray(x, dtype=float)
        samples = np.asarray(f(np.multiply.outer(x, t)), dtype=complex)
        return samples @ w

    return Tf


def gm_inequality(f: AtomSum, m: int, p: float, params: Params, grid: QuadratureGrid) -> tuple[float, float]:
    """(||f||_p, ||g_m||_p) with g_m = (x d/dx + 2k + 2/n)^m f."""
    if m < 0:
        raise DomainError("m must be nonnegative")
    if not 1 <= p < math.inf:
        raise DomainError("p must satisfy 1 <= p < inf")
    gm = sequence_g_m(f, m, params)
    return (
        lp_norm(GridFunction.from_callable(grid, f), p),
        lp_norm(GridFunction.from_callable(grid, gm), p),
    )
