"""Seminorms of the adapted Schwartz space and membership diagnostics.

All seminorms use the ladder scaling

    P_{alpha,beta}(f) = sup |(n |x|^(2/n))^alpha (n |x|^(2-2/n) Delta_k)^beta f|,

which differs from the unscaled form (|x|^(2/n))^alpha (|x|^(2-2/n) Delta_k)^beta
by the constant n^(alpha+beta) and so defines the same finiteness class.

On atoms the operators are exact and the supremum is certified: beyond the
last turning point every term is monotone, so sampling plus a bounded
refinement up to a radius where the tail bound is negligible gives the true
sup.  Grid functions only get a "finite on grid" estimate.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np
from scipy.optimize import minimize_scalar

from .atoms import AtomSum, apply_E_minus, apply_E_plus, euler_power, sequence_f_m, sequence_f_tilde, sequence_g_m
from .errors import CapacityError, DomainError
from .measure import GridFunction, QuadratureGrid, lp_norm, weight_norm, x_from_u
from .params import Params
from .special_fn import falling_factorial_coeffs, stirling_table

__all__ = [
    "SupResult",
    "SeminormEntry",
    "SeminormReport",
    "EmbeddingChain",
    "atom_sup",
    "seminorm_P",
    "seminorm_Q",
    "x_power_derivative_stirling",
    "membership_report",
    "membership_equivalence",
    "sandwich_check",
    "embedding_constants",
    "beta_threshold",
    "MAX_ATOM_RANGE",
    "MAX_GRID_RANGE",
]

MAX_ATOM_RANGE = 5
MAX_GRID_RANGE = 3
_SAMPLES = 4001


@dataclass(frozen=True)
class SupResult:
    value: float
    u_at: float
    tail_radius: float
    tail_bound: float


def _tail_data(h: AtomSum):
    # per-term |c| |u|^e exp(-s n u^2), with e the total power of |u|
    n = h.n
    return [(abs(t.coeff), n * float(t.parity + t.exponent), t.rate) for t in h.terms]


def _tail_bound(data, n: int, u: float) -> float:
    return sum(c * u ** e * math.exp(-s * n * u * u) for c, e, s in data)


def atom_sup(h: AtomSum) -> SupResult:
    """sup over x != 0 of |h(x)|, certified by the monotone tail of every term."""
    if h.is_zero:
        return SupResult(0.0, 0.0, 0.0, 0.0)
    if h.singular:
        return SupResult(math.inf, 0.0, 0.0, math.inf)
    n = h.n
    data = _tail_data(h)
    u_turn = max(math.sqrt(e / (2 * s * n)) for _, e, s in data)

    def mod(u):
        return np.abs(h(x_from_u(u, n)))

    u_c = max(2.0 * u_turn, 1.0)
    while True:
        u = np.linspace(-u_c, u_c, _SAMPLES)
        u[u == 0] = 1e-12
        vals = mod(u)
        best = int(np.argmax(vals))
        sup = float(vals[best])
        tb = _tail_bound(data, n, u_c)
        if tb <= 1e-3 * sup:
            break
        u_c *= 1.5
    du = u[1] - u[0]
    lo, hi = u[best] - du, u[best] + du
    res = minimize_scalar(lambda t: -float(mod(np.array([t]))[0]), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    u_at = float(u[best])
    if -res.fun > sup:
        sup, u_at = float(-res.fun), float(res.x)
    return SupResult(sup, u_at, u_c, tb)


def _ladder(f: AtomSum, alpha: int, beta: int, params: Params) -> AtomSum:
    if alpha < 0 or beta < 0:
        raise DomainError("alpha and beta must be nonnegative")
    for _ in range(beta):
        f = apply_E_minus(f, params)
    for _ in range(alpha):
        f = apply_E_plus(f, params)
    return f


def seminorm_P(alpha: int, beta: int, f: AtomSum, params: Params, grid: QuadratureGrid | None = None) -> float:
    """P_{alpha,beta}(f); +inf when the image has a negative exponent (singular at 0).

    ``grid`` is accepted for interface symmetry; the atom sup is certified
    without it.
    """
    return atom_sup(_ladder(f, alpha, beta, params)).value


def seminorm_Q(beta: int, f: AtomSum, params: Params, grid: QuadratureGrid | None = None) -> float:
    """Q_beta(f) = sup (1 + |x|^(2/n))^beta |f|, expanded binomially into |x|^(2a/n) f."""
    if beta < 0:
        raise DomainError("beta must be nonnegative")
    n = params.n
    acc = AtomSum.zero(n)
    term = f
    for a in range(beta + 1):
        acc = acc + term.scale(comb(beta, a) / n ** a)
        term = apply_E_plus(term, params)
    return atom_sup(acc).value


def x_power_derivative_stirling(f: AtomSum, l: int) -> AtomSum:
    """x^l f^(l) = sum_j s(l, j) (x d/dx)^j f."""
    acc = AtomSum.zero(f.n)
    for j, s in enumerate(falling_factorial_coeffs(l)):
        if s:
            acc = acc + euler_power(f, j).scale(s)
    return acc


# ---- reports -------------------------------------------------------------


@dataclass(frozen=True)
class SeminormEntry:
    alpha: int
    beta: int
    ell: int
    value: float
    method: str


@dataclass
class SeminormReport:
    params: Params
    entries: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    support_radius: float | None = None

    @property
    def all_finite(self) -> bool:
        return all(math.isfinite(e.value) for e in self.entries)

    def value(self, alpha: int, beta: int, ell: int) -> float:
        for e in self.entries:
            if (e.alpha, e.beta, e.ell) == (alpha, beta, ell):
                return e.value
        raise KeyError((alpha, beta, ell))

    def to_dict(self) -> dict:
        return {
            "k": self.params.k,
            "n": self.params.n,
            "scaling": "ladder (n |x|^(2/n), n |x|^(2-2/n) Delta_k)",
            "entries": [asdict(e) for e in self.entries],
            "notes": list(self.notes),
            "support_radius": self.support_radius,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        lines = ["alpha,beta,ell,value,method"]
        for e in self.entries:
            lines.append(f"{e.alpha},{e.beta},{e.ell},{e.value:.17g},{e.method}")
        return "\n".join(lines) + "\n"


def _check_ranges(ranges, limit: int):
    a, b, l = ranges
    if min(ranges) < 0:
        raise DomainError("ranges must be nonnegative")
    if max(ranges) > limit:
        raise CapacityError(f"ranges {tuple(ranges)} exceed the supported maximum {limit}")
    return a, b, l


def membership_report(f, params: Params, ranges=(3, 3, 3)) -> SeminormReport:
    """Table of sup |(n|x|^(2/n))^alpha (n|x|^(2-2/n) Delta_k)^beta (x^ell f^(ell))|.

    ``f`` may be an AtomSum (exact operators, certified sup) or a
    GridFunction (panel-spectral derivatives in u, sup over the grid).
    """
    if isinstance(f, GridFunction):
        return _grid_report(f, params, ranges)
    A, B, L = _check_ranges(ranges, MAX_ATOM_RANGE)
    report = SeminormReport(params)
    for ell in range(L + 1):
        base = x_power_derivative_stirling(f, ell)
        for beta in range(B + 1):
            lowered = _ladder(base, 0, beta, params)
            for alpha in range(A + 1):
                val = atom_sup(_ladder(lowered, alpha, 0, params)).value
                report.entries.append(SeminormEntry(alpha, beta, ell, val, "exact-atom"))
    return report


def _diff_matrices(grid: QuadratureGrid):
    # block-diagonal differentiation in u, one dense block per panel
    m = grid.size // grid.panels
    blocks = []
    for p in range(grid.panels):
        u = grid.u_nodes[p * m:(p + 1) * m]
        c = (u.max() + u.min()) / 2
        t = (u - c) / (u.max() - u.min())
        diff = t[:, None] - t[None, :]
        np.fill_diagonal(diff, 1.0)
        w = 1.0 / np.prod(diff, axis=1)
        D = (w[None, :] / w[:, None]) / diff
        np.fill_diagonal(D, 0.0)
        np.fill_diagonal(D, -D.sum(axis=1))
        blocks.append(D / (u.max() - u.min()))
    return m, blocks


def _grid_theta(grid, blocks, m, g):
    out = np.empty_like(g)
    for p, D in enumerate(blocks):
        sl = slice(p * m, (p + 1) * m)
        out[sl] = D @ g[sl]
    return grid.u_nodes * out / grid.params.n


def _grid_report(f: GridFunction, params: Params, ranges) -> SeminormReport:
    A, B, L = _check_ranges(ranges, MAX_GRID_RANGE)
    grid = f.grid
    n, k = params.n, params.k
    u = grid.u_nodes
    m, blocks = _diff_matrices(grid)
    theta = lambda g: _grid_theta(grid, blocks, m, g)

    def lower(g):
        tg = theta(g)
        return n * (theta(tg) + (2 * k - 1) * tg - k * (g - g[::-1])) / (u * u)

    # the panels touching the origin carry the u^-2 cancellation; they are
    # excluded from the sup, and so is anything past the truncation radius
    inner = grid.edges[grid.panels // 2 + 1]
    keep = np.abs(u) >= inner
    table = stirling_table(L)
    report = SeminormReport(
        params,
        notes=[
            "grid-estimate: finite on grid only; decay beyond u_max is not certified",
            f"sup excludes |u| < {inner:.6g} (panels adjacent to the origin)",
        ],
    )
    support = 0.0
    floor = 1e-10 * max(1.0, float(np.abs(f.values).max()))
    powers = [f.values]
    for _ in range(L):
        powers.append(theta(powers[-1]))
    for ell in range(L + 1):
        base = sum(table.s(ell, j) * powers[j] for j in range(ell + 1))
        lowered = base
        for beta in range(B + 1):
            if beta:
                lowered = lower(lowered)
            g = lowered
            for alpha in range(A + 1):
                if alpha:
                    g = n * u * u * g
                vals = np.abs(g[keep])
                val = float(vals.max()) if vals.size else 0.0
                report.entries.append(SeminormEntry(alpha, beta, ell, val, "grid-estimate"))
                big = np.abs(g) > floor
                if big.any():
                    support = max(support, float(np.abs(f.x[big]).max()))
    report.support_radius = support
    return report


def membership_equivalence(f: AtomSum, params: Params, ranges: int = 3) -> tuple[bool, bool]:
    """(all P_{alpha,beta}(f_m) finite, all membership suprema finite) for ranges <= ``ranges``.

    The two characterizations of the Schwartz class should agree.
    """
    table = stirling_table(ranges)
    p_side = all(
        math.isfinite(seminorm_P(a, b, sequence_f_m(f, mm, params, table), params))
        for mm in range(ranges + 1)
        for a in range(ranges + 1)
        for b in range(ranges + 1)
    )
    d_side = membership_report(f, params, (ranges, ranges, ranges)).all_finite
    return p_side, d_side


def sandwich_check(f: AtomSum, alpha: int, beta: int, l: int, params: Params) -> dict:
    """Both sides of P(f_l) <= P(f~_{beta,l}) <= sum |s(l,j)| C(j,m) beta^(j-m) P(f_m).

    f~ is the explicit Stirling double sum.  The right inequality is the
    triangle inequality; the left one is reported, not assumed.
    """
    if not 0 <= l <= beta:
        raise DomainError("need 0 <= l <= beta")
    table = stirling_table(max(l, 1))
    fm = [sequence_f_m(f, m, params, table) for m in range(l + 1)]
    lower = seminorm_P(alpha, beta, fm[l], params)
    middle = seminorm_P(alpha, beta, sequence_f_tilde(f, beta, l, params, table), params)
    upper = sum(
        abs(table.s(l, j)) * comb(j, m) * beta ** (j - m) * seminorm_P(alpha, beta, fm[m], params)
        for j in range(l + 1)
        for m in range(j + 1)
    )
    return {
        "lower": lower,
        "middle": middle,
        "upper": upper,
        "lower_holds": lower <= middle * (1 + 1e-8) + 1e-8,
        "upper_holds": middle <= upper * (1 + 1e-8) + 1e-8,
    }


# ---- L^p embedding chain ------------------------------------------------


@dataclass(frozen=True)
class EmbeddingChain:
    """||f||_p <= ||g_m||_p <= ||(1+|x|^(2/n))^-beta||_p Q_beta(g_m)."""

    f_norm: float
    gm_norm: float
    weight_norm: float
    q_value: float
    beta: int
    m: int
    p: float

    @property
    def bound(self) -> float:
        return self.weight_norm * self.q_value

    @property
    def holds(self) -> bool:
        tol = 1e-9
        return self.f_norm <= self.gm_norm + tol and self.gm_norm <= self.bound + tol

    @property
    def slack(self) -> float:
        return self.bound - self.f_norm


def beta_threshold(params: Params, p: float) -> float:
    """Weights (1+|x|^(2/n))^-beta lie in L^p(d mu) iff beta > (kn + 1 - n/2) / p."""
    return params.euler_shift / p


def embedding_constants(f: AtomSum, p: float, params: Params, grid: QuadratureGrid,
                        beta: int | None = None, m: int = 1) -> EmbeddingChain:
    """Both ends (and the middle) of the L^p embedding chain for an atom sum.

    ``beta`` defaults to the smallest integer above the convergence threshold.
    """
    if not 1 <= p < math.inf:
        raise DomainError("p must satisfy 1 <= p < inf")
    if beta is None:
        beta = math.floor(beta_threshold(params, p)) + 1
    gm = sequence_g_m(f, m, params)
    wn = weight_norm(params, beta, p, grid)
    return EmbeddingChain(
        f_norm=lp_norm(GridFunction.from_callable(grid, f), p),
        gm_norm=lp_norm(GridFunction.from_callable(grid, gm), p),
        weight_norm=wn,
        q_value=seminorm_Q(beta, gm, params),
        beta=beta,
        m=m,
        p=p,
    )
