"""Forward and inverse (k, 2/n)-generalized Fourier transform on quadrature grids.

    F f(y) = integral of f(x) B(x, y) d mu(x),    F^{-1} g(x) = F g((-1)^n x).

Plans hold a dense kernel matrix between a source and a target grid.  Both
directions reuse it: the inverse kernel is the complex conjugate of B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _fd
from .atoms import Atom, AtomSum, apply_E_minus, apply_E_plus, apply_euler, sequence_h
from .errors import ConvergenceError, DomainError, PlanError
from .kernel import kernel_matrix
from .measure import GridFunction, QuadratureGrid, build_grid
from .params import Params
from .special_fn import Z_MAX

__all__ = [
    "TransformPlan",
    "make_plan",
    "default_plan",
    "forward",
    "inverse",
    "transform_at",
    "gaussian_closed_form",
    "odd_gaussian_closed_form",
    "range_samples",
    "intertwining_residuals",
    "theorem1_identity",
    "FD_STEP",
    "CHECK_WINDOW",
]

# range-side finite differences: pitch of the uniform y grid and the window
# of |y| on which residuals are measured
FD_STEP = 0.02
CHECK_WINDOW = (0.5, 2.5)


@dataclass(frozen=True, eq=False)
class TransformPlan:
    """Kernel matrix ``kernel_cache[i, j] = B(x_i, y_j)`` between two grids."""

    params: Params
    source: QuadratureGrid
    target: QuadratureGrid
    kernel_cache: np.ndarray
    _range_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def source_grid(self) -> QuadratureGrid:
        return self.source

    @property
    def target_grid(self) -> QuadratureGrid:
        return self.target


def make_plan(source: QuadratureGrid, target: QuadratureGrid | None = None) -> TransformPlan:
    target = source if target is None else target
    params = source.params
    if target.params != params:
        raise PlanError("source and target grids use different parameters")
    zmax = params.n * source.u_max * target.u_max
    if zmax > Z_MAX:
        raise PlanError(
            f"n * u_max(source) * u_max(target) = {zmax:g} exceeds the validated kernel domain {Z_MAX:g}"
        )
    try:
        K = kernel_matrix(params, source.x_nodes, target.x_nodes)
    except ConvergenceError as exc:
        raise PlanError(str(exc)) from exc
    K.setflags(write=False)
    return TransformPlan(params, source, target, K)


def default_plan(params: Params, points: int = 1024, u_max: float = 12.0) -> TransformPlan:
    """Same grid on both sides, sized so round trips of the atom suite converge."""
    u_max = min(u_max, math.sqrt(Z_MAX / params.n))
    grid = build_grid(params, u_max=u_max, points=points)
    return make_plan(grid)


def _on(grid: QuadratureGrid, f: GridFunction, what: str) -> np.ndarray:
    if not grid.same_as(f.grid):
        raise PlanError(f"{what} is not sampled on the plan's grid")
    return f.values


def forward(plan: TransformPlan, f: GridFunction) -> GridFunction:
    vals = _on(plan.source, f, "input")
    return GridFunction(plan.target, (plan.source.weights * vals) @ plan.kernel_cache)


def inverse(plan: TransformPlan, g: GridFunction) -> GridFunction:
    """Map target-grid samples back to the source grid with kernel conj(B)."""
    vals = _on(plan.target, g, "input")
    return GridFunction(plan.source, np.conj(plan.kernel_cache) @ (plan.target.weights * vals))


def transform_at(params: Params, f: GridFunction, y) -> np.ndarray:
    """Forward transform of grid samples evaluated at arbitrary points ``y``."""
    grid = f.grid
    y = np.asarray(y, dtype=float)
    if y.size and params.n * grid.u_max * float(np.max(np.abs(y))) ** (1 / params.n) > Z_MAX:
        raise PlanError("evaluation points leave the validated kernel domain")
    K = kernel_matrix(params, grid.x_nodes, y.ravel())
    return ((grid.weights * f.values) @ K).reshape(y.shape)


def gaussian_closed_form(params: Params, s: float) -> AtomSum:
    """F(exp(-s n |x|^(2/n))) = (2s)^-(nu+1) exp(-n |y|^(2/n) / (4s))."""
    if not s > 0:
        raise DomainError(f"rate must be positive, got {s!r}")
    coeff = (2 * s) ** (-(params.nu + 1))
    return AtomSum([Atom(coeff, 0, 0, 1 / (4 * s))], params.n)


def odd_gaussian_closed_form(params: Params, s: float) -> AtomSum:
    """F(x exp(-s n |x|^(2/n))) = (-i)^n (2s)^-(nu+n+1) y exp(-n |y|^(2/n) / (4s))."""
    if not s > 0:
        raise DomainError(f"rate must be positive, got {s!r}")
    coeff = params.odd_phase * (2 * s) ** (-(params.nu + params.n + 1))
    return AtomSum([Atom(coeff, 1, 0, 1 / (4 * s))], params.n)


# ---- range-side checks ----------------------------------------------------


def _range_kernel(plan: TransformPlan, h: float, margin: int = 12):
    # uniform symmetric y grid over the check window plus a stencil margin
    key = (float(h), margin)
    if key not in plan._range_cache:
        y = _fd.symmetric_grid(CHECK_WINDOW[1] + margin * h, h)
        K = kernel_matrix(plan.params, plan.source.x_nodes, y)
        plan._range_cache[key] = (y, plan.source.weights[:, None] * K)
    return plan._range_cache[key]


def range_samples(plan: TransformPlan, f: AtomSum, h: float = FD_STEP):
    """The uniform y grid used by the range-side checks and forward(f) on it."""
    y, WK = _range_kernel(plan, h)
    return y, f(plan.source.x_nodes) @ WK


def _window(y):
    a = np.abs(y)
    return (a >= CHECK_WINDOW[0]) & (a <= CHECK_WINDOW[1])


def _residual(lhs, rhs, mask) -> float:
    diff = np.abs(lhs[mask] - rhs[mask])
    scale = max(1.0, float(np.max(np.abs(rhs[mask]))))
    return float(np.max(diff)) / scale


def intertwining_residuals(plan: TransformPlan, f: AtomSum, h: float = FD_STEP) -> tuple[float, float, float]:
    """Residuals of

        F(x d/dx f) + (y d/dy + 2k + 2/n - 1) F f,
        F(|x|^(2/n) f) + |y|^(2-2/n) Delta_k F f,
        F(|x|^(2-2/n) Delta_k f) + |y|^(2/n) F f,

    sup over the check window, relative to max(1, sup |F(exact side)|).
    Domain-side operators are exact on atoms; range-side ones use 5-point
    differences with step ``h``.
    """
    params = plan.params
    n = params.n
    y, Ff = range_samples(plan, f, h)
    mask = _window(y)

    def F(atoms):
        return range_samples(plan, atoms, h)[1]

    r1 = _residual(-(_fd.theta(y, Ff, h) + params.homogeneity * Ff), F(apply_euler(f)), mask)
    r2 = _residual(-_fd.lowering(params, y, Ff, h) / n, F(apply_E_plus(f, params)) / n, mask)
    r3 = _residual(-_fd.raising(params, y, Ff) / n, F(apply_E_minus(f, params)) / n, mask)
    return r1, r2, r3


def theorem1_identity(plan: TransformPlan, f: AtomSum, alpha: int, beta: int, h: float = FD_STEP) -> float:
    """Residual of (E+_y)^alpha (E-_y)^beta F f = (-1)^(alpha+beta) F((E-)^alpha (E+)^beta f).

    The left side iterates numeric operators on samples of F f; the right
    side transforms the exact atom ``sequence_h(f, alpha, beta)``.
    """
    if not (0 <= alpha <= 2 and 0 <= beta <= 2):
        raise DomainError("alpha and beta must lie in 0..2")
    params = plan.params
    y, lhs = range_samples(plan, f, h)
    for _ in range(beta):
        lhs = _fd.lowering(params, y, lhs, h)
    for _ in range(alpha):
        lhs = _fd.raising(params, y, lhs)
    hf = sequence_h(f, alpha, beta, params)
    rhs = (-1) ** (alpha + beta) * range_samples(plan, hf, h)[1]
    return _residual(lhs, rhs, _window(y))
