"""Verification suites: each returns a list of CheckReport rows.

Every check compares a residual against a named tolerance; inequalities are
reported through their violation ``max(0, lhs - rhs)``.  Inputs are fixed
(seeded random points, named atoms) so repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import convolution as cv
from . import kernel as kn
from . import schwartz as sw
from .atoms import (
    apply_H,
    apply_euler,
    atom_suite,
    commutator_residuals,
    euler_power,
    f_tilde_agreement,
    gaussian,
    ladder_recursion_residual,
    max_coeff_diff,
    normal_ordered_euler,
    sequence_f_m,
)
from .measure import GridFunction, build_grid, integrate, interpolate, lp_norm
from .params import Params
from .special_fn import stirling_table
from .transform import (
    forward,
    gaussian_closed_form,
    intertwining_residuals,
    inverse,
    make_plan,
    theorem1_identity,
)

__all__ = ["CheckReport", "SUITES", "DEFAULT_TOLERANCES", "GridConfig", "run_suites", "density_plan"]

SUITES = ("kernel", "transform", "algebra", "convolution", "schwartz", "density")

DEFAULT_TOLERANCES = {
    "kernel.initial": 1e-12,
    "kernel.symmetry": 1e-12,
    "kernel.eigen": 1e-5,
    "kernel.derivatives": 1e-4,
    "kernel.coeff_tables": 1e-12,
    "kernel.c11": 1e-6,
    "kernel.bound_stability": 1e-3,
    "transform.gaussian": 1e-6,
    "transform.round_trip": 1e-5,
    "transform.intertwining": 1e-4,
    "transform.theorem1": 5e-4,
    "transform.linf_l1": 1e-12,
    "transform.parity": 1e-12,
    "transform.forward_membership": 0.0,
    "algebra.commutators": 1e-12,
    "algebra.normal_ordering": 1e-12,
    "algebra.ladder_recursion": 1e-12,
    "algebra.f_m": 1e-12,
    "algebra.f_tilde": 1e-12,
    "convolution.support": 1e-4,
    "convolution.translate_support": 1e-4,
    "convolution.translate_kernel": 1e-6,
    "convolution.commutativity": 1e-8,
    "convolution.direct": 1e-4,
    "convolution.t_inverse": 1e-8,
    "convolution.gm": 1e-9,
    "convolution.embedding": 1e-9,
    "schwartz.examples": 1e-9,
    "schwartz.membership": 0.0,
    "schwartz.equivalence": 0.0,
    "schwartz.sandwich_upper": 1e-8,
    "schwartz.sandwich_lower": 1e-8,
    "density.mass": 1e-6,
    "density.decrease": 0.0,
    "density.final": 0.05,
}


@dataclass(frozen=True)
class CheckReport:
    name: str
    status: str
    residual: float
    tolerance: float
    details: str = ""

    @classmethod
    def make(cls, name: str, residual: float, tolerances: dict, details: str = "") -> "CheckReport":
        tol = tolerances[name.split("[")[0]]
        ok = math.isfinite(residual) and residual <= tol
        return cls(name, "pass" if ok else "fail", float(residual), float(tol), details)

    def to_dict(self) -> dict:
        d = asdict(self)
        if not math.isfinite(d["residual"]):
            d["residual"] = repr(d["residual"])
        return d


@dataclass(frozen=True)
class GridConfig:
    u_max: float = 12.0
    points: int = 1024
    panels: int | None = None


def _plan(params: Params, cfg: GridConfig):
    u_max = min(cfg.u_max, math.sqrt(540.0 / params.n))
    grid = build_grid(params, u_max=u_max, points=cfg.points, panels=cfg.panels)
    return make_plan(grid)


def density_plan(params: Params):
    """Graded fine source grid for narrow dilates plus a wide target grid."""
    U = 6.0
    V = min(100.0, 90.0 / params.n)
    src = build_grid(params, U, 2048, 32, grading=4)
    return make_plan(src, build_grid(params, V, 2048, 32))


def _fmt(x: float) -> str:
    return f"{x:.3e}"


# ---- kernel -----------------------------------------------------------------


def kernel_suite(params: Params, cfg: GridConfig, tol: dict) -> list[CheckReport]:
    rng = np.random.default_rng(20240611)
    y = rng.uniform(-3, 3, 100)
    x = rng.uniform(-3, 3, 100)
    out = [
        CheckReport.make("kernel.initial", float(np.max(np.abs(kn.kernel(params, 0.0, y) - 1))), tol),
        CheckReport.make(
            "kernel.symmetry", float(np.max(np.abs(kn.kernel(params, x, y) - kn.kernel(params, y, x)))), tol
        ),
    ]
    ys = (-2.0, -0.7, 0.4, 1.3, 2.5)
    out.append(
        CheckReport.make("kernel.eigen", max(kn.eigen_residual(params, yy) for yy in ys), tol, "|x| in [0.5, 2.5]")
    )
    worst = 0.0
    for yy in (-1.1, 0.8, 1.7):
        for a in (0, 1):
            for l in range(4):
                xs, g = kn.fd_iterated(params, a, l, yy)
                m = (np.abs(xs) >= 0.5) & (np.abs(xs) <= 2.5)
                ex = kn.iterated_kernel_expansion(params, a, l, xs[m], yy)
                worst = max(worst, float(np.max(np.abs(g[m] - ex)) / np.max(np.abs(ex))))
    out.append(CheckReport.make("kernel.derivatives", worst, tol, "l <= 3, alpha <= 1 vs nested 5-point FD"))
    coeffs = kn.derivative_coeffs(params, 4)
    pts = np.linspace(0.3, 2.4, 15)
    gap = max(
        float(np.max(np.abs(kn.expansion_from_coeffs(coeffs, l, pts, 1.3) - kn.iterated_kernel_expansion(params, 0, l, pts, 1.3))))
        for l in range(5)
    )
    out.append(CheckReport.make("kernel.coeff_tables", gap, tol, "c_{j,l}, d_{j,l} tables vs term engine"))
    c11 = kn.resolve_c11(params)
    res = c11["residuals"]
    out.append(
        CheckReport.make(
            "kernel.c11",
            res[c11["chosen"]],
            tol,
            f"chosen c_11 = -n/(2({c11['chosen']})) = {c11['value']!r}; residuals " + ", ".join(f"{k}: {_fmt(v)}" for k, v in sorted(res.items())),
        )
    )
    scan = kn.kernel_bound_scan(params, u_max=min(6.0, math.sqrt(500 / params.n)))
    r = scan.refinements
    out.append(
        CheckReport.make(
            "kernel.bound_stability",
            max(abs(r[-1] - r[-2]), abs(r[-2] - r[-3])),
            tol,
            f"m_estimate = {scan.m_estimate!r} ({scan.grid_spec})",
        )
    )
    return out


# ---- transform ------------------------------------------------------------


def transform_suite(params: Params, cfg: GridConfig, tol: dict) -> list[CheckReport]:
    plan = _plan(params, cfg)
    src, tgt = plan.source, plan.target
    n = params.n
    out = []
    xt = tgt.x_nodes
    near = np.abs(xt) <= 3
    errs = []
    for s in (0.4, 0.5, 1.0, 2.0):
        F = forward(plan, GridFunction.from_callable(src, gaussian(n, s)))
        errs.append(float(np.max(np.abs(F.values - gaussian_closed_form(params, s)(xt))[near])))
    out.append(CheckReport.make("transform.gaussian", max(errs), tol, "s = 0.4, 0.5, 1, 2: " + ", ".join(map(_fmt, errs))))

    suite = atom_suite(n)
    rt, inter, th, bound, parity, member = [], [], [], [], [], []
    m_est = kn.kernel_bound_scan(params, u_max=min(6.0, math.sqrt(500 / n))).m_estimate
    for name, f in suite.items():
        g = GridFunction.from_callable(src, f)
        Fg = forward(plan, g)
        rt.append(float(np.max(np.abs(inverse(plan, Fg).values - g.values))))
        inter.append(max(intertwining_residuals(plan, f)))
        th.append(max(theorem1_identity(plan, f, a, b) for a in range(3) for b in range(3)))
        bound.append(max(0.0, lp_norm(Fg, math.inf) - m_est * lp_norm(g, 1)))
        member.append(0 if sw.membership_report(Fg, params).all_finite else 1)
        parts = {t.parity for t in f.terms}
        if parts == {0}:
            parity.append(float(np.max(np.abs(Fg.values.imag))))
        elif parts == {1}:
            rot = Fg.values / params.odd_phase
            parity.append(float(np.max(np.abs(rot.imag))))
    names = ", ".join(suite)
    out.append(CheckReport.make("transform.round_trip", max(rt), tol, names))
    out.append(CheckReport.make("transform.intertwining", max(inter), tol, "FD step 0.02, |y| in [0.5, 2.5]"))
    out.append(CheckReport.make("transform.theorem1", max(th), tol, "(alpha, beta) in {0,1,2}^2"))
    out.append(CheckReport.make("transform.linf_l1", max(bound), tol, f"m_estimate = {m_est!r}"))
    out.append(CheckReport.make("transform.parity", max(parity), tol, "even -> real, odd -> (-i)^n real"))
    out.append(CheckReport.make("transform.forward_membership", float(sum(member)), tol, "grid reports, ranges 3"))
    return out


# ---- algebra --------------------------------------------------------------


def algebra_suite(params: Params, cfg: GridConfig, tol: dict) -> list[CheckReport]:
    suite = atom_suite(params.n)
    table = stirling_table(6)
    comm, order, ladder, fm, ft = [], [], [], [], []
    for f in suite.values():
        comm.append(max(commutator_residuals(f, params).values()))
        order.append(max(max_coeff_diff(normal_ordered_euler(f, l, table), euler_power(f, l)) for l in range(7)))
        ladder.append(max(ladder_recursion_residual(f, b, params) for b in range(1, 5)))
        g, worst = f, 0.0
        for m in range(6):
            worst = max(worst, max_coeff_diff(sequence_f_m(f, m, params, table), g))
            g = apply_H(g, params)
        fm.append(worst)
        ft.append(f_tilde_agreement(f, 4, params, table))
    return [
        CheckReport.make("algebra.commutators", max(comm), tol),
        CheckReport.make("algebra.normal_ordering", max(order), tol, "l <= 6"),
        CheckReport.make("algebra.ladder_recursion", max(ladder), tol, "beta <= 4"),
        CheckReport.make("algebra.f_m", max(fm), tol, "m <= 5"),
        CheckReport.make(
            "algebra.f_tilde",
            max(ft),
            tol,
            "stirling = (-1)^l (beta+H)_l, recursion = (beta-1+H)_l, closed form = rising product; "
            "the three constructions disagree for l >= 1",
        ),
    ]


# ---- convolution ----------------------------------------------------------


def convolution_suite(params: Params, cfg: GridConfig, tol: dict) -> list[CheckReport]:
    n = params.n
    out = []
    dp = density_plan(params)
    f = GridFunction.from_callable(dp.source, cv.bump_identity(params, 1.0))
    g = GridFunction.from_callable(dp.source, cv.bump_identity(params, 0.5))
    R1, R2 = cv.support_radius(f), cv.support_radius(g)
    R = (R1 ** (1 / n) + R2 ** (1 / n)) ** n
    c = cv.convolve(dp, f, g)
    out.append(CheckReport.make("convolution.support", cv.mass_outside(c, R), tol, f"R1={R1:.6g}, R2={R2:.6g}, R={R:.6g}"))
    worst = 0.0
    for x0 in (0.6, -1.2):
        t = cv.translate(dp, f, x0)
        Rt = (abs(x0) ** (1 / n) + R1 ** (1 / n)) ** n
        worst = max(worst, cv.mass_outside(t, Rt))
    out.append(CheckReport.make("convolution.translate_support", worst, tol, "x0 = 0.6, -1.2"))

    plan = _plan(params, cfg)
    src = plan.source
    a = GridFunction.from_callable(src, gaussian(n, 0.5))
    b = GridFunction.from_callable(src, gaussian(n, 1.0, parity=1) + gaussian(n, 0.7))
    Fa = forward(plan, a)
    ta = forward(plan, cv.translate(plan, a, 0.8))
    mask = np.abs(Fa.values) > 1e-3
    ratio = ta.values[mask] / Fa.values[mask] - kn.kernel(params, params.parity_sign * 0.8, plan.target.x_nodes[mask])
    out.append(CheckReport.make("convolution.translate_kernel", float(np.max(np.abs(ratio))), tol, "x0 = 0.8"))
    ab, ba = cv.convolve(plan, a, b), cv.convolve(plan, b, a)
    out.append(CheckReport.make("convolution.commutativity", float(np.max(np.abs(ab.values - ba.values))), tol))
    xs = np.array([-1.5, -0.4, 0.3, 0.9, 2.0])
    direct = cv.convolve_direct(plan, a, b, xs)
    out.append(CheckReport.make("convolution.direct", float(np.max(np.abs(interpolate(ab, xs) - direct))), tol, "5 points"))

    t_err = 0.0
    xs = np.linspace(-3, 3, 60)
    for f_at in atom_suite(n).values():
        lhs = apply_euler(f_at) + f_at.scale(params.lp_shift)
        t_err = max(t_err, float(np.max(np.abs(cv.t_operator(lhs, params)(xs) - f_at(xs)))))
    out.append(CheckReport.make("convolution.t_inverse", t_err, tol, "T((x d/dx + 2k + 2/n) f) = f"))

    qgrid = build_grid(params, 8.0, 512)
    viol = 0.0
    for f_at in atom_suite(n).values():
        for m in range(5):
            for p in (1, 2):
                lo, hi = cv.gm_inequality(f_at, m, p, params, qgrid)
                viol = max(viol, lo - hi)
    out.append(CheckReport.make("convolution.gm", max(viol, 0.0), tol, "m <= 4, p in {1, 2}"))
    viol, slacks = 0.0, []
    for p in (1, 2):
        chain = sw.embedding_constants(gaussian(n, 0.5), p, params, qgrid)
        viol = max(viol, chain.f_norm - chain.gm_norm, chain.gm_norm - chain.bound)
        slacks.append(f"p={p}: beta={chain.beta}, slack={chain.slack:.6g}")
    out.append(CheckReport.make("convolution.embedding", max(viol, 0.0), tol, "; ".join(slacks)))
    return out


# ---- schwartz ---------------------------------------------------------------


def schwartz_suite(params: Params, cfg: GridConfig, tol: dict) -> list[CheckReport]:
    n = params.n
    suite = atom_suite(n)
    out = []
    g = gaussian(n, 0.5)
    err = abs(sw.seminorm_P(0, 0, g, params) - 1.0)
    out.append(CheckReport.make("schwartz.examples", err, tol, "P_00 of exp(-n|x|^(2/n)/2) = 1"))
    nonfinite = sum(0 if sw.membership_report(f, params).all_finite else 1 for f in suite.values())
    out.append(CheckReport.make("schwartz.membership", float(nonfinite), tol, "ranges 3, exact atoms"))
    mismatch = 0
    for f in suite.values():
        a, b = sw.membership_equivalence(f, params)
        mismatch += int(a != b)
    out.append(CheckReport.make("schwartz.equivalence", float(mismatch), tol, "finiteness of P(f_m) vs membership table"))
    up, low, where = 0.0, 0.0, []
    for name, f in suite.items():
        for beta in range(4):
            for l in range(beta + 1):
                for alpha in range(2):
                    r = sw.sandwich_check(f, alpha, beta, l, params)
                    up = max(up, r["middle"] - r["upper"])
                    gap = r["lower"] - r["middle"]
                    if gap > low:
                        low = gap
                    if not r["lower_holds"]:
                        where.append(f"{name}(a={alpha},b={beta},l={l})")
    out.append(CheckReport.make("schwartz.sandwich_upper", max(up, 0.0), tol, "beta <= 3, l <= beta, alpha <= 1"))
    out.append(
        CheckReport.make(
            "schwartz.sandwich_lower", max(low, 0.0), tol, ("violations: " + ", ".join(where)) if where else "holds"
        )
    )
    return out


# ---- density --------------------------------------------------------------


def density_suite(params: Params, cfg: GridConfig, tol: dict, p_values=(1, 2)) -> list[CheckReport]:
    dp = density_plan(params)
    phi = cv.bump_identity(params, 0.5)
    mass = max(abs(integrate(cv.dilate(phi, r, params, dp.source)).real - 1) for r in (0.5, 0.25))
    out = [CheckReport.make("density.mass", mass, tol, "r = 1/2, 1/4")]
    inputs = {
        "gaussian": GridFunction.from_callable(dp.source, gaussian(params.n, 0.5)),
        "bump": GridFunction.from_callable(dp.source, cv.bump_identity(params, 2.0)),
    }
    for name, f in inputs.items():
        for p in p_values:
            errs = cv.approx_identity_convergence(dp, f, phi, p)
            rel = [e / lp_norm(f, p) for e in errs]
            bumps = float(sum(b >= a for a, b in zip(rel, rel[1:])))
            seq = ", ".join(f"{v:.4g}" for v in rel)
            out.append(CheckReport.make(f"density.decrease[{name},p={p}]", bumps, tol, seq))
            out.append(CheckReport.make(f"density.final[{name},p={p}]", rel[-1], tol, "r = 1/8"))
    return out


_RUNNERS = {
    "kernel": kernel_suite,
    "transform": transform_suite,
    "algebra": algebra_suite,
    "convolution": convolution_suite,
    "schwartz": schwartz_suite,
    "density": density_suite,
}


def run_suites(params: Params, cfg: GridConfig, tolerances: dict | None = None, suites=SUITES) -> list[CheckReport]:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    reports = []
    for name in suites:
        reports.extend(_RUNNERS[name](params, cfg, tol))
    return reports
