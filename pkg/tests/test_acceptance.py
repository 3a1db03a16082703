"""Acceptance criteria 1-10 at their stated tolerances.

Each test prints one ``CRITERION <i>: PASS|FAIL`` line to the terminal
(also under pytest's output capture) and then asserts the criterion.
"""

import time

import numpy as np
import pytest

from genfourier import GridFunction, Params, gaussian, lp_norm
from genfourier import convolution as cv
from genfourier import kernel as kn
from genfourier.atoms import (
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
)
from genfourier.cli import main
from genfourier.measure import build_grid
from genfourier.schwartz import embedding_constants, membership_report
from genfourier.special_fn import stirling_table
from genfourier.suites import GridConfig, _plan, density_plan
from genfourier.transform import forward, gaussian_closed_form, inverse, theorem1_identity

PAIRS = [(1.0, 1), (0.8, 2), (1.0, 3)]
PARAMS = [Params(k, n) for k, n in PAIRS]


@pytest.fixture(scope="module")
def plans():
    return {p: _plan(p, GridConfig()) for p in PARAMS}


@pytest.fixture(scope="module")
def dense():
    return {p: density_plan(p) for p in PARAMS}


@pytest.fixture
def verdict(capsys):
    def report(i, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {i}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return report


def test_criterion_01_gaussian_eigenpair(verdict):
    start = time.perf_counter()
    worst = 0.0
    for p in PARAMS:
        plan = _plan(p, GridConfig())
        x = plan.target.x_nodes
        near = np.abs(x) <= 3
        for s in (0.4, 0.5, 1.0, 2.0):
            F = forward(plan, GridFunction.from_callable(plan.source, gaussian(p.n, s)))
            worst = max(worst, float(np.max(np.abs(F.values - gaussian_closed_form(p, s)(x))[near])))
    elapsed = time.perf_counter() - start
    verdict(1, worst <= 1e-6 and elapsed < 30, f"max deviation {worst:.3e} (tol 1e-6), {elapsed:.1f} s (limit 30 s)")


def test_criterion_02_round_trip(verdict, plans):
    worst = 0.0
    for p, plan in plans.items():
        for f in atom_suite(p.n).values():
            g = GridFunction.from_callable(plan.source, f)
            worst = max(worst, float(np.max(np.abs(inverse(plan, forward(plan, g)).values - g.values))))
    verdict(2, worst <= 1e-5, f"sup round-trip error {worst:.3e} (tol 1e-5)")


def test_criterion_03_kernel_identities(verdict):
    rng = np.random.default_rng(3)
    ident, eig = 0.0, 0.0
    for p in PARAMS:
        x, y = rng.uniform(-3, 3, 100), rng.uniform(-3, 3, 100)
        ident = max(ident, float(np.max(np.abs(kn.kernel(p, 0.0, y) - 1))))
        ident = max(ident, float(np.max(np.abs(kn.kernel(p, x, y) - kn.kernel(p, y, x)))))
        eig = max(eig, max(kn.eigen_residual(p, yy) for yy in (-2.0, -0.7, 0.4, 1.3, 2.5)))
    verdict(3, ident <= 1e-12 and eig <= 1e-5, f"B(0,y)=1 and symmetry {ident:.3e} (tol 1e-12); eigen FD {eig:.3e} (tol 1e-5)")


def test_criterion_04_operator_algebra(verdict):
    table = stirling_table(6)
    parts = dict.fromkeys(["commutators", "normal_ordering", "ladder_recursion", "f_m", "f_tilde"], 0.0)
    for p in PARAMS:
        for f in atom_suite(p.n).values():
            parts["commutators"] = max(parts["commutators"], max(commutator_residuals(f, p).values()))
            parts["normal_ordering"] = max(
                parts["normal_ordering"],
                max(max_coeff_diff(normal_ordered_euler(f, l, table), euler_power(f, l)) for l in range(7)),
            )
            parts["ladder_recursion"] = max(parts["ladder_recursion"], max(ladder_recursion_residual(f, b, p) for b in range(1, 5)))
            g = f
            for m in range(6):
                parts["f_m"] = max(parts["f_m"], max_coeff_diff(sequence_f_m(f, m, p, table), g))
                g = apply_H(g, p)
            parts["f_tilde"] = max(parts["f_tilde"], max(f_tilde_agreement(f, b, p, table) for b in range(5)))
    bad = [k for k, v in parts.items() if v > 1e-12]
    detail = ", ".join(f"{k} {v:.3e}" for k, v in parts.items()) + " (tol 1e-12)"
    if bad:
        detail += f"; failing: {', '.join(bad)}"
    verdict(4, not bad, detail)


def test_criterion_05_kernel_derivatives(verdict):
    worst = 0.0
    chosen = []
    for p in PARAMS:
        for yy in (-1.1, 0.8, 1.7):
            for a in (0, 1):
                for l in range(4):
                    xs, g = kn.fd_iterated(p, a, l, yy)
                    m = (np.abs(xs) >= 0.5) & (np.abs(xs) <= 2.5)
                    ex = kn.iterated_kernel_expansion(p, a, l, xs[m], yy)
                    worst = max(worst, float(np.max(np.abs(g[m] - ex)) / np.max(np.abs(ex))))
        c11 = kn.resolve_c11(p)
        chosen.append(f"n={p.n}: c11={c11['value']:.6g}")
    verdict(5, worst <= 1e-4, f"relative residual {worst:.3e} (tol 1e-4); c11 = -n/(2(nu+1)): {'; '.join(chosen)}")


def test_criterion_06_theorem1(verdict, plans):
    worst, finite = 0.0, True
    for p, plan in plans.items():
        for f in atom_suite(p.n).values():
            worst = max(worst, max(theorem1_identity(plan, f, a, b) for a in range(3) for b in range(3)))
            Ff = forward(plan, GridFunction.from_callable(plan.source, f))
            finite &= membership_report(Ff, p).all_finite
    verdict(6, worst <= 5e-4 and finite, f"identity residual {worst:.3e} (tol 5e-4); forward membership finite: {finite}")


def test_criterion_07_support(verdict, dense):
    worst = 0.0
    for p, dp in dense.items():
        f = GridFunction.from_callable(dp.source, cv.bump_identity(p, 1.0))
        g = GridFunction.from_callable(dp.source, cv.bump_identity(p, 0.5))
        R1, R2 = cv.support_radius(f), cv.support_radius(g)
        R = (R1 ** (1 / p.n) + R2 ** (1 / p.n)) ** p.n
        worst = max(worst, cv.mass_outside(cv.convolve(dp, f, g), R))
    verdict(7, worst <= 1e-4, f"relative mass outside {worst:.3e} (tol 1e-4)")


def test_criterion_08_approximate_identity(verdict, dense):
    decreasing, final = True, 0.0
    for p, dp in dense.items():
        phi = cv.bump_identity(p, 0.5)
        inputs = (gaussian(p.n, 0.5), cv.bump_identity(p, 2.0))
        for f_call in inputs:
            f = GridFunction.from_callable(dp.source, f_call)
            for q in (1, 2):
                errs = cv.approx_identity_convergence(dp, f, phi, q)
                decreasing &= all(a > b for a, b in zip(errs, errs[1:]))
                final = max(final, errs[-1] / lp_norm(f, q))
    verdict(8, decreasing and final <= 0.05, f"strictly decreasing: {decreasing}; worst final ratio {final:.3e} (limit 0.05)")


def test_criterion_09_lp_inequalities(verdict):
    slack_viol, t_err, chains = 0.0, 0.0, []
    xs = np.linspace(-3, 3, 60)
    for p in PARAMS:
        grid = build_grid(p, 8.0, 512)
        for f in atom_suite(p.n).values():
            for q in (1, 2):
                for m in range(5):
                    nf, ng = cv.gm_inequality(f, m, q, p, grid)
                    slack_viol = max(slack_viol, nf - ng)
            lhs = apply_euler(f) + f.scale(p.lp_shift)
            t_err = max(t_err, float(np.max(np.abs(cv.t_operator(lhs, p)(xs) - f(xs)))))
            for q in (1, 2):
                chains.append(embedding_constants(f, q, p, grid))
    holds = all(c.holds for c in chains)
    min_slack = min(c.slack for c in chains)
    ok = slack_viol <= 1e-9 and t_err <= 1e-8 and holds
    verdict(
        9,
        ok,
        f"max(||f||_p - ||g_m||_p) {slack_viol:.3e} (tol 1e-9); T inverse {t_err:.3e} (tol 1e-8); "
        f"embedding chain holds: {holds}, min slack {min_slack:.3e}",
    )


def test_criterion_10_determinism(verdict, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"verify{i}.json"
        main(["verify", "--k", "1", "--n", "1", "--output", str(path)])
        outs.append(path.read_bytes())
    same = outs[0] == outs[1]
    verdict(10, same, f"two verify runs byte-identical: {same} ({len(outs[0])} bytes)")
