"""Command-line front end: ``genfourier <subcommand> [flags]``.

Exit codes: 0 when everything requested passed, 1 on configuration or
validation errors, 2 when at least one verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import convolution as cv
from .atoms import AtomSum, gaussian
from .errors import GenFourierError
from .kernel import derivative_coeffs, kernel_matrix, kernel_bound_scan, resolve_c11
from .measure import GridFunction, build_grid, lp_norm
from .params import Params
from .schwartz import membership_report
from .suites import DEFAULT_TOLERANCES, SUITES, GridConfig, density_plan, run_suites
from .transform import forward, gaussian_closed_form, make_plan

EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    k: float = 1.0
    n: int = 1
    grid: GridConfig = field(default_factory=GridConfig)
    tolerances: dict = field(default_factory=dict)
    suites: tuple = SUITES
    output: str | None = None
    format: str = "json"
    s: float = 0.5
    p: float = 2.0
    alpha: int = 3
    beta: int = 3

    def params(self) -> Params:
        return Params(self.k, self.n)


_CONFIG_KEYS = {"k", "n", "grid", "tolerances", "suites", "output", "format", "s", "p", "alpha", "beta"}


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown field(s) {sorted(unknown)}")
    return data


def _field(data: dict, key: str, kind, where: str):
    val = data[key]
    try:
        if kind is int and (isinstance(val, bool) or int(val) != val):
            raise ValueError
        return kind(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: field '{key}' must be {kind.__name__}, got {val!r}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    """Config file first, then command-line flags on top."""
    cfg = RunConfig()
    data = load_config(args.config) if getattr(args, "config", None) else {}
    where = args.config or "config"
    for key, kind in (("k", float), ("n", int), ("s", float), ("p", float), ("alpha", int), ("beta", int)):
        if key in data:
            setattr(cfg, key, _field(data, key, kind, where))
    if "grid" in data:
        g = data["grid"]
        if not isinstance(g, dict) or set(g) - {"u_max", "points", "panels"}:
            raise ConfigError(f"{where}: field 'grid' must be an object with u_max, points, panels")
        cfg.grid = GridConfig(
            u_max=_field(g, "u_max", float, where) if "u_max" in g else cfg.grid.u_max,
            points=_field(g, "points", int, where) if "points" in g else cfg.grid.points,
            panels=_field(g, "panels", int, where) if "panels" in g and g["panels"] is not None else None,
        )
    if "tolerances" in data:
        cfg.tolerances = _parse_tols(data["tolerances"], where)
    if "suites" in data:
        cfg.suites = _parse_suites(data["suites"], where)
    if "output" in data:
        out = data["output"]
        if isinstance(out, dict):
            cfg.output = out.get("path")
            cfg.format = out.get("format", cfg.format)
        else:
            cfg.output = out
    if "format" in data:
        cfg.format = data["format"]

    for key in ("k", "n", "s", "p", "alpha", "beta", "output", "format"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "u_max", None) is not None:
        cfg.grid = replace(cfg.grid, u_max=args.u_max)
    if getattr(args, "grid_points", None) is not None:
        cfg.grid = replace(cfg.grid, points=args.grid_points)
    if getattr(args, "tol", None):
        tols = {}
        for item in args.tol:
            name, sep, val = item.partition("=")
            if not sep:
                raise ConfigError(f"--tol expects name=value, got {item!r}")
            tols[name] = val
        cfg.tolerances = {**cfg.tolerances, **_parse_tols(tols, "--tol")}
    if getattr(args, "suite", None):
        cfg.suites = _parse_suites(args.suite, "--suite")
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"format must be json or csv, got {cfg.format!r}")
    cfg.params()  # validates the standing assumption before any work
    return cfg


def _parse_tols(raw, where) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: tolerances must map check names to numbers")
    out = {}
    for name, val in raw.items():
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"{where}: unknown tolerance '{name}'")
        try:
            out[name] = float(val)
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: tolerance '{name}' must be a number, got {val!r}") from None
        if not out[name] >= 0:
            raise ConfigError(f"{where}: tolerance '{name}' must be nonnegative")
    return out


def _parse_suites(raw, where) -> tuple:
    items = [raw] if isinstance(raw, str) else list(raw)
    names = []
    for item in items:
        names.extend(x for x in str(item).split(",") if x)
    bad = [x for x in names if x not in SUITES]
    if bad:
        raise ConfigError(f"{where}: unknown suite(s) {bad}; choose from {list(SUITES)}")
    return tuple(names)


# ---- output helpers ------------------------------------------------------


def _num(x: float) -> str:
    return f"{x:.17g}"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _finite(obj):
    # strict JSON has no inf/nan; encode them as strings
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else str(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _json(obj) -> str:
    return json.dumps(_finite(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _emit(text: str, cfg: RunConfig):
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def _grid(cfg: RunConfig, params: Params):
    u_max = min(cfg.grid.u_max, math.sqrt(540.0 / params.n))
    return build_grid(params, u_max=u_max, points=cfg.grid.points, panels=cfg.grid.panels)


# ---- subcommands -----------------------------------------------------------


def cmd_kernel(cfg: RunConfig) -> int:
    params = cfg.params()
    u = np.linspace(-2.0, 2.0, 41)
    x = np.sign(u) * np.abs(u) ** params.n
    K = kernel_matrix(params, x, x)
    if cfg.format == "csv":
        rows = [(x[i], x[j], K[i, j].real, K[i, j].imag) for i in range(x.size) for j in range(x.size)]
        _emit(_csv(["x", "y", "re", "im"], rows), cfg)
    else:
        c11 = resolve_c11(params)
        coeffs = derivative_coeffs(params, 4)
        scan = kernel_bound_scan(params, u_max=min(6.0, math.sqrt(500 / params.n)))
        _emit(
            _json(
                {
                    "k": params.k,
                    "n": params.n,
                    "nu": params.nu,
                    "c11": c11,
                    "c": [list(row) for row in coeffs.c],
                    "d": [list(row) for row in coeffs.d],
                    "m_estimate": scan.m_estimate,
                    "m_refinements": list(scan.refinements),
                }
            ),
            cfg,
        )
    return EXIT_OK


def cmd_transform(cfg: RunConfig) -> int:
    params = cfg.params()
    grid = _grid(cfg, params)
    plan = make_plan(grid)
    f = gaussian(params.n, cfg.s)
    F = forward(plan, GridFunction.from_callable(grid, f))
    x = plan.target.x_nodes
    exact = gaussian_closed_form(params, cfg.s)(x)
    dev = np.abs(F.values - exact)
    near = np.abs(x) <= 3
    summary = {
        "k": params.k,
        "n": params.n,
        "s": cfg.s,
        "grid": grid.spec,
        "max_abs_error_vs_closed_form": float(dev[near].max()),
        "window": "|x| <= 3",
    }
    if cfg.format == "csv":
        rows = [(x[i], F.values[i].real, F.values[i].imag, dev[i]) for i in range(x.size) if near[i]]
        _emit(_csv(["x", "re", "im", "abs_error"], rows), cfg)
        sys.stderr.write(_json(summary))
    else:
        _emit(_json(summary), cfg)
    return EXIT_OK


def cmd_convolve(cfg: RunConfig) -> int:
    params = cfg.params()
    plan = make_plan(_grid(cfg, params))
    src = plan.source
    n = params.n
    f = GridFunction.from_callable(src, gaussian(n, 0.5))
    g = GridFunction.from_callable(src, gaussian(n, 1.0))
    conv = cv.convolve(plan, f, g)
    p = cfg.p
    young = {}
    for (pp, r, q) in ((1, 1, 1), (2, 1, 2), (p, 1, p)):
        young[f"p={pp:g},r={r:g},q={q:g}"] = cv.young_check(plan, f, g, pp, r, q)
    ratios = cv.translation_norm_ratios(plan, f, (0.5, 1.0, -1.5), p)
    dp = density_plan(params)
    a = GridFunction.from_callable(dp.source, cv.bump_identity(params, 1.0))
    b = GridFunction.from_callable(dp.source, cv.bump_identity(params, 0.5))
    R1, R2 = cv.support_radius(a), cv.support_radius(b)
    R = (R1 ** (1 / n) + R2 ** (1 / n)) ** n
    report = {
        "k": params.k,
        "n": n,
        "p": p,
        "young_ratios": young,
        "translation_norm_ratios": ratios,
        "bump_support": {"R1": R1, "R2": R2, "R": R, "mass_outside": cv.mass_outside(cv.convolve(dp, a, b), R)},
        "conv_norm": lp_norm(conv, p),
    }
    if cfg.format == "csv":
        rows = [(src.x_nodes[i], conv.values[i].real, conv.values[i].imag) for i in range(src.size)]
        _emit(_csv(["x", "re", "im"], rows), cfg)
        sys.stderr.write(_json(report))
    else:
        _emit(_json(report), cfg)
    return EXIT_OK


def cmd_density(cfg: RunConfig) -> int:
    params = cfg.params()
    dp = density_plan(params)
    phi = cv.bump_identity(params, 0.5)
    inputs = {
        "gaussian": GridFunction.from_callable(dp.source, gaussian(params.n, 0.5)),
        "bump": GridFunction.from_callable(dp.source, cv.bump_identity(params, 2.0)),
    }
    seqs = {}
    for name, f in inputs.items():
        errs = cv.approx_identity_convergence(dp, f, phi, cfg.p)
        nf = lp_norm(f, cfg.p)
        seqs[name] = {"absolute": errs, "relative": [e / nf for e in errs]}
    if cfg.format == "csv":
        rows = []
        for name, d in seqs.items():
            for r, a, rel in zip(phi.r_schedule, d["absolute"], d["relative"]):
                rows.append((name, float(r), a, rel))
        _emit(_csv(["input", "r", "error", "relative_error"], rows), cfg)
    else:
        _emit(_json({"k": params.k, "n": params.n, "p": cfg.p, "r_schedule": list(phi.r_schedule), "errors": seqs}), cfg)
    return EXIT_OK


def cmd_report(cfg: RunConfig, atoms_path: str | None) -> int:
    params = cfg.params()
    if atoms_path:
        try:
            f = AtomSum.from_json(Path(atoms_path).read_text(), params.n)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load atoms from {atoms_path}: {exc}") from exc
    else:
        f = gaussian(params.n, cfg.s)
    rep = membership_report(f, params, (cfg.alpha, cfg.beta, max(cfg.alpha, cfg.beta)))
    _emit(rep.to_csv() if cfg.format == "csv" else rep.to_json() + "\n", cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    params = cfg.params()
    reports = run_suites(params, cfg.grid, cfg.tolerances, cfg.suites)
    failed = [r.name for r in reports if r.status != "pass"]
    if cfg.format == "csv":
        rows = [(r.name, r.status, float(r.residual), float(r.tolerance), r.details) for r in reports]
        _emit(_csv(["name", "status", "residual", "tolerance", "details"], rows), cfg)
    else:
        doc = {
            "config": {
                "k": params.k,
                "n": params.n,
                "grid": {"u_max": cfg.grid.u_max, "points": cfg.grid.points, "panels": cfg.grid.panels},
                "suites": list(cfg.suites),
            },
            "checks": [r.to_dict() for r in reports],
            "summary": {"total": len(reports), "failed": failed},
        }
        _emit(_json(doc), cfg)
    for r in reports:
        sys.stderr.write(f"{r.status.upper():4s} {r.name}  residual={r.residual:.3e}  tol={r.tolerance:.1e}\n")
    return EXIT_FAILED if failed else EXIT_OK


# ---- argument parsing -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=float, help="multiplicity k")
    common.add_argument("--n", type=int, help="deformation denominator n (a = 2/n)")
    common.add_argument("--s", type=float, help="Gaussian rate s")
    common.add_argument("--p", type=float, help="L^p exponent")
    common.add_argument("--alpha", type=int, help="seminorm range in alpha")
    common.add_argument("--beta", type=int, help="seminorm range in beta")
    common.add_argument("--grid-points", type=int, dest="grid_points", help="quadrature nodes")
    common.add_argument("--u-max", type=float, dest="u_max", help="truncation radius in u = |x|^(1/n)")
    common.add_argument("--tol", action="append", metavar="NAME=VAL", help="override a check tolerance")
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("--config", help="JSON config file; flags take precedence")

    parser = argparse.ArgumentParser(prog="genfourier", description="(k, 2/n)-generalized Fourier transform toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("kernel", parents=[common], help="kernel values and derivative tables")
    sub.add_parser("transform", parents=[common], help="transform a Gaussian and compare with the closed form")
    sub.add_parser("convolve", parents=[common], help="convolution, translation and Young ratios")
    sub.add_parser("density-experiment", parents=[common], help="approximate-identity error sequences")
    rep = sub.add_parser("report", parents=[common], help="Schwartz seminorm table")
    rep.add_argument("--atoms", help="AtomSum JSON file (default: Gaussian with rate s)")
    ver = sub.add_parser("verify", parents=[common], help="run verification suites")
    ver.add_argument("--suite", action="append", help=f"suite name(s): {', '.join(SUITES)}")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        if args.command == "kernel":
            return cmd_kernel(cfg)
        if args.command == "transform":
            return cmd_transform(cfg)
        if args.command == "convolve":
            return cmd_convolve(cfg)
        if args.command == "density-experiment":
            return cmd_density(cfg)
        if args.command == "report":
            return cmd_report(cfg, args.atoms)
        return cmd_verify(cfg)
    except (ConfigError, GenFourierError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
