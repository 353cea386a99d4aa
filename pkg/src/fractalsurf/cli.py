"""Command-line front end.

Subcommands (all take ``--config FILE``):

``build``      construct the surface and export it (csv / pgm / obj)
``verify``     run conformance, interpolation and bound checks, JSON report
``dimension``  theoretical and box-counting dimension, JSON report
``approx``     E and E^alpha ladders and the epsilon procedure, JSON report
``bench``      evaluation throughput, JSON report

Exit status is 0 on success, 1 when a check fails and 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, FractalSurfError, HypothesisUnmet, PointBudgetExceeded
from .config import ExperimentConfig, load_config
from .ifs import orbit_evaluate, orbit_residual, verify_conformance
from .io import export_field
from .report import VerificationReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ORBIT_TARGET = 10_000


def _environment(cfg: ExperimentConfig, **extra) -> dict:
    return {"version": __version__, "config": cfg.describe(), **extra}


def _orbit(family, target=ORBIT_TARGET):
    depth, orbit = 0, orbit_evaluate(family, 0)
    while len(orbit) < target:
        try:
            orbit = orbit_evaluate(family, depth + 1)
        except PointBudgetExceeded:
            break
        depth += 1
    return orbit


def add_surface_checks(report: VerificationReport, cfg: ExperimentConfig, surface) -> None:
    """Conformance, interpolation and residual checks common to both surface kinds."""
    fam = surface.family
    net = cfg.net
    with report.timed("conformance"):
        conf = verify_conformance(fam)
    report.add("corner_conditions", "vertical maps send corner knots to the prescribed data",
               conf.corner_defect, conf.tolerance)
    report.add("matching_conditions", "neighbouring maps agree along shared interior lines",
               conf.matching_defect, conf.tolerance)
    with report.timed("grid_solve"):
        sol = surface.solve()
    fld = sol.field
    report.results["grid"] = {"resolution": list(fld.resolution), "iterations": sol.iterations,
                              "residual": sol.residual}
    knot_vals = fld(*net.knot_grid())
    report.add("knot_interpolation_grid", "attractor interpolates the data at every knot (grid engine)",
               float(np.max(np.abs(knot_vals - fam.knot_values))), 1e-8)
    report.add("grid_fixed_point_residual", "grid iterate is a fixed point of the RB operator",
               sol.residual, surface.tol)
    with report.timed("orbit"):
        orbit = _orbit(fam)
        res = orbit_residual(fam, orbit)
    KX, KY = net.knot_grid()
    knot_orbit = orbit.lookup(net)(KX.ravel(), KY.ravel())
    report.results["orbit"] = {"depth": orbit.depth, "points": len(orbit)}
    report.add("knot_interpolation_orbit", "attractor interpolates the data at every knot (orbit engine)",
               float(np.max(np.abs(knot_orbit - fam.knot_values.ravel()))), 1e-12)
    report.add("self_referential_residual", "orbit points satisfy the self-referential equation",
               float(res.max()), 1e-12, note=f"{len(orbit)} orbit points")


def add_alpha_checks(report: VerificationReport, cfg: ExperimentConfig, surface) -> None:
    from .alpha import operator_norm_bounds, perturbation_bound
    from .analysis import verify_lp_bound

    fld = surface.field()
    X, Y = fld.mesh_grid()
    lhs = float(np.max(np.abs(fld.values - cfg.f(X, Y))))
    report.add("perturbation_bound", "||f^a - f|| <= ||a||/(1-||a||) ||f - Lf|| (sup norm)",
               lhs, perturbation_bound(surface), 1e-8)
    nb = operator_norm_bounds(cfg.operator, cfg.alpha)
    report.results["norm_bounds"] = {k: v for k, v in vars(nb).items()}
    for p in cfg.analysis.get("lp", []):
        with report.timed(f"lp_{p}"):
            r = verify_lp_bound(cfg.f, surface, float(p))
        report.add(f"lp_bound_p{p}", "||f^a - f||_p <= ||a||/(1-||a||) ||f - Lf||_p (midpoint quadrature)",
                   r.lhs, r.rhs, r.slack)
    spec = cfg.analysis.get("approx")
    if spec:
        add_chain_check(report, cfg, int(spec.get("m", 2)), int(spec.get("n", 2)), int(spec.get("grid_res", 129)))


def add_dimension_checks(report: VerificationReport, cfg: ExperimentConfig, surface, grid_res=1025,
                         k_min=3, k_max=9, tolerance=0.2, residual_limit=0.05) -> None:
    from .analysis import box_count_dimension
    from .bilinear import theoretical_box_dimension

    with report.timed("dimension_solve"):
        fld = surface.field(grid_res)
    with report.timed("box_count"):
        bc = box_count_dimension(fld, k_min, k_max, residual_limit)
    report.results["box_count"] = bc.as_dict()
    report.add("box_fit_residual", "log-log fit residual of the box counts", bc.residual, residual_limit)
    if cfg.surface != "bilinear":
        report.results["theoretical"] = None
        return
    try:
        verdict = theoretical_box_dimension(cfg.bilinear, cfg.net)
    except HypothesisUnmet as exc:
        report.results["theoretical"] = {"withheld": str(exc)}
        return
    report.results["theoretical"] = vars(verdict)
    report.add("box_dimension", "box-counting estimate agrees with 1 + log(gamma)/log(N) (or 2)",
               abs(bc.dimension - verdict.predicted), tolerance)


def _load(args):
    cfg = load_config(args.config)
    return cfg, cfg.build()


def _emit(report: VerificationReport, path) -> int:
    text = report.to_json()
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for c in report.checks:
        if not c.passed:
            print(f"FAIL {c.name}: {c.lhs!r} > {c.rhs!r} + {c.slack!r}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_build(args) -> int:
    cfg, surface = _load(args)
    out = cfg.output
    directory = Path(args.out) if args.out else out["dir"]
    formats = args.format or out["formats"]
    res = out["grid_res"] or cfg.solver["grid_res"]
    report = VerificationReport("build", environment=_environment(cfg, grid_res=res))
    with report.timed("solve"):
        sol = surface.solve(res)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    with report.timed("export"):
        for fmt in formats:
            path = directory / f"{out['stem']}.{fmt}"
            export_field(sol.field, fmt, path)
            written.append(str(path))
    report.results.update(files=written, iterations=sol.iterations, residual=sol.residual)
    return _emit(report, args.report or out["report"])


def cmd_verify(args) -> int:
    cfg, surface = _load(args)
    report = VerificationReport("verify", environment=_environment(cfg))
    add_surface_checks(report, cfg, surface)
    if cfg.surface == "alpha":
        add_alpha_checks(report, cfg, surface)
    dim = cfg.analysis.get("dimension")
    if dim:
        add_dimension_checks(report, cfg, surface, **(dim if isinstance(dim, dict) else {}))
    return _emit(report, args.report or cfg.output["report"])


def cmd_dimension(args) -> int:
    cfg, surface = _load(args)
    dim = cfg.analysis.get("dimension")
    params = dict(dim) if isinstance(dim, dict) else {}
    for key in ("grid_res", "k_min", "k_max", "tolerance"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    report = VerificationReport("dimension", environment=_environment(cfg, **params))
    add_dimension_checks(report, cfg, surface, **params)
    return _emit(report, args.report)


def cmd_approx(args) -> int:
    from .approx import best_approx, best_fractal_approx, epsilon_fractal_polynomial, poly_basis

    cfg, _ = _load(args)
    if cfg.surface != "alpha":
        print("error: approx needs an alpha surface config", file=sys.stderr)
        return EXIT_USAGE
    spec = dict(cfg.analysis.get("approx") or {})
    m = args.m if args.m is not None else int(spec.get("m", 2))
    n = args.n if args.n is not None else int(spec.get("n", 2))
    eps = args.eps if args.eps is not None else float(spec.get("eps", 0.1))
    max_degree = args.max_degree if args.max_degree is not None else int(spec.get("max_degree", 8))
    res = int(spec.get("grid_res", 129))
    report = VerificationReport("approx", environment=_environment(cfg, m=m, n=n, eps=eps,
                                                                    max_degree=max_degree, grid_res=res))
    ladder = []
    with report.timed("ladders"):
        for total in range(0, m + n + 1):
            mi, ni = (total + 1) // 2, total // 2
            e = best_approx(cfg.f, poly_basis(mi, ni, cfg.net.domain), res).error
            ea = best_fractal_approx(cfg.f, mi, ni, cfg.alpha, cfg.operator, cfg.net, res).error
            ladder.append({"total_degree": total, "E": e, "E_alpha": ea})
    report.results["ladder"] = ladder
    add_chain_check(report, cfg, m, n, res)
    with report.timed("epsilon"):
        try:
            r = epsilon_fractal_polynomial(cfg.f, eps, cfg.operator, cfg.net, max_degree=max_degree, grid_res=res)
        except FractalSurfError as exc:
            report.add("epsilon_procedure", "fractal polynomial within eps of f", None, eps,
                       passed=False, note=str(exc))
        else:
            report.results["epsilon"] = {"alpha": r.alpha, "alpha_threshold": r.alpha_threshold,
                                         "degree": r.degree, "stage": r.stage,
                                         "polynomial_error": r.polynomial_error, "achieved": r.achieved_error}
            report.add("epsilon_procedure", "fractal polynomial within eps of f", r.achieved_error, eps,
                       passed=r.achieved_error < eps)
            report.add("epsilon_alpha_threshold", "|alpha| below (eps/2)/(eps/2 + ||Id-L|| ||p||)",
                       abs(r.alpha), r.alpha_threshold, passed=abs(r.alpha) < r.alpha_threshold)
    return _emit(report, args.report)


def add_chain_check(report: VerificationReport, cfg: ExperimentConfig, m: int, n: int, res: int) -> None:
    from .approx import verify_approx_chain

    with report.timed("approx_chain"):
        ch = verify_approx_chain(cfg.f, m, n, cfg.alpha, cfg.operator, cfg.net, res)
    report.results["approx_chain"] = vars(ch)
    report.add("approx_chain", "E^a <= (1+||a||(||Id-L||-1))/(1-||a||) E + ||a|| ||Id-L||/(1-||a||) ||f||",
               ch.lhs, ch.rhs, ch.slack)


def cmd_bench(args) -> int:
    from .ifs import trace_evaluate

    cfg, surface = _load(args)
    report = VerificationReport("bench", environment=_environment(cfg, points=args.points, repeat=args.repeat))
    rng = np.random.default_rng(0)
    (x0, x1), (y0, y1) = cfg.net.domain
    x = rng.uniform(x0, x1, args.points)
    y = rng.uniform(y0, y1, args.points)
    best = {}
    for _ in range(args.repeat):
        surface._solutions.clear()
        t = time.perf_counter()
        sol = surface.solve()
        best["grid_solve_s"] = min(best.get("grid_solve_s", np.inf), time.perf_counter() - t)
        t = time.perf_counter()
        surface(x, y, engine="grid")
        best["grid_lookup_s"] = min(best.get("grid_lookup_s", np.inf), time.perf_counter() - t)
        t = time.perf_counter()
        trace_evaluate(surface.family, x, y)
        best["trace_eval_s"] = min(best.get("trace_eval_s", np.inf), time.perf_counter() - t)
    report.timings.update(best)
    report.timings["grid_nodes_per_s"] = sol.field.values.size * sol.iterations / best["grid_solve_s"]
    report.timings["trace_points_per_s"] = args.points / best["trace_eval_s"]
    report.results["grid"] = {"resolution": list(sol.field.resolution), "iterations": sol.iterations}
    return _emit(report, args.report)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fractalsurf", description="Fractal interpolation surfaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--report", help="write the JSON report here instead of stdout")
        p.set_defaults(func=func)
        return p

    p = command("build", cmd_build, "construct the surface and export it")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--format", action="append", choices=["csv", "pgm", "obj"],
                   help="export format; repeatable (overrides output.formats)")
    command("verify", cmd_verify, "run the verification suite")
    p = command("dimension", cmd_dimension, "theoretical and estimated box dimension")
    p.add_argument("--grid-res", type=int)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--tolerance", type=float)
    p = command("approx", cmd_approx, "polynomial and fractal-polynomial approximation")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--max-degree", type=int)
    p = command("bench", cmd_bench, "evaluation throughput")
    p.add_argument("--points", type=int, default=100_000)
    p.add_argument("--repeat", type=int, default=3)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FractalSurfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main(argv=None):
    sys.exit(run_cli(argv))
