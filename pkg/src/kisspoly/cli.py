"""Command-line front end.

Subcommands wrap the library modules and emit reproducible CSV/JSON/SVG
artifacts (schema + provenance headers, no timestamps, byte-identical
reruns).  Exit codes: 0 success, 2 validation error, 3 numerical failure,
4 theta-divisor refusal.  The environment variable KISSPOLY_PRECISION
("double" or "extended[:dps]") selects the default precision mode for the
polynomial layer.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from ._io import SvgCanvas, provenance, write_csv, write_json
from .errors import KisspolyError, ThetaStarError, ValidationError
from .moments import raw_moments
from .polynomials import existence_scan, monic_op, zeros_of
from .precision import default_mode_from_env
from .quadrature import apply_rule, build_rule, order_fit, oscillatory_oracle
from .spectral import lambda_crit, psi, solve_boutroux

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_THETA_STAR = 4


def _outdir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _config_dict(args):
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def cmd_poly(args):
    out = _outdir(args)
    omega = args.omega if args.omega is not None else args.n * args.lam
    if omega is None:
        raise ValidationError("either --omega or --lam is required")
    dps = default_mode_from_env()
    p = monic_op(args.n, omega, dps=dps)
    zs = zeros_of(p)
    prov = provenance(_config_dict(args), p.dps)
    coeffs = [complex(c) for c in p.coeffs]
    write_json(os.path.join(out, "poly.json"), "poly", {
        "n": p.degree, "omega": p.omega, "cond": p.cond,
        "residual": p.residual, "norm_sq": complex(p.norm_sq),
        "coefficients": coeffs,
        "zeros": list(zs.zeros),
        "imaginary_zero_index": zs.imaginary_axis_index,
    }, prov)
    write_csv(os.path.join(out, "poly_zeros.csv"), "poly-zeros",
              ["re", "im", "is_imaginary_axis"],
              [(z.real, z.imag, int(i == zs.imaginary_axis_index))
               for i, z in enumerate(zs.zeros)], prov)
    if args.svg:
        canvas = SvgCanvas()
        canvas.polyline([-1.0, 1.0], stroke="#999999", width=0.8)
        canvas.markers(zs.zeros)
        canvas.write(os.path.join(out, "poly_zeros.svg"))
    print(f"poly: n={p.degree} omega={p.omega} cond={p.cond:.3e} -> {out}")
    return EXIT_OK


def cmd_boutroux(args):
    out = _outdir(args)
    curve = solve_boutroux(args.lam)
    from .spectral import segment_cut_integral
    half = segment_cut_integral(args.lam, curve.x_star, "right")
    prov = provenance(_config_dict(args), None,
                      {"xtol": 1e-12, "half_mass_tol": 1e-6})
    write_json(os.path.join(out, "boutroux.json"), "boutroux", {
        "lambda": curve.lam, "lambda_crit": lambda_crit(),
        "x_star": curve.x_star, "z_star": curve.z_star,
        "kappa": curve.kappa, "psi_at_x_star": psi(curve.x_star, curve.lam),
        "half_mass_residual": abs(half - 0.5j * np.pi),
    }, prov)
    print(f"boutroux: lam={curve.lam} x_*={curve.x_star:.12f} "
          f"kappa={curve.kappa:.12f} -> {out}")
    return EXIT_OK


def _build_graph(lam):
    from .trajectories import build_critical_graph, gamma_hat
    curve = solve_boutroux(lam)
    graph = build_critical_graph(curve)
    ghat = gamma_hat(curve, graph)
    return curve, graph, ghat


def cmd_graph(args):
    out = _outdir(args)
    from .trajectories import arc_csv_rows
    curve, graph, ghat = _build_graph(args.lam)
    prov = provenance(_config_dict(args), None)
    for name in ("gamma1", "gamma2", "gamma_hat_traj", "escape"):
        rows = arc_csv_rows(graph, name)
        write_csv(os.path.join(out, f"arc_{name}.csv"), "trajectory-arc",
                  ["re", "im", "cum_integral_im", "density"], rows, prov)
    write_json(os.path.join(out, "graph.json"), "critical-graph", {
        "lambda": curve.lam, "x_star": curve.x_star, "kappa": curve.kappa,
        "mu_mass_gamma2": graph.mu_mass_gamma2,
        "classification": {"gamma2": graph.gamma2.end_kind,
                           "connecting": "axis",
                           "escape": graph.escape.end_kind},
        "gamma_hat": list(np.asarray(ghat.vertices)),
    }, prov)
    if args.svg:
        canvas = SvgCanvas()
        canvas.markers([1.0 + 0j, -1.0 + 0j, curve.z_star,
                        -np.conj(curve.z_star)], fill="#000000", radius=3.0)
        canvas.polyline(graph.gamma1.points, stroke="#1f77b4", width=2.0)
        canvas.polyline(graph.gamma2.points, stroke="#1f77b4", width=2.0)
        canvas.polyline(graph.gamma_hat_traj.points, stroke="#2ca02c")
        canvas.polyline(graph.escape.points, stroke="#9467bd")
        canvas.polyline(-np.conj(graph.escape.points), stroke="#9467bd")
        canvas.polyline(np.asarray(ghat.vertices), stroke="#ff7f0e", dashed=True)
        if args.overlay_n:
            p = monic_op(args.overlay_n, args.overlay_n * args.lam,
                         dps=default_mode_from_env())
            canvas.markers(zeros_of(p).zeros)
        canvas.write(os.path.join(out, "critical_graph.svg"))
    print(f"graph: lam={curve.lam} mass(gamma2)={graph.mu_mass_gamma2:.8f} -> {out}")
    return EXIT_OK


def cmd_asymptotics(args):
    out = _outdir(args)
    import mpmath as mp
    from .parametrix import Parametrix
    curve, graph, ghat = _build_graph(args.lam)
    pmx = Parametrix(graph, ghat)
    sol = pmx.solution(args.n, 1)
    p = monic_op(args.n, args.n * args.lam, dps=default_mode_from_env())
    re0, re1, im0, im1, steps = args.grid
    rows = []
    for re in np.linspace(re0, re1, int(steps)):
        for im in np.linspace(im0, im1, int(steps)):
            z = complex(re, im)
            if min(np.min(np.abs(graph.arc_curve.gamma1 - z)),
                   np.min(np.abs(graph.arc_curve.gamma2 - z))) < 0.15:
                continue
            if abs(z - sol.a_star) < 0.15 and args.n % 2 == 1:
                continue
            log_hat = pmx.strong_log(args.n, z)
            with mp.workdps((p.dps or 15) + 20):
                pv = p(z) if p.dps else complex(p(z))
                rel = abs(complex(mp.exp(complex(log_hat) - mp.log(pv))) - 1.0)
            rows.append((z.real, z.imag, rel))
    prov = provenance(_config_dict(args), p.dps)
    write_csv(os.path.join(out, "asymptotic_vs_exact.csv"), "asymptotics",
              ["re", "im", "rel_err"], rows, prov)
    write_json(os.path.join(out, "periods.json"), "period-solution", {
        "lambda": args.lam, "n": args.n,
        "a_star": sol.a_star, "b_star": sol.b_star,
        "m_A0": sol.periods.mA0, "m_A1": sol.periods.mA1,
        "m_B0": sol.periods.mB0, "m_B1": sol.periods.mB1,
        "c_const": sol.periods.c_const,
        "parity_nu": sol.periods.parity_nu,
        "parity_sigma": sol.periods.parity_sigma,
        "theta_proximity": sol.theta_proximity,
        "residual_A": sol.residual_A, "residual_B": sol.residual_B,
    }, prov)
    worst = max((r[2] for r in rows), default=float("nan"))
    print(f"asymptotics: lam={args.lam} n={args.n} grid pts={len(rows)} "
          f"worst rel err={worst:.3e} -> {out}")
    return EXIT_OK


def cmd_quadrature(args):
    out = _outdir(args)
    grid = np.geomspace(args.omega_from, args.omega_to, args.steps)
    slope, used, skipped = order_fit(args.n_half, np.exp, grid)
    prov = provenance(_config_dict(args), None, {"oracle_tol": 1e-14})
    write_csv(os.path.join(out, "order_fit.csv"), "quadrature-order",
              ["omega", "abs_error", "fitted_slope"],
              [(om, err, slope) for om, err in used], prov)
    rule = build_rule(args.n_half, float(grid[0]))
    write_json(os.path.join(out, "rule.json"), "quadrature-rule", {
        "omega": rule.omega, "n_half": rule.n_half,
        "nodes": [_mp25(z) for z in rule.nodes_mp],
        "weights": [_mp25(w) for w in rule.weights_mp],
        "fitted_slope": slope,
        "skipped": [{"omega": om, "reason": why} for om, why in skipped],
    }, prov)
    print(f"quadrature: n_half={args.n_half} slope={slope:.3f} "
          f"({len(used)} pts, {len(skipped)} skipped) -> {out}")
    return EXIT_OK


def _mp25(z):
    import mpmath as mp
    with mp.workdps(25):
        return {"re": mp.nstr(mp.mpf(z.real) if not isinstance(z, complex)
                              else mp.mpf(complex(z).real), 25),
                "im": mp.nstr(mp.mpf(complex(z).imag), 25)}


def cmd_theta_scan(args):
    out = _outdir(args)
    from .parametrix import theta_star_scan
    lams, vals, crossings = theta_star_scan(args.lo, args.hi, args.steps)
    prov = provenance(_config_dict(args), None)
    write_csv(os.path.join(out, "theta_scan.csv"), "theta-scan",
              ["lambda", "two_kappa_minus_c"],
              list(zip(lams, vals)), prov)
    write_json(os.path.join(out, "theta_crossings.json"), "theta-crossings", {
        "lo": args.lo, "hi": args.hi, "steps": args.steps,
        "crossings": crossings,
        "range": [float(np.min(vals)), float(np.max(vals))],
    }, prov)
    print(f"theta-scan: [{args.lo}, {args.hi}] crossings={crossings} -> {out}")
    return EXIT_OK


def cmd_existence(args):
    out = _outdir(args)
    points = existence_scan(args.n, args.lo, args.hi, args.steps)
    prov = provenance(_config_dict(args), None)
    write_csv(os.path.join(out, "existence_scan.csv"), "existence-scan",
              ["lambda", "cond", "flagged"],
              [(p.lam, p.cond, int(p.flagged)) for p in points], prov)
    flagged = [p.lam for p in points if p.flagged]
    print(f"existence: n={args.n} flagged {len(flagged)} of {len(points)} -> {out}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="kisspoly",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", help="construct p_n and its zeros")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lam", "--lambda", dest="lam", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--svg", action="store_true")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("boutroux", help="solve the Boutroux condition")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_boutroux)

    p = sub.add_parser("graph", help="trace the critical graph")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
    p.add_argument("--svg", action="store_true")
    p.add_argument("--overlay-n", type=int, default=0,
                   help="overlay zeros of p_n on the SVG")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("asymptotics", help="strong asymptotics vs exact p_n")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", type=float, nargs=5,
                   default=[-2.0, 2.0, -1.5, 2.0, 5],
                   metavar=("RE0", "RE1", "IM0", "IM1", "STEPS"))
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("quadrature", help="build rules and fit the error order")
    p.add_argument("--n-half", type=int, required=True)
    p.add_argument("--omega-from", type=float, default=20.0)
    p.add_argument("--omega-to", type=float, default=200.0)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_quadrature)

    p = sub.add_parser("theta-scan", help="scan (2 kappa - c) mod 2 pi")
    p.add_argument("--from", dest="lo", type=float, required=True)
    p.add_argument("--to", dest="hi", type=float, required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_theta_scan)

    p = sub.add_parser("existence", help="conditioning scan over lambda")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--from", dest="lo", type=float, required=True)
    p.add_argument("--to", dest="hi", type=float, required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_existence)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_VALIDATION
    try:
        return args.func(args)
    except ThetaStarError as exc:
        print(json.dumps({"error": {"type": "THETA_STAR", "message": str(exc),
                                    "proximity": exc.proximity,
                                    "lambda": exc.lam}}, sort_keys=True))
        return EXIT_THETA_STAR
    except ValidationError as exc:
        print(json.dumps({"error": {"type": "VALIDATION",
                                    "message": str(exc)}}, sort_keys=True))
        return EXIT_VALIDATION
    except KisspolyError as exc:
        print(json.dumps({"error": {"type": type(exc).__name__,
                                    "message": str(exc)}}, sort_keys=True))
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
