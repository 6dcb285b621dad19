"""Command-line front end.

Exit codes: 0 command completed (a diverging iteration is a valid result),
1 usage or input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .closed_form import (
    convergence_factor,
    iteration_matrix,
    rho_over,
    theta_equioscillation,
)
from .config import CaseConfig, load_case
from .engine import InterfaceState, SpectrumRunError, run_spectrum
from .oracle import ModeData, dual_residual, monolithic_solve, residual_check
from .plotscript import SCRIPT
from .spectral import explicit_spectrum, laplacian_1d_spectrum, mode_params
from .tuning import OptimizationError, optimize_theta
from .variants import CONVERGENT, DIVERGENT, Variant

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

DIVERGENT_NOTE = "divergent for all theta>0"
NO_EQUIOSCILLATION = "no positive equioscillation"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _variant(tag: str) -> Variant:
    try:
        return Variant.parse(tag)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(p, variant=True, theta=True, grid=True):
    p.add_argument("--case", default="case-a", help="preset name or JSON case file (default case-a)")
    if variant:
        p.add_argument("--variant", type=_variant, required=True)
    if theta:
        p.add_argument("--theta", type=float)
        p.add_argument("--theta1", type=float)
        p.add_argument("--theta2", type=float)
    if grid:
        p.add_argument("--dmin", type=float)
        p.add_argument("--dmax", type=float)
        p.add_argument("--points", type=int)
    p.add_argument("--out", help="output file or directory")
    p.add_argument("--json", action="store_true", help="print a machine-readable summary")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tddnn", description="Neumann-Neumann time decomposition for parabolic control")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rho", help="convergence factor over a log grid of eigenvalues")
    _common(p)

    p = sub.add_parser("theta-opt", help="equioscillation and numerically optimal theta")
    _common(p, theta=False)
    p.add_argument("--mode", choices=("formula", "numeric", "both"), default="both")

    p = sub.add_parser("iterate", help="run the exact per-mode iteration and compare rates")
    _common(p)
    p.add_argument("--d", type=float, action="append", help="single eigenvalue (repeatable)")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument(
        "--init",
        type=float,
        nargs="+",
        metavar="F [G]",
        help="initial interface data (default 1 1; 1 0.5 for the raw formulations)",
    )

    p = sub.add_parser("figures", help="data behind the convergence-factor figures")
    _common(p, variant=False, theta=False)
    p.add_argument("--no-script", action="store_true", help="do not write plot_figures.py")

    p = sub.add_parser("spectrum", help="eigenvalues of the 1D Dirichlet Laplacian")
    p.add_argument("--n", type=int, default=50, help="interior grid points")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("oracle", help="monolithic finite-difference solve for one mode")
    _common(p, variant=False, theta=False, grid=False)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--nt", type=int, default=200)
    p.add_argument("--z0", type=float, default=1.0)
    p.add_argument("--zhat", type=float, default=0.0, help="constant target value")
    return parser


def _case(args) -> CaseConfig:
    try:
        cfg = load_case(args.case)
    except (ValueError, KeyError, OSError) as exc:
        raise UsageError(str(exc)) from exc
    if getattr(args, "dmin", None) is not None or getattr(args, "dmax", None) is not None or getattr(
        args, "points", None
    ) is not None:
        base = cfg.d_grid if not cfg.explicit else (1e-2, 1e2, 200)
        grid = (
            base[0] if args.dmin is None else args.dmin,
            base[1] if args.dmax is None else args.dmax,
            base[2] if args.points is None else args.points,
        )
        cfg = cfg.with_overrides(d_grid=grid, explicit=False)
    return cfg


def _spectrum(cfg: CaseConfig):
    try:
        return cfg.spectrum()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _thetas(args, variant: Variant, cfg: CaseConfig, fallback=None):
    """(theta1, theta2) from flags, then the case file, then ``fallback``."""
    t1 = args.theta1 if args.theta1 is not None else args.theta
    t2 = args.theta2
    if t1 is None:
        configured = cfg.theta_for(variant)
        if isinstance(configured, (list, tuple)):
            t1, t2 = float(configured[0]), float(configured[1])
        elif configured is not None:
            t1 = float(configured)
    if t1 is None:
        if fallback is None:
            raise UsageError(f"{variant}: give --theta")
        return fallback
    if not math.isfinite(t1) or (t2 is not None and not math.isfinite(t2)):
        raise UsageError("theta must be finite")
    if variant.two_unknowns:
        return t1, (t1 if t2 is None else t2)
    if t2 is not None:
        raise UsageError(f"{variant} has a single relaxation parameter")
    return t1, None


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_rho(args) -> int:
    cfg = _case(args)
    spectrum = _spectrum(cfg)
    t1, t2 = _thetas(args, args.variant, cfg)
    d = spectrum.as_array()
    rho = rho_over(args.variant, cfg.problem, d, t1, t2)
    io.write_rho_csv(args.out or sys.stdout, d, rho)
    if args.json:
        i = int(np.argmax(rho))
        summary = {
            "variant": args.variant.value,
            "case": cfg.name,
            "thetas": [t1] if t2 is None else [t1, t2],
            "rho_max": rho[i],
            "d_at_max": d[i],
            "rho_min": float(np.min(rho)),
        }
        print(io.dumps(summary), file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def theta_report(variant: Variant, cfg: CaseConfig, mode: str = "both") -> dict:
    problem = cfg.problem
    report = {"variant": variant.value, "case": cfg.name, "mode": mode}
    if variant in DIVERGENT:
        report["status"] = DIVERGENT_NOTE
        return report
    if variant.analysis_only:
        raise UsageError(f"{variant} is an analysis-only formulation with a unit eigenvalue")
    formula = None
    if mode in ("formula", "both") and variant is not Variant.NN1a:
        eq = theta_equioscillation(variant, problem)
        formula = eq.theta
        entry = {
            "theta": eq.theta,
            "valid": eq.valid,
            "rho_at_zero": eq.rho_at_zero,
            "rho_at_infinity": eq.rho_at_infinity,
        }
        if not eq.valid:
            entry["flag"] = NO_EQUIOSCILLATION
        elif not eq.converges:
            entry["flag"] = "equioscillation value does not converge at d=0"
        report["formula"] = entry
    elif mode in ("formula", "both"):
        report["formula"] = {"status": "no closed-form optimum for two parameters"}
    if mode in ("numeric", "both"):
        opt = optimize_theta(variant, cfg.spectrum(), problem)
        report["numeric"] = {
            "theta": opt.theta,
            "thetas": list(opt.thetas),
            "rho": opt.rho,
            "evaluations": opt.evaluations,
        }
        if variant is Variant.NN1c and not theta_equioscillation(variant, problem).valid:
            report["flag"] = NO_EQUIOSCILLATION
        if formula is not None:
            report["gap"] = abs(formula - opt.theta)
    return report


def cmd_theta_opt(args) -> int:
    cfg = _case(args)
    _spectrum(cfg)
    report = theta_report(args.variant, cfg, args.mode)
    _emit(io.dumps(report) + "\n", args.out)
    return EXIT_OK


def _default_theta(variant: Variant, cfg: CaseConfig):
    if variant in DIVERGENT or variant.analysis_only:
        return (0.5, 0.5 if variant.two_unknowns else None)
    opt = optimize_theta(variant, cfg.spectrum(), cfg.problem)
    return (opt.thetas[0], opt.thetas[1] if len(opt.thetas) > 1 else None)


def _init(args, variant: Variant) -> InterfaceState:
    values = args.init
    if values is None:
        # off the invariant line f = g so the unit eigenvalue shows
        return InterfaceState(1.0, 0.5 if variant.analysis_only else 1.0) if variant.two_unknowns else InterfaceState(1.0)
    if len(values) != (2 if variant.two_unknowns else 1):
        raise UsageError(f"{variant} needs {2 if variant.two_unknowns else 1} value(s) for --init")
    return InterfaceState(*values)


def cmd_iterate(args) -> int:
    cfg = _case(args)
    variant = args.variant
    if args.max_iter < 2 or not args.tol > 0:
        raise UsageError("need --max-iter >= 2 and --tol > 0")
    spectrum = explicit_spectrum(args.d) if args.d else _spectrum(cfg)
    t1, t2 = _thetas(args, variant, cfg, fallback=_default_theta(variant, cfg))
    init = _init(args, variant)
    out = Path(args.out or "iterate_out")
    traces_dir = out / "traces"
    traces_dir.mkdir(parents=True, exist_ok=True)

    try:
        traces = run_spectrum(variant, spectrum, cfg.problem, t1, t2, args.max_iter, args.tol, init)
    except SpectrumRunError as exc:
        # report the modes that did run before failing
        traces = exc.traces
        failure = str(exc)
    else:
        failure = None

    modes = []
    for tr in traces:
        mode = mode_params(cfg.problem, tr.d)
        theory = float(convergence_factor(variant, mode, t1, t2))
        io.write_trace_csv(traces_dir / io.trace_filename(variant, tr.d), tr)
        entry = {
            "d": tr.d,
            "iterations": tr.iterations,
            "converged": tr.converged,
            "diverged": tr.diverged,
            "rho_observed": tr.rho_observed,
            "rho_theory": theory,
            "relative_gap": abs(tr.rho_observed - theory) / theory if theory > 0 else math.nan,
        }
        if variant.analysis_only:
            eig = iteration_matrix(variant, mode, t1, t2).eigenvalues()
            entry["eigenvalues"] = [list(e) for e in eig]
            entry["stagnation"] = "unit eigenvalue"
        modes.append(entry)
    summary = {
        "variant": variant.value,
        "case": cfg.name,
        "thetas": [t1] if t2 is None else [t1, t2],
        "max_iter": args.max_iter,
        "tol": args.tol,
        "init": [init.f] if init.g is None else [init.f, init.g],
        "modes": modes,
    }
    if variant.analysis_only:
        summary["stagnation"] = "unit eigenvalue"
    if failure:
        summary["failure"] = failure
    io.write_json(out / "summary.json", summary)
    if args.json:
        print(io.dumps(summary))
    if failure:
        print(f"error: {failure}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


FIG_PAIRS = ((1.0, 1.0), (0.8, 0.2), (1.2, 1.8))


def _label(t):
    return "theta_" + "_".join(f"{x:g}" for x in t)


def write_figures(cfg: CaseConfig, out: Path, script: bool = True) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    problem = cfg.problem
    spectrum = _spectrum(cfg)
    d = spectrum.as_array()
    tag = cfg.name
    files = {}

    def save(name, cols, header):
        path = out / f"{name}_{tag}.csv"
        io.write_rho_csv(path, d, cols, header=("d",) + tuple(header))
        files[name] = str(path)

    save("divergence", [rho_over(v, problem, d, 0.25) for v in DIVERGENT], [v.value for v in DIVERGENT])
    save(
        "nn1a",
        [rho_over(Variant.NN1a, problem, d, *t) for t in FIG_PAIRS],
        [_label(t) for t in FIG_PAIRS],
    )
    save("half", [rho_over(v, problem, d, 0.5) for v in CONVERGENT], [v.value for v in CONVERGENT])
    optima = {v.value: optimize_theta(v, spectrum, problem).theta for v in CONVERGENT}
    save(
        "optimal",
        [rho_over(v, problem, d, optima[v.value]) for v in CONVERGENT],
        [v.value for v in CONVERGENT],
    )
    io.write_json(out / f"optimal_thetas_{tag}.json", optima)
    files["optimal_thetas"] = str(out / f"optimal_thetas_{tag}.json")
    if script:
        (out / "plot_figures.py").write_text(SCRIPT)
        files["script"] = str(out / "plot_figures.py")
    return files


def cmd_figures(args) -> int:
    cfg = _case(args)
    files = write_figures(cfg, Path(args.out or "figures"), script=not args.no_script)
    if args.json:
        print(io.dumps({"case": cfg.name, "files": files}))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    spectrum = laplacian_1d_spectrum(args.n)
    io.write_spectrum_csv(spectrum, args.out or sys.stdout)
    if args.json:
        print(io.dumps({"source": spectrum.source, "count": len(spectrum)}), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = _case(args)
    if args.nt < 2:
        raise UsageError("--nt must be >= 2")
    try:
        mode = mode_params(cfg.problem, args.d)
        data = ModeData(args.z0, np.full(args.nt + 1, args.zhat), args.nt)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sol = monolithic_solve(mode, data)
    io.write_solution_csv(args.out or sys.stdout, sol)
    if args.json:
        report = {
            "case": cfg.name,
            "d": args.d,
            "nt": args.nt,
            "residual": residual_check(sol, mode, data),
            "dual_residual": dual_residual(sol, mode, data),
        }
        print(io.dumps(report), file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


COMMANDS = {
    "rho": cmd_rho,
    "theta-opt": cmd_theta_opt,
    "iterate": cmd_iterate,
    "figures": cmd_figures,
    "spectrum": cmd_spectrum,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"tddnn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"tddnn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, OptimizationError, SpectrumRunError) as exc:
        print(f"tddnn {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"tddnn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
