"""Command-line front end: solve, bench, geometry, problems.

Exit codes: 0 for clean termination (solved, or geometry certified), 2 for
degraded outcomes (budget or objective-failure exits, a set that is not
poised at the requested bound), 1 for errors (unknown names, unreadable
files, infeasible or rank-deficient input sets).

Output files land in --out, else $PROJDFO_OUTPUT_DIR, else the working
directory. Every CSV starts with a `# schema=1` comment; identical
arguments and seeds produce byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .bench import (PROFILE_TAUS, bench_instance, format_profile,
                    format_records, performance_profile, read_records,
                    run_benchmark)
from .geometry import GeometryError, InterpolationSet, poisedness_constant
from .problems import NOISE_KINDS, NoiseSpec, by_name, suite
from .regions import contains, load_region, whole_space
from .solver import (REASON_BUDGET, REASON_FAILURE, SolverConfig,
                     write_trace)

SOLVER_FLAGS = [
    # (flag dest, type, help)
    ("delta0", float, "initial trust-region radius"),
    ("delta_max", float, "largest allowed radius"),
    ("gamma_dec", float, "radius shrink factor"),
    ("gamma_inc", float, "radius growth factor"),
    ("eps_crit", float, "criticality threshold"),
    ("mu", float, "criticality radius coupling"),
    ("eta", float, "acceptance ratio threshold"),
    ("cauchy_coeff", float, "required decrease coefficient"),
    ("poisedness", float, "interpolation poisedness bound"),
    ("spread", float, "interpolation containment factor"),
    ("max_evaluations", int, "objective evaluation budget"),
    ("delta_end", float, "radius termination threshold"),
    ("pi_tol", float, "criticality termination threshold"),
    ("rng_seed", int, "geometry tie-break seed"),
]


def _output_dir(flag_value) -> Path:
    root = flag_value or os.environ.get("PROJDFO_OUTPUT_DIR") or "."
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _solver_config(args) -> SolverConfig:
    overrides = {}
    for name, _, _ in SOLVER_FLAGS:
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.noise_mode is not None:
        overrides["noise_mode"] = args.noise_mode
    elif args.noise != "none" and args.sigma > 0.0:
        overrides["noise_mode"] = True
    return SolverConfig(**overrides)


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    for name, kind, text in SOLVER_FLAGS:
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name,
                            type=kind, default=None, help=text)
    parser.add_argument("--noise-mode", dest="noise_mode",
                        action=argparse.BooleanOptionalAction, default=None,
                        help="use the conservative noisy-run shrink factor")


def _add_noise_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--noise", choices=NOISE_KINDS, default="none",
                        help="residual noise kind")
    parser.add_argument("--sigma", type=float, default=1e-2,
                        help="noise standard deviation (with --noise)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for noise streams")


def cmd_solve(args) -> int:
    try:
        problem = by_name(args.problem)
    except KeyError:
        print(f"unknown problem: {args.problem}", file=sys.stderr)
        return 1
    noise = NoiseSpec(args.noise, args.sigma if args.noise != "none" else 0.0)
    run = bench_instance(problem, args.constraint, noise,
                         config=_solver_config(args),
                         global_seed=args.seed)
    if run.error is not None or run.result is None:
        print(f"solve failed: {run.error}", file=sys.stderr)
        return 1
    result = run.result
    out = _output_dir(args.out)
    trace = Path(args.trace) if args.trace else \
        out / f"trace_{problem.name}_{args.constraint}.csv"
    write_trace(result.history, trace)
    print(f"problem: {problem.name}")
    print(f"constraint: {args.constraint}")
    print(f"reason: {result.reason}")
    print(f"evaluations: {result.n_evaluations}")
    print("x*:", " ".join(repr(float(v)) for v in result.x))
    print(f"f*: {float(result.f)!r}")
    print(f"pi: {float(result.pi)!r}")
    print(f"fully_linear: {str(result.fully_linear).lower()}")
    print(f"trace: {trace}")
    return 2 if result.reason in (REASON_BUDGET, REASON_FAILURE) else 0


def cmd_bench(args) -> int:
    known = {p.name for p in suite()}
    names = args.problems.split(",") if args.problems else None
    if names:
        missing = sorted(set(names) - known)
        if missing:
            print(f"unknown problems: {', '.join(missing)}", file=sys.stderr)
            return 1
    constraints = tuple(args.constraints.split(",")) if args.constraints \
        else None
    noise = NoiseSpec(args.noise, args.sigma if args.noise != "none" else 0.0)
    runs = run_benchmark(problem_names=names, constraints=constraints,
                         noise=noise, global_seed=args.seed,
                         solver_name=args.solver_name, jobs=args.jobs)
    records = [run.record for run in runs]
    failures = [run for run in runs if run.error is not None]
    for path in args.merge or []:
        records.extend(read_records(path))

    out = _output_dir(args.out)
    records_path = out / "records.csv"
    records_path.write_text(format_records(records))
    written = [records_path]
    for tau in PROFILE_TAUS:
        curve = performance_profile(records, tau)
        path = out / f"profile_tau{tau:.0e}.csv"
        path.write_text(format_profile(curve))
        written.append(path)
    print(f"instances: {len(runs)}")
    print(f"failures: {len(failures)}")
    for path in written:
        print(f"wrote: {path}")
    return 0


def cmd_geometry(args) -> int:
    try:
        table = np.loadtxt(args.points, ndmin=2)
    except (OSError, ValueError) as exc:
        print(f"cannot read points file: {exc}", file=sys.stderr)
        return 1
    count, dim = table.shape
    if count != dim + 1:
        print(f"need {dim + 1} points for dimension {dim}, got {count}",
              file=sys.stderr)
        return 1
    region = load_region(args.region) if args.region else whole_space(dim)
    offenders = [t for t, point in enumerate(table)
                 if not contains(region, point)]
    if offenders:
        print("infeasible points at indices: "
              + ", ".join(map(str, offenders)), file=sys.stderr)
        return 1
    iset = InterpolationSet(base=table[0], points=table[1:], values=None,
                            spread=args.spread, delta=args.delta)
    if not iset.is_well_posed():
        print("interpolation directions are rank-deficient "
              "(points may be colinear)", file=sys.stderr)
        return 1
    try:
        report = poisedness_constant(iset, region, args.delta)
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return 1
    print(f"{'index':>5} {'lambda_t':>12}  point")
    for t, (point, value) in enumerate(zip(iset.all_points(),
                                           report.lambda_per_index)):
        coords = " ".join(f"{v:.6g}" for v in point)
        print(f"{t:>5} {value:>12.6g}  {coords}")
    print(f"det: {abs(iset.det_direction_matrix()):.6g}")
    print(f"lambda_hat: {report.lambda_hat:.6g}")
    certified = report.lambda_hat <= args.poisedness
    print(f"certified: {str(certified).lower()} (bound {args.poisedness:g})")
    return 0 if certified else 2


def cmd_problems(args) -> int:
    if args.action != "list":
        print(f"unknown action: {args.action}", file=sys.stderr)
        return 1
    print(f"{'name':<46} {'n':>3} {'m':>3} {'f_start':>13} {'f_best':>13}"
          "  start")
    for problem in suite():
        start = " ".join(f"{v:.6g}" for v in problem.start)
        best = f"{problem.f_optimum:.6g}" if problem.f_optimum is not None \
            else "unknown"
        print(f"{problem.name:<46} {problem.n:>3} {problem.m:>3} "
              f"{problem.f_start:>13.6g} {best:>13}  {start}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projdfo",
        description="Strictly feasible derivative-free least squares")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one benchmark problem")
    solve.add_argument("--problem", required=True)
    solve.add_argument("--constraint", default="none",
                       choices=("none", "box", "ball", "halfspace"))
    solve.add_argument("--trace", default=None,
                       help="trace CSV path (default under --out)")
    solve.add_argument("--out", default=None, help="output directory")
    _add_noise_flags(solve)
    _add_solver_flags(solve)
    solve.set_defaults(func=cmd_solve)

    bench = sub.add_parser("bench", help="run the benchmark matrix")
    bench.add_argument("--problems", default=None,
                       help="comma-separated problem names (default: all)")
    bench.add_argument("--constraints", default=None,
                       help="comma-separated constraint kinds (default: all)")
    bench.add_argument("--solver-name", default="projdfo")
    bench.add_argument("--jobs", type=int, default=1,
                       help="parallel instance workers")
    bench.add_argument("--merge", action="append", default=None,
                       help="external record CSV to include in profiles")
    bench.add_argument("--out", default=None, help="output directory")
    _add_noise_flags(bench)
    bench.set_defaults(func=cmd_bench)

    geometry = sub.add_parser("geometry", help="certify a point set")
    geometry.add_argument("--points", required=True,
                          help="whitespace table, one point per row, "
                               "base point first")
    geometry.add_argument("--region", default=None,
                          help="region JSON file (default: whole space)")
    geometry.add_argument("--delta", type=float, default=1.0)
    geometry.add_argument("--poisedness", type=float, default=10.0,
                          help="certification bound")
    geometry.add_argument("--spread", type=float, default=1.0)
    geometry.set_defaults(func=cmd_geometry)

    problems = sub.add_parser("problems", help="inspect the problem registry")
    problems.add_argument("action", choices=("list",))
    problems.set_defaults(func=cmd_problems)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
