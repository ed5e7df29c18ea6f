"""Evaluation accounting and performance profiles for benchmark runs.

A run of one solver on one problem instance is reduced to a BenchRecord:
the ordered objective values seen at each evaluation, each tagged with a
feasibility flag. Accuracy accounting asks for the first evaluation whose
running best feasible value closes a 1-tau fraction of the gap between
f(x0) and a reference value f*; performance profiles compare those counts
across solvers after normalizing by the best solver on each instance.

Conventions, chosen once and used everywhere:
  - Recorded objective values are noiseless even for noisy runs, so
    thresholds measure true progress; the CSV header carries a
    `values=noiseless` marker.
  - Infeasible evaluations are stored as +inf and never enter the running
    best.
  - f* is the problem's known optimum for unconstrained instances and the
    best feasible value any recorded solver reached otherwise.
  - The profile denominator counts every instance attempted, including
    those no solver managed to solve. Only instances without a single
    feasible evaluation (no f* resolvable) are dropped, with a log line.

Record CSV schema: `solver,problem,constraint,noise,eval_index,feasible,
f_value` (feasible as 0/1, `inf` for +inf). Profile CSV schema:
`solver,tau,alpha,pi`. Both are written sorted and byte-stable.
"""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .problems import (EvaluationLedger, LeastSquaresProblem, NoiseSpec,
                       by_name, constraint_variants, evaluate, suite)
from .regions import FEASIBILITY_TOL, project
from .solver import SolveResult, SolverConfig, solve

logger = logging.getLogger(__name__)

RECORD_COLUMNS = "solver,problem,constraint,noise,eval_index,feasible,f_value"
PROFILE_COLUMNS = "solver,tau,alpha,pi"
PROFILE_TAUS = (1e-1, 1e-3, 1e-5)

Evaluation = Tuple[int, bool, float]


def _convention(entries: Sequence[Evaluation]) -> Tuple[Evaluation, ...]:
    return tuple((int(k), bool(ok), float(f) if ok else math.inf)
                 for k, ok, f in entries)


@dataclass(frozen=True)
class BenchRecord:
    """One solver's evaluation history on one problem instance."""

    solver: str
    problem: str
    constraint: str
    noise: str
    evaluations: Tuple[Evaluation, ...]
    f_start: float
    f_star: Optional[float] = None

    def __post_init__(self):
        previous = 0
        for index, feasible, value in self.evaluations:
            if index <= previous:
                raise ValueError("evaluation indices must increase from 1")
            if not feasible and not math.isinf(value):
                raise ValueError("infeasible evaluations must carry +inf")
            previous = index

    @classmethod
    def build(cls, solver, problem, constraint, noise, entries,
              f_start, f_star=None) -> "BenchRecord":
        return cls(solver, problem, constraint, noise, _convention(entries),
                   float(f_start), f_star)

    def best_feasible(self) -> float:
        values = [f for _, ok, f in self.evaluations if ok]
        return min(values) if values else math.inf


def evals_to_solve(record: BenchRecord, tau: float) -> float:
    """First evaluation index whose running best feasible value reaches
    f* + tau*(f(x0) - f*); inf when the record never gets there."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie strictly between 0 and 1")
    if record.f_star is None:
        raise ValueError("record has no resolved reference value")
    if not record.evaluations:
        logger.warning("empty evaluation history for %s on %s/%s",
                       record.solver, record.problem, record.constraint)
        return math.inf
    threshold = record.f_star + tau * (record.f_start - record.f_star)
    best = math.inf
    for index, feasible, value in record.evaluations:
        if feasible and value < best:
            best = value
        if best <= threshold:
            return index
    return math.inf


def resolve_fstar(records: Sequence[BenchRecord]) -> Optional[float]:
    """Reference value for one instance: the known optimum when
    unconstrained, otherwise the best feasible value across solvers.
    None when no solver produced a feasible value."""
    if not records:
        raise ValueError("need at least one record")
    if records[0].constraint == "none":
        stamped = [r.f_star for r in records if r.f_star is not None]
        if stamped:
            return min(stamped)
    best = min(r.best_feasible() for r in records)
    return None if math.isinf(best) else best


@dataclass(frozen=True)
class ProfileCurve:
    """Per-solver step functions pi(alpha) at one accuracy level."""

    tau: float
    denominator: int
    curves: Tuple[Tuple[str, Tuple[Tuple[float, float], ...]], ...]

    def solvers(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.curves)

    def value(self, solver: str, alpha: float) -> float:
        for name, points in self.curves:
            if name == solver:
                level = 0.0
                for breakpoint, pi in points:
                    if breakpoint <= alpha:
                        level = pi
                    else:
                        break
                return level
        raise KeyError(f"no curve for solver {solver!r}")


def performance_profile(records: Sequence[BenchRecord],
                        tau: float) -> ProfileCurve:
    """Fraction of instances each solver finishes within a factor alpha
    of the fastest solver's evaluation count."""
    groups: Dict[Tuple[str, str, str], List[BenchRecord]] = {}
    for record in records:
        key = (record.problem, record.constraint, record.noise)
        groups.setdefault(key, []).append(record)
    solvers = sorted({r.solver for r in records})

    ratios: Dict[str, List[float]] = {s: [] for s in solvers}
    denominator = 0
    for key, members in sorted(groups.items()):
        fstar = resolve_fstar(members)
        if fstar is None:
            logger.warning("no feasible value for instance %s; excluded", key)
            continue
        denominator += 1
        counts = {m.solver: evals_to_solve(
            dataclasses.replace(m, f_star=fstar), tau) for m in members}
        finite = [c for c in counts.values() if not math.isinf(c)]
        if not finite:
            continue
        best = min(finite)
        for solver_name, count in counts.items():
            if not math.isinf(count):
                ratios[solver_name].append(count / best)

    curves = []
    for solver_name in solvers:
        solved = sorted(ratios[solver_name])
        breakpoints = sorted({1.0, *solved})
        points = tuple(
            (alpha, sum(1 for r in solved if r <= alpha) / denominator)
            for alpha in breakpoints) if denominator else ((1.0, 0.0),)
        curves.append((solver_name, points))
    return ProfileCurve(tau=tau, denominator=denominator,
                        curves=tuple(curves))


# --- running the matrix ---------------------------------------------------

@dataclass(frozen=True)
class InstanceRun:
    """A benchmark record plus the solver-side outcome behind it."""

    record: BenchRecord
    result: Optional[SolveResult]
    error: Optional[str] = None


def instance_seed(global_seed: int, solver: str, problem: str,
                  constraint: str, noise: NoiseSpec) -> int:
    """Stable per-instance seed, independent of scheduling order."""
    text = f"{global_seed}|{solver}|{problem}|{constraint}|" \
           f"{noise.kind}|{float(noise.sigma)!r}"
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def bench_instance(problem: LeastSquaresProblem, constraint: str,
                   noise: NoiseSpec = NoiseSpec(),
                   config: Optional[SolverConfig] = None,
                   global_seed: int = 0,
                   solver_name: str = "projdfo") -> InstanceRun:
    """Solve one constrained instance, recording per-evaluation noiseless
    objective values and feasibility. The solver sees noisy residuals when
    the noise spec asks for them; the record keeps the true values."""
    region = constraint_variants(problem.n)[constraint]
    noisy = noise.kind != "none" and noise.sigma > 0.0
    seeded = NoiseSpec(noise.kind, noise.sigma,
                       instance_seed(global_seed, solver_name, problem.name,
                                     constraint, noise))
    if config is None:
        config = SolverConfig(noise_mode=noisy)
    ledger = EvaluationLedger(seeded)
    rows: List[Evaluation] = []

    def tracked(x):
        point = np.asarray(x, dtype=float)
        distance = float(np.linalg.norm(point - project(region, point)))
        truth = problem.objective(point)
        noisy_residuals = evaluate(problem, point, seeded, ledger)
        rows.append((ledger.count, distance <= FEASIBILITY_TOL, truth))
        return noisy_residuals

    start = project(region, problem.start)
    result: Optional[SolveResult] = None
    error: Optional[str] = None
    try:
        result = solve(tracked, region, start, config)
    except Exception as exc:  # noqa: BLE001 - partial runs still count
        error = f"{type(exc).__name__}: {exc}"
    record = BenchRecord.build(
        solver=solver_name, problem=problem.name, constraint=constraint,
        noise=noise.kind, entries=rows,
        f_start=rows[0][2] if rows else math.inf,
        f_star=problem.f_optimum if constraint == "none" else None)
    return InstanceRun(record=record, result=result, error=error)


def _run_descriptor(args) -> InstanceRun:
    name, constraint, noise, config, seed, solver_name = args
    return bench_instance(by_name(name), constraint, noise, config,
                          seed, solver_name)


def run_benchmark(problem_names: Optional[Sequence[str]] = None,
                  constraints: Optional[Sequence[str]] = None,
                  noise: NoiseSpec = NoiseSpec(),
                  config: Optional[SolverConfig] = None,
                  global_seed: int = 0,
                  solver_name: str = "projdfo",
                  jobs: int = 1) -> List[InstanceRun]:
    """Run the instance matrix (all 58 problems x 4 constraints by
    default). Failed instances are logged and kept as partial records."""
    if problem_names is None:
        problem_names = [p.name for p in suite()]
    if constraints is None:
        constraints = ("none", "box", "ball", "halfspace")
    tasks = [(name, constraint, noise, config, global_seed, solver_name)
             for name in problem_names for constraint in constraints]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_run_descriptor, tasks))
    else:
        runs = [_run_descriptor(task) for task in tasks]
    for run in runs:
        if run.error is not None:
            logger.warning("instance %s/%s failed: %s", run.record.problem,
                           run.record.constraint, run.error)
    return runs


# --- CSV interfaces -------------------------------------------------------

def _fmt(value: float) -> str:
    return repr(float(value))


def format_records(records: Sequence[BenchRecord]) -> str:
    lines = ["# schema=1", "# values=noiseless", RECORD_COLUMNS]
    ordered = sorted(records, key=lambda r: (r.solver, r.problem,
                                             r.constraint, r.noise))
    for record in ordered:
        for index, feasible, value in record.evaluations:
            lines.append(f"{record.solver},{record.problem},"
                         f"{record.constraint},{record.noise},{index},"
                         f"{int(feasible)},{_fmt(value)}")
    return "\n".join(lines) + "\n"


def write_records(records: Sequence[BenchRecord], path) -> None:
    with open(path, "w") as handle:
        handle.write(format_records(records))


def read_records(path, stamp_known_optima: bool = True) -> List[BenchRecord]:
    """Load a record CSV (ours or an imported external trace). Known
    optima are re-stamped onto unconstrained instances so accounting
    matches freshly run records."""
    grouped: Dict[Tuple[str, str, str, str], List[Evaluation]] = {}
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#") or line == RECORD_COLUMNS:
                continue
            solver, problem, constraint, noise, index, feasible, value = \
                line.split(",")
            key = (solver, problem, constraint, noise)
            grouped.setdefault(key, []).append(
                (int(index), feasible == "1", float(value)))
    records = []
    for (solver, problem, constraint, noise), entries in sorted(grouped.items()):
        entries.sort(key=lambda e: e[0])
        feasible_values = [f for _, ok, f in entries if ok]
        fstar = None
        if stamp_known_optima and constraint == "none":
            try:
                fstar = by_name(problem).f_optimum
            except KeyError:
                fstar = None
        records.append(BenchRecord.build(
            solver=solver, problem=problem, constraint=constraint,
            noise=noise, entries=entries,
            f_start=feasible_values[0] if feasible_values else math.inf,
            f_star=fstar))
    return records


def format_profile(curve: ProfileCurve) -> str:
    lines = ["# schema=1", PROFILE_COLUMNS]
    for solver_name, points in curve.curves:
        for alpha, pi in points:
            lines.append(f"{solver_name},{_fmt(curve.tau)},{_fmt(alpha)},"
                         f"{_fmt(pi)}")
    return "\n".join(lines) + "\n"


def write_profile(curve: ProfileCurve, path) -> None:
    with open(path, "w") as handle:
        handle.write(format_profile(curve))
