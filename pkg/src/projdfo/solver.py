"""Strictly feasible derivative-free trust-region driver.

Every objective evaluation happens at a point produced by projection onto
the feasible region, so the objective is never probed outside it. Models
are linear interpolants of scalar objectives, or Gauss-Newton composites
when the objective returns residual vectors; the mode is detected from the
first evaluation's value type.

Iteration branches:

  criticality      small model criticality; shrink (if the model was fully
                   linear) and repair geometry
  successful       ratio rho >= eta; move, grow the radius
  model-improving  rho < eta with an uncertified model; repair geometry
  unsuccessful     rho < eta otherwise; shrink

A subproblem step that cannot be certified against the Cauchy decrease
condition even after the backtracking fallback spends no evaluation on the
trial: with a fully linear model it is treated as unsuccessful (the radius
really is too large for the criticality present), otherwise the geometry is
repaired first so a stale model cannot force repeated shrinks. The
fully-linear flag is dropped whenever the radius shrinks or the set changes
without a fresh certificate; only a geometry repair raises it again.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union

import numpy as np

from .composite import OuterFunction, build_residual_model, gauss_newton_model
from .geometry import (
    GeometryError,
    InterpolationSet,
    _fill_directions,
    _rows_independent,
    build_linear_model,
    improve_geometry,
)
from .regions import (
    ConfigurationError,
    ConvexRegion,
    DykstraConvergenceError,
    contains,
    project,
)
from .subproblem import (
    FistaSettings,
    QuadraticModel,
    cauchy_decrease_holds,
    criticality_measure,
    fallback_cauchy_step,
    solve_trust_region,
)

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("k", "branch", "delta_before", "delta_after", "pi_m", "rho",
                 "f_best", "n_evals")

BRANCH_CRITICALITY = "criticality"
BRANCH_SUCCESSFUL = "successful"
BRANCH_IMPROVING = "model-improving"
BRANCH_UNSUCCESSFUL = "unsuccessful"

REASON_STATIONARY = "stationary"
REASON_SMALL_RADIUS = "small_radius"
REASON_BUDGET = "budget"
REASON_FAILURE = "objective_failure"

REPAIR_ATTEMPTS = 5  # passes allowed when repair points evaluate non-finite


@dataclass(frozen=True)
class SolverConfig:
    """Trust-region parameters. Unset fields resolve at solve time:
    delta0 to 0.1*max(||x0||_inf, 1), gamma_dec to 0.5 (0.98 in noise
    mode), max_evaluations to 100*(n+1)."""

    delta0: Optional[float] = None
    delta_max: float = 1e10
    gamma_dec: Optional[float] = None
    gamma_inc: float = 2.0
    eps_crit: float = 1e-2
    mu: float = 1.0
    eta: float = 0.1
    cauchy_coeff: float = 0.1
    poisedness: float = 10.0
    spread: float = 1.0
    max_evaluations: Optional[int] = None
    delta_end: float = 1e-8
    pi_tol: Optional[float] = None
    noise_mode: bool = False
    rng_seed: int = 0
    fista: FistaSettings = field(default_factory=FistaSettings)

    def resolved_gamma_dec(self) -> float:
        if self.gamma_dec is not None:
            return self.gamma_dec
        return 0.98 if self.noise_mode else 0.5

    def validate(self) -> None:
        gamma_dec = self.resolved_gamma_dec()
        if not 0.0 < gamma_dec < 1.0 < self.gamma_inc:
            raise ConfigurationError("need 0 < gamma_dec < 1 < gamma_inc")
        if not 0.0 < self.eta < 1.0:
            raise ConfigurationError("eta must lie in (0, 1)")
        if not (self.eps_crit > 0.0 and self.mu > 0.0):
            raise ConfigurationError("criticality constants must be positive")
        if not 0.0 < self.cauchy_coeff < 1.0:
            raise ConfigurationError("cauchy_coeff must lie in (0, 1)")
        if not self.poisedness > 1.0:
            raise ConfigurationError("poisedness bound must exceed 1")
        if not self.spread >= 1.0:
            raise ConfigurationError("spread must be at least 1")
        if self.delta0 is not None and not 0.0 < self.delta0 <= self.delta_max:
            raise ConfigurationError("need 0 < delta0 <= delta_max")
        if not self.delta_end > 0.0:
            raise ConfigurationError("delta_end must be positive")


@dataclass(frozen=True)
class IterationRecord:
    k: int
    branch: str
    delta_before: float
    delta_after: float
    pi_m: float
    rho: Optional[float]
    f_best: float
    n_evals: int
    # Extra bookkeeping beyond the trace columns: the post-safeguard model
    # decrease and Hessian norm let the Cauchy condition be re-audited, and
    # the entry flag supports the criticality-shrink consistency check.
    model_decrease: Optional[float] = None
    hess_norm: Optional[float] = None
    fully_linear_before: bool = False


@dataclass(frozen=True)
class SolveResult:
    x: np.ndarray
    f: float
    pi: float
    history: List[IterationRecord]
    reason: str
    n_evaluations: int
    fully_linear: bool


class _BudgetExhausted(Exception):
    pass


class _EvaluationFailed(Exception):
    pass


class _Oracle:
    """Budgeted, mode-detecting wrapper around the user's objective.

    ``evaluate`` returns (row, f): row is what interpolation stores (scalar
    value or residual vector) and f is the scalar objective, ||r||^2/2 in
    residual mode. Non-finite output becomes +inf so trial logic can reject
    the point without poisoning models.
    """

    def __init__(self, handle: Callable, budget: int):
        self.handle = handle
        self.budget = budget
        self.count = 0
        self.mode: Optional[str] = None
        self.n_residuals: Optional[int] = None

    def evaluate(self, x: np.ndarray):
        if self.count >= self.budget:
            raise _BudgetExhausted
        try:
            # overflow in a wild trial point is an expected outcome, not an
            # error: the non-finite result becomes +inf and gets rejected
            with np.errstate(over="ignore", invalid="ignore"):
                raw = self.handle(np.array(x, dtype=float, copy=True))
        except Exception as exc:
            raise _EvaluationFailed(str(exc)) from exc
        self.count += 1
        if self.mode is None:
            self.mode = "residual" if np.ndim(raw) == 1 else "scalar"
            if self.mode == "residual":
                self.n_residuals = len(raw)
        if self.mode == "scalar":
            value = float(raw)
            if not math.isfinite(value):
                value = math.inf
            return value, value
        vec = np.asarray(raw, dtype=float)
        if vec.shape != (self.n_residuals,):
            raise _EvaluationFailed("residual length changed between calls")
        if not np.all(np.isfinite(vec)):
            vec = np.full(self.n_residuals, np.inf)
        with np.errstate(over="ignore"):
            value = 0.5 * float(vec @ vec)
        return vec.copy(), value

    def value_shape(self) -> tuple:
        return () if self.mode == "scalar" else (self.n_residuals,)


def _build_model(iset: InterpolationSet, mode: str) -> QuadraticModel:
    if mode == "scalar":
        return build_linear_model(iset)
    return gauss_newton_model(build_residual_model(iset),
                              OuterFunction.least_squares())


@dataclass
class _State:
    x: np.ndarray
    f: float
    row: Union[float, np.ndarray]
    delta: float
    iset: Optional[InterpolationSet]
    model: Optional[QuadraticModel]
    fully_linear: bool


def _cull(iset: Optional[InterpolationSet], base: np.ndarray, bound: float):
    """Reusable (point, value-row) pairs: finite, in bound, independent."""
    kept_pts: list = []
    kept_rows: list = []
    if (iset is None or iset.values is None
            or not np.array_equal(iset.base, base)):
        return kept_pts, kept_rows
    for t in range(iset.dim):
        point, row = iset.points[t], iset.values[t + 1]
        if not np.all(np.isfinite(np.atleast_1d(row))):
            continue
        if np.linalg.norm(point - base) > bound * (1.0 + 1e-9):
            continue
        if _rows_independent(base, kept_pts, point):
            kept_pts.append(point)
            kept_rows.append(row)
    return kept_pts, kept_rows


def _repair(oracle: _Oracle, region: ConvexRegion, config: SolverConfig,
            state: _State, delta: float, rng: np.random.Generator):
    """Rebuild the interpolation set Lambda-poised around state.x.

    Keeps reusable points from the current set, tops up with projected
    directions, runs the geometry repair, and evaluates pending values.
    Points whose evaluation comes back non-finite are discarded and
    replaced in a fresh pass. Returns (iset, model, certified, evals_used);
    a budget exception propagates with no state mutated, so the caller
    simply discards the partial work.
    """
    base = state.x
    n = base.shape[0]
    radius = min(delta, 1.0)
    bound = config.spread * radius
    before = oracle.count

    kept_pts, kept_rows = _cull(state.iset, base, bound)
    banned: list = []
    for _ in range(REPAIR_ATTEMPTS):
        points = _fill_directions(region, base, kept_pts, radius, rng,
                                  avoid=banned)
        values = np.full((n + 1,) + oracle.value_shape(), np.nan)
        values[0] = state.row
        for t, row in enumerate(kept_rows):
            values[t + 1] = row
        iset = InterpolationSet(base, np.array(points), values,
                                spread=config.spread, delta=delta)
        result = improve_geometry(iset, region, delta, config.poisedness,
                                  config.spread, config.fista)
        iset = result.set
        pending = iset.pending_indices()
        if pending:
            values = np.array(iset.values, copy=True)
            for t in pending:
                values[t], _ = oracle.evaluate(iset.all_points()[t])
            iset = iset.with_values(values)
        if not iset.pending_indices():
            model = _build_model(iset, oracle.mode)
            return iset, model, result.certified, oracle.count - before
        # Some freshly evaluated points were non-finite; keep the good ones
        # and draw replacement directions that dodge the bad spots.
        bad = iset.pending_indices()
        logger.info("geometry repair: %d points evaluated non-finite", len(bad))
        all_points = iset.all_points()
        banned.extend(np.array(all_points[t], copy=True) for t in bad)
        kept_pts, kept_rows = _cull(iset, base, bound)
    raise _EvaluationFailed(
        "objective stayed non-finite across repeated geometry repairs")


def _rebase(iset: InterpolationSet, trial: np.ndarray, row, spread: float,
            delta: float) -> InterpolationSet:
    """Move the base to the accepted trial, dropping one old point.

    Tries drops farthest-first; a drop that leaves dependent directions is
    skipped. At least one drop preserves affine independence exactly, but
    the tolerance check can reject all of them for ill-conditioned sets, in
    which case the least-bad set is returned for repair to rebuild.
    """
    trial = np.asarray(trial, dtype=float)
    old_pts = list(iset.all_points())
    old_rows = list(iset.values)
    order = list(np.argsort([-np.linalg.norm(p - trial) for p in old_pts]))
    fallback = None
    for drop in order:
        pts = [old_pts[t] for t in range(len(old_pts)) if t != drop]
        rows = [row] + [old_rows[t] for t in range(len(old_rows)) if t != drop]
        candidate = InterpolationSet(trial, np.array(pts), np.array(rows),
                                     spread, delta)
        if fallback is None:
            fallback = candidate
        if candidate.is_well_posed():
            return candidate
    return fallback


def _insert_trial(iset: InterpolationSet, trial: np.ndarray,
                  row) -> InterpolationSet:
    """Swap the trial in for the farthest point that keeps the set ranked."""
    distances = np.linalg.norm(iset.points - iset.base, axis=1)
    for index in np.argsort(-distances):
        points = np.array(iset.points, copy=True)
        points[index] = trial
        values = np.array(iset.values, copy=True)
        values[index + 1] = row
        candidate = InterpolationSet(iset.base, points, values,
                                     iset.spread, iset.delta)
        if candidate.is_well_posed():
            return candidate
    return iset


def solve(objective: Callable, region: ConvexRegion, x0,
          config: Optional[SolverConfig] = None) -> SolveResult:
    """Minimize a black-box objective over a convex region.

    ``objective`` maps a feasible point to either a scalar value or a
    residual vector r with objective ||r||^2/2; the mode is fixed by the
    first call. An infeasible start is projected onto the region.
    """
    config = config or SolverConfig()
    config.validate()
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1 or x0.shape[0] != region.dim:
        raise ConfigurationError("start point dimension does not match the region")
    if not contains(region, x0, 1e-10):
        try:
            x0 = project(region, x0)
        except DykstraConvergenceError as exc:
            raise ConfigurationError(
                "could not project the start point onto the region") from exc

    n = x0.shape[0]
    budget = config.max_evaluations or 100 * (n + 1)
    if budget < n + 1:
        raise ConfigurationError("budget must cover the initial n+1 evaluations")
    delta0 = config.delta0
    if delta0 is None:
        delta0 = min(0.1 * max(float(np.max(np.abs(x0))), 1.0),
                     config.delta_max)
    gamma_dec = config.resolved_gamma_dec()

    oracle = _Oracle(objective, budget)
    rng = np.random.default_rng(config.rng_seed)
    fista = config.fista
    history: List[IterationRecord] = []

    def finalize(state: Optional[_State], reason: str) -> SolveResult:
        if state is None:
            return SolveResult(x0.copy(), math.inf, math.nan, history, reason,
                               oracle.count, False)
        if state.model is None:
            return SolveResult(state.x.copy(), state.f, math.nan, history,
                               reason, oracle.count, False)
        pi, _ = criticality_measure(state.model.grad, region, state.x, fista)
        return SolveResult(state.x.copy(), state.f, float(pi), history, reason,
                           oracle.count, state.fully_linear)

    state: Optional[_State] = None
    try:
        row0, f0 = oracle.evaluate(x0)
        if not math.isfinite(f0):
            logger.warning("objective is non-finite at the start point")
            return SolveResult(x0.copy(), f0, math.nan, history,
                               REASON_FAILURE, oracle.count, False)
        state = _State(x0, f0, row0, delta0, None, None, False)
        iset, model, certified, _ = _repair(oracle, region, config, state,
                                            delta0, rng)
        state.iset, state.model, state.fully_linear = iset, model, certified
    except _BudgetExhausted:
        return finalize(state, REASON_BUDGET)
    except _EvaluationFailed as exc:
        logger.warning("objective failed during startup: %s", exc)
        return finalize(state, REASON_FAILURE)

    def polished(step: np.ndarray):
        trial = project(region, state.x + step)
        step = trial - state.x
        return trial, step, float(state.model.decrease(step) + 0.0)

    k = 0
    reason = REASON_BUDGET
    while True:
        pi_raw, pi_certified = criticality_measure(state.model.grad, region,
                                                   state.x, fista)
        pi = float(pi_raw)
        if (config.pi_tol is not None and pi_certified and state.fully_linear
                and pi <= config.pi_tol):
            reason = REASON_STATIONARY
            break

        delta_before = state.delta
        fl_before = state.fully_linear
        try:
            if pi < config.eps_crit and (pi < delta_before / config.mu
                                         or not fl_before):
                delta_after = gamma_dec * delta_before if fl_before else delta_before
                iset, model, certified, evals = _repair(
                    oracle, region, config, state, delta_after, rng)
                if not fl_before and not certified and evals == 0:
                    # Nothing new to evaluate and still no certificate:
                    # shrink instead so the run cannot stall here.
                    delta_after = gamma_dec * delta_before
                    state.delta = delta_after
                    state.fully_linear = False
                    record = IterationRecord(
                        k, BRANCH_UNSUCCESSFUL, delta_before, delta_after, pi,
                        None, state.f, oracle.count,
                        fully_linear_before=fl_before)
                else:
                    state.iset, state.model = iset, model
                    state.fully_linear = certified
                    state.delta = delta_after
                    record = IterationRecord(
                        k, BRANCH_CRITICALITY, delta_before, delta_after, pi,
                        None, state.f, oracle.count,
                        fully_linear_before=fl_before)
            else:
                sub = solve_trust_region(state.model, region, delta_before,
                                         fista)
                trial, step, decrease = polished(sub.step)
                if not cauchy_decrease_holds(state.model, step, pi,
                                             delta_before, config.cauchy_coeff):
                    raw = fallback_cauchy_step(state.model, region,
                                               delta_before, fista,
                                               config.cauchy_coeff)
                    fb_trial, fb_step, fb_decrease = polished(raw)
                    if cauchy_decrease_holds(state.model, fb_step, pi,
                                             delta_before, config.cauchy_coeff):
                        trial, step, decrease = fb_trial, fb_step, fb_decrease
                    else:
                        # No step certifiable at this radius; do not spend an
                        # evaluation on it.
                        trial = None
                h_norm = float(state.model.hess_norm())

                if trial is None or not decrease > 0.0:
                    repaired = False
                    if not fl_before:
                        # An uncertifiable step from an uncertified model says
                        # nothing about the radius: repair the geometry first,
                        # otherwise a stale model (e.g. poisoned by an
                        # overflowed value) forces a shrink spiral that never
                        # evaluates again.
                        iset, model, certified, evals = _repair(
                            oracle, region, config, state, delta_before, rng)
                        if evals > 0 or certified:
                            state.iset, state.model = iset, model
                            state.fully_linear = certified
                            record = IterationRecord(
                                k, BRANCH_IMPROVING, delta_before,
                                delta_before, pi, None, state.f, oracle.count,
                                model_decrease=decrease, hess_norm=h_norm,
                                fully_linear_before=fl_before)
                            repaired = True
                    if not repaired:
                        delta_after = gamma_dec * delta_before
                        state.delta = delta_after
                        state.fully_linear = False
                        record = IterationRecord(
                            k, BRANCH_UNSUCCESSFUL, delta_before, delta_after,
                            pi, None, state.f, oracle.count,
                            model_decrease=decrease, hess_norm=h_norm,
                            fully_linear_before=fl_before)
                else:
                    row_new, f_new = oracle.evaluate(trial)
                    rho = float((state.f - f_new) / decrease)
                    if rho >= config.eta:
                        delta_after = min(config.gamma_inc * delta_before,
                                          config.delta_max)
                        state.x, state.f, state.row = trial, f_new, row_new
                        state.delta = delta_after
                        state.fully_linear = False
                        state.iset = _rebase(state.iset, trial, row_new,
                                             config.spread, delta_after)
                        try:
                            state.model = _build_model(state.iset, oracle.mode)
                        except GeometryError:
                            state.model = None
                            iset, model, certified, _ = _repair(
                                oracle, region, config, state, delta_after,
                                rng)
                            state.iset, state.model = iset, model
                            state.fully_linear = certified
                        branch = BRANCH_SUCCESSFUL
                    elif not fl_before:
                        delta_after = delta_before
                        if np.all(np.isfinite(np.atleast_1d(row_new))):
                            state.iset = _insert_trial(state.iset, trial,
                                                       row_new)
                        iset, model, certified, _ = _repair(
                            oracle, region, config, state, delta_after, rng)
                        state.iset, state.model = iset, model
                        state.fully_linear = certified
                        branch = BRANCH_IMPROVING
                    else:
                        delta_after = gamma_dec * delta_before
                        new_iset = state.iset
                        if np.all(np.isfinite(np.atleast_1d(row_new))):
                            new_iset = _insert_trial(state.iset, trial,
                                                     row_new)
                        if new_iset is not state.iset:
                            state.iset = new_iset
                            state.model = _build_model(new_iset, oracle.mode)
                        state.delta = delta_after
                        state.fully_linear = False
                        branch = BRANCH_UNSUCCESSFUL
                    record = IterationRecord(
                        k, branch, delta_before, delta_after, pi, rho,
                        state.f, oracle.count, model_decrease=decrease,
                        hess_norm=h_norm, fully_linear_before=fl_before)
        except _BudgetExhausted:
            reason = REASON_BUDGET
            break
        except _EvaluationFailed as exc:
            logger.warning("objective failed at iteration %d: %s", k, exc)
            reason = REASON_FAILURE
            break

        history.append(record)
        if state.delta < config.delta_end:
            reason = REASON_SMALL_RADIUS
            break
        k += 1

    return finalize(state, reason)


def format_trace(history: List[IterationRecord]) -> str:
    """Render iteration records as the fixed-schema trace CSV."""
    lines = ["# schema=1", ",".join(TRACE_COLUMNS)]
    for record in history:
        rho = "" if record.rho is None else repr(float(record.rho))
        lines.append(",".join([
            str(record.k), record.branch, repr(float(record.delta_before)),
            repr(float(record.delta_after)), repr(float(record.pi_m)), rho,
            repr(float(record.f_best)), str(record.n_evals)]))
    return "\n".join(lines) + "\n"


def write_trace(history: List[IterationRecord], path) -> None:
    with open(path, "w") as handle:
        handle.write(format_trace(history))
