"""Interpolation sets, Lagrange polynomials, and poisedness maintenance.

Linear interpolation through n+1 feasible points: the base point plus n
others whose directions from the base form an invertible matrix L. One LU
factorization of L serves the model build, every Lagrange polynomial, and
(in composite mode) all residual components at once.

Poisedness is measured by maximizing |l_t| over the feasible part of the
ball B(y0, min(delta, 1)). The base point is never swapped out, so geometry
repair enforces the bound for indices t >= 1 only; by the partition of
unity the base polynomial is then automatically bounded by 1 + n * bound,
which the report records as the effective constant for all indices.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .regions import ConvexRegion, DegenerateRegionError, contains, project
from .subproblem import FistaSettings, QuadraticModel, solve_trust_region

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10
DIRECTION_CANDIDATE_CAP = 500  # per dimension
SWAP_CAP = 10  # per dimension


class GeometryError(RuntimeError):
    """Degenerate interpolation geometry (rank-deficient directions)."""


@dataclass(frozen=True, eq=False)
class InterpolationSet:
    """Immutable n+1 point linear interpolation set.

    ``points`` holds rows y_1..y_n; ``values`` row t is the objective value
    (scalar) or residual vector at point t, row 0 at the base. NaN rows mark
    points swapped in by geometry repair and not yet evaluated. ``spread``
    and ``delta`` record the (beta, Delta) pair for the containment bound
    ||y_t - y0|| <= spread * min(delta, 1).
    """

    base: np.ndarray
    points: np.ndarray
    values: Optional[np.ndarray]
    spread: float
    delta: float
    _lu: tuple = field(default=None, repr=False, compare=False)
    _sv: tuple = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def directions(self) -> np.ndarray:
        return self.points - self.base

    def all_points(self) -> np.ndarray:
        return np.vstack([self.base[None, :], self.points])

    def bound_radius(self) -> float:
        return self.spread * min(self.delta, 1.0)

    def singular_values(self) -> tuple:
        if self._sv is None:
            sv = np.linalg.svd(self.directions(), compute_uv=False)
            object.__setattr__(self, "_sv", (float(sv[0]), float(sv[-1])))
        return self._sv

    def is_well_posed(self) -> bool:
        biggest, smallest = self.singular_values()
        return smallest >= RANK_TOL * biggest and biggest > 0.0

    def lu(self) -> tuple:
        if self._lu is None:
            if not self.is_well_posed():
                raise GeometryError(
                    "interpolation directions are numerically rank-deficient")
            object.__setattr__(self, "_lu", lu_factor(self.directions()))
        return self._lu

    def det_direction_matrix(self) -> float:
        return float(np.linalg.det(self.directions()))

    def replace_point(self, index: int, point: np.ndarray) -> "InterpolationSet":
        """New set with point ``index`` (>= 1) replaced; its value becomes pending."""
        if index < 1:
            raise ValueError("the base point is never replaced")
        points = self.points.copy()
        points[index - 1] = point
        values = None
        if self.values is not None:
            values = np.array(self.values, dtype=float, copy=True)
            values[index] = np.nan
        return replace(self, points=points, values=values, _lu=None, _sv=None)

    def with_values(self, values: np.ndarray) -> "InterpolationSet":
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.dim + 1:
            raise ValueError("need one value row per interpolation point")
        return replace(self, values=values)

    def pending_indices(self) -> List[int]:
        """Indices (0-based over all n+1 points) whose values are missing."""
        if self.values is None:
            return list(range(self.dim + 1))
        flat = self.values.reshape(self.dim + 1, -1)
        return [t for t in range(self.dim + 1) if not np.all(np.isfinite(flat[t]))]

    def validate(self, region: ConvexRegion, tol: float = 1e-9) -> None:
        """Raise GeometryError if containment, feasibility, or rank fails."""
        bound = self.bound_radius()
        for t, point in enumerate(self.all_points()):
            if not contains(region, point, tol):
                raise GeometryError(f"interpolation point {t} is infeasible")
            if t > 0 and np.linalg.norm(point - self.base) > bound * (1 + 1e-9):
                raise GeometryError(f"interpolation point {t} exceeds the radius bound")
        if not self.is_well_posed():
            raise GeometryError("interpolation directions are numerically rank-deficient")


@dataclass(frozen=True)
class LagrangePolynomial:
    """l_t(y) = const + grad . (y - base), with l_t(y_s) = delta_ts."""

    index: int
    const: float
    grad: np.ndarray
    base: np.ndarray

    def value(self, y) -> float:
        return self.const + float(self.grad @ (np.asarray(y, dtype=float) - self.base))


@dataclass(frozen=True)
class PoisednessReport:
    """Per-index Lagrange maxima over the feasible trust ball.

    ``lambda_hat`` is the max over all indices including the base; repair
    only controls indices t >= 1, whose maxima can always be driven to the
    requested bound.
    """

    lambda_per_index: np.ndarray
    maximizers: np.ndarray
    certified: bool

    @property
    def lambda_hat(self) -> float:
        return float(np.max(self.lambda_per_index))

    def lambda_hat_movable(self) -> float:
        return float(np.max(self.lambda_per_index[1:]))


@dataclass(frozen=True)
class SwapRecord:
    index: int
    lagrange_value: float
    det_before: float
    det_after: float


@dataclass(frozen=True)
class GeometryResult:
    set: InterpolationSet
    certified: bool
    swaps: List[SwapRecord]


def build_linear_model(iset: InterpolationSet) -> QuadraticModel:
    """Interpolate scalar values: c = f(y0) exactly, L g = (f(y_t) - f(y0))_t.

    Returns the model as a QuadraticModel with zero Hessian so it can be fed
    straight to the subproblem solver.
    """
    if iset.values is None or iset.values.ndim != 1:
        raise GeometryError("scalar model needs one scalar value per point")
    if iset.pending_indices():
        raise GeometryError("cannot build a model while values are pending")
    rhs = iset.values[1:] - iset.values[0]
    grad = lu_solve(iset.lu(), rhs)
    n = iset.dim
    return QuadraticModel(iset.base.copy(), float(iset.values[0]), grad, np.zeros((n, n)))


def lagrange_polynomials(iset: InterpolationSet) -> List[LagrangePolynomial]:
    """All n+1 Lagrange polynomials from one factorization of L.

    For t >= 1: c_t = 0 and g_t is the t-th column of L^{-1}; the base
    polynomial is the partition-of-unity complement (c_0 = 1,
    g_0 = -sum g_t), which makes sum_t l_t identically 1 by construction.
    """
    n = iset.dim
    inv = lu_solve(iset.lu(), np.eye(n))
    polys = []
    grad0 = -inv.sum(axis=1)
    polys.append(LagrangePolynomial(0, 1.0, grad0, iset.base))
    for t in range(1, n + 1):
        polys.append(LagrangePolynomial(t, 0.0, inv[:, t - 1], iset.base))
    return polys


def _maximize_abs_lagrange(poly: LagrangePolynomial, region: ConvexRegion,
                           radius: float, settings: Optional[FistaSettings],
                           stop_above: Optional[float] = None):
    """max |l_t| over region ∩ B(base, radius) via two linear solves.

    Returns (value, maximizer, certified). With ``stop_above``, a solve may
    stop as soon as it holds a witness point with |l_t| above that bound;
    the returned value is then the witness value, not the exact maximum.
    """
    n = poly.base.shape[0]
    zero_h = np.zeros((n, n))
    best_val = -np.inf
    best_point = poly.base
    certified = True
    for sign in (1.0, -1.0):
        # max sign*l_t = sign*c_t + max of (sign*g_t).s
        model = QuadraticModel(poly.base, 0.0, -sign * poly.grad, zero_h)
        target = None if stop_above is None else stop_above - sign * poly.const
        result = solve_trust_region(model, region, radius, settings,
                                    stop_decrease=target)
        value = sign * poly.const + result.decrease
        certified = certified and result.certified
        if value > best_val:
            best_val = value
            best_point = poly.base + result.step
        if stop_above is not None and best_val > stop_above:
            break
    return best_val, best_point, certified


def poisedness_constant(iset: InterpolationSet, region: ConvexRegion, delta: float,
                        settings: Optional[FistaSettings] = None) -> PoisednessReport:
    """Exact per-index maxima of |l_t| over region ∩ B(y0, min(delta, 1)).

    Each reported value is also floored by the sample values |l_t(y_s)|, so
    lambda_hat >= 1 holds structurally (l_0(y_0) = 1).
    """
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    radius = min(float(delta), 1.0)
    polys = lagrange_polynomials(iset)
    samples = iset.all_points()
    n = iset.dim
    lambdas = np.empty(n + 1)
    maximizers = np.empty((n + 1, n))
    certified = True
    for t, poly in enumerate(polys):
        value, point, ok = _maximize_abs_lagrange(poly, region, radius, settings)
        certified = certified and ok
        for sample in samples:
            sample_value = abs(poly.value(sample))
            if sample_value > value:
                value, point = sample_value, sample
        lambdas[t] = value
        maximizers[t] = point
    return PoisednessReport(lambdas, maximizers, certified)


def initial_feasible_set(region: ConvexRegion, base, r: float,
                         rng_seed: int) -> InterpolationSet:
    """Feasible interpolation set around a feasible base point.

    Projects base + r*d for directions d = e_1..e_n, -e_1..-e_n, then seeded
    uniform unit vectors, keeping directions that preserve numerical linear
    independence. All resulting points lie in region ∩ B(base, r) because
    projections are non-expansive around the feasible base.
    """
    base = np.asarray(base, dtype=float)
    points = _fill_directions(region, base, [], float(r), np.random.default_rng(rng_seed))
    n = base.shape[0]
    return InterpolationSet(base, np.array(points), None,
                            spread=max(1.0, float(r)), delta=float(r))


def _rows_independent(base: np.ndarray, points: Sequence[np.ndarray],
                      candidate: np.ndarray) -> bool:
    rows = np.array([p - base for p in points] + [candidate - base])
    sv = np.linalg.svd(rows, compute_uv=False)
    return sv[-1] > RANK_TOL * sv[0] and sv[0] > 0.0


def independent_subset(base, points) -> list:
    """Greedy order-preserving subset with numerically independent directions."""
    base = np.asarray(base, dtype=float)
    kept: list = []
    for point in points:
        point = np.asarray(point, dtype=float)
        if _rows_independent(base, kept, point):
            kept.append(point)
    return kept


def _fill_directions(region: ConvexRegion, base: np.ndarray,
                     kept: Sequence[np.ndarray], r: float,
                     rng: np.random.Generator,
                     avoid: Sequence[np.ndarray] = ()) -> list:
    """Extend ``kept`` interpolation points to n independent directions.

    Points listed in ``avoid`` (known to be unusable, e.g. the objective was
    non-finite there) are skipped even when they would be independent.
    """
    n = base.shape[0]
    points = list(kept)

    def independent(candidate: np.ndarray) -> bool:
        if any(np.array_equal(candidate, bad) for bad in avoid):
            return False
        return _rows_independent(base, points, candidate)

    def candidates():
        eye = np.eye(n)
        for t in range(n):
            yield eye[t]
        for t in range(n):
            yield -eye[t]
        while True:
            vec = rng.standard_normal(n)
            norm = np.linalg.norm(vec)
            if norm > 1e-12:
                yield vec / norm

    budget = DIRECTION_CANDIDATE_CAP * n
    for direction in candidates():
        if len(points) == n:
            return points
        budget -= 1
        if budget < 0:
            raise DegenerateRegionError(
                "could not find enough independent feasible directions; the "
                "region interior is likely empty or lower-dimensional")
        point = project(region, base + r * direction)
        if independent(point):
            points.append(point)
    return points


def improve_geometry(iset: InterpolationSet, region: ConvexRegion, delta: float,
                     poisedness_bound: float, spread: float = 1.0,
                     settings: Optional[FistaSettings] = None) -> GeometryResult:
    """Swap movable points until every movable |l_t| max is below the bound.

    Each pass maximizes the Lagrange polynomials over region ∩
    B(y0, min(delta, 1)), skipping indices whose unconstrained ball bound
    |c_t| + ||g_t||*radius already rules them out and letting a solve stop
    at the first witness above the bound, then replaces the point of
    largest found value (ties to the smallest index) with that
    polynomial's maximizer. Every swap multiplies |det L| by the found
    value, i.e. by more than the bound. Swapped-in values are marked
    pending; geometry never evaluates the objective.
    """
    if not poisedness_bound > 1.0:
        raise ValueError("the poisedness bound must exceed 1")
    if not spread >= 1.0:
        raise ValueError("spread must be at least 1")
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    if not iset.is_well_posed():
        raise GeometryError("improve_geometry needs independent directions; "
                            "rebuild with initial_feasible_set first")
    radius = min(float(delta), 1.0)
    swaps: List[SwapRecord] = []
    # The result carries the caller's certificate pair; containment of the
    # points it keeps is the caller's responsibility (validate() checks it).
    current = replace(iset, spread=float(spread), delta=float(delta))
    for _ in range(SWAP_CAP * iset.dim):
        polys = lagrange_polynomials(current)
        best_index = 0
        best_value = poisedness_bound
        best_point = None
        confirmations_certified = True
        for poly in polys[1:]:
            reach = abs(poly.const) + float(np.linalg.norm(poly.grad)) * radius
            if reach <= poisedness_bound:
                continue
            value, point, ok = _maximize_abs_lagrange(
                poly, region, radius, settings, stop_above=poisedness_bound)
            if value > poisedness_bound and value > best_value:
                best_index, best_value, best_point = poly.index, value, point
            else:
                confirmations_certified = confirmations_certified and ok
        if best_point is None:
            return GeometryResult(current, confirmations_certified, swaps)
        det_before = current.det_direction_matrix()
        current = current.replace_point(best_index, best_point)
        det_after = current.det_direction_matrix()
        swaps.append(SwapRecord(best_index, best_value, det_before, det_after))
    logger.warning("geometry repair hit the swap cap (%d swaps)", len(swaps))
    return GeometryResult(current, False, swaps)
