"""Trust-region subproblem and criticality machinery.

The local model is minimized over ``region ∩ B(x, delta)`` with an
accelerated projected-gradient iteration (see :func:`projdfo._kernels.fista`)
whose step constant is a spectral-norm estimate of the model Hessian. Linear
models (zero Hessian) are solved with the gradient normalized to unit length:
the minimizer of ``g·s`` is invariant under positive scaling of ``g``, and
unit scale makes the fixed step constant 1 appropriate regardless of how
small the true gradient is. Decreases are scaled back afterwards.

The stationarity measure used throughout is

    pi(x) = | min { g·d : x + d feasible, ||d|| <= 1 } |,

which reduces to ``||g||`` without constraints and is 1-Lipschitz in g.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .regions import ConvexRegion, DykstraSettings, project_capped

DECREASE_COEFF = 0.1


@dataclass(frozen=True)
class FistaSettings:
    """Iteration control for the projected subproblem solver.

    The iteration cap is ``max_iter_factor * n**2``; hitting it returns the
    best iterate found with ``certified=False`` rather than failing.
    """

    step_tol: float = 1e-12
    max_iter_factor: int = 100
    dykstra: DykstraSettings = field(default_factory=DykstraSettings)

    def max_iterations(self, dim: int) -> int:
        return max(self.max_iter_factor * dim * dim, 16)


@dataclass
class QuadraticModel:
    """m(y) = const + grad·(y - base) + (y - base)·hess·(y - base)/2."""

    base: np.ndarray
    const: float
    grad: np.ndarray
    hess: np.ndarray
    _hess_norm: Optional[float] = field(default=None, repr=False)

    def __post_init__(self):
        self.base = np.asarray(self.base, dtype=float)
        self.grad = np.asarray(self.grad, dtype=float)
        self.hess = np.asarray(self.hess, dtype=float)
        n = self.base.shape[0]
        if self.grad.shape != (n,) or self.hess.shape != (n, n):
            raise ValueError("model gradient/Hessian shapes do not match the base point")

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def value(self, y) -> float:
        s = np.asarray(y, dtype=float) - self.base
        return self.value_at_step(s)

    def value_at_step(self, s) -> float:
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            return (self.const + float(self.grad @ s)
                    + 0.5 * float(s @ self.hess @ s))

    def decrease(self, s) -> float:
        """m(base) - m(base + s); positive when the step helps."""
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            return -(float(self.grad @ s) + 0.5 * float(s @ self.hess @ s))

    def hess_norm(self) -> float:
        if self._hess_norm is None:
            self._hess_norm = spectral_norm_estimate(self.hess)
        return self._hess_norm


def spectral_norm_estimate(hess: np.ndarray, iterations: int = 30) -> float:
    """Power-iteration estimate of ||H||_2 for symmetric H, safe for FISTA.

    Deterministic start vector; falls back to the Frobenius norm (an upper
    bound) when the iteration collapses, e.g. the start lies in the kernel.
    The Rayleigh value is inflated slightly since power iteration approaches
    the spectral norm from below and the step constant must not end up under
    the true Lipschitz constant.
    """
    hess = np.asarray(hess, dtype=float)
    n = hess.shape[0]
    frob = float(np.linalg.norm(hess, "fro"))
    if frob == 0.0:
        return 0.0
    v = np.full(n, 1.0 / np.sqrt(n))
    estimate = 0.0
    for _ in range(iterations):
        w = hess @ v
        norm_w = float(np.linalg.norm(w))
        if norm_w <= 1e-14 * frob:
            return frob
        v = w / norm_w
        estimate = norm_w
    return min(estimate * (1.0 + 1e-6), frob)


@dataclass(frozen=True)
class SubproblemResult:
    step: np.ndarray
    decrease: float
    iterations: int
    certified: bool


def _newton_start(model: QuadraticModel, region: ConvexRegion, delta: float,
                  settings: FistaSettings, lip: float) -> np.ndarray:
    """Projected regularized-Newton warm start for the accelerated iteration.

    A badly conditioned Hessian makes the 1/L gradient step crawl along its
    flat directions, so the iteration cap exits far from the minimizer.
    Starting from the Newton point (trust-region clipped, then projected)
    costs one dense solve and removes that stall. Adopted only when it
    strictly decreases the model; otherwise the base point is kept.
    """
    n = model.dim
    if not (np.all(np.isfinite(model.hess)) and np.all(np.isfinite(model.grad))
            and np.isfinite(lip)):
        return model.base.copy()
    reg = 1e-10 * max(lip, 1.0)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            s = np.linalg.solve(model.hess + reg * np.eye(n), -model.grad)
    except np.linalg.LinAlgError:
        return model.base.copy()
    if not np.all(np.isfinite(s)):
        return model.base.copy()
    norm = float(np.linalg.norm(s))
    if norm > delta:
        s *= delta / norm
    candidate = project_capped(region, model.base + s, model.base, delta,
                               settings.dykstra)
    if model.decrease(candidate - model.base) > 0.0:
        return candidate
    return model.base.copy()


def solve_trust_region(model: QuadraticModel, region: ConvexRegion, delta: float,
                       settings: Optional[FistaSettings] = None,
                       stop_decrease: Optional[float] = None) -> SubproblemResult:
    """Approximately minimize the model over region ∩ B(model.base, delta).

    Never raises for numerical reasons: an iteration-cap exit or failed inner
    projection is reported through ``certified=False`` with the best iterate
    found. The returned step always satisfies m(base + s) <= m(base) because
    s = 0 is among the candidates. ``stop_decrease`` turns the solve into a
    witness search: iteration stops as soon as the decrease exceeds it.
    """
    settings = settings or FistaSettings()
    n = model.dim
    grad = model.grad
    hess = model.hess
    kinds, params = region.packed()
    max_iter = settings.max_iterations(n)
    dyk_cap = settings.dykstra.sweep_cap(kinds.shape[0] + 1)
    target = -1.0 if stop_decrease is None else float(stop_decrease)

    if not np.any(hess):
        grad_scale = float(np.linalg.norm(grad))
        if grad_scale == 0.0:
            return SubproblemResult(np.zeros(n), 0.0, 0, True)
        step, _, iters, converged, proj_ok, hit = _kernels.fista(
            kinds, params, model.base, float(delta), grad / grad_scale,
            np.zeros((n, n)), False, 1.0, settings.step_tol, max_iter,
            settings.dykstra.tolerance, dyk_cap,
            target / grad_scale if target > 0 else -1.0, model.base)
    else:
        lip = model.hess_norm()
        start = _newton_start(model, region, delta, settings, lip)
        step, _, iters, converged, proj_ok, hit = _kernels.fista(
            kinds, params, model.base, float(delta), grad,
            np.ascontiguousarray(hess), True, lip, settings.step_tol, max_iter,
            settings.dykstra.tolerance, dyk_cap, target, start)

    certified = bool((converged or hit) and proj_ok)

    # Clip any projection-tolerance overshoot of the trust region; shrinking
    # toward the feasible base keeps feasibility by convexity.
    norm_step = float(np.linalg.norm(step))
    if norm_step > delta:
        step = step * (delta / norm_step)
    decrease = model.decrease(step) + 0.0  # +0.0 normalizes a signed zero
    if not decrease > 0.0:
        # Covers a NaN decrease from a poisoned (overflowed) model: the zero
        # step is always safe and the caller sees an honest non-improvement.
        step = np.zeros(n)
        decrease = 0.0
    return SubproblemResult(step, decrease, iters, certified)


def criticality_measure(grad, region: ConvexRegion, x,
                        settings: Optional[FistaSettings] = None) -> tuple[float, bool]:
    """pi(x) = |min g·d over feasible unit-ball directions| and its certificate.

    Solved as a linear trust-region problem with delta = 1; the whole-space
    case is the exact closed form ||g||.
    """
    grad = np.asarray(grad, dtype=float)
    if region.kind == "whole-space":
        return float(np.linalg.norm(grad)), True
    x = np.asarray(x, dtype=float)
    model = QuadraticModel(x, 0.0, grad, np.zeros((x.shape[0], x.shape[0])))
    result = solve_trust_region(model, region, 1.0, settings)
    return result.decrease, result.certified


def cauchy_decrease_holds(model: QuadraticModel, step, pi: float, delta: float,
                          coeff: float = DECREASE_COEFF) -> bool:
    """Generalized Cauchy decrease test:

        m(x) - m(x+s) >= coeff * pi * min(pi / (1 + ||H||), delta, 1).
    """
    decrease = model.decrease(step)
    required = coeff * pi * min(pi / (1.0 + model.hess_norm()), delta, 1.0)
    return decrease >= required


def fallback_cauchy_step(model: QuadraticModel, region: ConvexRegion,
                         delta: float,
                         settings: Optional[FistaSettings] = None,
                         coeff: float = DECREASE_COEFF) -> np.ndarray:
    """Backtracking projected-gradient step used when the main solve misses
    the Cauchy bound. Returns the first step over t in {1, 1/2, ...} (20
    halvings) meeting the bound, else the best decrease found.
    """
    settings = settings or FistaSettings()
    pi, _ = criticality_measure(model.grad, region, model.base, settings)
    required = coeff * pi * min(pi / (1.0 + model.hess_norm()), delta, 1.0)
    best_step = np.zeros(model.dim)
    best_decrease = 0.0
    t = 1.0
    for _ in range(20):
        target = model.base - t * model.grad
        point = project_capped(region, target, model.base, delta, settings.dykstra)
        step = point - model.base
        decrease = model.decrease(step)
        if decrease >= required:
            return step
        if decrease > best_decrease:
            best_decrease = decrease
            best_step = step
        t *= 0.5
    return best_step
