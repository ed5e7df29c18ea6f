"""Composite models for objectives of the form f(x) = F(r(x)).

The residual map r is interpolated linearly, row by row, from one shared
factorization; the outer function F turns that into a quadratic model via
the Gauss-Newton construction g = J^T grad F, H = J^T hess F J. Only the
least-squares outer function ships, but the interface carries generic
derivative callables so other smooth F plug in without solver changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import lu_solve

from .geometry import GeometryError, InterpolationSet
from .subproblem import QuadraticModel


@dataclass(frozen=True)
class ResidualModel:
    """Linear residual model m(y) = const + jac (y - base)."""

    const: np.ndarray
    jac: np.ndarray
    base: np.ndarray

    @property
    def n_residuals(self) -> int:
        return self.const.shape[0]

    def value(self, y) -> np.ndarray:
        return self.const + self.jac @ (np.asarray(y, dtype=float) - self.base)


@dataclass(frozen=True)
class OuterFunction:
    """Smooth outer function with explicit derivatives."""

    kind: str
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]

    @staticmethod
    def least_squares() -> "OuterFunction":
        return OuterFunction(
            kind="least-squares",
            value=lambda c: 0.5 * float(c @ c),
            gradient=lambda c: np.asarray(c, dtype=float),
            hessian=lambda c: np.eye(len(c)),
        )


def build_residual_model(iset: InterpolationSet) -> ResidualModel:
    """Interpolate vector values: one factorization serves every row.

    The system splits exactly like the scalar case: const = r(y0) and the
    Jacobian solves L J^T = (r(y_t) - r(y_0))_t stacked as columns.
    """
    if iset.values is None or iset.values.ndim != 2:
        raise GeometryError("residual model needs one value vector per point")
    if iset.pending_indices():
        raise GeometryError("cannot build a model while values are pending")
    rhs = iset.values[1:] - iset.values[0]
    jac_t = lu_solve(iset.lu(), rhs)
    return ResidualModel(iset.values[0].copy(), jac_t.T, iset.base.copy())


def gauss_newton_model(rm: ResidualModel, outer: OuterFunction) -> QuadraticModel:
    """Quadratic model of F(m(y)) around the base point.

    For least squares this is const = ||c||^2/2, g = J^T c, H = J^T J; the
    product is symmetrized against rounding so the model invariant holds
    bit-for-bit.
    """
    # an enormous interpolated residual may overflow the products; the
    # resulting inf entries flow into the solver's repair path
    with np.errstate(over="ignore", invalid="ignore"):
        grad_outer = outer.gradient(rm.const)
        hess_outer = outer.hessian(rm.const)
        grad = rm.jac.T @ grad_outer
        hess = rm.jac.T @ hess_outer @ rm.jac
        hess = 0.5 * (hess + hess.T)
        return QuadraticModel(rm.base.copy(), float(outer.value(rm.const)),
                              grad, hess)
