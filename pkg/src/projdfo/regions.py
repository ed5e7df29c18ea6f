"""Convex feasible regions accessed through Euclidean projections.

A region is one of: the whole space, a coordinate box, a Euclidean ball, a
halfspace, or an intersection of those primitives (one level deep, which is
all Dykstra's method needs). Primitive projections are closed-form;
intersections are projected with Dykstra's alternating scheme, whose inner
loop lives in :mod:`projdfo._kernels`.

All projections are non-expansive and idempotent; `contains` is defined
through the projection distance so membership and projection can never
disagree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import _kernels

WHOLE = "whole-space"
BOX = "box"
BALL = "ball"
HALFSPACE = "halfspace"
INTERSECTION = "intersection"

_PRIMITIVE_CODES = {BOX: _kernels.BOX, BALL: _kernels.BALL, HALFSPACE: _kernels.HALFSPACE}

# Default relative feasibility tolerance used by `contains`.
FEASIBILITY_TOL = 1e-10


class ConfigurationError(ValueError):
    """Malformed region definition: bad shapes, kinds, or nesting."""


class DykstraConvergenceError(RuntimeError):
    """Dykstra's sweep cap was reached before the stopping rule fired.

    Carries the last iterate so callers can inspect how bad the failure is;
    this is also what an empty intersection looks like.
    """

    def __init__(self, message: str, last_iterate: np.ndarray, sweeps: int):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.sweeps = sweeps


class DegenerateRegionError(RuntimeError):
    """The region cannot support the requested geometric construction."""


@dataclass(frozen=True)
class DykstraSettings:
    """Stopping control for Dykstra's projection.

    The sweep change (sum of squared increment updates) must fall to
    ``tolerance**2 * (1 + ||x||**2)``; quadratic in ``tolerance`` because the
    change is a squared quantity while ``tolerance`` is on the distance
    scale. ``max_sweeps`` defaults to 1000 per participating set.
    """

    tolerance: float = 1e-10
    max_sweeps: Optional[int] = None

    def sweep_cap(self, n_sets: int) -> int:
        if self.max_sweeps is not None:
            return self.max_sweeps
        return 1000 * max(n_sets, 1)


@dataclass(frozen=True, eq=False)
class ConvexRegion:
    kind: str
    dim: int
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None
    normal: Optional[np.ndarray] = None
    offset: Optional[float] = None
    members: Tuple["ConvexRegion", ...] = ()
    _packed: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError(f"region dimension must be positive, got {self.dim}")
        if self.kind == BOX:
            if self.lower.shape != (self.dim,) or self.upper.shape != (self.dim,):
                raise ConfigurationError("box bounds must be vectors of the region dimension")
            if np.any(self.lower > self.upper):
                raise ConfigurationError("box has lower > upper in some coordinate")
        elif self.kind == BALL:
            if self.center.shape != (self.dim,):
                raise ConfigurationError("ball center must be a vector of the region dimension")
            if not self.radius > 0:
                raise ConfigurationError(f"ball radius must be positive, got {self.radius}")
        elif self.kind == HALFSPACE:
            if self.normal.shape != (self.dim,):
                raise ConfigurationError("halfspace normal must be a vector of the region dimension")
            if not np.linalg.norm(self.normal) > 0:
                raise ConfigurationError("halfspace normal must be nonzero")
        elif self.kind == INTERSECTION:
            if not self.members:
                raise ConfigurationError("intersection needs at least one member")
            for member in self.members:
                if member.kind == INTERSECTION:
                    raise ConfigurationError("intersections may only contain primitive members")
                if member.dim != self.dim:
                    raise ConfigurationError("intersection members must share one dimension")
        elif self.kind != WHOLE:
            raise ConfigurationError(f"unknown region kind {self.kind!r}")

    def primitives(self) -> Tuple["ConvexRegion", ...]:
        """The non-trivial primitive members (whole-space contributes none)."""
        if self.kind == INTERSECTION:
            return tuple(m for m in self.members if m.kind != WHOLE)
        if self.kind == WHOLE:
            return ()
        return (self,)

    def packed(self) -> tuple:
        """Kernel encoding (kinds, params); cached after the first call."""
        if self._packed is None:
            object.__setattr__(self, "_packed", _pack(self.primitives(), self.dim))
        return self._packed


def _pack(primitives: Tuple[ConvexRegion, ...], dim: int) -> tuple:
    n_members = len(primitives)
    kinds = np.empty(n_members, dtype=np.int64)
    width = max(2 * dim, dim + 1)
    params = np.zeros((n_members, width))
    for m, region in enumerate(primitives):
        kinds[m] = _PRIMITIVE_CODES[region.kind]
        if region.kind == BOX:
            params[m, :dim] = region.lower
            params[m, dim:2 * dim] = region.upper
        elif region.kind == BALL:
            params[m, :dim] = region.center
            params[m, dim] = region.radius
        else:
            scale = np.linalg.norm(region.normal)
            params[m, :dim] = region.normal / scale
            params[m, dim] = region.offset / scale
    return kinds, params


def _vec(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ConfigurationError(f"{name} must be a one-dimensional vector")
    return arr


def whole_space(dim: int) -> ConvexRegion:
    return ConvexRegion(WHOLE, dim)


def box(lower, upper) -> ConvexRegion:
    lower = _vec(lower, "lower")
    upper = _vec(upper, "upper")
    return ConvexRegion(BOX, lower.shape[0], lower=lower, upper=upper)


def ball(center, radius: float) -> ConvexRegion:
    center = _vec(center, "center")
    return ConvexRegion(BALL, center.shape[0], center=center, radius=float(radius))


def halfspace(normal, offset: float) -> ConvexRegion:
    normal = _vec(normal, "normal")
    return ConvexRegion(HALFSPACE, normal.shape[0], normal=normal, offset=float(offset))


def intersection(members) -> ConvexRegion:
    members = tuple(members)
    if not members:
        raise ConfigurationError("intersection needs at least one member")
    return ConvexRegion(INTERSECTION, members[0].dim, members=members)


def project(region: ConvexRegion, x, settings: Optional[DykstraSettings] = None) -> np.ndarray:
    """Euclidean projection of x onto the region.

    Closed form for primitives; Dykstra for intersections (may raise
    DykstraConvergenceError, notably when the intersection is empty).
    """
    x = _check_point(region, x)
    if region.kind == WHOLE:
        return x.copy()
    if region.kind == BOX:
        return np.clip(x, region.lower, region.upper)
    if region.kind == BALL:
        d = x - region.center
        dist = np.linalg.norm(d)
        if dist <= region.radius:
            return x.copy()
        return region.center + (region.radius / dist) * d
    if region.kind == HALFSPACE:
        scale = np.linalg.norm(region.normal)
        unit = region.normal / scale
        excess = unit @ x - region.offset / scale
        if excess <= 0:
            return x.copy()
        return x - excess * unit
    return dykstra_project(region, x, settings)


def contains(region: ConvexRegion, x, tol: float = FEASIBILITY_TOL) -> bool:
    """Membership through the projection distance: never disagrees with project."""
    x = _check_point(region, x)
    y = project(region, x)
    return float(np.linalg.norm(y - x)) <= tol * (1.0 + float(np.linalg.norm(x)))


def _scale_sq(x: np.ndarray) -> float:
    """Overflow-safe ||x||^2 for relative stopping tolerances.

    Astronomically distant targets (e.g. from a blown-up model gradient)
    would overflow to inf and make the tolerance vacuous; cap the scale
    instead.
    """
    with np.errstate(over="ignore"):
        s = float(x @ x)
    return s if np.isfinite(s) else 1e300


def dykstra_project(region: ConvexRegion, x,
                    settings: Optional[DykstraSettings] = None) -> np.ndarray:
    """Project onto the region by Dykstra sweeps over its primitive members.

    Used directly for intersections; exact in one pass for primitives.
    """
    x = _check_point(region, x)
    settings = settings or DykstraSettings()
    kinds, params = region.packed()
    tol_sq = settings.tolerance ** 2 * (1.0 + _scale_sq(x))
    no_cap = np.empty(0)
    y, converged, sweeps = _kernels.dykstra(
        kinds, params, x, no_cap, -1.0, tol_sq, settings.sweep_cap(kinds.shape[0]))
    if not converged:
        raise DykstraConvergenceError(
            f"projection did not converge within {sweeps} sweeps "
            "(empty intersection?)", y, sweeps)
    return y


def project_capped(region: ConvexRegion, x, center, radius: float,
                   settings: Optional[DykstraSettings] = None) -> np.ndarray:
    """Project onto region ∩ B(center, radius)."""
    x = _check_point(region, x)
    center = _vec(center, "center")
    if center.shape[0] != region.dim:
        raise ConfigurationError("cap center dimension mismatch")
    if not radius > 0:
        raise ConfigurationError(f"cap radius must be positive, got {radius}")
    settings = settings or DykstraSettings()
    kinds, params = region.packed()
    tol_sq = settings.tolerance ** 2 * (1.0 + _scale_sq(x))
    y, converged, sweeps = _kernels.dykstra(
        kinds, params, x, center, float(radius), tol_sq,
        settings.sweep_cap(kinds.shape[0] + 1))
    if not converged:
        raise DykstraConvergenceError(
            f"capped projection did not converge within {sweeps} sweeps", y, sweeps)
    return y


def _check_point(region: ConvexRegion, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (region.dim,):
        raise ConfigurationError(
            f"point has shape {x.shape}, region dimension is {region.dim}")
    return x


def region_to_config(region: ConvexRegion) -> dict:
    """Plain-dict form of a region, the inverse of region_from_config."""
    if region.kind == WHOLE:
        return {"kind": WHOLE, "dim": region.dim}
    if region.kind == BOX:
        return {"kind": BOX, "lower": region.lower.tolist(), "upper": region.upper.tolist()}
    if region.kind == BALL:
        return {"kind": BALL, "center": region.center.tolist(), "radius": region.radius}
    if region.kind == HALFSPACE:
        return {"kind": HALFSPACE, "normal": region.normal.tolist(), "offset": region.offset}
    return {"kind": INTERSECTION,
            "members": [region_to_config(m) for m in region.members]}


def region_from_config(config: dict) -> ConvexRegion:
    """Build a region from its dict form (e.g. parsed from a JSON file)."""
    try:
        kind = config["kind"]
    except (TypeError, KeyError):
        raise ConfigurationError("region config must be a mapping with a 'kind' tag")
    if kind == WHOLE:
        return whole_space(int(config["dim"]))
    if kind == BOX:
        return box(config["lower"], config["upper"])
    if kind == BALL:
        return ball(config["center"], config["radius"])
    if kind == HALFSPACE:
        return halfspace(config["normal"], config["offset"])
    if kind == INTERSECTION:
        return intersection(region_from_config(m) for m in config["members"])
    raise ConfigurationError(f"unknown region kind {kind!r}")


def load_region(path) -> ConvexRegion:
    with open(path, "r", encoding="utf-8") as fh:
        return region_from_config(json.load(fh))
