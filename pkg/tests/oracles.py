"""Independent reference computations used to freeze expected test values.

Nothing here imports the package under test. The oracles are deliberately
brute-force: KKT enumeration for polyhedral projections, nested dense grids
for two-dimensional model minima, angular sweeps for constrained linear
minimization, and closed-form ball maxima. Slow and obviously correct beats
fast and clever for reference data.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def qp_project_polyhedron(x, normals, offsets):
    """Projection of x onto {z : normals @ z <= offsets} by active-set enumeration.

    Tries every subset of constraints as the active set, solves the equality
    KKT system, and keeps primal/dual feasible candidates. Exact up to
    linear-algebra roundoff for any bounded-size polyhedron; infeasible or
    degenerate subsets are skipped.
    """
    x = np.asarray(x, dtype=float)
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    n = x.shape[0]
    m = normals.shape[0]
    scale = 1.0 + float(np.linalg.norm(x))
    best = None
    best_dist = np.inf
    for size in range(0, min(n, m) + 1):
        for active in itertools.combinations(range(m), size):
            if size == 0:
                z = x.copy()
            else:
                A = normals[list(active)]
                b = offsets[list(active)]
                gram = A @ A.T
                try:
                    lam = np.linalg.solve(gram, A @ x - b)
                except np.linalg.LinAlgError:
                    continue
                if np.linalg.norm(gram @ lam - (A @ x - b)) > 1e-9 * scale:
                    continue
                if np.any(lam < -1e-10 * scale):
                    continue
                z = x - A.T @ lam
            if np.any(normals @ z - offsets > 1e-9 * scale):
                continue
            dist = float(np.linalg.norm(z - x))
            if dist < best_dist - 1e-15:
                best_dist = dist
                best = z
    if best is None:
        raise ValueError("polyhedron appears empty")
    return best


def grid_minimize_2d(value_fn, mask_fn, center, half_width, levels=3, points=401):
    """Minimize value_fn over masked grid squares, refining around the argmin.

    value_fn and mask_fn take meshgrid arrays (X, Y). Each level shrinks the
    window to +-2 grid cells around the current argmin. Returns
    (best_value, best_point). Reliable for interior minima only: an argmin
    pinned to a curved boundary can drift tangentially by much more than one
    cell between levels, so boundary minima need the dedicated sweeps in
    quadratic_min_2d.
    """
    cx, cy = float(center[0]), float(center[1])
    hx = hy = float(half_width)
    best_val = np.inf
    best_pt = None
    for _ in range(levels):
        xs = np.linspace(cx - hx, cx + hx, points)
        ys = np.linspace(cy - hy, cy + hy, points)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        mask = mask_fn(X, Y)
        if not np.any(mask):
            break
        vals = np.where(mask, value_fn(X, Y), np.inf)
        idx = np.unravel_index(np.argmin(vals), vals.shape)
        val = float(vals[idx])
        if val < best_val:
            best_val = val
            best_pt = np.array([X[idx], Y[idx]])
        cx, cy = float(X[idx]), float(Y[idx])
        step = xs[1] - xs[0]
        hx = hy = 2.0 * step
    return best_val, best_pt


class Primitive2D:
    """Closed-form feasibility and boundary curves for oracle use.

    kind is 'box' (lower, upper), 'ball' (center, radius) or 'halfspace'
    (normal, offset; normalized so ||normal|| = 1).
    """

    def __init__(self, kind, **fields):
        self.kind = kind
        if kind == "halfspace":
            a = np.asarray(fields["normal"], dtype=float)
            scale = np.linalg.norm(a)
            self.normal = a / scale
            self.offset = float(fields["offset"]) / scale
        elif kind == "ball":
            self.center = np.asarray(fields["center"], dtype=float)
            self.radius = float(fields["radius"])
        elif kind == "box":
            self.lower = np.asarray(fields["lower"], dtype=float)
            self.upper = np.asarray(fields["upper"], dtype=float)
        else:
            raise ValueError(kind)

    def feasible(self, pts, slack):
        pts = np.atleast_2d(pts)
        if self.kind == "halfspace":
            return pts @ self.normal <= self.offset + slack
        if self.kind == "ball":
            d = np.linalg.norm(pts - self.center, axis=1)
            return d <= self.radius + slack
        ok_lo = np.all(pts >= self.lower - slack, axis=1)
        ok_hi = np.all(pts <= self.upper + slack, axis=1)
        return ok_lo & ok_hi

    def boundary_curves(self):
        """Curves as ('line', point, unit_dir) or ('circle', center, radius)."""
        if self.kind == "halfspace":
            p0 = self.normal * self.offset
            u = np.array([-self.normal[1], self.normal[0]])
            return [("line", p0, u)]
        if self.kind == "ball":
            return [("circle", self.center, self.radius)]
        lo, hi = self.lower, self.upper
        ex = np.array([1.0, 0.0])
        ey = np.array([0.0, 1.0])
        return [
            ("line", np.array([lo[0], 0.0]), ey),
            ("line", np.array([hi[0], 0.0]), ey),
            ("line", np.array([0.0, lo[1]]), ex),
            ("line", np.array([0.0, hi[1]]), ex),
        ]


def _curve_points(curve, tr_center, tr_radius, ts=None, n_samples=20001):
    """Sample a boundary curve over its portion near the trust region."""
    kind, anchor, extra = curve
    if kind == "circle":
        if ts is None:
            ts = np.linspace(-math.pi, math.pi, n_samples)
        pts = anchor + extra * np.stack([np.cos(ts), np.sin(ts)], axis=1)
        return ts, pts
    u = extra
    foot = anchor + u * ((tr_center - anchor) @ u)
    gap = np.linalg.norm(foot - tr_center)
    if gap > tr_radius:
        return None, None
    width = math.sqrt(max(tr_radius ** 2 - gap ** 2, 0.0))
    if ts is None:
        ts = np.linspace(-width, width, n_samples)
    pts = foot + np.outer(ts, u)
    return ts, pts


def _intersect(curve_a, curve_b):
    """Exact intersection points of two boundary curves (possibly none)."""
    ka, pa, ea = curve_a
    kb, pb, eb = curve_b
    if ka == "line" and kb == "line":
        A = np.array([ea, -eb]).T
        if abs(np.linalg.det(A)) < 1e-12:
            return []
        t = np.linalg.solve(A, pb - pa)
        return [pa + t[0] * ea]
    if ka == "circle" and kb == "circle":
        d = np.linalg.norm(pb - pa)
        if d < 1e-14 or d > ea + eb or d < abs(ea - eb):
            return []
        a = (ea ** 2 - eb ** 2 + d ** 2) / (2 * d)
        h2 = ea ** 2 - a ** 2
        if h2 < 0:
            return []
        mid = pa + a * (pb - pa) / d
        perp = np.array([-(pb - pa)[1], (pb - pa)[0]]) / d
        h = math.sqrt(h2)
        return [mid + h * perp, mid - h * perp]
    if ka == "circle":
        return _intersect(curve_b, curve_a)
    # line (pa, ea) with circle (pb, eb)
    w = pa - pb
    b = float(w @ ea)
    c = float(w @ w) - eb ** 2
    disc = b * b - c
    if disc < 0:
        return []
    root = math.sqrt(disc)
    return [pa + (-b + root) * ea, pa + (-b - root) * ea]


def quadratic_min_2d(g, hess, x, delta, primitives, slack=1e-9):
    """Reference minimum of g.s + s.H.s/2 over ||s|| <= delta and primitives.

    Three candidate families cover every KKT configuration in the plane:
    an interior nested grid, refined 1-D sweeps along every boundary curve
    (feasibility-masked), and exact pairwise curve intersections. Returns
    (value, point). Only closed forms and dense sampling; no iterative
    optimizer shares logic with the code under test.
    """
    g = np.asarray(g, dtype=float)
    hess = np.asarray(hess, dtype=float)
    x = np.asarray(x, dtype=float)

    def value_of(pts):
        s = np.atleast_2d(pts) - x
        return s @ g + 0.5 * np.einsum("ij,jk,ik->i", s, hess, s)

    def feasible(pts):
        pts = np.atleast_2d(pts)
        ok = np.linalg.norm(pts - x, axis=1) <= delta * (1 + slack) + slack
        for prim in primitives:
            ok &= prim.feasible(pts, slack)
        return ok

    best_val, best_pt = np.inf, None

    def consider(pts):
        nonlocal best_val, best_pt
        pts = np.atleast_2d(pts)
        ok = feasible(pts)
        if not np.any(ok):
            return
        vals = value_of(pts)
        vals = np.where(ok, vals, np.inf)
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val = float(vals[i])
            best_pt = pts[i]

    # x itself anchors the candidates (always feasible by construction)
    consider(x[None, :])

    # interior minimum: nested grid is drift-safe away from boundaries
    def grid_value(X, Y):
        SX, SY = X - x[0], Y - x[1]
        return (g[0] * SX + g[1] * SY
                + 0.5 * (hess[0, 0] * SX ** 2 + 2 * hess[0, 1] * SX * SY
                         + hess[1, 1] * SY ** 2))

    def grid_mask(X, Y):
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        return feasible(pts).reshape(X.shape)

    val, pt = grid_minimize_2d(grid_value, grid_mask, x, delta)
    if pt is not None and val < best_val:
        best_val, best_pt = val, pt

    curves = [("circle", x, float(delta))]
    for prim in primitives:
        curves.extend(prim.boundary_curves())

    # boundary minima: refined 1-D sweeps are drift-free
    for curve in curves:
        ts, pts = _curve_points(curve, x, delta)
        if ts is None:
            continue
        for _ in range(3):
            ok = feasible(pts)
            if not np.any(ok):
                break
            vals = np.where(ok, value_of(pts), np.inf)
            i = int(np.argmin(vals))
            if vals[i] < best_val:
                best_val = float(vals[i])
                best_pt = pts[i]
            span = ts[1] - ts[0]
            ts = np.linspace(ts[i] - 2 * span, ts[i] + 2 * span, len(ts))
            _, pts = _curve_points(curve, x, delta, ts=ts)

    # corners: exact intersections of curve pairs
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            for pt in _intersect(curves[i], curves[j]):
                consider(pt[None, :])

    return best_val, best_pt


def primitives_of_region_config(config):
    """Primitive2D list from a region config dict (whole space contributes none)."""
    kind = config["kind"]
    if kind == "whole-space":
        return []
    if kind == "intersection":
        out = []
        for member in config["members"]:
            out.extend(primitives_of_region_config(member))
        return out
    if kind == "box":
        return [Primitive2D("box", lower=config["lower"], upper=config["upper"])]
    if kind == "ball":
        return [Primitive2D("ball", center=config["center"], radius=config["radius"])]
    return [Primitive2D("halfspace", normal=config["normal"], offset=config["offset"])]


def linear_min_direction_2d(g, feasible_fn, x, radius=1.0, n_angles=20000, n_radii=400):
    """Brute-force argmin of g . d over {d : x + d feasible, ||d|| <= radius}.

    Polar sweep; feasible_fn takes a single point. Returns (min_value, d).
    The zero direction is always a candidate.
    """
    g = np.asarray(g, dtype=float)
    x = np.asarray(x, dtype=float)
    best_val = 0.0
    best_d = np.zeros(2)
    for k in range(n_angles):
        theta = 2.0 * math.pi * k / n_angles
        u = np.array([math.cos(theta), math.sin(theta)])
        slope = float(g @ u)
        if slope >= best_val:
            continue
        for j in range(n_radii, 0, -1):
            rho = radius * j / n_radii
            if feasible_fn(x + rho * u):
                val = slope * rho
                if val < best_val:
                    best_val = val
                    best_d = rho * u
                break
    return best_val, best_d


def cauchy_linesearch(g, hess, d_star, pi, delta, coeff=0.1, max_halvings=20):
    """Backtracking along the criticality direction, the decrease-bound recipe.

    Feasibility of x + t*d_star for t in (0, 1] follows from convexity, so no
    projections are needed. Returns (best_decrease, satisfied) where
    satisfied reports whether some step met the generalized Cauchy bound
    coeff * pi * min(pi / (1 + ||H||), delta, 1).
    """
    g = np.asarray(g, dtype=float)
    hess = np.asarray(hess, dtype=float)
    d_star = np.asarray(d_star, dtype=float)
    h_norm = float(np.linalg.norm(hess, 2))
    required = coeff * pi * min(pi / (1.0 + h_norm), delta, 1.0)
    best = 0.0
    satisfied = False
    t = min(delta, 1.0)
    for _ in range(max_halvings):
        s = t * d_star
        decrease = -(float(g @ s) + 0.5 * float(s @ hess @ s))
        best = max(best, decrease)
        if decrease >= required:
            satisfied = True
            break
        t *= 0.5
    return best, satisfied


def box_vertices(lower, upper):
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    corners = []
    for picks in itertools.product(*[(lo, hi) for lo, hi in zip(lower, upper)]):
        corners.append(np.array(picks))
    return corners


def simplex_volume(base, points):
    """Volume of the simplex with vertices {base} + points (n points in R^n)."""
    directions = np.asarray(points, dtype=float) - np.asarray(base, dtype=float)
    n = directions.shape[1]
    return abs(float(np.linalg.det(directions))) / math.factorial(n)


def max_ball_simplex_volume(n, radius):
    """Largest simplex volume with all n+1 vertices inside a ball (regular simplex)."""
    return (radius ** n) * (n + 1) ** ((n + 1) / 2.0) / (math.factorial(n) * n ** (n / 2.0))


def linear_ball_max(const, grad, radius):
    """max |const + grad . s| over ||s|| <= radius (closed form)."""
    reach = radius * float(np.linalg.norm(grad))
    return max(abs(const + reach), abs(const - reach))
