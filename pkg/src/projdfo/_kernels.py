"""Compiled inner loops for projections and the projected first-order solver.

Everything here operates on a packed region encoding so the hot loops stay
inside numba: a region is a pair ``(kinds, params)`` where ``kinds[m]`` is a
member code (1 box, 2 ball, 3 halfspace) and ``params[m]`` holds that
member's numeric fields in a fixed layout:

    box:        params[0:n] lower, params[n:2n] upper
    ball:       params[0:n] center, params[n] radius
    halfspace:  params[0:n] unit normal, params[n] offset

Halfspace normals are pre-normalized at packing time so the projection is a
single dot product. The whole space packs to zero members. An optional cap
ball (center, radius) is threaded through the Dykstra loop as a virtual
extra member; ``cap_radius < 0`` disables it.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BOX = 1
BALL = 2
HALFSPACE = 3


@njit(cache=True)
def _project_ball(center, radius, x, out):
    n = x.shape[0]
    d2 = 0.0
    for i in range(n):
        d = x[i] - center[i]
        d2 += d * d
    dist = np.sqrt(d2)
    if dist <= radius:
        for i in range(n):
            out[i] = x[i]
    else:
        scale = radius / dist
        for i in range(n):
            out[i] = center[i] + scale * (x[i] - center[i])


@njit(cache=True)
def _project_member(kind, params, x, out):
    n = x.shape[0]
    if kind == BOX:
        for i in range(n):
            v = x[i]
            lo = params[i]
            hi = params[n + i]
            if v < lo:
                v = lo
            elif v > hi:
                v = hi
            out[i] = v
    elif kind == BALL:
        _project_ball(params[:n], params[n], x, out)
    else:
        offset = params[n]
        dot = 0.0
        for i in range(n):
            dot += params[i] * x[i]
        if dot <= offset:
            for i in range(n):
                out[i] = x[i]
        else:
            excess = dot - offset
            for i in range(n):
                out[i] = x[i] - excess * params[i]


@njit(cache=True)
def dykstra(kinds, params, x, cap_center, cap_radius, tol_sq, max_sweeps):
    """Project x onto the intersection of the packed members (plus cap ball).

    Returns (point, converged, sweeps). Stops when the Birgin-Raydan sweep
    change (sum of squared increment updates) drops to tol_sq. With zero or
    one set the projection is exact and converged is always True.
    """
    n = x.shape[0]
    n_members = kinds.shape[0]
    has_cap = cap_radius >= 0.0
    total = n_members + (1 if has_cap else 0)

    if total == 0:
        return x.copy(), True, 0
    if total == 1:
        out = np.empty(n)
        if has_cap:
            _project_ball(cap_center, cap_radius, x, out)
        else:
            _project_member(kinds[0], params[0], x, out)
        return out, True, 1

    y = x.copy()
    increments = np.zeros((total, n))
    w = np.empty(n)
    proj = np.empty(n)
    for sweep in range(max_sweeps):
        change = 0.0
        for m in range(total):
            for i in range(n):
                w[i] = y[i] + increments[m, i]
            if m < n_members:
                _project_member(kinds[m], params[m], w, proj)
            else:
                _project_ball(cap_center, cap_radius, w, proj)
            for i in range(n):
                new_inc = w[i] - proj[i]
                diff = new_inc - increments[m, i]
                change += diff * diff
                increments[m, i] = new_inc
                y[i] = proj[i]
        if change <= tol_sq:
            return y, True, sweep + 1
    return y, False, max_sweeps


@njit(cache=True)
def _norm_sq(x):
    acc = 0.0
    for i in range(x.shape[0]):
        acc += x[i] * x[i]
    return acc


@njit(cache=True)
def fista(kinds, params, x0, delta, g, hess, has_hess, lip,
          step_tol, max_iter, dyk_tol, dyk_max_sweeps, target_decrease,
          start):
    """Accelerated projected descent for min g's + s'Hs/2 over the packed
    region intersected with the ball B(x0, delta).

    The iteration begins at ``start`` (callers pass x0 itself or a warm
    start such as a projected Newton point; a good start only shifts the
    momentum sequence, the convergence guarantee is unaffected). The
    gradient is updated incrementally along the momentum sequence while
    the reported value of each iterate is computed from the original
    (g, H) relative to x0. Tracks the best iterate by model value,
    starting from s = 0, so the returned step never increases the model.

    Returns (step, value, iterations, converged, projections_ok,
    reached_target). ``converged`` means the iterate displacement dropped
    below step_tol; ``reached_target`` means the decrease passed
    target_decrease (used for early witness exits; pass a non-positive
    target to disable).
    """
    n = x0.shape[0]
    x_cur = start.copy()
    y_cur = start.copy()
    g_cur = g.copy()
    if has_hess:
        for a in range(n):
            acc = 0.0
            for b in range(n):
                acc += hess[a, b] * (start[b] - x0[b])
            g_cur[a] += acc
    t_cur = 1.0
    best_step = np.zeros(n)
    best_val = 0.0
    s = np.empty(n)
    work = np.empty(n)
    converged = False
    projections_ok = True
    reached_target = False
    iterations = 0

    for _ in range(max_iter):
        iterations += 1
        for i in range(n):
            work[i] = y_cur[i] - g_cur[i] / lip
        tol_sq = dyk_tol * dyk_tol * (1.0 + _norm_sq(work))
        x_new, ok, _ = dykstra(kinds, params, work, x0, delta,
                               tol_sq, dyk_max_sweeps)
        if not ok:
            projections_ok = False

        for i in range(n):
            s[i] = x_new[i] - x0[i]
        val = 0.0
        for i in range(n):
            val += g[i] * s[i]
        if has_hess:
            quad = 0.0
            for a in range(n):
                row = 0.0
                for b in range(n):
                    row += hess[a, b] * s[b]
                quad += s[a] * row
            val += 0.5 * quad
        if val < best_val:
            best_val = val
            for i in range(n):
                best_step[i] = s[i]
        if target_decrease > 0.0 and -best_val > target_decrease:
            reached_target = True
            break

        move = 0.0
        for i in range(n):
            d = x_new[i] - x_cur[i]
            move += d * d
        if np.sqrt(move) <= step_tol:
            converged = True
            break

        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_cur * t_cur))
        coef = (t_cur - 1.0) / t_new
        for i in range(n):
            y_new_i = x_new[i] + coef * (x_new[i] - x_cur[i])
            work[i] = y_new_i - y_cur[i]
            y_cur[i] = y_new_i
        if has_hess:
            for a in range(n):
                acc = 0.0
                for b in range(n):
                    acc += hess[a, b] * work[b]
                g_cur[a] += acc
        for i in range(n):
            x_cur[i] = x_new[i]
        t_cur = t_new

    return best_step, best_val, iterations, converged, projections_ok, reached_target
