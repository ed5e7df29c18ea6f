"""Release gates: ten end-to-end checks spanning the whole package.

Each test is one pass/fail gate over the assembled system rather than a
unit: the full benchmark matrix stays strictly feasible and finishes fast,
geometry certificates and model error bounds hold on randomized instances
against independent oracles, the trust-region bookkeeping obeys its
counting bound on every recorded history, and benchmark output is
byte-reproducible under noise. The noiseless benchmark runs once per
session (module-scoped fixtures) and is shared by the gates that audit it.
"""

import dataclasses
import math
import time
from types import SimpleNamespace

import numpy as np
import pytest

from projdfo.bench import (
    performance_profile,
    run_benchmark,
    write_profile,
    write_records,
)
from projdfo.geometry import (
    InterpolationSet,
    build_linear_model,
    improve_geometry,
    initial_feasible_set,
    poisedness_constant,
)
from projdfo.problems import NoiseSpec
from projdfo.regions import (
    ball,
    box,
    halfspace,
    intersection,
    project,
    region_to_config,
    whole_space,
)
from projdfo.solver import SolverConfig, solve
from projdfo.subproblem import QuadraticModel, solve_trust_region

from oracles import (
    max_ball_simplex_volume,
    primitives_of_region_config,
    qp_project_polyhedron,
    quadratic_min_2d,
    simplex_volume,
)

FULL_MATRIX = 58 * 4
REGION_KINDS = ("whole", "box", "ball", "halfspace")


@pytest.fixture(scope="module")
def noiseless_matrix():
    start = time.perf_counter()
    runs = run_benchmark()
    wall = time.perf_counter() - start
    return SimpleNamespace(runs=runs, wall=wall)


@pytest.fixture(scope="module")
def reluctant_matrix():
    # Same solver with a barely-growing radius: a deliberately weak rival
    # for the profile-dominance gate.
    config = SolverConfig(gamma_inc=1.01)
    return run_benchmark(config=config, solver_name="reluctant")


def random_region(kind, rng):
    if kind == "whole":
        return whole_space(2)
    if kind == "box":
        return box(rng.uniform(-2.0, -0.5, 2), rng.uniform(0.5, 2.0, 2))
    if kind == "ball":
        return ball(rng.normal(size=2) * 0.5, rng.uniform(0.8, 2.0))
    if kind == "halfspace":
        normal = rng.normal(size=2)
        while np.linalg.norm(normal) < 0.1:
            normal = rng.normal(size=2)
        # offset keeps a neighborhood of a random anchor feasible
        offset = float(normal @ (rng.normal(size=2) * 0.3)) + rng.uniform(0.5, 1.5)
        return halfspace(normal, offset)
    return intersection([
        box(rng.uniform(-3.0, -0.5, 2), rng.uniform(0.5, 3.0, 2)),
        halfspace(rng.normal(size=2), rng.uniform(0.5, 2.0)),
    ])


def test_benchmark_stays_strictly_feasible(noiseless_matrix):
    runs = noiseless_matrix.runs
    assert len(runs) == FULL_MATRIX
    failures = [run.error for run in runs if run.error is not None]
    assert failures == []
    # Every recorded evaluation sits within 1e-10 of its region; the
    # feasible flag is computed from that distance at record time.
    off_region = sum(
        1 for run in runs for _, feasible, _ in run.record.evaluations
        if not feasible)
    assert off_region == 0
    assert all(len(run.record.evaluations) >= 1 for run in runs)
    assert noiseless_matrix.wall < 600.0


def test_anisotropic_set_certifies_inside_matching_strip():
    # A set squashed to thickness eps is badly poised in the plane but well
    # poised once the region is the strip |y_2| <= eps that matches it.
    for eps in (1e-1, 1e-2, 1e-4):
        iset = InterpolationSet(
            np.zeros(2), np.array([[1.0, 0.0], [0.0, eps]]), None, 1.0, 1.0)

        strip = box([-np.inf, -eps], [np.inf, eps])
        report = poisedness_constant(iset, strip, 1.0)
        assert report.certified
        assert report.lambda_hat <= 3.0 * 1.05

        free = poisedness_constant(iset, whole_space(2), 1.0)
        assert free.certified
        assert free.lambda_hat >= (0.5 / eps) * 0.95


def test_fully_linear_bounds_hold_on_certified_sets():
    # 50 random quadratics with known gradient Lipschitz constant per region
    # kind; the measured poisedness constant must certify both the gradient
    # and the value error over a thousand feasible unit-ball directions.
    rng = np.random.default_rng(303)
    violations = 0
    for kind in REGION_KINDS:
        for trial in range(50):
            region = random_region(kind, rng)
            base = project(region, rng.normal(size=2) * 0.7)
            delta = rng.uniform(0.2, 0.5)

            basis, _ = np.linalg.qr(rng.normal(size=(2, 2)))
            eigs = rng.uniform(-3.0, 3.0, 2)
            hess = basis @ np.diag(eigs) @ basis.T
            hess = (hess + hess.T) / 2
            lip = float(np.max(np.abs(np.linalg.eigvalsh(hess))))
            slope = rng.normal(size=2) * rng.choice([0.3, 1.0, 3.0])
            f = lambda y: 0.5 * y @ hess @ y + slope @ y
            grad_f = lambda y: hess @ y + slope

            iset = initial_feasible_set(region, base, delta,
                                        rng_seed=1000 + trial)
            repaired = improve_geometry(iset, region, delta, 5.0)
            assert repaired.certified
            iset = repaired.set
            values = np.array([f(y) for y in iset.all_points()])
            model = build_linear_model(iset.with_values(values))
            report = poisedness_constant(iset, region, delta)
            assert report.certified
            lam = report.lambda_hat
            beta = iset.spread

            grad_bound = 0.5 * 2 * lam * lip * beta**2 * delta
            value_bound = 0.5 * lip * (2 * lam * beta**2 + 1.0) * delta**2
            grad_err = grad_f(base) - model.grad
            for _ in range(1000):
                raw = rng.normal(size=2)
                raw /= np.linalg.norm(raw)
                d = project(region, base + raw) - base
                if abs(grad_err @ d) > grad_bound + 1e-9:
                    violations += 1
                y = project(region, base + delta * rng.uniform(-1, 1, 2))
                if (np.linalg.norm(y - base) <= delta
                        and abs(f(y) - model.value(y)) > value_bound + 1e-9):
                    violations += 1
    assert violations == 0


def test_subproblem_matches_grid_oracle_and_cauchy_audit(noiseless_matrix):
    # Part one: the projected-gradient step solver agrees with a refined
    # grid-and-boundary-sweep oracle on random 2-D instances of every
    # region kind.
    rng = np.random.default_rng(404)
    for kind in REGION_KINDS + ("inter",):
        for _ in range(100):
            region = random_region(kind, rng)
            x = project(region, rng.normal(size=2))
            basis, _ = np.linalg.qr(rng.normal(size=(2, 2)))
            hess = basis @ np.diag(rng.uniform(0.0, 5.0, 2)) @ basis.T
            hess = (hess + hess.T) / 2
            grad = rng.normal(size=2) * rng.choice([0.1, 1.0, 10.0])
            model = QuadraticModel(x, 0.0, grad, hess)
            delta = rng.uniform(0.3, 2.0)

            prims = primitives_of_region_config(region_to_config(region))
            ref_val, _ = quadratic_min_2d(grad, hess, x, delta, prims)
            result = solve_trust_region(model, region, delta)
            assert -result.decrease == pytest.approx(
                ref_val, abs=1e-6 * (1 + abs(ref_val)))

    # Part two: every evaluated trial step across the full benchmark met the
    # Cauchy decrease condition with coefficient 0.1 (the recorded decrease
    # and Hessian norm let the check be replayed exactly).
    coeff = SolverConfig().cauchy_coeff
    assert coeff == 0.1
    audited = 0
    for run in noiseless_matrix.runs:
        for rec in run.result.history:
            if rec.rho is None:
                continue
            required = coeff * rec.pi_m * min(
                rec.pi_m / (1.0 + rec.hess_norm), rec.delta_before, 1.0)
            assert rec.model_decrease >= required
            audited += 1
    assert audited > 0


def test_polyhedral_projection_matches_qp_oracle():
    # 200 random halfspace intersections in 2-D and 3-D with a guaranteed
    # interior point, checked against an active-set style QP oracle.
    rng = np.random.default_rng(505)
    checked = 0
    while checked < 200:
        n = int(rng.integers(2, 4))
        k = int(rng.integers(2, 6))
        normals = rng.normal(size=(k, n))
        if np.any(np.linalg.norm(normals, axis=1) < 1e-3):
            continue
        interior = rng.normal(size=n)
        offsets = normals @ interior + rng.uniform(0.1, 1.0, k)
        region = intersection(
            [halfspace(normals[i], offsets[i]) for i in range(k)])
        x = rng.normal(size=n) * rng.choice([0.5, 2.0, 5.0])
        ours = project(region, x)
        ref = qp_project_polyhedron(x, normals, offsets)
        assert np.linalg.norm(ours - ref) <= 1e-8
        checked += 1


def test_degenerate_set_repair_respects_swap_budget():
    # 100 nearly-colinear starts: the repair must certify within the swap
    # budget ceil(log_bound(V_max / V_1)) while growing the simplex volume
    # by at least the bound on every swap.
    bound = 3.0
    templates = [
        (whole_space(2), 2, 0.9),
        (box(-2 * np.ones(2), 2 * np.ones(2)), 2, 0.9),
        (ball(np.zeros(2), 2.0), 2, 0.9),
        (halfspace([1.0, 0.0], 0.2), 2, 0.15),
        (box(-2 * np.ones(3), 2 * np.ones(3)), 3, 0.8),
    ]
    rng = np.random.default_rng(606)
    checked = 0
    while checked < 100:
        region, n, scale = templates[checked % len(templates)]
        base = np.zeros(n)
        directions = rng.normal(size=(n, n))
        directions /= np.linalg.norm(directions, axis=1)[:, None]
        directions[1] = directions[0] + 1e-3 * directions[1]
        pts = base + scale * directions / max(1.0, np.linalg.norm(directions))
        iset = InterpolationSet(base, pts, None, 1.0, 1.0)
        if not iset.is_well_posed():
            continue
        result = improve_geometry(iset, region, 1.0, bound)
        assert result.certified

        volume_before = simplex_volume(base, pts)
        volume_cap = max_ball_simplex_volume(n, 1.0)
        allowed = math.ceil(math.log(volume_cap / volume_before, bound))
        assert len(result.swaps) <= max(allowed, 0)
        for swap in result.swaps:
            growth = abs(swap.det_after) / abs(swap.det_before)
            assert growth >= bound * (1 - 1e-6)
        checked += 1


def test_radius_shrink_growth_accounting(noiseless_matrix):
    # On every recorded history the number of radius reductions is bounded
    # by a multiple of the growths plus the total fall from the starting
    # radius to the smallest one observed, plus one.
    config = SolverConfig()
    gamma_dec = config.resolved_gamma_dec()
    slope = math.log(config.gamma_inc) / abs(math.log(gamma_dec))
    audited = 0
    for run in noiseless_matrix.runs:
        history = run.result.history
        if not history:
            continue
        n_success = sum(1 for rec in history if rec.branch == "successful")
        n_shrink = sum(
            1 for rec in history
            if rec.branch == "unsuccessful"
            or (rec.branch == "criticality"
                and rec.delta_after < rec.delta_before))
        delta0 = history[0].delta_before
        delta_min = min(min(rec.delta_after for rec in history), delta0)
        fall = math.log(delta0 / delta_min) / abs(math.log(gamma_dec))
        assert n_shrink <= slope * n_success + fall + 1.0 + 1e-9
        audited += 1
    assert audited > 0


def test_converges_to_projected_target():
    # Minimizing ||x - a||^2 with an infeasible anchor must land on the
    # projection of the anchor, at a certified near-stationary point,
    # within the evaluation budget.
    a = np.array([3.0, 4.0])

    def residuals(x):
        return math.sqrt(2.0) * (x - a)  # objective ||x - a||^2

    cases = [
        (ball(np.zeros(2), 1.0), [0.5, 0.0]),
        (halfspace([1.0, 1.0], 1.0), [0.0, 0.0]),
    ]
    for region, start in cases:
        target = project(region, a)
        result = solve(residuals, region, start,
                       SolverConfig(pi_tol=1e-6, max_evaluations=200))
        assert result.n_evaluations <= 200
        assert result.pi <= 1e-6
        assert result.fully_linear
        assert np.linalg.norm(result.x - target) <= 1e-6


def test_profiles_self_consistent_and_dominant(noiseless_matrix,
                                               reluctant_matrix):
    records = [run.record for run in noiseless_matrix.runs]

    # Self vs self: identical record sets tie on every instance, so both
    # curves must reach one at ratio one with nothing excluded.
    twin = [dataclasses.replace(rec, solver="twin") for rec in records]
    curve = performance_profile(records + twin, tau=1e-1)
    assert curve.denominator == FULL_MATRIX
    assert curve.value("projdfo", 1.0) == 1.0
    assert curve.value("twin", 1.0) == 1.0

    # Against the barely-growing variant the default configuration must be
    # the faster solver on at least 60% of the matrix.
    rivals = records + [run.record for run in reluctant_matrix]
    contest = performance_profile(rivals, tau=1e-1)
    assert contest.value("projdfo", 1.0) >= 0.6


def test_noisy_benchmark_output_is_reproducible(tmp_path):
    # Two benchmark runs with the same global seed must serialize to
    # byte-identical record and profile files for both noise kinds.
    names = ("rosenbrock_good_start", "freudenstein_roth_good_start")
    constraints = ("none", "ball")
    for kind in ("multiplicative", "additive"):
        outputs = []
        for repeat in range(2):
            runs = run_benchmark(names, constraints,
                                 noise=NoiseSpec(kind, 1e-2),
                                 global_seed=7)
            records = [run.record for run in runs]
            rec_path = tmp_path / f"{kind}_{repeat}_records.csv"
            prof_path = tmp_path / f"{kind}_{repeat}_profile.csv"
            write_records(records, rec_path)
            write_profile(performance_profile(records, tau=1e-1), prof_path)
            outputs.append((rec_path.read_bytes(), prof_path.read_bytes()))
        assert outputs[0][0] == outputs[1][0]
        assert outputs[0][1] == outputs[1][1]
