"""Acceptance suite: every convergence guarantee as a runnable assertion.

One test per criterion; each prints a single PASS/FAIL line (visible with
``pytest -v -s`` or in failure output).  Tolerances follow the package-wide
policy: ATOL + RTOL*scale slack absorbs roundoff only.
"""

import numpy as np
import pytest

from abfopt import diagnostics, problem, prox, solvers
from abfopt.diagnostics import ATOL, RTOL, tolerance

from conftest import grid_prox_1d


def report(number: int, description: str, ok: bool) -> None:
    print(f"ACCEPTANCE {number:02d} {'PASS' if ok else 'FAIL'}: {description}")
    assert ok, f"criterion {number}: {description}"


def test_criterion_01_convex_rate_bound(abf_runs):
    """Rate bound holds at every recorded k of the 2000-iteration runs,
    each finishing within the 5 second budget."""
    ok = True
    for name, (trajectory, elapsed) in abf_runs.items():
        ok = ok and elapsed < 5.0
        for rec in trajectory.records:
            slack = rec.bound - rec.f_gap
            ok = ok and slack >= -(ATOL + RTOL * rec.bound)
    report(1, "convex rate bound on quadratic and lasso, runtime < 5 s", ok)


def test_criterion_02_convex_energy_monotone(abf_runs):
    """Energy nonincreasing per step; initial energy collapses to
    s*(F(x_0)-F*) + ||x_0-x*||^2/2 within 8 ulps."""
    ok = True
    for name, (trajectory, _) in abf_runs.items():
        records = trajectory.records
        for prev, cur in zip(records, records[1:]):
            allowance = tolerance(prev.scales["energy"], cur.scales["energy"])
            ok = ok and cur.energy <= prev.energy + allowance
        rec0 = records[0]
        direct = trajectory.context.s * rec0.f_gap + 0.5 * rec0.x_dist ** 2
        ok = ok and diagnostics.ulps_apart(rec0.energy, direct) <= 8.0
    report(2, "convex energy monotone; E_0 identity to 8 ulps", ok)


def test_criterion_03_sc_rate_bound(abf_sc_runs):
    """Linear rate bound pointwise on both strongly convex runs, and the
    observed late-stage contraction of the gap stays within 0.05 of the
    certified ratio."""
    ok = True
    for name, (trajectory, _) in abf_sc_runs.items():
        theta = trajectory.context.theta
        for rec in trajectory.records:
            slack = rec.bound - rec.f_gap
            ok = ok and slack >= -(ATOL + RTOL * rec.bound)
        floor = 1e-12 * (1.0 + abs(trajectory.context.fstar))
        rate = diagnostics.geometric_rate(
            [r.k for r in trajectory.records],
            [r.f_gap for r in trajectory.records], floor)
        ok = ok and rate <= (1.0 - theta) + 0.05
    report(3, "strongly convex rate bound and contraction ratio", ok)


def test_criterion_04_sc_energy_contraction(abf_sc_runs):
    """E_{k+1} <= (1-theta)*E_k at every step of the strongly convex runs."""
    ok = True
    for name, (trajectory, _) in abf_sc_runs.items():
        theta = trajectory.context.theta
        records = trajectory.records
        for prev, cur in zip(records, records[1:]):
            allowance = tolerance(prev.scales["energy"], cur.scales["energy"])
            ok = ok and cur.energy <= (1.0 - theta) * prev.energy + allowance
    report(4, "strongly convex energy contraction per step", ok)


def test_criterion_05_certificate_nonnegativity(abf_runs, abf_sc_runs):
    """Both convexity gaps stay nonnegative across all runs, and the f-gap
    dominates the squared gradient drift over 2L."""
    ok = True
    everything = list(abf_runs.values()) + list(abf_sc_runs.values())
    for trajectory, _ in everything:
        L = trajectory.context.lipschitz_L
        for rec in trajectory.records:
            ok = ok and rec.eta >= -tolerance(rec.scales["eta"])
            ok = ok and rec.psi >= -tolerance(rec.scales["psi"])
            floor = rec.grad_drift ** 2 / (2.0 * L)
            ok = ok and rec.psi >= floor - tolerance(rec.scales["psi"], floor)
    report(5, "certificate nonnegativity and gradient-drift floor", ok)


@pytest.mark.parametrize("m", [0.5, 1.0])
def test_criterion_06_schedule_identity(m):
    """Recursion identity within 8 ulps over 10^4 steps, convergence
    inequality, and monotone momentum approaching 1."""
    from abfopt import schedule

    ok = True
    t = 1.0
    previous_lam = -1.0
    for _ in range(10**4):
        t_next = schedule.next_t(t, m)
        ok = ok and abs(t_next * (t_next - m) - t * t) <= 8 * np.spacing(t * t)
        ok = ok and t_next * (t_next - 1.0) <= t * t + 8 * np.spacing(t * t)
        lam = schedule.lambda_from_t(t, t_next)
        ok = ok and 0.0 <= lam < 1.0 and lam >= previous_lam
        previous_lam = lam
        t = t_next
    ok = ok and previous_lam >= 1.0 - 1e-3
    report(6, f"schedule identity and momentum limit (m={m})", ok)


def test_criterion_07_first_step_equivalence(quad20, lasso2040, l1quad20):
    """The first accelerated step has zero momentum and must reproduce one
    plain proximal-gradient step to 8 ulps (it lands bitwise here)."""
    ok = True
    for inst in (quad20, lasso2040, l1quad20):
        s = 1.0 / inst.f.lipschitz_L
        state0 = solvers.abf_init(inst, s)
        state1 = solvers.abf_step(state0, inst)
        pg = inst.g.prox(s, state0.x - s * inst.f.gradient(state0.x))
        scale = np.maximum(np.abs(state1.x), np.abs(pg))
        ok = ok and bool(np.all(np.abs(state1.x - pg) <= 8 * np.spacing(scale)))
    report(7, "first step equals one proximal-gradient step", ok)


def test_criterion_08_prox_descent(quad20, lasso2040, l1quad20):
    """Prox-descent inequality on 100 random pairs per instance."""
    ok = True
    rng = np.random.default_rng(2024)
    for inst in (quad20, lasso2040, l1quad20):
        s = 1.0 / inst.f.lipschitz_L
        for _ in range(100):
            y = rng.normal(size=inst.dimension)
            x = rng.normal(size=inst.dimension)
            slack = diagnostics.prox_descent_check(y, x, s, inst)
            ok = ok and slack >= -tolerance(abs(slack), inst.objective(x))
    report(8, "prox-descent inequality on 100 sampled pairs per instance", ok)


def test_criterion_09_fixed_point_limits(quad20, l1quad20, lasso2040):
    """Long strongly convex runs settle on the asymptotic triple; the smooth
    gradient is constant across the solution set."""
    ok = True
    # g = 0: grad f vanishes at the optimum, so the 2s-form residual decays
    trajectory = solvers.run(quad20, solvers.RunConfig(method="abf_sc",
                                                       max_iterations=1000))
    ok = ok and trajectory.records[-1].residual_z <= 1e-6
    # g = l1: the constant-momentum iteration settles on its own prox step
    # (1+lambda)*s, so the fixed-point check uses that coefficient
    trajectory = solvers.run(l1quad20, solvers.RunConfig(method="abf_sc",
                                                         max_iterations=1000))
    state = trajectory.final_state
    residual = np.linalg.norm(
        state.z - state.x + (1.0 + state.schedule.lam) * state.s * state.grad)
    ok = ok and residual <= 1e-6
    # gradient constancy over the solution set, from two distinct starts
    start = np.random.default_rng(5).normal(size=lasso2040.dimension)
    first = problem.reference_solve(lasso2040, 1e-12)
    second = problem.reference_solve(lasso2040, 1e-12, start=start)
    drift = np.linalg.norm(lasso2040.f.gradient(first.minimizer)
                           - lasso2040.f.gradient(second.minimizer))
    ok = ok and first.converged and second.converged and drift <= 1e-6
    report(9, "fixed-point limits and gradient constancy on the solution set", ok)


def test_criterion_10_summability(abf_runs):
    """Telescoped partial sums stay below the initial energy."""
    ok = True
    for name, (trajectory, _) in abf_runs.items():
        reportd = diagnostics.trend_checks(trajectory)
        e0 = trajectory.records[0].energy
        ok = ok and reportd.sum_t_psi <= e0 + 1e-8
        ok = ok and reportd.sum_t_eta_next <= e0 + 1e-8
    report(10, "weighted certificate sums bounded by the initial energy", ok)


def test_criterion_11_oracles_vs_brute_force(lasso2040, quad20):
    """Closed-form prox maps match the grid minimizer; gradients match
    central differences."""
    ok = True
    cases = [
        (lambda x: np.abs(x), prox.prox_l1(1.0, 1.0, np.array([3.0]))[0], 1.0, 3.0),
        (lambda x: np.abs(x), prox.prox_l1(1.0, 1.0, np.array([-0.5]))[0], 1.0, -0.5),
        (lambda x: np.abs(x), prox.prox_l1(1.0, 1.0, np.array([0.0]))[0], 1.0, 0.0),
        (lambda x: x ** 2, prox.prox_squared_l2(2.0, 0.5, np.array([3.0]))[0], 0.5, 3.0),
        (lambda x: 0.5 * x ** 2, prox.prox_squared_l2(1.0, 1.0, np.array([2.0]))[0], 1.0, 2.0),
        (lambda x: np.where((x >= 0) & (x <= 1), 0.0, np.inf),
         prox.prox_box([0.0], [1.0], 1.0, np.array([2.0]))[0], 1.0, 2.0),
        (lambda x: np.zeros_like(x), prox.prox_zero(1.0, np.array([1.7]))[0], 1.0, 1.7),
    ]
    for g_scalar, got, gamma, z in cases:
        oracle = grid_prox_1d(g_scalar, gamma, z)
        ok = ok and abs(got - oracle) <= 1e-3
    rng = np.random.default_rng(17)
    for inst in (lasso2040, quad20):
        point = rng.normal(size=inst.dimension)
        ok = ok and problem.check_gradient(inst.f, point, 1e-5) <= 1e-6
    report(11, "prox and gradient oracles against brute force", ok)


def test_criterion_12_determinism(lasso2040):
    """Identical configs produce byte-identical trajectory CSVs."""
    config = solvers.RunConfig(method="abf", max_iterations=500)
    first = diagnostics.trajectory_csv_text(solvers.run(lasso2040, config))
    second = diagnostics.trajectory_csv_text(solvers.run(lasso2040, config))
    ok = first.encode() == second.encode()
    report(12, "byte-identical trajectory CSV on repeated runs", ok)
