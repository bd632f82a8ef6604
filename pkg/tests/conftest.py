"""Shared fixtures: the acceptance instance set and their long runs.

Session-scoped so the reference solves and the 2000-iteration trajectories
are computed once and reused across test modules.
"""

import time

import numpy as np
import pytest

from abfopt import problem, solvers


@pytest.fixture(scope="session")
def quad20():
    return problem.make_quadratic(20, 100.0, seed=1)


@pytest.fixture(scope="session")
def lasso2040():
    return problem.make_lasso(20, 40, 1.0, seed=7)


@pytest.fixture(scope="session")
def l1quad20():
    return problem.make_l1_quadratic(20, 100.0, 0.1, seed=3)


@pytest.fixture(scope="session")
def abf_runs(quad20, lasso2040):
    """ABF, m=1, s=1/L, 2000 iterations on the two convex-rate instances.

    Returns {name: (trajectory, elapsed_seconds)}.
    """
    out = {}
    for name, inst in (("quadratic", quad20), ("lasso", lasso2040)):
        config = solvers.RunConfig(method="abf", max_iterations=2000)
        t0 = time.perf_counter()
        trajectory = solvers.run(inst, config)
        out[name] = (trajectory, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="session")
def abf_sc_runs(quad20, l1quad20):
    """ABF-SC, s=1/L, 300 iterations on the strongly convex instances."""
    out = {}
    for name, inst in (("quadratic", quad20), ("l1_quadratic", l1quad20)):
        config = solvers.RunConfig(method="abf_sc", max_iterations=300)
        t0 = time.perf_counter()
        trajectory = solvers.run(inst, config)
        out[name] = (trajectory, time.perf_counter() - t0)
    return out


def grid_prox_1d(g_scalar, gamma, z, lo=None, hi=None, width=1e-4):
    """Brute-force 1-d prox oracle: grid-minimize g(x) + (x-z)^2/(2*gamma).

    ``g_scalar`` must accept a vector of candidates.
    """
    reach = abs(z) + 5.0
    if lo is None:
        lo = -reach
    if hi is None:
        hi = reach
    xs = np.arange(lo, hi + width, width)
    values = g_scalar(xs) + (xs - z) ** 2 / (2.0 * gamma)
    return float(xs[np.argmin(values)])
