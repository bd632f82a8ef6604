"""End-to-end property tests: every certificate must hold on randomized
instances, schedules and methods, not just the pinned seeds."""

from hypothesis import given, settings, strategies as st

from abfopt import diagnostics, problem, solvers


def verify_certificates(trajectory):
    """Assert every per-iteration certificate.

    The trend diagnostics are excluded: they are asymptotic statements, and
    a short run on an ill-conditioned instance can sit inside the first
    momentum oscillation (period ~ 2*pi*sqrt(condition)) where increments
    legitimately grow.  The long pinned runs assert them separately.
    """
    checks = diagnostics.verify_trajectory(trajectory)
    failed = [str(c) for c in checks
              if not c.passed and not c.name.startswith("trend:")]
    assert not failed, failed


@given(dim=st.integers(min_value=1, max_value=8),
       log_cond=st.floats(min_value=0.0, max_value=3.0),
       seed=st.integers(min_value=0, max_value=10**6),
       m=st.floats(min_value=0.1, max_value=1.0))
@settings(max_examples=25, deadline=None)
def test_convex_certificates_on_random_quadratics(dim, log_cond, seed, m):
    inst = problem.make_quadratic(dim, 10.0 ** log_cond, seed=seed)
    config = solvers.RunConfig(method="abf", max_iterations=80, m=m)
    verify_certificates(solvers.run(inst, config))


@given(dim=st.integers(min_value=1, max_value=8),
       log_cond=st.floats(min_value=0.0, max_value=3.0),
       seed=st.integers(min_value=0, max_value=10**6),
       alpha=st.floats(min_value=3.0, max_value=12.0))
@settings(max_examples=15, deadline=None)
def test_rational_momentum_certificates(dim, log_cond, seed, alpha):
    inst = problem.make_quadratic(dim, 10.0 ** log_cond, seed=seed)
    config = solvers.RunConfig(method="abf", max_iterations=80,
                               schedule_variant="nesterov", alpha=alpha)
    verify_certificates(solvers.run(inst, config))


@given(dim=st.integers(min_value=1, max_value=8),
       log_cond=st.floats(min_value=0.0, max_value=2.0),
       seed=st.integers(min_value=0, max_value=10**6))
@settings(max_examples=15, deadline=None)
def test_sc_certificates_on_random_quadratics(dim, log_cond, seed):
    inst = problem.make_quadratic(dim, 10.0 ** log_cond, seed=seed)
    # enough iterations for the final fixed-point residual to settle
    config = solvers.RunConfig(method="abf_sc", max_iterations=600)
    verify_certificates(solvers.run(inst, config))


@given(rows=st.integers(min_value=1, max_value=5),
       cols=st.integers(min_value=1, max_value=8),
       weight=st.floats(min_value=0.1, max_value=2.0),
       seed=st.integers(min_value=0, max_value=10**6))
@settings(max_examples=15, deadline=None)
def test_convex_certificates_on_random_lasso(rows, cols, weight, seed):
    inst = problem.make_lasso(rows, cols, weight, seed=seed)
    config = solvers.RunConfig(method="abf", max_iterations=120)
    verify_certificates(solvers.run(inst, config))


@given(dim=st.integers(min_value=1, max_value=6),
       weight=st.floats(min_value=0.02, max_value=0.5),
       seed=st.integers(min_value=0, max_value=10**6))
@settings(max_examples=10, deadline=None)
def test_sc_certificates_on_random_l1_quadratics(dim, weight, seed):
    inst = problem.make_l1_quadratic(dim, 50.0, weight, seed=seed)
    config = solvers.RunConfig(method="abf_sc", max_iterations=800)
    verify_certificates(solvers.run(inst, config))
