"""Deterministic step functions for the five iterative methods.

The backward-forward family keeps the live triple (x_k, y_k, z_k) plus the
next forward point y_{k+1} = x_k - s*grad f(x_k), which is free to cache
because the step's single gradient evaluation already produced it.  One
gradient and one prox evaluation per iteration in steady state.

Per step, with lambda_{k+1} from the schedule and gamma_{k+1} = (1+lambda)*s:

    y_{k+1} = x_k - s*grad f(x_k)
    z_{k+1} = y_{k+1} + lambda*(y_{k+1} - y_k) + (lambda*s/gamma_k)*(z_k - x_k)
    x_{k+1} = prox(gamma_{k+1}, z_{k+1})

The FISTA baselines swap the operator order: prox first with constant step
s, then extrapolation (Beck & Teboulle 2009 and its strongly convex
variant with constant momentum).
"""

from __future__ import annotations

import dataclasses
from typing import Optional, Union

import numpy as np

from . import diagnostics
from .errors import ConfigurationError, DivergenceError
from .problem import ProblemInstance, certify
from .schedule import ConvexSchedule, StronglyConvexSchedule, gamma_next

METHODS = ("abf", "abf_sc", "fista", "fista_sc", "pg")


@dataclasses.dataclass
class AbfState:
    """Live iterate triple plus cached oracle outputs for one iteration."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    gamma: float
    s: float
    k: int
    schedule: Union[ConvexSchedule, StronglyConvexSchedule]
    grad: np.ndarray
    f_value: float
    g_value: float
    y_next: np.ndarray

    @property
    def t(self) -> float:
        sched = self.schedule
        return sched.t if isinstance(sched, ConvexSchedule) else float("nan")

    @property
    def theta(self) -> float:
        sched = self.schedule
        return sched.theta if isinstance(sched, StronglyConvexSchedule) else float("nan")


@dataclasses.dataclass
class FistaState:
    x: np.ndarray
    y: np.ndarray
    y_prev: Optional[np.ndarray]
    s: float
    k: int
    grad: np.ndarray
    f_at_y: float
    g_at_y: float


@dataclasses.dataclass
class PgState:
    x: np.ndarray
    s: float
    k: int
    grad: np.ndarray
    f_value: float
    g_value: float


def _as_start(vector, dimension: int) -> np.ndarray:
    if vector is None:
        return np.zeros(dimension)
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (dimension,):
        raise ConfigurationError(
            f"start vector has shape {vector.shape}, expected ({dimension},)")
    return vector


def _check_step(instance: ProblemInstance, s: float) -> float:
    s = float(s)
    limit = 1.0 / instance.f.lipschitz_L
    if not np.isfinite(s) or s <= 0.0 or s > limit * (1.0 + 1e-12):
        raise ConfigurationError(
            f"step s must lie in (0, 1/L] = (0, {limit:.6g}], got {s}")
    return s


def abf_init(instance: ProblemInstance, s: float,
             schedule: Optional[ConvexSchedule] = None,
             y0: Optional[np.ndarray] = None) -> AbfState:
    """Convex-regime initialization.

    gamma_0 = s, y_0 free (zero by default), z_0 = y_0 - s*grad f(y_0),
    x_0 = prox(gamma_0, z_0).
    """
    s = _check_step(instance, s)
    if schedule is None:
        schedule = ConvexSchedule.start()
    y0 = _as_start(y0, instance.dimension)
    z0 = y0 - s * instance.f.gradient(y0)
    x0 = instance.g.prox(s, z0)
    grad = instance.f.gradient(x0)
    return AbfState(
        x=x0, y=y0, z=z0, gamma=s, s=s, k=0, schedule=schedule,
        grad=grad, f_value=instance.f.value(x0), g_value=instance.g.value(x0),
        y_next=x0 - s * grad,
    )


def abf_sc_init(instance: ProblemInstance, s: float,
                z0: Optional[np.ndarray] = None) -> AbfState:
    """Strongly convex initialization.

    gamma_0 = s, z_0 free (zero by default), x_0 = prox(gamma_0, z_0),
    y_0 = x_0 - s*grad f(x_0); note y_0 coincides with the next forward
    point, so the first momentum difference vanishes.
    """
    if instance.f.strong_mu <= 0.0:
        raise ConfigurationError("abf_sc requires a strongly convex instance (mu > 0)")
    s = _check_step(instance, s)
    schedule = StronglyConvexSchedule.from_problem(instance.f.strong_mu, s)
    z0 = _as_start(z0, instance.dimension)
    x0 = instance.g.prox(s, z0)
    grad = instance.f.gradient(x0)
    y0 = x0 - s * grad
    return AbfState(
        x=x0, y=y0, z=z0, gamma=s, s=s, k=0, schedule=schedule,
        grad=grad, f_value=instance.f.value(x0), g_value=instance.g.value(x0),
        y_next=y0.copy(),
    )


def _abf_advance(state: AbfState, instance: ProblemInstance) -> AbfState:
    lam, schedule = state.schedule.advance()
    s = state.s
    y_new = state.y_next
    z_new = y_new + lam * (y_new - state.y) + (lam * s / state.gamma) * (state.z - state.x)
    gamma_new = gamma_next(lam, s)
    x_new = instance.g.prox(gamma_new, z_new)
    _check_finite(state.k + 1, x=x_new, y=y_new, z=z_new)
    grad = instance.f.gradient(x_new)
    return AbfState(
        x=x_new, y=y_new, z=z_new, gamma=gamma_new, s=s, k=state.k + 1,
        schedule=schedule, grad=grad,
        f_value=instance.f.value(x_new), g_value=instance.g.value(x_new),
        y_next=x_new - s * grad,
    )


def abf_step(state: AbfState, instance: ProblemInstance) -> AbfState:
    """One backward-forward step under the convex schedule."""
    if not isinstance(state.schedule, ConvexSchedule):
        raise ConfigurationError("abf_step requires a convex schedule state")
    return _abf_advance(state, instance)


def abf_sc_step(state: AbfState, instance: ProblemInstance) -> AbfState:
    """One backward-forward step with the constant strongly convex momentum."""
    if not isinstance(state.schedule, StronglyConvexSchedule):
        raise ConfigurationError("abf_sc_step requires a strongly convex schedule state")
    return _abf_advance(state, instance)


def fista_init(instance: ProblemInstance, s: float,
               x0: Optional[np.ndarray] = None) -> FistaState:
    s = _check_step(instance, s)
    x0 = _as_start(x0, instance.dimension)
    return FistaState(
        x=x0, y=x0.copy(), y_prev=None, s=s, k=0,
        grad=instance.f.gradient(x0),
        f_at_y=instance.f.value(x0), g_at_y=instance.g.value(x0),
    )


def _fista_advance(state: FistaState, instance: ProblemInstance,
                   momentum: float) -> FistaState:
    s = state.s
    y_new = instance.g.prox(s, state.x - s * state.grad)
    x_new = y_new + momentum * (y_new - state.y)
    _check_finite(state.k + 1, x=x_new, y=y_new)
    return FistaState(
        x=x_new, y=y_new, y_prev=state.y, s=s, k=state.k + 1,
        grad=instance.f.gradient(x_new),
        f_at_y=instance.f.value(y_new), g_at_y=instance.g.value(y_new),
    )


def fista_step(state: FistaState, instance: ProblemInstance, alpha: float = 3.0) -> FistaState:
    """Forward-backward step with momentum k/(k+alpha), alpha >= 3."""
    if alpha < 3.0:
        raise ConfigurationError(f"alpha must be >= 3, got {alpha}")
    return _fista_advance(state, instance, state.k / (state.k + alpha))


def fista_sc_step(state: FistaState, instance: ProblemInstance) -> FistaState:
    """Forward-backward step with constant momentum from sqrt(mu/L)."""
    mu = instance.f.strong_mu
    if mu <= 0.0:
        raise ConfigurationError("fista_sc requires a strongly convex instance (mu > 0)")
    ratio = np.sqrt(mu / instance.f.lipschitz_L)
    return _fista_advance(state, instance, (1.0 - ratio) / (1.0 + ratio))


def pg_init(instance: ProblemInstance, s: float,
            x0: Optional[np.ndarray] = None) -> PgState:
    s = _check_step(instance, s)
    x0 = _as_start(x0, instance.dimension)
    return PgState(x=x0, s=s, k=0, grad=instance.f.gradient(x0),
                   f_value=instance.f.value(x0), g_value=instance.g.value(x0))


def pg_step(state: PgState, instance: ProblemInstance) -> PgState:
    """Plain proximal gradient with constant step s."""
    s = state.s
    x_new = instance.g.prox(s, state.x - s * state.grad)
    _check_finite(state.k + 1, x=x_new)
    return PgState(x=x_new, s=s, k=state.k + 1,
                   grad=instance.f.gradient(x_new),
                   f_value=instance.f.value(x_new),
                   g_value=instance.g.value(x_new))


def _check_finite(k: int, **iterates: np.ndarray) -> None:
    if all(np.all(np.isfinite(v)) for v in iterates.values()):
        return
    norms = {name: float(np.linalg.norm(v)) for name, v in iterates.items()}
    raise DivergenceError(f"nonfinite iterate at iteration {k}",
                          iteration=k, norms=norms)


@dataclasses.dataclass
class RunConfig:
    """Everything that determines a run; two identical configs give
    bit-identical trajectories."""

    method: str
    max_iterations: int
    s: Optional[float] = None
    record_every: int = 1
    schedule_variant: str = "tk"
    m: float = 1.0
    alpha: float = 3.0
    fixed_point_tol: Optional[float] = None
    y0: Optional[np.ndarray] = None
    z0: Optional[np.ndarray] = None
    x0: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(
                f"method must be one of {METHODS}, got {self.method!r}")
        if self.max_iterations < 0:
            raise ConfigurationError("max_iterations must be >= 0")
        if self.record_every < 1:
            raise ConfigurationError("record_every must be >= 1")
        if self.fixed_point_tol is not None and self.fixed_point_tol <= 0.0:
            raise ConfigurationError("fixed_point_tol must be positive")


@dataclasses.dataclass
class Trajectory:
    """Recorded diagnostics rows plus the final solver state."""

    records: list
    context: "diagnostics.RunContext"
    final_state: object
    config: RunConfig

    @property
    def final_gap(self) -> float:
        return self.records[-1].f_gap if self.records else float("nan")


def _initial_state(instance: ProblemInstance, config: RunConfig, s: float):
    if config.method == "abf":
        sched = ConvexSchedule.start(config.schedule_variant, config.m, config.alpha)
        return abf_init(instance, s, sched, y0=config.y0)
    if config.method == "abf_sc":
        return abf_sc_init(instance, s, z0=config.z0)
    if config.method in ("fista", "fista_sc"):
        if config.method == "fista" and config.alpha < 3.0:
            raise ConfigurationError(f"alpha must be >= 3, got {config.alpha}")
        if config.method == "fista_sc" and instance.f.strong_mu <= 0.0:
            raise ConfigurationError("fista_sc requires mu > 0")
        return fista_init(instance, s, x0=config.x0)
    return pg_init(instance, s, x0=config.x0)


def _advance(state, instance: ProblemInstance, config: RunConfig):
    if config.method == "abf":
        return abf_step(state, instance)
    if config.method == "abf_sc":
        return abf_sc_step(state, instance)
    if config.method == "fista":
        return fista_step(state, instance, config.alpha)
    if config.method == "fista_sc":
        return fista_sc_step(state, instance)
    return pg_step(state, instance)


def _fixed_point_reached(state, instance: ProblemInstance, tol: float) -> bool:
    x = state.x
    step = instance.g.prox(state.s, x - state.s * state.grad)
    residual = float(np.linalg.norm(x - step))
    return residual <= tol * (1.0 + float(np.linalg.norm(x)))


def run(instance: ProblemInstance, config: RunConfig) -> Trajectory:
    """Drive a method for a fixed budget, recording diagnostics rows.

    The reference optimum for all certificate quantities comes from the
    instance's certified values (or the reference solver), never from the
    run itself.  Iteration 0 and the final iteration are always recorded.
    """
    s = _check_step(instance, 1.0 / instance.f.lipschitz_L if config.s is None else config.s)
    xstar, _ = certify(instance)
    state = _initial_state(instance, config, s)
    context = diagnostics.RunContext.create(
        instance=instance, method=config.method, s=s, xstar=xstar,
        alpha=config.alpha,
        theta=state.theta if isinstance(state, AbfState) else float("nan"),
        y0=state.y if isinstance(state, AbfState) else None,
        x0=state.x,
    )
    records = [diagnostics.make_record(state, context)]
    try:
        for _ in range(config.max_iterations):
            state = _advance(state, instance, config)
            if state.k % config.record_every == 0:
                records.append(diagnostics.make_record(state, context))
            if config.fixed_point_tol is not None and _fixed_point_reached(
                    state, instance, config.fixed_point_tol):
                break
    except DivergenceError as failure:
        failure.trajectory = Trajectory(records, context, state, config)
        raise
    if records[-1].k != state.k:
        records.append(diagnostics.make_record(state, context))
    return Trajectory(records, context, state, config)
