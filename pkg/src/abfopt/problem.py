"""Composite test problems: smooth oracles, instances, and a reference solver.

An instance bundles a smooth oracle ``f`` (value, gradient, declared
constants L and mu) with a prox-friendly ``g``.  Generators are fully
deterministic: identical ``(seed, sizes)`` produce bit-identical instances,
and matrices are always regenerated from the seed rather than serialized.

The reference solver is the single source of certified optima for all
bound checks: plain proximal gradient with step 1/L, run to a fixed-point
residual of 1e-12 by default.
"""

from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from . import prox as regs
from .errors import ConfigurationError, UnconvergedError

REFERENCE_TOLERANCE = 1e-12
REFERENCE_BUDGET = 10**6

# Optimality residual admitted for a certified minimizer, relative to 1+||x*||.
MINIMIZER_RESIDUAL_TOL = 1e-9


class QuadraticObjective:
    """f(x) = 0.5*<Ax, x> - <b, x> with A symmetric positive definite."""

    def __init__(self, matrix, linear, lipschitz_L: Optional[float] = None,
                 strong_mu: Optional[float] = None):
        self.matrix = np.asarray(matrix, dtype=float)
        self.linear = np.asarray(linear, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ConfigurationError("quadratic matrix must be square")
        if lipschitz_L is None or strong_mu is None:
            eigenvalues = np.linalg.eigvalsh(self.matrix)
            if lipschitz_L is None:
                lipschitz_L = float(eigenvalues[-1])
            if strong_mu is None:
                strong_mu = float(max(eigenvalues[0], 0.0))
        self.lipschitz_L = float(lipschitz_L)
        self.strong_mu = float(strong_mu)

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return 0.5 * float(x @ (self.matrix @ x)) - float(self.linear @ x)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float) - self.linear


class LeastSquaresObjective:
    """f(x) = 0.5*||Mx - b||^2."""

    def __init__(self, design, target, lipschitz_L: Optional[float] = None,
                 strong_mu: float = 0.0):
        self.design = np.asarray(design, dtype=float)
        self.target = np.asarray(target, dtype=float)
        if self.design.ndim != 2:
            raise ConfigurationError("design must be a 2-d matrix")
        if lipschitz_L is None:
            lipschitz_L = largest_gram_eigenvalue(self.design)
        self.lipschitz_L = float(lipschitz_L)
        self.strong_mu = float(strong_mu)

    def value(self, x: np.ndarray) -> float:
        r = self.design @ np.asarray(x, dtype=float) - self.target
        return 0.5 * float(r @ r)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.design.T @ (self.design @ np.asarray(x, dtype=float) - self.target)


def largest_gram_eigenvalue(design: np.ndarray, rel_tol: float = 1e-10,
                            max_iterations: int = 10**4, seed: int = 0) -> float:
    """Largest eigenvalue of design^T design by power iteration.

    Converges when the Rayleigh quotient is stable to ``rel_tol`` relatively.
    """
    design = np.asarray(design, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(design.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(max_iterations):
        w = design.T @ (design @ v)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        new_estimate = float(v @ w)
        v = w / norm_w
        if abs(new_estimate - estimate) <= rel_tol * abs(new_estimate):
            return new_estimate
        estimate = new_estimate
    return estimate


@dataclasses.dataclass
class ProblemInstance:
    """An (f, g) pair with optional certified optimum and a generator seed."""

    f: object
    g: object
    dimension: int
    kind: str = "custom"
    parameters: dict = dataclasses.field(default_factory=dict)
    seed: int = 0
    known_minimum: Optional[float] = None
    known_minimizer: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigurationError("dimension must be >= 1")
        if self.known_minimizer is not None:
            self.known_minimizer = np.asarray(self.known_minimizer, dtype=float)
            residual = self.optimality_residual(self.known_minimizer)
            scale = 1.0 + float(np.linalg.norm(self.known_minimizer))
            if residual > MINIMIZER_RESIDUAL_TOL * scale:
                raise ConfigurationError(
                    f"known_minimizer fails the optimality check: residual "
                    f"{residual:.3e} > {MINIMIZER_RESIDUAL_TOL:.0e}*(1+||x*||)"
                )

    def objective(self, x: np.ndarray) -> float:
        return self.f.value(x) + self.g.value(x)

    def optimality_residual(self, x: np.ndarray) -> float:
        """||x - prox(s, x - s*grad f(x))|| at s = 1/L."""
        s = 1.0 / self.f.lipschitz_L
        step = self.g.prox(s, x - s * self.f.gradient(x))
        return float(np.linalg.norm(x - step))

    def descriptor(self) -> dict:
        out = {
            "kind": self.kind,
            "dimension": self.dimension,
            "seed": self.seed,
            "parameters": dict(self.parameters),
            "L": self.f.lipschitz_L,
            "mu": self.f.strong_mu,
        }
        if self.known_minimum is not None:
            out["known_minimum"] = self.known_minimum
        return out


@dataclasses.dataclass
class ReferenceSolution:
    """Output of the reference solver, including its convergence status."""

    minimizer: np.ndarray
    minimum: float
    residual: float
    iterations: int
    converged: bool


def reference_solve(instance: ProblemInstance, tolerance: float = REFERENCE_TOLERANCE,
                    max_iterations: int = REFERENCE_BUDGET,
                    start: Optional[np.ndarray] = None) -> ReferenceSolution:
    """Certify the optimum by plain proximal gradient with step 1/L.

    Stops when the fixed-point residual ``||x - prox(s, x - s*grad f(x))||``
    drops below ``tolerance * (1 + ||x||)``.  If the budget runs out first,
    the result is returned with ``converged=False`` and the last residual.
    """
    if tolerance <= 0.0:
        raise ConfigurationError("tolerance must be positive")
    s = 1.0 / instance.f.lipschitz_L
    x = np.zeros(instance.dimension) if start is None else np.asarray(start, dtype=float)
    residual = float("inf")
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        x_next = instance.g.prox(s, x - s * instance.f.gradient(x))
        residual = float(np.linalg.norm(x - x_next))
        x = x_next
        if residual <= tolerance * (1.0 + float(np.linalg.norm(x))):
            return ReferenceSolution(x, instance.objective(x), residual, iterations, True)
    return ReferenceSolution(x, instance.objective(x), residual, iterations, False)


def certify(instance: ProblemInstance, tolerance: float = REFERENCE_TOLERANCE):
    """Return (x*, F*) for an instance, preferring stored certified values."""
    if instance.known_minimizer is not None and instance.known_minimum is not None:
        return instance.known_minimizer, instance.known_minimum
    solution = reference_solve(instance, tolerance)
    if not solution.converged:
        raise UnconvergedError(
            f"reference solver exhausted {solution.iterations} iterations "
            f"(residual {solution.residual:.3e})",
            residual=solution.residual, iterations=solution.iterations,
        )
    return solution.minimizer, solution.minimum


def check_gradient(oracle, point: np.ndarray, step: float = 1e-5) -> float:
    """Max relative error of the gradient against central finite differences."""
    if step <= 0.0:
        raise ConfigurationError("finite-difference step must be positive")
    point = np.asarray(point, dtype=float)
    grad = oracle.gradient(point)
    worst = 0.0
    for i in range(point.size):
        shift = np.zeros_like(point)
        shift[i] = step
        approx = (oracle.value(point + shift) - oracle.value(point - shift)) / (2.0 * step)
        error = abs(approx - grad[i]) / (1.0 + abs(grad[i]))
        worst = max(worst, error)
    return worst


def _validate_condition_number(condition_number: float) -> float:
    condition_number = float(condition_number)
    if not np.isfinite(condition_number) or condition_number < 1.0:
        raise ConfigurationError(
            f"condition_number must be finite and >= 1, got {condition_number}")
    return condition_number


def _spd_matrix(dimension: int, condition_number: float, rng) -> np.ndarray:
    """Symmetric PD matrix with eigenvalues spanning [1/condition_number, 1]."""
    eigenvalues = np.linspace(1.0 / condition_number, 1.0, dimension)
    q, _ = np.linalg.qr(rng.standard_normal((dimension, dimension)))
    matrix = (q * eigenvalues) @ q.T
    return (matrix + matrix.T) / 2.0


def make_quadratic(dimension: int, condition_number: float, seed: int) -> ProblemInstance:
    """Unconstrained quadratic with unit top eigenvalue and known minimizer.

    The linear term is chosen as A @ x_opt for a seeded Gaussian x_opt, which
    keeps objective values at O(dimension) scale; the certified minimizer is
    recomputed by a direct solve.
    """
    if dimension < 1:
        raise ConfigurationError("dimension must be >= 1")
    condition_number = _validate_condition_number(condition_number)
    rng = np.random.default_rng(seed)
    matrix = _spd_matrix(dimension, condition_number, rng)
    linear = matrix @ rng.standard_normal(dimension)
    f = QuadraticObjective(matrix, linear,
                           lipschitz_L=1.0, strong_mu=1.0 / condition_number)
    minimizer = np.linalg.solve(matrix, linear)
    return ProblemInstance(
        f=f, g=regs.ZeroRegularizer(), dimension=dimension, kind="quadratic",
        parameters={"condition_number": condition_number}, seed=int(seed),
        known_minimum=f.value(minimizer), known_minimizer=minimizer,
    )


def make_lasso(rows: int, cols: int, reg_weight: float, seed: int) -> ProblemInstance:
    """Least squares plus weighted l1, the canonical composite instance.

    L is certified by power iteration on M^T M; the optimum is certified by
    the reference solver at its default tolerance.
    """
    if rows < 1 or cols < 1:
        raise ConfigurationError("rows and cols must be >= 1")
    reg_weight = float(reg_weight)
    if not np.isfinite(reg_weight) or reg_weight <= 0.0:
        raise ConfigurationError(f"reg_weight must be positive, got {reg_weight}")
    rng = np.random.default_rng(seed)
    design = rng.standard_normal((rows, cols))
    target = rng.standard_normal(rows)
    f = LeastSquaresObjective(design, target)
    instance = ProblemInstance(
        f=f, g=regs.L1Regularizer(reg_weight), dimension=cols, kind="lasso",
        parameters={"rows": rows, "reg_weight": reg_weight}, seed=int(seed),
    )
    return _attach_certified_optimum(instance)


def make_l1_quadratic(dimension: int, condition_number: float, reg_weight: float,
                      seed: int) -> ProblemInstance:
    """Strongly convex quadratic plus weighted l1 regularization."""
    if dimension < 1:
        raise ConfigurationError("dimension must be >= 1")
    condition_number = _validate_condition_number(condition_number)
    reg_weight = float(reg_weight)
    if not np.isfinite(reg_weight) or reg_weight <= 0.0:
        raise ConfigurationError(f"reg_weight must be positive, got {reg_weight}")
    rng = np.random.default_rng(seed)
    matrix = _spd_matrix(dimension, condition_number, rng)
    linear = matrix @ rng.standard_normal(dimension)
    f = QuadraticObjective(matrix, linear,
                           lipschitz_L=1.0, strong_mu=1.0 / condition_number)
    instance = ProblemInstance(
        f=f, g=regs.L1Regularizer(reg_weight), dimension=dimension, kind="l1_quadratic",
        parameters={"condition_number": condition_number, "reg_weight": reg_weight},
        seed=int(seed),
    )
    return _attach_certified_optimum(instance)


def _attach_certified_optimum(instance: ProblemInstance) -> ProblemInstance:
    """Fill known_minimum/known_minimizer from the reference solver;
    reconstruction re-runs the optimality validation."""
    solution = reference_solve(instance)
    if not solution.converged:
        raise UnconvergedError(
            f"reference solver failed to certify the {instance.kind} optimum",
            residual=solution.residual, iterations=solution.iterations)
    return dataclasses.replace(instance, known_minimum=solution.minimum,
                               known_minimizer=solution.minimizer)


def instance_from_descriptor(descriptor: dict) -> ProblemInstance:
    """Rebuild an instance from its JSON descriptor (matrices from seed)."""
    kind = descriptor.get("kind")
    params = descriptor.get("parameters", {})
    seed = int(descriptor.get("seed", 0))
    if kind == "quadratic":
        return make_quadratic(int(descriptor["dimension"]),
                              params["condition_number"], seed)
    if kind == "lasso":
        return make_lasso(int(params["rows"]), int(descriptor["dimension"]),
                          params["reg_weight"], seed)
    if kind == "l1_quadratic":
        return make_l1_quadratic(int(descriptor["dimension"]),
                                 params["condition_number"],
                                 params["reg_weight"], seed)
    raise ConfigurationError(f"unknown instance kind: {kind!r}")
