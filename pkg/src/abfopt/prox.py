"""Exact proximal operators for the regularizers used by the test instances.

Every operator solves ``argmin_x g(x) + ||x - z||^2 / (2*gamma)`` in closed
form; no iterative inner solves.  The module-level functions are pure; the
regularizer classes wrap them behind a common ``value``/``prox`` interface
and carry a JSON-friendly descriptor.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma <= 0.0:
        raise ConfigurationError(f"prox step gamma must be positive, got {gamma}")
    return gamma


def prox_zero(gamma: float, z: np.ndarray) -> np.ndarray:
    """Prox of g = 0: the identity map."""
    _check_gamma(gamma)
    return np.asarray(z, dtype=float)


def prox_l1(weight: float, gamma: float, z: np.ndarray) -> np.ndarray:
    """Componentwise soft threshold with threshold ``gamma * weight``.

    Ties ``|z_i| == threshold`` map to exactly 0, which is the unique
    minimizer there.
    """
    _check_gamma(gamma)
    if weight <= 0.0:
        raise ConfigurationError(f"l1 weight must be positive, got {weight}")
    z = np.asarray(z, dtype=float)
    tau = gamma * weight
    return np.sign(z) * np.maximum(np.abs(z) - tau, 0.0)


def prox_squared_l2(weight: float, gamma: float, z: np.ndarray) -> np.ndarray:
    """Prox of g = (weight/2)*||x||^2: shrink z by 1/(1 + gamma*weight)."""
    _check_gamma(gamma)
    if weight <= 0.0:
        raise ConfigurationError(f"squared-l2 weight must be positive, got {weight}")
    return np.asarray(z, dtype=float) / (1.0 + gamma * weight)


def prox_box(lower: np.ndarray, upper: np.ndarray, gamma: float, z: np.ndarray) -> np.ndarray:
    """Prox of the box indicator: clamp componentwise.  Independent of gamma."""
    _check_gamma(gamma)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(lower > upper):
        raise ConfigurationError("box bounds must satisfy lower <= upper componentwise")
    return np.clip(np.asarray(z, dtype=float), lower, upper)


class ZeroRegularizer:
    """g = 0.  Reduces the composite iteration to a pure gradient scheme."""

    kind = "zero"

    def value(self, x: np.ndarray) -> float:
        return 0.0

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        return prox_zero(gamma, z)

    def descriptor(self) -> dict:
        return {"kind": self.kind}


class L1Regularizer:
    """g(x) = weight * ||x||_1."""

    kind = "l1"

    def __init__(self, weight: float):
        weight = float(weight)
        if not np.isfinite(weight) or weight <= 0.0:
            raise ConfigurationError(f"l1 weight must be positive, got {weight}")
        self.weight = weight

    def value(self, x: np.ndarray) -> float:
        return self.weight * float(np.sum(np.abs(x)))

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        return prox_l1(self.weight, gamma, z)

    def descriptor(self) -> dict:
        return {"kind": self.kind, "weight": self.weight}


class SquaredL2Regularizer:
    """g(x) = (weight/2) * ||x||^2."""

    kind = "squared_l2"

    def __init__(self, weight: float):
        weight = float(weight)
        if not np.isfinite(weight) or weight <= 0.0:
            raise ConfigurationError(f"squared-l2 weight must be positive, got {weight}")
        self.weight = weight

    def value(self, x: np.ndarray) -> float:
        return 0.5 * self.weight * float(np.dot(x, x))

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        return prox_squared_l2(self.weight, gamma, z)

    def descriptor(self) -> dict:
        return {"kind": self.kind, "weight": self.weight}


class BoxRegularizer:
    """Indicator of the box [lower, upper]; +inf outside, 0 inside."""

    kind = "box"

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if np.any(self.lower > self.upper):
            raise ConfigurationError("box bounds must satisfy lower <= upper componentwise")

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if np.all(x >= self.lower) and np.all(x <= self.upper):
            return 0.0
        return float("inf")

    def prox(self, gamma: float, z: np.ndarray) -> np.ndarray:
        return prox_box(self.lower, self.upper, gamma, z)

    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "bounds": {"lower": self.lower.tolist(), "upper": self.upper.tolist()},
        }


def regularizer_from_descriptor(descriptor: dict):
    """Rebuild a regularizer from its JSON descriptor."""
    kind = descriptor.get("kind")
    if kind == "zero":
        return ZeroRegularizer()
    if kind == "l1":
        return L1Regularizer(descriptor["weight"])
    if kind == "squared_l2":
        return SquaredL2Regularizer(descriptor["weight"])
    if kind == "box":
        bounds = descriptor["bounds"]
        return BoxRegularizer(bounds["lower"], bounds["upper"])
    raise ConfigurationError(f"unknown regularizer kind: {kind!r}")
