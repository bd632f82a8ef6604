"""Inertial parameter sequences driving the backward-forward iterations.

Two convex variants are provided: the classic recursion
``t_{k+1} = (m + sqrt(m^2 + 4 t_k^2)) / 2`` with ``m`` in (0, 1] (m = 1 is
Nesterov's sequence), and the rational rule ``lambda_{k+1} = k/(k+alpha)``
with ``alpha >= 3``.  Both satisfy ``t_k^2 >= t_{k+1}(t_{k+1} - 1)``, which
is what the convergence certificates need.  The strongly convex regime uses
a constant momentum derived from ``theta = sqrt(mu*s)``.
"""

from __future__ import annotations

import dataclasses
import math

from .errors import ConfigurationError


def next_t(t_k: float, m: float) -> float:
    """Advance the momentum scale: the positive root of t*(t - m) = t_k^2."""
    if t_k < 1.0:
        raise ConfigurationError(f"t must be >= 1, got {t_k}")
    if not 0.0 < m <= 1.0:
        raise ConfigurationError(f"m must lie in (0, 1], got {m}")
    return (m + math.sqrt(m * m + 4.0 * t_k * t_k)) / 2.0


def lambda_from_t(t_k: float, t_next: float) -> float:
    """Momentum coefficient (t_k - 1) / t_{k+1}."""
    if t_k < 1.0 or t_next < 1.0:
        raise ConfigurationError("t values must be >= 1")
    return (t_k - 1.0) / t_next


def lambda_nesterov(k: int, alpha: float) -> float:
    """Momentum coefficient k / (k + alpha) for alpha >= 3."""
    if alpha < 3.0:
        raise ConfigurationError(f"alpha must be >= 3, got {alpha}")
    if k < 0:
        raise ConfigurationError(f"iteration index must be >= 0, got {k}")
    return k / (k + alpha)


def gamma_next(lam: float, s: float) -> float:
    """Backward step (1 + lambda)*s; always in [s, 2s)."""
    if s <= 0.0:
        raise ConfigurationError(f"s must be positive, got {s}")
    if not 0.0 <= lam < 1.0:
        raise ConfigurationError(f"lambda must lie in [0, 1), got {lam}")
    return (1.0 + lam) * s


@dataclasses.dataclass(frozen=True)
class ConvexSchedule:
    """Iteration-dependent momentum state for the convex regime.

    ``t`` is the current scale t_k; ``advance()`` returns the next momentum
    coefficient together with the advanced schedule, so a solver state can
    carry an immutable snapshot.
    """

    variant: str = "tk"
    m: float = 1.0
    alpha: float = 3.0
    t: float = 1.0
    k: int = 0

    def __post_init__(self):
        if self.variant not in ("tk", "nesterov"):
            raise ConfigurationError(f"unknown schedule variant: {self.variant!r}")
        if self.variant == "tk" and not 0.0 < self.m <= 1.0:
            raise ConfigurationError(f"schedule.m must lie in (0, 1], got {self.m}")
        if self.variant == "nesterov" and self.alpha < 3.0:
            raise ConfigurationError(f"schedule.alpha must be >= 3, got {self.alpha}")

    @classmethod
    def start(cls, variant: str = "tk", m: float = 1.0, alpha: float = 3.0) -> "ConvexSchedule":
        return cls(variant=variant, m=m, alpha=alpha, t=1.0, k=0)

    def advance(self) -> tuple[float, "ConvexSchedule"]:
        """Return (lambda_{k+1}, schedule at k+1)."""
        if self.variant == "tk":
            t_next = next_t(self.t, self.m)
            lam = lambda_from_t(self.t, t_next)
        else:
            lam = lambda_nesterov(self.k, self.alpha)
            t_next = (self.k + 1 + self.alpha - 1.0) / (self.alpha - 1.0)
        return lam, dataclasses.replace(self, t=t_next, k=self.k + 1)


@dataclasses.dataclass(frozen=True)
class StronglyConvexSchedule:
    """Constant momentum (1 - theta)/(1 + theta) with theta = sqrt(mu*s)."""

    theta: float
    lam: float

    @classmethod
    def from_problem(cls, mu: float, s: float) -> "StronglyConvexSchedule":
        if mu <= 0.0:
            raise ConfigurationError(f"strong convexity constant must be positive, got {mu}")
        if s <= 0.0:
            raise ConfigurationError(f"s must be positive, got {s}")
        product = mu * s
        if product > 1.0 + 1e-12:
            raise ConfigurationError(
                f"mu*s = {product} exceeds 1; requires s <= 1/L and mu <= L")
        theta = math.sqrt(min(product, 1.0))
        return cls(theta=theta, lam=(1.0 - theta) / (1.0 + theta))

    def advance(self) -> tuple[float, "StronglyConvexSchedule"]:
        return self.lam, self
