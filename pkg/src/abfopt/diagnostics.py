"""Certificate quantities and per-iteration assertions for solver runs.

Every convergence guarantee of the backward-forward family is computed here
as a scalar per iteration: the convexity gaps of g and f (nonnegative by
construction), two Lyapunov energies (nonincreasing in the convex regime,
geometrically contracting in the strongly convex one), the closed-form rate
bounds they imply, the prox-descent inequality, and the asymptotic
fixed-point residuals of the iterate triple.

Tolerance policy: inequalities that are exact in exact arithmetic are
asserted with slack ``ATOL + RTOL * scale``, where ``scale`` is the
uncancelled magnitude of the floating-point expression (the sum of absolute
addends, with |F(x)| + |F*| standing in for the function gap).  The slack
only absorbs roundoff; genuine violations are orders of magnitude larger.

Indexing note: the energies at iteration k consume the *next* forward point
y_{k+1}; backward-forward states cache it, so a record is self-contained.
"""

from __future__ import annotations

import dataclasses
import math
import os
import tempfile
from typing import Optional

import numpy as np

from .errors import CertificateError
from .problem import ProblemInstance

ATOL = 1e-12
RTOL = 1e-10

CSV_HEADER = "k,F_gap,eta,psi,E,bound,residual_y,residual_z,grad_drift,y_increment"

_FAMILY = {"abf": "abf", "abf_sc": "abf", "fista": "fista",
           "fista_sc": "fista", "pg": "pg"}
_EVAL_POINT = {"abf": "x", "fista": "y", "pg": "x"}


def tolerance(*scales: float) -> float:
    """Roundoff allowance for an inequality whose operands have the given
    uncancelled magnitudes."""
    biggest = max((abs(s) for s in scales if not math.isnan(s)), default=0.0)
    return ATOL + RTOL * biggest


def ulps_apart(a: float, b: float, scale: Optional[float] = None) -> float:
    """Distance between a and b in units of the last place of the larger
    magnitude involved (optionally including an operand scale)."""
    diff = abs(a - b)
    if diff == 0.0:
        return 0.0
    ref = max(abs(a), abs(b), abs(scale) if scale is not None else 0.0)
    return diff / float(np.spacing(ref))


@dataclasses.dataclass
class RunContext:
    """Per-run reference data: the certified optimum and derived constants.

    The reference never comes from the run under test.
    """

    method: str
    family: str
    eval_point: str
    s: float
    lipschitz_L: float
    strong_mu: float
    alpha: float
    theta: float
    xstar: np.ndarray
    f_star_value: float
    g_star_value: float
    grad_star: np.ndarray
    dist0sq: float
    instance_descriptor: dict
    sc_bracket: float = float("nan")

    @property
    def fstar(self) -> float:
        return self.f_star_value + self.g_star_value

    @classmethod
    def create(cls, instance: ProblemInstance, method: str, s: float,
               xstar: np.ndarray, alpha: float, theta: float,
               y0: Optional[np.ndarray], x0: np.ndarray) -> "RunContext":
        family = _FAMILY[method]
        anchor = y0 if (family == "abf" and y0 is not None) else x0
        d0 = np.asarray(anchor, dtype=float) - xstar
        return cls(
            method=method, family=family, eval_point=_EVAL_POINT[family],
            s=s, lipschitz_L=instance.f.lipschitz_L, strong_mu=instance.f.strong_mu,
            alpha=alpha, theta=theta, xstar=np.asarray(xstar, dtype=float),
            f_star_value=instance.f.value(xstar),
            g_star_value=instance.g.value(xstar),
            grad_star=instance.f.gradient(xstar),
            dist0sq=float(d0 @ d0),
            instance_descriptor=instance.descriptor(),
        )


@dataclasses.dataclass
class TrajectoryRecord:
    """One diagnostics row; the first ten fields form the CSV schema."""

    k: int
    f_gap: float
    eta: float
    psi: float
    energy: float
    bound: float
    residual_y: float
    residual_z: float
    grad_drift: float
    y_increment: float
    t: float = float("nan")
    x_dist: float = float("nan")
    r_value: float = float("nan")
    r_ulps: float = float("nan")
    scales: dict = dataclasses.field(default_factory=dict)

    def csv_row(self) -> str:
        values = (self.f_gap, self.eta, self.psi, self.energy, self.bound,
                  self.residual_y, self.residual_z, self.grad_drift,
                  self.y_increment)
        return ",".join([str(self.k)] + [repr(float(v)) for v in values])


def subgradient_gap(z: np.ndarray, x: np.ndarray, gamma: float,
                    xstar: np.ndarray, g_at_x: float, g_at_star: float):
    """Convexity gap of g at the iterate: <(z-x)/gamma, x-x*> - (g(x)-g(x*)).

    Nonnegative because (z-x)/gamma is a subgradient of g at x, for any
    reference point.  Returns (value, roundoff scale).
    """
    if not math.isfinite(g_at_x):
        raise CertificateError(
            f"g is infinite at the iterate (||x|| = {float(np.linalg.norm(x)):.6g}); "
            "the iterate must lie in dom g")
    if not math.isfinite(g_at_star):
        raise CertificateError("g is infinite at the reference point")
    inner = float(((z - x) / gamma) @ (x - xstar))
    value = inner - (g_at_x - g_at_star)
    scale = abs(inner) + abs(g_at_x) + abs(g_at_star)
    return value, scale


def gradient_gap(grad: np.ndarray, x: np.ndarray, xstar: np.ndarray,
                 f_at_x: float, f_at_star: float):
    """Convexity gap of f at the iterate: <grad f(x), x-x*> - (f(x)-f(x*)).

    Returns (value, roundoff scale).
    """
    inner = float(grad @ (x - xstar))
    value = inner - (f_at_x - f_at_star)
    scale = abs(inner) + abs(f_at_x) + abs(f_at_star)
    return value, scale


@dataclasses.dataclass
class EnergyResult:
    value: float
    r_sum: float
    r_square: float
    r_ulps: float
    scale: float


def convex_energy(gap: float, eta: float, psi: float, t: float, s: float,
                  dy: np.ndarray, d: np.ndarray, gap_scale: float,
                  eta_scale: float, psi_scale: float) -> EnergyResult:
    """Convex-regime energy s*t^2*gap + s*(t-1)*(eta + psi) + R.

    R is evaluated both as its three-term sum and as the completed square
    0.5*||(t-1)*dy + d||^2 + ((t-1)/2)*||dy||^2; the two must agree to a few
    ulps of their largest addend, a consistency check on the implementation.
    """
    a = float(dy @ dy)
    b = float(dy @ d)
    c = float(d @ d)
    r_sum = (t * (t - 1.0) / 2.0) * a + (t - 1.0) * b + 0.5 * c
    combined = (t - 1.0) * dy + d
    r_square = 0.5 * float(combined @ combined) + ((t - 1.0) / 2.0) * a
    r_scale = max(t * (t - 1.0) / 2.0 * a, (t - 1.0) * abs(b), 0.5 * c,
                  abs(r_sum), abs(r_square))
    r_ulps = ulps_apart(r_sum, r_square, r_scale)
    value = s * t * t * gap + s * (t - 1.0) * eta + s * (t - 1.0) * psi + r_sum
    scale = (s * t * t * gap_scale + s * (t - 1.0) * (eta_scale + psi_scale)
             + r_scale)
    return EnergyResult(value, r_sum, r_square, r_ulps, scale)


def sc_energy(gap: float, eta: float, psi: float, theta: float, s: float,
              dy: np.ndarray, d: np.ndarray, gap_scale: float,
              eta_scale: float, psi_scale: float) -> EnergyResult:
    """Strongly convex energy gap + (theta/(1+theta))*(eta + psi) + R.

    R is evaluated both as its three-term sum and as the completed square
    ||dy + theta*d||^2 / (2*s*(1+theta)); cross-checked as in the convex
    regime.
    """
    a = float(dy @ dy)
    b = float(dy @ d)
    c = float(d @ d)
    denom = 2.0 * s * (1.0 + theta)
    r_sum = a / denom + (theta / (s * (1.0 + theta))) * b + theta * theta * c / denom
    combined = dy + theta * d
    r_square = float(combined @ combined) / denom
    r_scale = max(a / denom, (theta / (s * (1.0 + theta))) * abs(b),
                  theta * theta * c / denom, abs(r_sum), abs(r_square))
    r_ulps = ulps_apart(r_sum, r_square, r_scale)
    weight = theta / (1.0 + theta)
    value = gap + weight * eta + weight * psi + r_sum
    scale = gap_scale + weight * (eta_scale + psi_scale) + r_scale
    return EnergyResult(value, r_sum, r_square, r_ulps, scale)


def bound_thm_convex(t: float, s: float, dist0sq: float) -> float:
    """Convex rate bound ||y_0 - x*||^2 / (2*s*t_k^2)."""
    return dist0sq / (2.0 * s * t * t)


def bound_thm_sc(k: int, theta: float, bracket: float) -> float:
    """Strongly convex rate bound (1-theta)^k times the initial bracket."""
    return (1.0 - theta) ** k * bracket


def fista_reference_bound(k: int, alpha: float, s: float, dist0sq: float) -> float:
    """Classic forward-backward rate bound for the k/(k+alpha) momentum.

    (alpha-1)^2 * ||x_0 - x*||^2 / (2*s*(k+alpha-2)^2) for k >= 1; reduces to
    the familiar 2*||x_0 - x*||^2/(s*(k+1)^2) at alpha = 3 (Beck & Teboulle
    2009, Thm 4.4).  Reference-only: not part of the certificate suite.
    """
    if k < 1:
        return float("inf")
    return (alpha - 1.0) ** 2 * dist0sq / (2.0 * s * (k + alpha - 2.0) ** 2)


def prox_descent_check(y: np.ndarray, x: np.ndarray, s: float,
                       instance: ProblemInstance) -> float:
    """Slack of the prox-descent inequality at (y, x); nonnegative for any
    pair when s <= 1/L.

    With G(y) = (y - prox(s, y - s*grad f(y)))/s, returns
    F(x) + <G(y), y - x> - (s/2)*||G(y)||^2 - F(y - s*G(y)).
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    step = instance.g.prox(s, y - s * instance.f.gradient(y))
    gradient_map = (y - step) / s
    lhs = instance.objective(y - s * gradient_map)
    fx = instance.objective(x)
    if not math.isfinite(fx):
        return float("inf")
    rhs = fx + float(gradient_map @ (y - x)) - 0.5 * s * float(gradient_map @ gradient_map)
    return rhs - lhs


def fixed_point_residuals(state, instance: Optional[ProblemInstance], s: float):
    """Distance of a backward-forward state from the asymptotic fixed-point
    relations y* = x* - s*grad f(x*) and z* = x* - 2s*grad f(x*).

    The y-residual is zero by construction after every init/step (the cached
    forward point is defined as x - s*grad); it is only informative for
    hand-built states.  The z-residual decays along convergent runs.  The
    gradient is read from the state's cache when present, otherwise from the
    instance oracle.
    """
    x = state.x
    grad = getattr(state, "grad", None)
    if grad is None:
        grad = instance.f.gradient(x)
    residual_y = float("nan")
    residual_z = float("nan")
    y_next = getattr(state, "y_next", None)
    if y_next is not None:
        residual_y = float(np.linalg.norm(y_next - (x - s * grad)))
    z = getattr(state, "z", None)
    if z is not None:
        residual_z = float(np.linalg.norm(z - (x - 2.0 * s * grad)))
    return residual_y, residual_z


def make_record(state, ctx: RunContext) -> TrajectoryRecord:
    """Build the diagnostics row for a solver state."""
    if ctx.family == "abf":
        return _make_abf_record(state, ctx)
    if ctx.family == "fista":
        return _make_fista_record(state, ctx)
    return _make_pg_record(state, ctx)


def _make_abf_record(state, ctx: RunContext) -> TrajectoryRecord:
    d = state.x - ctx.xstar
    f_at_x = state.f_value + state.g_value
    gap = f_at_x - ctx.fstar
    gap_scale = abs(f_at_x) + abs(ctx.fstar)
    eta, eta_scale = subgradient_gap(state.z, state.x, state.gamma, ctx.xstar,
                                     state.g_value, ctx.g_star_value)
    psi, psi_scale = gradient_gap(state.grad, state.x, ctx.xstar,
                                  state.f_value, ctx.f_star_value)
    dy = state.y_next - state.y
    if ctx.method == "abf":
        energy = convex_energy(gap, eta, psi, state.t, ctx.s, dy, d,
                               gap_scale, eta_scale, psi_scale)
        bound = bound_thm_convex(state.t, ctx.s, ctx.dist0sq)
    else:
        theta = ctx.theta
        energy = sc_energy(gap, eta, psi, theta, ctx.s, dy, d,
                           gap_scale, eta_scale, psi_scale)
        if state.k == 0:
            ctx.sc_bracket = (gap + theta / (1.0 + theta) * eta
                              + theta / (2.0 * ctx.s) * float(d @ d))
        bound = bound_thm_sc(state.k, theta, ctx.sc_bracket)
    residual_y, residual_z = fixed_point_residuals(state, None, ctx.s)
    return TrajectoryRecord(
        k=state.k, f_gap=gap, eta=eta, psi=psi, energy=energy.value,
        bound=bound, residual_y=residual_y, residual_z=residual_z,
        grad_drift=float(np.linalg.norm(state.grad - ctx.grad_star)),
        y_increment=float(np.linalg.norm(dy)),
        t=state.t, x_dist=float(np.linalg.norm(d)),
        r_value=energy.r_sum, r_ulps=energy.r_ulps,
        scales={"gap": gap_scale, "eta": eta_scale, "psi": psi_scale,
                "energy": energy.scale},
    )


def _make_fista_record(state, ctx: RunContext) -> TrajectoryRecord:
    f_at_y = state.f_at_y + state.g_at_y
    gap = f_at_y - ctx.fstar
    if ctx.method == "fista":
        bound = fista_reference_bound(state.k, ctx.alpha, ctx.s, ctx.dist0sq)
    else:
        bound = float("nan")
    y_increment = (float(np.linalg.norm(state.y - state.y_prev))
                   if state.y_prev is not None else float("nan"))
    nan = float("nan")
    return TrajectoryRecord(
        k=state.k, f_gap=gap, eta=nan, psi=nan, energy=nan, bound=bound,
        residual_y=nan, residual_z=nan,
        grad_drift=float(np.linalg.norm(state.grad - ctx.grad_star)),
        y_increment=y_increment,
        x_dist=float(np.linalg.norm(state.y - ctx.xstar)),
        scales={"gap": abs(f_at_y) + abs(ctx.fstar)},
    )


def _make_pg_record(state, ctx: RunContext) -> TrajectoryRecord:
    f_at_x = state.f_value + state.g_value
    gap = f_at_x - ctx.fstar
    nan = float("nan")
    return TrajectoryRecord(
        k=state.k, f_gap=gap, eta=nan, psi=nan, energy=nan, bound=nan,
        residual_y=nan, residual_z=nan,
        grad_drift=float(np.linalg.norm(state.grad - ctx.grad_star)),
        y_increment=nan,
        x_dist=float(np.linalg.norm(state.x - ctx.xstar)),
        scales={"gap": abs(f_at_x) + abs(ctx.fstar)},
    )


def geometric_rate(ks, values, floor: float) -> float:
    """Per-step geometric decay ratio over the last half of the usable
    (above-floor) range, by least-squares on the log trajectory.

    Returns nan when fewer than six usable points remain.
    """
    pairs = [(k, v) for k, v in zip(ks, values)
             if math.isfinite(v) and v > floor]
    if len(pairs) < 6:
        return float("nan")
    tail = pairs[len(pairs) // 2:]
    kk = np.array([p[0] for p in tail], dtype=float)
    logs = np.log(np.array([p[1] for p in tail], dtype=float))
    slope = np.polyfit(kk, logs, 1)[0]
    return float(np.exp(slope))


@dataclasses.dataclass
class TrendViolation:
    name: str
    k: Optional[int]
    value: float
    limit: float


@dataclasses.dataclass
class TrendReport:
    violations: list
    sum_t_psi: float = float("nan")
    sum_t_eta_next: float = float("nan")
    grad_drift_rate: float = float("nan")

    @property
    def passed(self) -> bool:
        return not self.violations


def trend_checks(trajectory, y_increment_ceiling: Optional[float] = None,
                 grad_drift_ceiling: Optional[float] = None) -> TrendReport:
    """Asymptotic checks over a whole trajectory.

    (a) the telescoped partial sums s*sum t_k*psi_k and s*sum t_k*eta_{k+1}
        stay below the initial energy (convex backward-forward runs);
    (b) y-increments and gradient drift over the final tenth of the records
        sit below their initial-tenth levels and below optional ceilings;
    (c) (t_k - 1)*psi_k stays below E_0/s for k >= 1;
    and for strongly convex runs, the gradient drift decays geometrically
    with ratio at most sqrt(1-theta) + 0.1.

    Failures are reported as named violations with iteration indices.
    """
    records = trajectory.records
    ctx = trajectory.context
    violations = []
    report = TrendReport(violations)
    if not records:
        return report
    if ctx.family == "abf" and ctx.method == "abf":
        e0 = records[0].energy
        s = ctx.s
        sum_t_psi = 0.0
        for rec in records:
            if math.isfinite(rec.t) and math.isfinite(rec.psi):
                sum_t_psi += s * rec.t * rec.psi
        report.sum_t_psi = sum_t_psi
        if sum_t_psi > e0 + 1e-8:
            violations.append(TrendViolation("partial_sum_t_psi", None,
                                             sum_t_psi, e0 + 1e-8))
        sum_t_eta = 0.0
        for prev, cur in zip(records, records[1:]):
            if cur.k == prev.k + 1:
                sum_t_eta += s * prev.t * cur.eta
        report.sum_t_eta_next = sum_t_eta
        if sum_t_eta > e0 + 1e-8:
            violations.append(TrendViolation("partial_sum_t_eta_next", None,
                                             sum_t_eta, e0 + 1e-8))
        cap = e0 / s
        for rec in records:
            if rec.k >= 1 and math.isfinite(rec.t):
                value = (rec.t - 1.0) * rec.psi
                allowed = cap + tolerance(cap, rec.scales.get("psi", 0.0) * rec.t)
                if value > allowed:
                    violations.append(TrendViolation("psi_cap", rec.k, value, allowed))
    _decay_check(records, "y_increment", y_increment_ceiling, violations)
    _decay_check(records, "grad_drift", grad_drift_ceiling, violations)
    if ctx.family == "abf" and ctx.method == "abf_sc" and len(records) >= 8:
        theta = ctx.theta
        drift0 = records[0].grad_drift
        floor = 1e-10 * (1.0 + drift0)
        rate = geometric_rate([r.k for r in records],
                              [r.grad_drift for r in records], floor)
        report.grad_drift_rate = rate
        limit = math.sqrt(1.0 - theta) + 0.1
        if math.isfinite(rate) and rate > limit:
            violations.append(TrendViolation("grad_drift_rate", None, rate, limit))
    return report


def _decay_check(records, field: str, ceiling: Optional[float], violations) -> None:
    values = [getattr(r, field) for r in records]
    finite = [v for v in values if math.isfinite(v)]
    if len(finite) < 2:
        return
    decile = max(1, len(finite) // 10)
    first = float(np.mean(finite[:decile]))
    last = float(np.mean(finite[-decile:]))
    if last > first + tolerance(first, last):
        violations.append(TrendViolation(f"{field}_trend", None, last, first))
    if ceiling is not None and last > ceiling:
        violations.append(TrendViolation(f"{field}_ceiling", None, last, ceiling))


@dataclasses.dataclass
class InvariantResult:
    """Outcome of one invariant over a whole trajectory."""

    name: str
    passed: bool
    worst: float
    worst_k: Optional[int]
    allowance: float

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        where = "" if self.worst_k is None else f" at k={self.worst_k}"
        return (f"{status:4s} {self.name}: worst {self.worst:.6g}"
                f" (allowed {self.allowance:.6g}){where}")


def _scan(records, margin_fn):
    """Track the minimum margin of (allowed - value) over records."""
    worst_margin = math.inf
    worst = float("nan")
    worst_k = None
    allowance = float("nan")
    for rec in records:
        value, allowed = margin_fn(rec)
        margin = allowed - value
        if margin < worst_margin:
            worst_margin = margin
            worst, worst_k, allowance = value, rec.k, allowed
    return worst, worst_k, allowance, worst_margin


def verify_trajectory(trajectory, y_increment_ceiling: Optional[float] = None,
                      grad_drift_ceiling: Optional[float] = None) -> list:
    """Run every invariant applicable to the trajectory's method.

    Returns a list of InvariantResult; backward-forward runs get the full
    certificate suite, forward-backward baselines the subset that applies to
    them (no energies).
    """
    ctx = trajectory.context
    records = trajectory.records
    results = []

    def add(name, records_subset, margin_fn):
        worst, worst_k, allowance, margin = _scan(records_subset, margin_fn)
        results.append(InvariantResult(name, margin >= 0.0 or math.isinf(margin),
                                       worst, worst_k, allowance))

    if ctx.family == "abf":
        add("eta_nonneg", records,
            lambda r: (-r.eta, tolerance(r.scales["eta"])))
        add("psi_nonneg", records,
            lambda r: (-r.psi, tolerance(r.scales["psi"])))
        add("r_nonneg", records,
            lambda r: (-r.r_value, tolerance(r.scales["energy"])))
        add("r_forms_agree_ulps", records, lambda r: (r.r_ulps, 8.0))
        add("psi_gradient_lower_bound", records,
            lambda r: (r.grad_drift ** 2 / (2.0 * ctx.lipschitz_L) - r.psi,
                       tolerance(r.scales["psi"], r.grad_drift ** 2)))
        add("residual_y_zero", records, lambda r: (r.residual_y, 0.0))
        pairs = list(zip(records, records[1:]))
        if ctx.method == "abf":
            results.append(_pair_check("energy_monotone", pairs,
                                       lambda prev, cur:
                                       (cur.energy - prev.energy,
                                        tolerance(prev.scales["energy"],
                                                  cur.scales["energy"]))))
            add("theorem_bound", records,
                lambda r: (r.f_gap - r.bound, ATOL + RTOL * r.bound))
        else:
            theta = ctx.theta
            results.append(_pair_check(
                "energy_contraction", pairs,
                lambda prev, cur: (
                    cur.energy - (1.0 - theta) ** (cur.k - prev.k) * prev.energy,
                    tolerance(prev.scales["energy"], cur.scales["energy"]))))
            add("theorem_bound_sc", records,
                lambda r: (r.f_gap - r.bound, ATOL + RTOL * r.bound))
            add("psi_strong_lower_bound", records,
                lambda r: (ctx.strong_mu / 2.0 * r.x_dist ** 2 - r.psi,
                           tolerance(r.scales["psi"],
                                     ctx.strong_mu * r.x_dist ** 2)))
            # The constant-momentum iteration settles on z = x - (1+lam)*s*grad,
            # which matches the 2s form only in the lam -> 1 limit (or when
            # grad f vanishes at the optimum), so the final fixed-point check
            # uses the method's own limiting prox step.
            state = trajectory.final_state
            residual = float(np.linalg.norm(
                state.z - state.x + (1.0 + state.schedule.lam) * ctx.s * state.grad))
            results.append(InvariantResult(
                "fixed_point_final", residual <= 1e-6,
                residual, records[-1].k, 1e-6))
    elif ctx.method == "fista":
        add("reference_bound", [r for r in records if r.k >= 1],
            lambda r: (r.f_gap - r.bound, ATOL + RTOL * r.bound))

    trend = trend_checks(trajectory, y_increment_ceiling, grad_drift_ceiling)
    if trend.violations:
        for violation in trend.violations:
            results.append(InvariantResult(
                f"trend:{violation.name}", False, violation.value,
                violation.k, violation.limit))
    else:
        results.append(InvariantResult("trend_checks", True, 0.0, None, 0.0))
    return results


def _pair_check(name, pairs, margin_fn) -> InvariantResult:
    worst_margin = math.inf
    worst = float("nan")
    worst_k = None
    allowance = float("nan")
    for prev, cur in pairs:
        value, allowed = margin_fn(prev, cur)
        margin = allowed - value
        if margin < worst_margin:
            worst_margin = margin
            worst, worst_k, allowance = value, cur.k, allowed
    return InvariantResult(name, worst_margin >= 0.0 or math.isinf(worst_margin),
                           worst, worst_k, allowance)


def trajectory_csv_text(trajectory) -> str:
    lines = [CSV_HEADER]
    lines.extend(rec.csv_row() for rec in trajectory.records)
    return "\n".join(lines) + "\n"


def write_trajectory_csv(trajectory, path: str) -> None:
    """Write the trajectory CSV atomically (write to a temp file, then rename)."""
    text = trajectory_csv_text(trajectory)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
