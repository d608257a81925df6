"""Linear objectives on the simplex and their Fisher-Rao gradient flows.

The flow of F(p) = <c, p> follows the softmax curves
p_n(t) = p_n(0) exp(c_n t) / Z(t), which are exactly the exponential
geodesics with exponents c_n up to gauge.  A classical fixed-step RK4
integrator is kept alongside as an independent oracle.

Normalization audit: with the 1/4 factor in the Fisher-Rao inner product
the metric dual of dF is 4 W, where W_n = p_n (c_n - <c, p>) is the field
integrated here; the two conventions differ by the time rescaling
t -> 4 t.  The curves above are taken as the defining convention, and
``fr_inner(4 W, v) == <c, v>`` is pinned by tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .connections import EGeodesic, make_e_geodesic
from .errors import (
    DimensionMismatch,
    NonFiniteInput,
    NonPositiveCoordinate,
    PositivityLost,
)
from .sequence_core import SimplexPoint, TangentVector, make_tangent, softmax_coords

#: Horizon cap for the closed-form solver's doubling schedule.
MAX_HORIZON = 1e6


@dataclass(frozen=True)
class LinearObjective:
    """Objective coefficients c for maximizing <c, p> over the closed simplex."""

    c: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.c, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise DimensionMismatch("objective needs a vector of at least 2 coefficients")
        if not np.all(np.isfinite(a)):
            raise NonFiniteInput("objective coefficients contain NaN or infinity")
        out = np.array(a, copy=True)
        out.setflags(write=False)
        object.__setattr__(self, "c", out)

    @property
    def dim(self) -> int:
        return self.c.size

    @property
    def strictly_decreasing(self) -> bool:
        return bool(np.all(self.c[:-1] > self.c[1:]))

    @property
    def gap(self) -> float:
        """Spectral gap c_0 - c_1 governing the convergence rate."""
        return float(self.c[0] - self.c[1])


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped points with per-step diagnostics."""

    times: np.ndarray
    points: tuple[SimplexPoint, ...]
    objective: np.ndarray | None = None
    residual_l1: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(self.points) != t.size:
            raise DimensionMismatch(f"{len(self.points)} points for {t.size} times")
        if t.size > 1 and not np.all(np.diff(t) > 0.0):
            raise ValueError("times must be strictly increasing")
        for name in ("objective", "residual_l1"):
            col = getattr(self, name)
            if col is not None and np.asarray(col).size != t.size:
                raise DimensionMismatch(f"{name} column length differs from times")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", tuple(self.points))

    def __len__(self) -> int:
        return self.times.size


def objective_value(obj: LinearObjective, p: SimplexPoint) -> float:
    """<c, p>; bounded above by max(c) on the closed simplex."""
    if obj.dim != p.dim:
        raise DimensionMismatch(f"objective dim {obj.dim}, point dim {p.dim}")
    return float(np.dot(obj.c, p.coords))


def gradient_field(obj: LinearObjective, p: SimplexPoint) -> TangentVector:
    """Replicator-form ascent field W_n = p_n (c_n - <c, p>).

    Zero-sum on unit-mass points; lossy truncations are projected back
    onto the tangent plane.  Vanishes exactly when c is constant.
    """
    if obj.dim != p.dim:
        raise DimensionMismatch(f"objective dim {obj.dim}, point dim {p.dim}")
    w = p.coords * obj.c - float(np.dot(obj.c, p.coords)) * p.coords
    return make_tangent(p, w)


def gradient_vector_field(obj: LinearObjective):
    """The ascent field as a reusable :class:`~simplexgeo.connections.VectorField`."""
    from .connections import VectorField

    return VectorField(lambda p: gradient_field(obj, p), label=f"ascent[dim={obj.dim}]")


def flow_closed_form(obj: LinearObjective, p0: SimplexPoint, t: float) -> SimplexPoint:
    """Exact flow point: softmax of log p_0 + c t, defined for all real t."""
    if obj.dim != p0.dim:
        raise DimensionMismatch(f"objective dim {obj.dim}, point dim {p0.dim}")
    if not math.isfinite(t):
        raise NonFiniteInput(f"time {t} is not finite")
    return SimplexPoint(softmax_coords(np.log(p0.coords) + obj.c * t))


def flow_ode_residual(obj: LinearObjective, p0: SimplexPoint, t: float, h: float = 1e-4) -> float:
    """l1 defect between the flow's finite-difference velocity and the field."""
    plus = flow_closed_form(obj, p0, t + h).coords
    minus = flow_closed_form(obj, p0, t - h).coords
    fd = (plus - minus) / (2.0 * h)
    w = gradient_field(obj, flow_closed_form(obj, p0, t)).comps
    return float(np.abs(fd - w).sum())


def flow_trajectory(
    obj: LinearObjective,
    p0: SimplexPoint,
    times: np.ndarray,
    residual_step: float = 1e-4,
) -> Trajectory:
    """Closed-form flow sampled on a time grid, with per-step ODE residuals."""
    times = np.asarray(times, dtype=float)
    points = [flow_closed_form(obj, p0, t) for t in times]
    values = np.array([objective_value(obj, p) for p in points])
    residuals = np.array([flow_ode_residual(obj, p0, t, residual_step) for t in times])
    return Trajectory(times, tuple(points), values, residuals, {"method": "closed"})


# ---------------------------------------------------------------------------
# independent oracle: classical fixed-step RK4
# ---------------------------------------------------------------------------


def integrate_rk4(
    field_fn: Callable[[SimplexPoint], TangentVector],
    p0: SimplexPoint,
    t_max: float,
    dt: float,
    objective: LinearObjective | None = None,
) -> Trajectory:
    """Fixed-step 4th-order integration of dp/dt = field(p).

    Each accepted state is renormalized to unit sum (the drift per step
    is recorded) and positivity-checked; a step that leaves the open
    simplex raises :class:`PositivityLost` so the caller can shrink dt.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    n_steps = int(round(t_max / dt))

    def eval_field(coords: np.ndarray) -> np.ndarray:
        try:
            return field_fn(SimplexPoint(coords, tail_bound=p0.tail_bound)).comps
        except NonPositiveCoordinate as exc:
            raise PositivityLost("an RK4 stage left the open simplex; shrink dt") from exc

    coords = np.array(p0.coords)
    points = [p0]
    drifts = [0.0]
    for _ in range(n_steps):
        k1 = eval_field(coords)
        k2 = eval_field(coords + 0.5 * dt * k1)
        k3 = eval_field(coords + 0.5 * dt * k2)
        k4 = eval_field(coords + dt * k3)
        coords = coords + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s = float(coords.sum())
        drifts.append(abs(1.0 - s))
        coords = coords / s
        if not np.all(coords > 0.0):
            raise PositivityLost("an RK4 step left the open simplex; shrink dt")
        points.append(SimplexPoint(coords, tail_bound=p0.tail_bound))

    times = dt * np.arange(n_steps + 1)
    values = None
    if objective is not None:
        values = np.array([objective_value(objective, p) for p in points])
    return Trajectory(
        times, tuple(points), values, np.asarray(drifts), {"method": "rk4", "dt": dt}
    )


# ---------------------------------------------------------------------------
# the linear program
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LpReport:
    """Outcome of following the ascent flow toward the vertex optimum."""

    converged: bool
    t_final: float
    tol: float
    distance: float
    gap: float
    rate: float | None
    advisory: str | None
    probes: tuple[tuple[float, float], ...]

    @property
    def rate_rel_err(self) -> float | None:
        if self.rate is None or self.gap == 0.0:
            return None
        return abs(self.rate - self.gap) / abs(self.gap)

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "t_final": self.t_final,
            "tol": self.tol,
            "distance": self.distance,
            "gap": self.gap,
            "rate": self.rate,
            "rate_rel_err": self.rate_rel_err,
            "advisory": self.advisory,
            "probes": [[t, d] for t, d in self.probes],
        }


def _vertex_distance(obj: LinearObjective, p0: SimplexPoint, t: float) -> float:
    p = flow_closed_form(obj, p0, t).coords
    e0 = np.zeros_like(p)
    e0[0] = 1.0
    return float(np.abs(p - e0).sum())


def _crossing_time(
    obj: LinearObjective, p0: SimplexPoint, level: float, lo: float, hi: float
) -> float:
    """Bisect for the first time the vertex distance drops to ``level``."""
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _vertex_distance(obj, p0, mid) > level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _fit_rate(obj: LinearObjective, p0: SimplexPoint, tol: float, t_hi_bracket: float) -> float | None:
    """Least-squares slope of log distance over the last decade of decay."""
    level_lo = max(tol, 1e-11)
    level_hi = 10.0 * level_lo
    if _vertex_distance(obj, p0, 0.0) <= level_hi:
        return None
    t_hi = _crossing_time(obj, p0, level_hi, 0.0, t_hi_bracket)
    t_lo = _crossing_time(obj, p0, level_lo, t_hi, t_hi_bracket)
    if not t_lo > t_hi:
        return None
    ts = np.linspace(t_hi, t_lo, 50)
    ds = np.array([_vertex_distance(obj, p0, t) for t in ts])
    if np.any(ds <= 0.0):
        return None
    slope = np.polyfit(ts, np.log(ds), 1)[0]
    return float(-slope)


def solve_lp(
    obj: LinearObjective, p0: SimplexPoint, tol: float
) -> tuple[SimplexPoint, LpReport]:
    """Follow the closed-form flow until within ``tol`` (l1) of the vertex e_0.

    The horizon doubles from t = 1 up to a hard cap; hitting the cap
    yields a non-converged report rather than an exception.  For
    objectives that are not strictly decreasing the flow still runs, but
    the report carries an advisory since the limit may sit on a face.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    advisory = None
    if not obj.strictly_decreasing:
        advisory = (
            "NotStrictlyDecreasing: objective coefficients are not strictly "
            "decreasing; the limit may be a non-vertex face point"
        )

    probes: list[tuple[float, float]] = [(0.0, _vertex_distance(obj, p0, 0.0))]
    t = 1.0
    converged = False
    while True:
        d = _vertex_distance(obj, p0, t)
        probes.append((t, d))
        if d <= tol:
            converged = True
            break
        if t >= MAX_HORIZON:
            break
        t = min(2.0 * t, MAX_HORIZON)

    limit = flow_closed_form(obj, p0, t)
    rate = _fit_rate(obj, p0, tol, t) if converged else None
    report = LpReport(
        converged=converged,
        t_final=t,
        tol=tol,
        distance=probes[-1][1],
        gap=obj.gap,
        rate=rate,
        advisory=advisory,
        probes=tuple(probes),
    )
    return limit, report


def flow_geodesic_correspondence(
    obj: LinearObjective,
    p0: SimplexPoint,
    times: tuple[float, ...] = (0.0, 0.5, 1.0, 5.0),
) -> float:
    """Max l1 gap between the gradient flow and its exponential geodesic.

    The geodesic starts with velocity W(p0), whose exponents are the
    objective coefficients shifted by the gauge <c, p0>; both curves are
    the same softmax curve, so the deviation is pure rounding.
    """
    geo: EGeodesic = make_e_geodesic(p0, gradient_field(obj, p0))
    worst = 0.0
    for t in times:
        a = flow_closed_form(obj, p0, t).coords
        b = geo(t).coords
        worst = max(worst, float(np.abs(a - b).sum()))
    return worst
