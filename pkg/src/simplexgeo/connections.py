"""Directional derivatives, the alpha-connection, and exponential geodesics.

Derivatives of vector fields are taken along the affine line p + t*v,
which is a valid chart curve because zero-sum directions preserve the
coordinate sum.  Exponential geodesics are softmax curves
p_n(t) = p_n(0) exp(a_n t) / Z(t); they are defined for every real t,
and adding a common constant to the exponents leaves the curve unchanged,
so the representative with zero gauge is stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BaseMismatch, CurveDomain, LengthMismatch, NonFiniteInput, StepUnderflow
from .sequence_core import SimplexPoint, TangentVector, make_tangent, softmax_coords

#: Default finite-difference steps: fields are smooth in p, curves in t.
FIELD_STEP = 1e-5
CURVE_STEP = 1e-3
_STEP_FLOOR = 1e-8

Curve = Callable[[float], SimplexPoint]


@dataclass(frozen=True)
class VectorField:
    """Named map from simplex points to tangent vectors at those points.

    The callable must be pure; all operations here assume evaluations at
    equal points return equal values.
    """

    func: Callable[[SimplexPoint], TangentVector]
    label: str = ""

    def __call__(self, p: SimplexPoint) -> TangentVector:
        v = self.func(p)
        if not np.array_equal(v.base.coords, p.coords):
            raise BaseMismatch(f"field {self.label!r} returned a vector at a different point")
        return v


def constant_field(w, label: str = "const") -> VectorField:
    """Field assigning the same zero-sum components everywhere."""
    arr = np.asarray(w, dtype=float)
    return VectorField(lambda p: make_tangent(p, arr), label)


def _shift(p: SimplexPoint, v: TangentVector, h: float) -> SimplexPoint | None:
    coords = p.coords + h * v.comps
    if np.all(coords > 0.0):
        return SimplexPoint(coords, tail_bound=p.tail_bound)
    return None


def directional_derivative(
    W: VectorField,
    p: SimplexPoint,
    v: TangentVector,
    h: float = FIELD_STEP,
    richardson: bool = False,
) -> np.ndarray:
    """Central-difference derivative of W along the line p + t*v.

    The step is halved until both p + h*v and p - h*v stay strictly
    positive; below 1e-8 the point is declared too close to the boundary.
    Returns a raw component vector, not necessarily zero-sum.
    """

    def central(step: float) -> np.ndarray:
        plus = _shift(p, v, step)
        minus = _shift(p, v, -step)
        if plus is None or minus is None:
            raise StepUnderflow("interior step vanished during refinement")
        return (W(plus).comps - W(minus).comps) / (2.0 * step)

    while _shift(p, v, h) is None or _shift(p, v, -h) is None:
        h *= 0.5
        if h < _STEP_FLOOR:
            raise StepUnderflow(
                f"no step above {_STEP_FLOOR} keeps {p.coords.min():.3g}-interior point positive"
            )
    if richardson:
        return (4.0 * central(h / 2.0) - central(h)) / 3.0
    return central(h)


def alpha_connection(
    V: VectorField,
    W: VectorField,
    p: SimplexPoint,
    q: float,
    h: float = FIELD_STEP,
) -> TangentVector:
    """Covariant derivative of W along V for the alpha = 1 - 2/q family.

    D_V W(p) - (1/q*) ( (V_n/p_n) W_n - (sum_k V_k W_k / p_k) p_n )
    with q* = q / (q - 1).  The correction is algebraically zero-sum on
    the simplex, so the finite-difference residue is projected away.
    """
    if not (q > 1.0 and math.isfinite(q)):
        raise ValueError(f"q must lie in (1, inf), got {q}")
    vp = V(p).comps
    wp = W(p).comps
    d = directional_derivative(W, p, V(p), h)
    inv_qstar = (q - 1.0) / q
    weighted = vp * wp / p.coords
    raw = d - inv_qstar * (weighted - float(weighted.sum()) * p.coords)
    if abs(float(raw.sum())) > 1e-10 * max(1.0, float(np.abs(raw).max())):
        raise CurveDomain(f"connection output drifted off the tangent plane: sum {raw.sum()}")
    return make_tangent(p, raw)


# ---------------------------------------------------------------------------
# exponential connection along curves
# ---------------------------------------------------------------------------


def _eval_curve(curve: Curve, s: float) -> SimplexPoint:
    try:
        pt = curve(s)
    except Exception as exc:  # noqa: BLE001 - any failure means the window is bad
        raise CurveDomain(f"curve undefined at t = {s}") from exc
    if not isinstance(pt, SimplexPoint):
        raise CurveDomain(f"curve returned {type(pt).__name__} at t = {s}")
    return pt


def e_covariant_along_curve(
    curve: Curve,
    vectors: Callable[[float], np.ndarray],
    t: float,
    h: float = CURVE_STEP,
) -> np.ndarray:
    """Exponential-connection derivative of a vector family along a curve.

    Evaluates p_n (d/dt (W_n / p_n) - sum_k p_k d/dt (W_k / p_k)) with the
    outer time derivative by central differences of the ratio.
    """
    p_t = _eval_curve(curve, t).coords
    ratio_plus = vectors(t + h) / _eval_curve(curve, t + h).coords
    ratio_minus = vectors(t - h) / _eval_curve(curve, t - h).coords
    dg = (ratio_plus - ratio_minus) / (2.0 * h)
    return p_t * (dg - float(np.dot(p_t, dg)))


def e_connection_residual(curve: Curve, t: float, h: float = CURVE_STEP) -> np.ndarray:
    """Geodesic-equation defect of a curve at time t.

    Near zero exactly when the curve is an exponential geodesic.  The
    velocity is itself a central difference, so the curve must be defined
    and positive on [t - 2h, t + 2h].
    """

    def velocity(s: float) -> np.ndarray:
        return (_eval_curve(curve, s + h).coords - _eval_curve(curve, s - h).coords) / (2.0 * h)

    return e_covariant_along_curve(curve, velocity, t, h)


@dataclass(frozen=True)
class EGeodesic:
    """Exponential geodesic: initial point plus exponents, gauge-fixed.

    Exponents are stored with zero gauge; any common shift produces the
    same curve, since it cancels between numerator and normalizer.
    """

    p0: SimplexPoint
    a: np.ndarray
    gauge: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=float)
        if arr.size != self.p0.dim:
            raise LengthMismatch(
                f"exponent vector has length {arr.size}, point has dim {self.p0.dim}"
            )
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInput("exponents contain NaN or infinity")
        out = np.array(arr, copy=True)
        out.setflags(write=False)
        object.__setattr__(self, "a", out)

    def __call__(self, t: float) -> SimplexPoint:
        return e_geodesic_eval(self, t)


def make_e_geodesic(p0: SimplexPoint, v0: TangentVector) -> EGeodesic:
    """Geodesic through p0 with initial velocity v0: exponents v0_n / p0_n."""
    if v0.base is not p0 and not np.array_equal(v0.base.coords, p0.coords):
        raise BaseMismatch("initial velocity is attached to a different point")
    if p0.tail_bound != 0.0:
        raise ValueError("geodesics start from exact (tail_bound = 0) points")
    return EGeodesic(p0, v0.comps / p0.coords, gauge=0.0)


def e_geodesic_eval(g: EGeodesic, t: float) -> SimplexPoint:
    """Evaluate the softmax curve at any real t, overflow-safely.

    Computed in log space; coordinates that underflow are flushed to the
    smallest positive normal, so the result stays in the open simplex
    with an exact unit sum even at |t| = 1e4.
    """
    if not math.isfinite(t):
        raise NonFiniteInput(f"time {t} is not finite")
    return SimplexPoint(softmax_coords(np.log(g.p0.coords) + g.a * t))
