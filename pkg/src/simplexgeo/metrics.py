"""Fisher-Rao metric, lq Finsler norms, and great-circle geodesics.

The inner product carries the conventional 1/4 factor, which makes the
square-root lift an isometry onto the round sphere; distances therefore
use the radius-1 convention arccos(sum sqrt(p r)), the Bhattacharyya
angle, with range [0, pi/2) on the open simplex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BaseMismatch,
    DegenerateEndpoints,
    DimensionMismatch,
    ExponentNotTwo,
    InvalidExponent,
    LengthMismatch,
)
from .sequence_core import SimplexPoint, SpherePoint, SphereTangent, TangentVector, lq_norm
from .transforms import RootTransform, pullback_inner


@dataclass(frozen=True)
class MetricReport:
    """Value of a metric pairing plus its defect against the sphere route."""

    value: float
    residual_vs_pullback: float
    at: SimplexPoint

    def __post_init__(self):
        if self.residual_vs_pullback < 0.0:
            raise ValueError("residual must be nonnegative")


def _same_base(v: TangentVector, w: TangentVector) -> SimplexPoint:
    if v.base is not w.base and not (
        np.array_equal(v.base.coords, w.base.coords) and v.base.tail_bound == w.base.tail_bound
    ):
        raise BaseMismatch("tangent vectors live at different base points")
    return v.base


def fr_inner(v: TangentVector, w: TangentVector) -> float:
    """Fisher-Rao inner product (1/4) sum v_n w_n / p_n."""
    p = _same_base(v, w)
    return 0.25 * float(np.sum(v.comps * w.comps / p.coords))


def fr_inner_report(v: TangentVector, w: TangentVector) -> MetricReport:
    """Pair ``fr_inner`` with its residual against the sphere pullback."""
    value = fr_inner(v, w)
    other = pullback_inner(RootTransform(2.0), v, w)
    return MetricReport(value=value, residual_vs_pullback=abs(value - other), at=v.base)


def finsler_norm(v: TangentVector, q: float) -> float:
    """lq Fisher-Rao norm (sum |v_n / p_n|^q p_n)^(1/q).

    Evaluated as the lq norm of v_n * p_n^((1-q)/q), which is the same
    number without forming the possibly huge ratios v_n / p_n.
    """
    if not (q > 1.0 and np.isfinite(q)):
        raise InvalidExponent(f"q must lie in (1, inf), got {q}")
    p = v.base.coords
    return lq_norm(v.comps * p ** ((1.0 - q) / q), q)


def sphere_project(x: SpherePoint, raw) -> SphereTangent:
    """Orthogonal projection onto the tangent space of the round sphere."""
    if x.q != 2.0:
        raise ExponentNotTwo(f"tangential projection needs q = 2, got {x.q}")
    a = np.asarray(raw, dtype=float)
    if a.size != x.dim:
        raise LengthMismatch(f"raw vector has length {a.size}, point has dim {x.dim}")
    comps = a - float(np.dot(a, x.coords)) * x.coords
    return SphereTangent(x, comps)


def fr_distance(p: SimplexPoint, r: SimplexPoint) -> float:
    """Fisher-Rao distance arccos(sum sqrt(p_n r_n)).

    The argument is clamped to [-1, 1]; values within 1e-12 of 1 are
    treated as coincident points and return 0.
    """
    if p.dim != r.dim:
        raise DimensionMismatch(f"dims {p.dim} and {r.dim} differ")
    if p.tail_bound != 0.0 or r.tail_bound != 0.0:
        raise ValueError("distance requires exact (tail_bound = 0) points")
    cos = float(np.sum(np.sqrt(p.coords * r.coords)))
    if cos >= 1.0 - 1e-12:
        return 0.0
    return float(np.arccos(max(-1.0, cos)))


def fr_geodesic(p: SimplexPoint, r: SimplexPoint, t: float) -> SimplexPoint:
    """Point at parameter t on the minimizing Fisher-Rao geodesic.

    Realized as the great-circle arc between the square roots, squared
    back; both roots are positive, so every intermediate point for
    t in [0, 1] stays in the open simplex.
    """
    theta = fr_distance(p, r)
    if theta == 0.0:
        raise DegenerateEndpoints("geodesic endpoints coincide")
    a = np.sqrt(p.coords)
    b = np.sqrt(r.coords)
    arc = (np.sin((1.0 - t) * theta) * a + np.sin(t * theta) * b) / np.sin(theta)
    coords = arc**2
    return SimplexPoint(coords / coords.sum())
