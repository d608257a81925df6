"""Truncated-sequence data model.

An N-vector here always means the first N coordinates of an infinite
sequence.  Points of the open probability simplex carry a ``tail_bound``
recording how much mass the truncation may have discarded, so that
refinement studies (growing N) can compare truncation levels honestly.

All types are immutable values and every operation is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (
    DimensionTooSmall,
    InvalidExponent,
    LengthMismatch,
    NonFiniteInput,
    NonPositiveCoordinate,
    NotNormalizable,
    NoTailModel,
    NotPositive,
    RatioOutOfRange,
)

#: Smallest positive normal double; underflow flush target for softmax curves.
TINY = float(np.finfo(float).tiny)


def membership_tol(dim: int) -> float:
    """Absolute tolerance for membership checks: 1e-12 scaled by N."""
    return 1e-12 * dim


def _read_only(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=a.dtype, copy=True)
    out.setflags(write=False)
    return out


def _require_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput(f"{what} contains NaN or infinity")


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimplexPoint:
    """Strictly positive probability vector, possibly a lossy truncation.

    ``coords`` are the first N coordinates of a simplex element;
    ``tail_bound`` is an upper bound on the discarded mass (0 for exact
    inputs).  The coordinate sum must lie in [1 - tail_bound, 1] and equal
    1 when tail_bound is 0, up to the membership tolerance.
    """

    coords: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.coords, dtype=float)
        if a.ndim != 1:
            raise DimensionTooSmall("coords must be a one-dimensional vector")
        if a.size < 2:
            raise DimensionTooSmall(f"need at least 2 coordinates, got {a.size}")
        _require_finite(a, "coords")
        if not np.all(a > 0.0):
            raise NonPositiveCoordinate("simplex coordinates must be strictly positive")
        if not (self.tail_bound >= 0.0 and math.isfinite(self.tail_bound)):
            raise NotNormalizable(f"tail bound must be finite and >= 0, got {self.tail_bound}")
        tol = membership_tol(a.size)
        s = float(a.sum())
        if self.tail_bound == 0.0:
            if abs(s - 1.0) > tol:
                raise NotNormalizable(f"coordinates sum to {s}, expected 1")
        elif not (1.0 - self.tail_bound - tol <= s <= 1.0 + tol):
            raise NotNormalizable(
                f"coordinates sum to {s}, outside [1 - {self.tail_bound}, 1]"
            )
        object.__setattr__(self, "coords", _read_only(a))

    @property
    def dim(self) -> int:
        return self.coords.size

    def mass(self) -> float:
        return float(self.coords.sum())


@dataclass(frozen=True)
class TangentVector:
    """Zero-sum vector attached to a simplex point."""

    base: SimplexPoint
    comps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.comps, dtype=float)
        if a.size != self.base.dim:
            raise LengthMismatch(f"components have length {a.size}, base has {self.base.dim}")
        _require_finite(a, "comps")
        if abs(float(a.sum())) > membership_tol(a.size):
            raise NotNormalizable(f"tangent components sum to {a.sum()}, expected 0")
        object.__setattr__(self, "comps", _read_only(a))

    @property
    def dim(self) -> int:
        return self.comps.size

    def weighted_l2(self) -> float:
        """l2 norm of comps_n / sqrt(base_n); finite at any fixed N, tracked
        so refinement tests can watch it stay bounded as N grows."""
        return float(np.linalg.norm(self.comps / np.sqrt(self.base.coords)))


@dataclass(frozen=True)
class SpherePoint:
    """Point of the unit lq sphere, optionally flagged strictly positive.

    ``mass_deficit`` mirrors :class:`SimplexPoint.tail_bound`: the q-th
    power sum may fall short of 1 by at most that much, so lossy
    truncations survive the root transform.
    """

    coords: np.ndarray
    q: float = 2.0
    positive: bool = False
    mass_deficit: float = 0.0

    def __post_init__(self):
        if not (self.q > 1.0 and math.isfinite(self.q)):
            raise InvalidExponent(f"q must lie in (1, inf), got {self.q}")
        a = np.asarray(self.coords, dtype=float)
        _require_finite(a, "coords")
        if self.positive and not np.all(a > 0.0):
            raise NotPositive("positive flag set but a coordinate is <= 0")
        tol = membership_tol(a.size)
        s = float(np.sum(np.abs(a) ** self.q))
        if not (1.0 - self.mass_deficit - tol <= s <= 1.0 + tol):
            raise NotNormalizable(f"sum |x|^q = {s}, outside [1 - {self.mass_deficit}, 1]")
        object.__setattr__(self, "coords", _read_only(a))

    @property
    def dim(self) -> int:
        return self.coords.size


@dataclass(frozen=True)
class SphereTangent:
    """Vector tangent to the lq sphere at its base point."""

    base: SpherePoint
    comps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.comps, dtype=float)
        if a.size != self.base.dim:
            raise LengthMismatch(f"components have length {a.size}, base has {self.base.dim}")
        _require_finite(a, "comps")
        x, q = self.base.coords, self.base.q
        if q == 2.0:
            pairing = float(np.dot(x, a))
        else:
            pairing = float(np.sum(np.sign(x) * np.abs(x) ** (q - 1.0) * a))
        if abs(pairing) > membership_tol(a.size):
            raise NotNormalizable(f"tangency defect {pairing} at q={q}")
        object.__setattr__(self, "comps", _read_only(a))

    @property
    def dim(self) -> int:
        return self.comps.size


# ---------------------------------------------------------------------------
# sequence specs and generators
# ---------------------------------------------------------------------------

#: Named decay profiles for ``custom`` specs: term(n), infinite total, and an
#: analytic upper bound on the tail sum from index n.
DECAY_REGISTRY: dict[str, dict[str, Callable[..., float] | float]] = {
    "inverse-square": {
        # term 1/(n+1)^2; total pi^2/6; tail_{k>=n} 1/(k+1)^2 < 1/n
        "term": lambda n: 1.0 / (n + 1.0) ** 2,
        "total": math.pi**2 / 6.0,
        "tail": lambda n: 1.0 / n,
    },
}

_KINDS = ("uniform", "geometric", "explicit", "custom")
_NORMALIZATIONS = ("simplex", "sphere", "none")


@dataclass(frozen=True)
class SequenceSpec:
    """Recipe for a truncated sequence: kind, length, and normalization.

    Geometric specs carry the exact tail sum of the raw template
    (1, r, r^2, ...): ``tail_sum(N) = r^N / (1 - r)``.
    """

    kind: str
    dim: int
    ratio: float | None = None
    coords: np.ndarray | None = None
    decay: str | None = None
    normalize: str = "simplex"
    q: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise NotNormalizable(f"unknown kind {self.kind!r}")
        if self.normalize not in _NORMALIZATIONS:
            raise NotNormalizable(f"unknown normalization {self.normalize!r}")
        if self.dim < 2:
            raise DimensionTooSmall(f"dim must be >= 2, got {self.dim}")
        if self.kind == "geometric":
            if self.ratio is None or not (0.0 < self.ratio < 1.0):
                raise RatioOutOfRange(f"geometric ratio must lie in (0, 1), got {self.ratio}")
        if self.kind == "explicit":
            if self.coords is None:
                raise NotNormalizable("explicit spec needs coords")
            a = np.asarray(self.coords, dtype=float)
            if a.size != self.dim:
                raise LengthMismatch(f"{a.size} coords but dim {self.dim}")
            object.__setattr__(self, "coords", _read_only(a))
        if self.kind == "custom" and self.decay not in DECAY_REGISTRY:
            raise NotNormalizable(f"unknown decay profile {self.decay!r}")
        if self.normalize == "sphere":
            if self.q is None or not (self.q > 1.0):
                raise InvalidExponent("sphere normalization needs q in (1, inf)")

    # -- raw template ------------------------------------------------------

    def template(self) -> np.ndarray:
        """First ``dim`` values of the raw, unnormalized sequence."""
        if self.kind == "uniform":
            return np.ones(self.dim)
        if self.kind == "geometric":
            return self.ratio ** np.arange(self.dim, dtype=float)
        if self.kind == "explicit":
            return np.array(self.coords, dtype=float)
        term = DECAY_REGISTRY[self.decay]["term"]
        return np.array([term(n) for n in range(self.dim)], dtype=float)

    @property
    def has_tail_model(self) -> bool:
        return self.kind in ("geometric", "custom")

    def tail_sum(self, n: int) -> float:
        """Analytic upper bound on the raw template's tail from index n."""
        if self.kind == "geometric":
            return self.ratio**n / (1.0 - self.ratio)
        if self.kind == "custom":
            return float(DECAY_REGISTRY[self.decay]["tail"](n))
        raise NoTailModel(f"{self.kind} specs have no analytic tail")

    def infinite_total(self) -> float:
        """Sum of the full infinite raw template, when it converges."""
        if self.kind == "geometric":
            return 1.0 / (1.0 - self.ratio)
        if self.kind == "custom":
            return float(DECAY_REGISTRY[self.decay]["total"])
        raise NoTailModel(f"{self.kind} templates are not summable")

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        if self.kind == "custom":
            raise NotNormalizable("custom-decay specs have no JSON form")
        out: dict = {"kind": self.kind, "dim": self.dim, "normalize": self.normalize}
        if self.ratio is not None:
            out["ratio"] = self.ratio
        if self.coords is not None:
            out["coords"] = [float(x) for x in self.coords]
        if self.q is not None:
            out["q"] = self.q
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SequenceSpec":
        coords = obj.get("coords")
        return cls(
            kind=obj["kind"],
            dim=int(obj["dim"]),
            ratio=obj.get("ratio"),
            coords=None if coords is None else np.asarray(coords, dtype=float),
            normalize=obj.get("normalize", "simplex"),
            q=obj.get("q"),
        )


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def make_simplex_point(spec: SequenceSpec) -> SimplexPoint:
    """Realize a spec as a validated simplex point.

    ``simplex`` normalization rescales the truncated template to unit sum
    (tail_bound 0).  Without normalization, kinds with a summable template
    are scaled by their infinite total, so the truncation's coordinate sum
    is 1 minus the scaled tail, which becomes the tail_bound.
    """
    t = spec.template()
    _require_finite(t, "template")
    if spec.kind == "explicit":
        if not np.any(t != 0.0):
            raise NotNormalizable("all-zero explicit coords")
        if not np.all(t > 0.0):
            raise NonPositiveCoordinate("explicit coords must be strictly positive")

    if spec.normalize == "sphere":
        raise NotNormalizable("sphere-normalized specs build sphere points, not simplex points")

    if spec.normalize == "simplex":
        return SimplexPoint(t / t.sum(), tail_bound=0.0)

    # normalize == "none"
    if spec.kind == "uniform":
        return SimplexPoint(t / t.sum(), tail_bound=0.0)
    if spec.kind == "explicit":
        s = float(t.sum())
        if abs(s - 1.0) > membership_tol(t.size):
            raise NotNormalizable(
                f"explicit coords sum to {s}; pass normalize='simplex' to rescale"
            )
        return SimplexPoint(t, tail_bound=0.0)
    total = spec.infinite_total()
    return SimplexPoint(t / total, tail_bound=spec.tail_sum(spec.dim) / total)


def make_sphere_point(spec: SequenceSpec) -> SpherePoint:
    """Realize a sphere-normalized spec as a unit lq-sphere point."""
    if spec.normalize != "sphere":
        raise NotNormalizable("spec does not request sphere normalization")
    t = spec.template()
    _require_finite(t, "template")
    if not np.any(t != 0.0):
        raise NotNormalizable("all-zero template")
    if not np.all(t > 0.0):
        raise NonPositiveCoordinate("sphere templates must be strictly positive")
    x = t / lq_norm(t, spec.q)
    return SpherePoint(x, q=spec.q, positive=True)


def make_tangent(base: SimplexPoint, raw) -> TangentVector:
    """Project a raw vector onto the zero-sum hyperplane at ``base``.

    A raw vector whose sum is already zero (within the membership
    tolerance) is attached unchanged, which makes the operation
    idempotent bit for bit.  Otherwise the mean is subtracted, repeating
    if catastrophic cancellation leaves the residue above tolerance.
    """
    a = np.asarray(raw, dtype=float)
    if a.size != base.dim:
        raise LengthMismatch(f"raw vector has length {a.size}, base has dim {base.dim}")
    _require_finite(a, "raw")
    tol = membership_tol(a.size)
    if abs(float(a.sum())) <= tol:
        return TangentVector(base, a)
    comps = a - a.sum() / a.size
    for _ in range(4):
        if abs(float(comps.sum())) <= tol:
            break
        comps = comps - comps.sum() / comps.size
    return TangentVector(base, comps)


def lq_norm(v, q: float) -> float:
    """(sum |v_n|^q)^(1/q), scaled by the max entry for overflow safety."""
    if not (q > 1.0 and math.isfinite(q)):
        raise InvalidExponent(f"q must lie in (1, inf), got {q}")
    a = np.abs(np.asarray(v, dtype=float))
    _require_finite(a, "vector")
    m = float(a.max()) if a.size else 0.0
    if m == 0.0:
        return 0.0
    return m * float(np.sum((a / m) ** q)) ** (1.0 / q)


def refine(spec: SequenceSpec, dims: list[int]) -> list[SimplexPoint]:
    """Truncations of one spec at increasing lengths, for Cauchy-in-N tests."""
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise ValueError(f"dims must be strictly increasing, got {list(dims)}")
    if not spec.has_tail_model:
        raise NoTailModel(f"{spec.kind} specs have no analytic tail")
    return [make_simplex_point(replace(spec, dim=int(n))) for n in dims]


# ---------------------------------------------------------------------------
# stable softmax kernel (shared by e-geodesics and gradient flows)
# ---------------------------------------------------------------------------


def softmax_coords(log_weights: np.ndarray) -> np.ndarray:
    """Simplex coordinates proportional to exp(log_weights), stably.

    Uses log-sum-exp centering; coordinates that underflow are flushed to
    the smallest positive normal so the result stays in the open simplex.
    The sub-ulp rounding residue of the sum is then absorbed into a
    coordinate chosen by trial (smallest first, reverting bumps that do
    not help), which lands the sum on exactly 1.0.
    """
    s = np.asarray(log_weights, dtype=float)
    _require_finite(s, "log weights")
    w = np.exp(s - s.max())
    x = w / w.sum()
    x = np.maximum(x, TINY)
    order = np.argsort(x)
    for _ in range(6):
        d = 1.0 - float(x.sum())
        if d == 0.0:
            return x
        moved = False
        for j in order:
            old = x[j]
            bumped = old + d
            if bumped > 0.0 and bumped != old:
                x[j] = bumped
                residue = 1.0 - float(x.sum())
                if residue == 0.0:
                    return x
                if abs(residue) < abs(d):
                    moved = True
                    break
                x[j] = old
        if not moved:
            break
    return x


# ---------------------------------------------------------------------------
# seeded generators used by checks and tests
# ---------------------------------------------------------------------------


def random_simplex_point(rng: np.random.Generator, dim: int, min_mass_ratio: float = 0.01) -> SimplexPoint:
    """Random interior point; coordinates are kept above min_mass_ratio / dim."""
    floor = min_mass_ratio / dim
    for _ in range(1000):
        g = rng.gamma(2.0, size=dim)
        p = g / g.sum()
        if p.min() > floor:
            return SimplexPoint(softmax_coords(np.log(p)))
    raise NotNormalizable("could not draw an interior point; lower min_mass_ratio")


def random_tangent(
    rng: np.random.Generator,
    base: SimplexPoint,
    scale: float = 1.0,
    max_ratio: float | None = None,
) -> TangentVector:
    """Random zero-sum vector at ``base``; optionally cap max |v_n / p_n|."""
    v = make_tangent(base, scale * rng.standard_normal(base.dim))
    if max_ratio is not None:
        r = float(np.max(np.abs(v.comps) / base.coords))
        if r > max_ratio:
            v = make_tangent(base, v.comps * (max_ratio / r))
    return v
