"""Diagonal quadratic Hamiltonians on complex projective space, truncated.

Unit complex vectors modulo phase carry the Fubini-Study structure; all
inner products are taken at unit-sphere representatives via horizontal
lifts (subtracting the complex component along the representative).
Momentum maps are imaginary-valued; only their real coefficients are
returned, the factor i being fixed bookkeeping.

Bracket convention: {f, g} = 2i sum_j (df/dzbar_j dg/dz_j - df/dz_j dg/dzbar_j),
pinned numerically by {Re z_0, Im z_0} = 1.  Under it a diagonal quadratic
with weights w generates the explicit flow z_n(t) = z_n(0) exp(2i w_n t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ComplexResidue, DimensionMismatch, NonFiniteInput, NotNormalizable
from .sequence_core import membership_tol

#: Central-difference step for numeric Wirtinger derivatives.
WIRTINGER_STEP = 1e-6


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComplexPoint:
    """Unit vector in complex l2: sum |z_n|^2 = 1."""

    coords: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coords, dtype=complex)
        if a.ndim != 1 or a.size < 1:
            raise DimensionMismatch("coords must be a nonempty one-dimensional vector")
        if not np.all(np.isfinite(a)):
            raise NonFiniteInput("coords contain NaN or infinity")
        s = float(np.sum(np.abs(a) ** 2))
        if abs(s - 1.0) > membership_tol(a.size):
            raise NotNormalizable(f"sum |z|^2 = {s}, expected 1")
        out = np.array(a, copy=True)
        out.setflags(write=False)
        object.__setattr__(self, "coords", out)

    @property
    def dim(self) -> int:
        return self.coords.size


@dataclass(frozen=True)
class ProjectivePoint:
    """Phase equivalence class, stored via its canonical representative.

    Canonical gauge: the first coordinate of largest modulus is rotated
    to be real and nonnegative (ties break to the lowest index), giving a
    deterministic representative for hashing and serialization.
    """

    rep: ComplexPoint
    gauge_index: int

    def __post_init__(self):
        pivot = self.rep.coords[self.gauge_index]
        if pivot.imag != 0.0 or pivot.real < 0.0:
            raise NotNormalizable(f"representative is not in canonical gauge: pivot {pivot}")

    @property
    def dim(self) -> int:
        return self.rep.dim


def canonical_gauge(z: ComplexPoint | np.ndarray) -> ProjectivePoint:
    """Rotate a unit vector into the canonical phase gauge."""
    a = z.coords if isinstance(z, ComplexPoint) else np.asarray(z, dtype=complex)
    j = int(np.argmax(np.abs(a)))
    mod = abs(a[j])
    if mod == 0.0:
        raise NotNormalizable("zero vector has no projective class")
    rotated = a * (a[j].conjugate() / mod)
    rotated[j] = mod
    return ProjectivePoint(ComplexPoint(rotated), j)


def _coords_of(z) -> np.ndarray:
    if isinstance(z, ProjectivePoint):
        return z.rep.coords
    if isinstance(z, ComplexPoint):
        return z.coords
    return np.asarray(z, dtype=complex)


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Diagonal quadratic observable sum_n weights_n |z_n|^2."""

    weights: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(a)):
            raise NonFiniteInput("weights contain NaN or infinity")
        out = np.array(a, copy=True)
        out.setflags(write=False)
        object.__setattr__(self, "weights", out)

    @property
    def dim(self) -> int:
        return self.weights.size

    def __call__(self, z) -> float:
        a = _coords_of(z)
        return float(np.sum(self.weights * np.abs(a) ** 2))


def coordinate_hamiltonian(c, n: int) -> QuadraticHamiltonian:
    """The single-mode integral H_n: weight c_n on coordinate n, zero elsewhere."""
    c = np.asarray(c, dtype=float)
    w = np.zeros(c.size)
    w[n] = c[n]
    return QuadraticHamiltonian(w)


@dataclass(frozen=True)
class CoordinateReal:
    """Observable Re z_k (registered analytic form for Wirtinger calculus)."""

    index: int

    def __call__(self, z) -> float:
        return float(_coords_of(z)[self.index].real)


@dataclass(frozen=True)
class CoordinateImag:
    """Observable Im z_k (registered analytic form for Wirtinger calculus)."""

    index: int

    def __call__(self, z) -> float:
        return float(_coords_of(z)[self.index].imag)


# ---------------------------------------------------------------------------
# momentum maps and Hamiltonian values
# ---------------------------------------------------------------------------


def momentum_s1(z: ComplexPoint) -> float:
    """Real coefficient of the circle-action momentum: <z, z> = sum |z_n|^2."""
    return float(np.sum(np.abs(z.coords) ** 2))


def momentum_torus(z: ProjectivePoint | ComplexPoint) -> np.ndarray:
    """Real coefficients (1/2) |z_n|^2 of the torus-action momentum.

    Entries are nonnegative and sum to 1/2; twice the output is a point
    of the closed simplex, and on real positive lifts doubling inverts
    the square-root transform coordinate by coordinate.
    """
    a = _coords_of(z)
    return 0.5 * np.abs(a) ** 2


def hamiltonian_value(H: QuadraticHamiltonian, z: ProjectivePoint | ComplexPoint) -> float:
    """sum c_n |z_n|^2; independent of the phase representative."""
    a = _coords_of(z)
    if H.dim != a.size:
        raise DimensionMismatch(f"weights dim {H.dim}, point dim {a.size}")
    return float(np.sum(H.weights * np.abs(a) ** 2))


# ---------------------------------------------------------------------------
# Wirtinger calculus and the Poisson bracket
# ---------------------------------------------------------------------------


def _numeric_wirtinger(f: Callable, z: np.ndarray, step: float) -> tuple[np.ndarray, np.ndarray]:
    n = z.size
    dz = np.empty(n, dtype=complex)
    dzbar = np.empty(n, dtype=complex)
    for j in range(n):
        e = np.zeros(n, dtype=complex)
        e[j] = step
        df_dx = (f(z + e) - f(z - e)) / (2.0 * step)
        df_dy = (f(z + 1j * e) - f(z - 1j * e)) / (2.0 * step)
        dz[j] = 0.5 * (df_dx - 1j * df_dy)
        dzbar[j] = 0.5 * (df_dx + 1j * df_dy)
    return dz, dzbar


def wirtinger(
    f: Callable, z, step: float = WIRTINGER_STEP, numeric: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Derivatives (df/dz, df/dzbar) of a scalar field at z.

    Registered forms (diagonal quadratics, coordinate real and imaginary
    parts) get exact derivatives; anything else falls back to central
    differences treating real and imaginary parts separately.
    ``numeric=True`` forces the finite-difference path even for
    registered forms, which is how the oracle cross-checks them.
    """
    a = _coords_of(z)
    if not numeric:
        if isinstance(f, QuadraticHamiltonian):
            return f.weights * a.conjugate(), f.weights * a
        if isinstance(f, CoordinateReal):
            dz = np.zeros(a.size, dtype=complex)
            dz[f.index] = 0.5
            return dz, dz.copy()
        if isinstance(f, CoordinateImag):
            dz = np.zeros(a.size, dtype=complex)
            dzbar = np.zeros(a.size, dtype=complex)
            dz[f.index] = -0.5j
            dzbar[f.index] = 0.5j
            return dz, dzbar
    return _numeric_wirtinger(f, a, step)


def poisson_bracket(f: Callable, g: Callable, z, numeric: bool = False) -> float:
    """Canonical bracket 2i sum_j (df/dzbar dg/dz - df/dz dg/dzbar).

    Real-valued observables give a real bracket; an imaginary part above
    1e-10 signals a non-real or buggy field and raises.  The returned
    real part is evaluated in real arithmetic (for real observables the
    bracket reduces to -4 sum Im(conj(df/dz) dg/dz)), so structurally
    cancelling terms, e.g. derivatives with disjoint supports, give
    exactly 0.0 regardless of fused-multiply complex rounding.
    """
    df_dz, df_dzbar = wirtinger(f, z, numeric=numeric)
    dg_dz, dg_dzbar = wirtinger(g, z, numeric=numeric)
    value = 2.0j * np.sum(df_dzbar * dg_dz - df_dz * dg_dzbar)
    if abs(value.imag) > 1e-10:
        raise ComplexResidue(f"bracket has imaginary part {value.imag}")
    return -4.0 * float(np.sum(df_dz.real * dg_dz.imag - df_dz.imag * dg_dz.real))


# ---------------------------------------------------------------------------
# flows and the Kaehler identity
# ---------------------------------------------------------------------------


def hamiltonian_flow(H: QuadraticHamiltonian, z0: ComplexPoint, t: float) -> ComplexPoint:
    """Explicit flow z_n(t) = z_n(0) exp(2i w_n t).

    Pure phase rotations: every modulus |z_n| is preserved, hence the
    value of the Hamiltonian and of every single-mode integral.
    """
    if H.dim != z0.dim:
        raise DimensionMismatch(f"weights dim {H.dim}, point dim {z0.dim}")
    if not math.isfinite(t):
        raise NonFiniteInput(f"time {t} is not finite")
    return ComplexPoint(z0.coords * np.exp(2.0j * H.weights * t))


def _horizontal(z: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Horizontal lift at z: remove the complex component along z."""
    return v - np.vdot(z, v) * z


def horizontal_gradient(H: QuadraticHamiltonian, z: ComplexPoint) -> np.ndarray:
    """Fubini-Study gradient at the representative: P_z(2 Diag(w) z)."""
    a = z.coords
    return _horizontal(a, 2.0 * H.weights * a)


def hamiltonian_vector_field(H: QuadraticHamiltonian, z: ComplexPoint) -> np.ndarray:
    """Symplectic partner of the gradient: P_z(2i Diag(w) z)."""
    a = z.coords
    return _horizontal(a, 2.0j * H.weights * a)


def kahler_gradient_check(H: QuadraticHamiltonian, z: ComplexPoint) -> float:
    """Norm of X_H - i grad H after horizontal projection; zero on a Kaehler space."""
    return float(np.linalg.norm(hamiltonian_vector_field(H, z) - 1j * horizontal_gradient(H, z)))


# ---------------------------------------------------------------------------
# integrability suite
# ---------------------------------------------------------------------------


def random_complex_point(rng: np.random.Generator, dim: int) -> ComplexPoint:
    """Unit complex vector with rotation-invariant direction."""
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    norm = np.linalg.norm(z)
    if norm == 0.0:
        raise NotNormalizable("degenerate draw")
    return ComplexPoint(z / norm)


def integrability_suite(c, trials: int, seed: int) -> dict:
    """Numerical witness that the diagonal quadratics commute and persist.

    For seeded random unit vectors: all pairwise brackets of the
    single-mode integrals (and of each against the full Hamiltonian)
    vanish exactly on the analytic path and below 1e-8 numerically; every
    mode energy is conserved along the explicit flow to 1e-10; and the
    lifted derivative vectors at a generic point have a positive Gram
    determinant, witnessing linear independence.  Independence requires
    every weight to be nonzero; a zero weight fails the Gram check.
    """
    c = np.asarray(c, dtype=float)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n = c.size
    h_full = QuadraticHamiltonian(c)
    h_modes = [coordinate_hamiltonian(c, k) for k in range(n)]
    streams = np.random.SeedSequence(seed).spawn(trials + 1)

    analytic_max = 0.0
    numeric_max = 0.0
    drift_max = 0.0
    for trial in range(trials):
        rng = np.random.default_rng(streams[trial])
        z = random_complex_point(rng, n)
        for k in range(n):
            for m in range(k + 1, n):
                analytic_max = max(analytic_max, abs(poisson_bracket(h_modes[k], h_modes[m], z)))
                numeric_max = max(
                    numeric_max, abs(poisson_bracket(h_modes[k], h_modes[m], z, numeric=True))
                )
            analytic_max = max(analytic_max, abs(poisson_bracket(h_full, h_modes[k], z)))
            numeric_max = max(
                numeric_max, abs(poisson_bracket(h_full, h_modes[k], z, numeric=True))
            )
        for t in (0.1, 1.0, 10.0):
            moved = hamiltonian_flow(h_full, z, t)
            for h_mode in h_modes:
                drift_max = max(
                    drift_max, abs(hamiltonian_value(h_mode, moved) - hamiltonian_value(h_mode, z))
                )

    # Independence is witnessed on the ambient lifts, whose derivatives have
    # disjoint supports; the horizontal gradients satisfy one exact relation
    # at finite truncation (sum_n H_n / c_n is constant on the sphere).
    # Gradients are unit-normalized first: independence is scale-invariant,
    # and the raw determinant underflows for fast-decaying weights.
    zg = random_complex_point(np.random.default_rng(streams[-1]), n)
    grads = []
    for h in h_modes:
        g = wirtinger(h, zg)[0]
        norm = np.linalg.norm(g)
        grads.append(g / norm if norm > 0.0 else g)
    gram = np.array([[np.vdot(a, b).real for b in grads] for a in grads])
    gram_det = float(np.linalg.det(gram))

    passed = (
        analytic_max == 0.0 and numeric_max <= 1e-8 and drift_max <= 1e-10 and gram_det > 0.0
    )
    return {
        "brackets_max_abs": max(analytic_max, numeric_max),
        "conservation_max_drift": drift_max,
        "gram_det": gram_det,
        "pass": bool(passed),
        "seed": int(seed),
    }
