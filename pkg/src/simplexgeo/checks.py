"""Seeded invariant suites behind the CLI's check commands.

Each function draws its own deterministic generator from (seed, tag) and
returns a list of named results; thresholds are the contracts the rest
of the package tests against, restated here so a single CLI call can
audit an installation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import connections, flows, hamiltonian, metrics, sequence_core, transforms
from .sequence_core import SequenceSpec, make_simplex_point, random_simplex_point, random_tangent


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool

    def line(self) -> str:
        mark = "pass" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: {self.value:.3e} (<= {self.threshold:.1e})"


def _result(name: str, value: float, threshold: float) -> CheckResult:
    return CheckResult(name, float(value), threshold, bool(value <= threshold))


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, tag]))


def check_sequence_core(dim: int, seed: int, trials: int = 20) -> list[CheckResult]:
    rng = _rng(seed, 0)
    idem = 0.0
    triangle = -np.inf
    for _ in range(trials):
        p = random_simplex_point(rng, dim)
        v = random_tangent(rng, p)
        again = sequence_core.make_tangent(p, v.comps)
        idem = max(idem, 0.0 if np.array_equal(again.comps, v.comps) else 1.0)
        a = rng.standard_normal(dim)
        b = rng.standard_normal(dim)
        q = float(rng.uniform(1.1, 4.0))
        triangle = max(
            triangle,
            sequence_core.lq_norm(a + b, q)
            - sequence_core.lq_norm(a, q)
            - sequence_core.lq_norm(b, q),
        )
    spec = SequenceSpec("geometric", dim, ratio=0.5)
    pts = sequence_core.refine(spec, [dim, 2 * dim, 4 * dim])
    diffs = []
    for lo, hi in zip(pts, pts[1:]):
        padded = np.zeros(hi.dim)
        padded[: lo.dim] = lo.coords
        diffs.append(sequence_core.lq_norm(padded - hi.coords, 2.0))
    monotone = 0.0 if diffs[0] > diffs[1] else 1.0
    return [
        _result("make_tangent idempotent (bitwise)", idem, 0.0),
        _result("lq_norm triangle defect", triangle, 1e-12),
        _result("refine successive-diff decrease", monotone, 0.0),
    ]


def check_transforms(dim: int, seed: int, trials: int = 20) -> list[CheckResult]:
    rng = _rng(seed, 1)
    round_trip = 0.0
    isometry = 0.0
    scaled = 0.0
    for _ in range(trials):
        p = random_simplex_point(rng, dim)
        v = random_tangent(rng, p)
        w = random_tangent(rng, p)
        for q in (1.5, 2.0, 3.0, 4.0):
            T = transforms.RootTransform(q)
            back = transforms.inverse(T, transforms.forward(T, p))
            round_trip = max(round_trip, float(np.abs(back.coords - p.coords).max()))
            lhs = sequence_core.lq_norm(transforms.pushforward(T, v).comps, q)
            rhs = metrics.finsler_norm(v, q) / q
            scaled = max(scaled, abs(lhs - rhs) / max(rhs, 1e-30))
        fr = metrics.fr_inner(v, w)
        pb = transforms.pullback_inner(transforms.RootTransform(2.0), v, w)
        isometry = max(isometry, abs(fr - pb) / max(1.0, abs(fr)))
    return [
        _result("root transform round trip", round_trip, 1e-14),
        _result("square-root isometry residual", isometry, 1e-12),
        _result("q-root scaled-isometry rel residual", scaled, 1e-10),
    ]


def check_metrics(dim: int, seed: int, trials: int = 20) -> list[CheckResult]:
    rng = _rng(seed, 2)
    finsler_vs_fr = 0.0
    triangle = -np.inf
    endpoints = 0.0
    quad = 0.0
    for k in range(trials):
        p = random_simplex_point(rng, dim)
        r = random_simplex_point(rng, dim)
        s = random_simplex_point(rng, dim)
        v = random_tangent(rng, p)
        finsler_vs_fr = max(
            finsler_vs_fr,
            abs(metrics.finsler_norm(v, 2.0) - 2.0 * np.sqrt(metrics.fr_inner(v, v)))
            / max(1.0, metrics.finsler_norm(v, 2.0)),
        )
        triangle = max(
            triangle,
            metrics.fr_distance(p, r)
            - metrics.fr_distance(p, s)
            - metrics.fr_distance(s, r),
        )
        endpoints = max(
            endpoints,
            float(np.abs(metrics.fr_geodesic(p, r, 0.0).coords - p.coords).max()),
            float(np.abs(metrics.fr_geodesic(p, r, 1.0).coords - r.coords).max()),
        )
        if k < 3:
            quad = max(quad, abs(_geodesic_length(p, r, 1000) - metrics.fr_distance(p, r)))
    return [
        _result("finsler(q=2) vs 2 sqrt(fr_inner)", finsler_vs_fr, 1e-12),
        _result("fr_distance triangle defect", triangle, 1e-12),
        _result("fr_geodesic endpoint error", endpoints, 1e-12),
        _result("geodesic quadrature length error", quad, 1e-4),
    ]


def _geodesic_length(p, r, steps: int, h: float = 1e-6) -> float:
    """Midpoint-rule length of the geodesic, with finite-difference speed."""
    ts = (np.arange(steps) + 0.5) / steps
    total = 0.0
    for t in ts:
        mid = metrics.fr_geodesic(p, r, t)
        vel = (metrics.fr_geodesic(p, r, t + h).coords - metrics.fr_geodesic(p, r, t - h).coords) / (
            2.0 * h
        )
        v = sequence_core.make_tangent(mid, vel)
        total += np.sqrt(metrics.fr_inner(v, v)) / steps
    return float(total)


def check_connections(dim: int, seed: int, trials: int = 10) -> list[CheckResult]:
    rng = _rng(seed, 3)
    residual = 0.0
    gauge = 0.0
    zero_sum = 0.0
    for _ in range(trials):
        p0 = random_simplex_point(rng, dim)
        v0 = random_tangent(rng, p0, max_ratio=0.5)
        geo = connections.make_e_geodesic(p0, v0)
        t = float(rng.uniform(-0.5, 0.5))
        residual = max(residual, float(np.abs(connections.e_connection_residual(geo, t)).max()))
        shifted = connections.EGeodesic(p0, geo.a + 5.0)
        for tt in (-1.0, 0.3, 2.0):
            gauge = max(gauge, float(np.abs(geo(tt).coords - shifted(tt).coords).max()))
        V = connections.constant_field(random_tangent(rng, p0).comps)
        W = connections.constant_field(random_tangent(rng, p0).comps)
        out = connections.alpha_connection(V, W, p0, q=float(rng.uniform(1.5, 4.0)))
        zero_sum = max(zero_sum, abs(float(out.comps.sum())))
    return [
        _result("e-geodesic equation residual", residual, 1e-6),
        _result("e-geodesic gauge invariance", gauge, 1e-14),
        _result("alpha-connection tangency", zero_sum, 1e-10),
    ]


def check_flows(dim: int, seed: int, trials: int = 10) -> list[CheckResult]:
    rng = _rng(seed, 4)
    ode = 0.0
    match = 0.0
    chain = 0.0
    for _ in range(trials):
        obj = flows.LinearObjective(rng.uniform(-1.0, 1.0, size=dim))
        p0 = random_simplex_point(rng, dim)
        ode = max(ode, flows.flow_ode_residual(obj, p0, float(rng.uniform(0.0, 2.0))))
        match = max(match, flows.flow_geodesic_correspondence(obj, p0))
        v = random_tangent(rng, p0)
        w = flows.gradient_field(obj, p0)
        four_w = sequence_core.make_tangent(p0, 4.0 * w.comps)
        chain = max(
            chain, abs(metrics.fr_inner(four_w, v) - float(np.dot(obj.c, v.comps)))
        )
    obj = flows.LinearObjective(np.array([1.0, 0.0] + [-(k + 1.0) for k in range(dim - 2)]))
    p0 = make_simplex_point(SequenceSpec("uniform", dim))
    rk4 = flows.integrate_rk4(flows.gradient_vector_field(obj), p0, t_max=2.0, dt=1e-3)
    endpoint = float(np.abs(rk4.points[-1].coords - flows.flow_closed_form(obj, p0, 2.0).coords).sum())
    return [
        _result("flow ODE residual (l1)", ode, 1e-6),
        _result("flow vs e-geodesic deviation (l1)", match, 1e-12),
        _result("metric-normalization chain identity", chain, 1e-12),
        _result("rk4 oracle endpoint error (l1)", endpoint, 1e-6),
    ]


def check_hamiltonian(dim: int, seed: int, trials: int = 3) -> list[CheckResult]:
    rng = _rng(seed, 5)
    c = np.sort(rng.uniform(0.5, 3.0, size=dim))[::-1].copy()
    report = hamiltonian.integrability_suite(c, trials=trials, seed=seed)
    kahler = 0.0
    canonical = abs(
        hamiltonian.poisson_bracket(
            hamiltonian.CoordinateReal(0),
            hamiltonian.CoordinateImag(0),
            hamiltonian.random_complex_point(rng, dim),
        )
        - 1.0
    )
    for _ in range(trials):
        z = hamiltonian.random_complex_point(rng, dim)
        kahler = max(kahler, hamiltonian.kahler_gradient_check(hamiltonian.QuadraticHamiltonian(c), z))
    return [
        _result("poisson brackets max abs", report["brackets_max_abs"], 1e-8),
        _result("first-integral conservation drift", report["conservation_max_drift"], 1e-10),
        _result("gram determinant positivity", 0.0 if report["gram_det"] > 0 else 1.0, 0.0),
        _result("kahler field identity residual", kahler, 1e-10),
        _result("canonical pair bracket error", canonical, 1e-10),
    ]


def check_all(dim: int, seed: int) -> list[CheckResult]:
    results: list[CheckResult] = []
    results += check_sequence_core(dim, seed)
    results += check_transforms(dim, seed)
    results += check_metrics(dim, seed)
    results += check_connections(dim, seed)
    results += check_flows(dim, seed)
    results += check_hamiltonian(dim, seed)
    return results
