import numpy as np
import pytest

from simplexgeo.errors import DimensionMismatch, PositivityLost
from simplexgeo.flows import (
    LinearObjective,
    Trajectory,
    flow_closed_form,
    flow_geodesic_correspondence,
    flow_ode_residual,
    flow_trajectory,
    gradient_field,
    gradient_vector_field,
    integrate_rk4,
    objective_value,
    solve_lp,
)
from simplexgeo.metrics import fr_inner
from simplexgeo.sequence_core import (
    SequenceSpec,
    SimplexPoint,
    make_simplex_point,
    make_tangent,
    random_simplex_point,
    random_tangent,
)


def uniform(dim):
    return make_simplex_point(SequenceSpec("uniform", dim))


class TestObjectiveValue:
    def test_basic(self, half_half):
        assert objective_value(LinearObjective(np.array([1.0, 0.0])), half_half) == 0.5

    def test_near_vertex(self):
        eps = 1e-9
        p = SimplexPoint(np.array([1.0 - eps, eps]))
        val = objective_value(LinearObjective(np.array([1.0, 0.0])), p)
        assert val == pytest.approx(1.0 - eps, abs=1e-16)

    def test_constant_objective(self, rng):
        kappa = 3.25
        obj = LinearObjective(np.full(7, kappa))
        for _ in range(5):
            assert objective_value(obj, random_simplex_point(rng, 7)) == pytest.approx(
                kappa, rel=1e-15
            )

    def test_dim_mismatch(self, half_half):
        with pytest.raises(DimensionMismatch):
            objective_value(LinearObjective(np.array([1.0, 0.0, 0.0])), half_half)

    def test_strictly_decreasing_flag(self):
        assert LinearObjective(np.array([3.0, 2.0, 1.0])).strictly_decreasing
        assert not LinearObjective(np.array([3.0, 3.0, 1.0])).strictly_decreasing


class TestGradientField:
    def test_basic_example(self, half_half):
        w = gradient_field(LinearObjective(np.array([1.0, 0.0])), half_half)
        np.testing.assert_allclose(w.comps, [0.25, -0.25], rtol=0, atol=0)

    def test_constant_objective_vanishes(self, rng):
        obj = LinearObjective(np.full(5, 2.0))
        p = random_simplex_point(rng, 5)
        np.testing.assert_allclose(gradient_field(obj, p).comps, 0.0, atol=1e-16)

    def test_chain_identity(self, rng):
        # with the 1/4 metric the dual of dF is 4W: fr_inner(4W, v) = <c, v>
        for _ in range(30):
            dim = int(rng.integers(2, 33))
            obj = LinearObjective(rng.uniform(-1.0, 1.0, size=dim))
            p = random_simplex_point(rng, dim)
            v = random_tangent(rng, p)
            four_w = make_tangent(p, 4.0 * gradient_field(obj, p).comps)
            lhs = fr_inner(four_w, v)
            rhs = float(np.dot(obj.c, v.comps))
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


class TestFlowClosedForm:
    def test_two_point_value(self, half_half):
        obj = LinearObjective(np.array([1.0, 0.0]))
        out = flow_closed_form(obj, half_half, np.log(3.0))
        np.testing.assert_allclose(out.coords, [0.75, 0.25], rtol=1e-15)

    def test_t_zero(self, rng):
        p0 = random_simplex_point(rng, 6)
        obj = LinearObjective(rng.standard_normal(6))
        np.testing.assert_allclose(flow_closed_form(obj, p0, 0.0).coords, p0.coords, atol=1e-15)

    def test_long_time_vertex_limit(self):
        obj = LinearObjective(np.array([3.0, 2.0, 1.0]))
        p = flow_closed_form(obj, uniform(3), 1e4)
        assert p.coords[0] == 1.0
        assert p.coords[1] == np.finfo(float).tiny

    def test_ode_residual(self, rng):
        for _ in range(20):
            dim = int(rng.integers(2, 33))
            obj = LinearObjective(rng.uniform(-1.0, 1.0, size=dim))
            p0 = random_simplex_point(rng, dim)
            t = float(rng.uniform(0.0, 3.0))
            assert flow_ode_residual(obj, p0, t, h=1e-4) <= 1e-6

    def test_objective_monotone(self, rng):
        obj = LinearObjective(rng.standard_normal(8))
        p0 = random_simplex_point(rng, 8)
        traj = flow_trajectory(obj, p0, np.linspace(0.0, 5.0, 1000))
        assert np.diff(traj.objective).min() >= -1e-12


class TestIntegrateRk4:
    def test_matches_closed_form(self, half_half):
        obj = LinearObjective(np.array([1.0, 0.0]))
        traj = integrate_rk4(gradient_vector_field(obj), half_half, t_max=2.0, dt=1e-3)
        expect = flow_closed_form(obj, half_half, 2.0)
        assert np.abs(traj.points[-1].coords - expect.coords).sum() <= 1e-6

    def test_zero_field_constant(self, rng):
        p0 = random_simplex_point(rng, 4)
        traj = integrate_rk4(lambda p: make_tangent(p, np.zeros(4)), p0, t_max=0.5, dt=0.05)
        for pt in traj.points:
            np.testing.assert_allclose(pt.coords, p0.coords, atol=1e-15)

    def test_stiff_objective_loses_positivity(self):
        obj = LinearObjective(np.array([50.0, 0.0]))
        with pytest.raises(PositivityLost):
            integrate_rk4(gradient_vector_field(obj), uniform(2), t_max=5.0, dt=1.0)

    def test_renormalization_drift_small(self, rng):
        obj = LinearObjective(rng.uniform(-1, 1, size=6))
        traj = integrate_rk4(gradient_vector_field(obj), uniform(6), t_max=1.0, dt=1e-2)
        assert traj.residual_l1.max() <= 1e-12


class TestSolveLp:
    def test_two_point(self, half_half):
        obj = LinearObjective(np.array([1.0, 0.0]))
        limit, report = solve_lp(obj, half_half, tol=1e-6)
        assert report.converged
        assert limit.coords[0] >= 1.0 - 1e-6
        assert objective_value(obj, limit) >= 1.0 - 1e-6

    def test_three_coefficients_rate(self):
        obj = LinearObjective(np.array([3.0, 2.0, 1.0]))
        limit, report = solve_lp(obj, uniform(3), tol=1e-8)
        assert report.converged
        assert limit.coords[0] == pytest.approx(1.0, abs=1e-8)
        assert limit.coords[1] < 1e-8
        assert limit.coords[2] < 1e-16
        assert report.rate == pytest.approx(obj.gap, rel=0.05)
        assert report.rate_rel_err <= 0.05

    def test_constant_objective_advisory(self):
        obj = LinearObjective(np.full(4, 1.0))
        limit, report = solve_lp(obj, uniform(4), tol=1e-6)
        assert not report.converged
        assert report.advisory is not None and "NotStrictlyDecreasing" in report.advisory
        np.testing.assert_allclose(limit.coords, 0.25, atol=1e-15)

    def test_report_serializable(self, half_half):
        import json

        _, report = solve_lp(LinearObjective(np.array([1.0, 0.0])), half_half, tol=1e-6)
        payload = json.dumps(report.to_dict())
        assert "converged" in payload


class TestFlowGeodesicCorrespondence:
    def test_default_grid(self, half_half):
        obj = LinearObjective(np.array([1.0, 0.0]))
        assert flow_geodesic_correspondence(obj, half_half) <= 1e-12

    def test_constant_objective(self, rng):
        # both curves are constant; the flow shifts every log weight by c t
        # before the softmax, so the curves agree to rounding, not bitwise
        obj = LinearObjective(np.full(5, 2.0))
        p0 = random_simplex_point(rng, 5)
        assert flow_geodesic_correspondence(obj, p0) <= 1e-14

    def test_random_instances(self, rng):
        for _ in range(20):
            obj = LinearObjective(rng.standard_normal(16))
            p0 = random_simplex_point(rng, 16)
            assert flow_geodesic_correspondence(obj, p0) <= 1e-12


class TestTrajectory:
    def test_length_agreement_enforced(self, half_half):
        with pytest.raises(DimensionMismatch):
            Trajectory(np.array([0.0, 1.0]), (half_half,))

    def test_times_strictly_increasing(self, half_half):
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 0.0]), (half_half, half_half))
