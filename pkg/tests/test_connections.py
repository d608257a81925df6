import numpy as np
import pytest

from simplexgeo.connections import (
    EGeodesic,
    VectorField,
    alpha_connection,
    constant_field,
    directional_derivative,
    e_connection_residual,
    e_covariant_along_curve,
    e_geodesic_eval,
    make_e_geodesic,
)
from simplexgeo.errors import (
    BaseMismatch,
    CurveDomain,
    NonFiniteInput,
    StepUnderflow,
)
from simplexgeo.metrics import fr_geodesic
from simplexgeo.sequence_core import (
    SimplexPoint,
    make_tangent,
    random_simplex_point,
    random_tangent,
)


class TestDirectionalDerivative:
    def test_constant_field_is_flat(self, rng):
        p = random_simplex_point(rng, 5)
        W = constant_field(make_tangent(p, rng.standard_normal(5)).comps)
        v = random_tangent(rng, p)
        np.testing.assert_allclose(directional_derivative(W, p, v), 0.0, atol=1e-10)

    def test_linear_field(self, rng):
        # W(p) = (p_0 - p_1, p_1 - p_0): exact derivative along v=(1,-1) is (2,-2)
        W = VectorField(
            lambda p: make_tangent(p, np.array([p.coords[0] - p.coords[1], p.coords[1] - p.coords[0]])),
            "swap-difference",
        )
        for coords in ([0.5, 0.5], [0.3, 0.7]):
            p = SimplexPoint(np.array(coords))
            v = make_tangent(p, np.array([1.0, -1.0]))
            np.testing.assert_allclose(directional_derivative(W, p, v), [2.0, -2.0], atol=1e-9)

    def test_step_underflow_near_boundary(self):
        eps = 1e-9
        p = SimplexPoint(np.array([eps, 0.5, 0.5 - eps]))
        W = constant_field(np.array([1.0, 0.0, -1.0]))
        v = make_tangent(p, np.array([-1.0, 0.5, 0.5]))
        with pytest.raises(StepUnderflow):
            directional_derivative(W, p, v)

    def test_richardson_refines(self, rng):
        # quadratic field: plain central difference carries h^2 error, the
        # extrapolated value kills the leading term
        W = VectorField(
            lambda p: make_tangent(p, np.array([p.coords[0] ** 3, -(p.coords[0] ** 3)])),
            "cubic",
        )
        p = SimplexPoint(np.array([0.4, 0.6]))
        v = make_tangent(p, np.array([1.0, -1.0]))
        exact = 3.0 * 0.4**2
        plain = directional_derivative(W, p, v, h=1e-3)
        refined = directional_derivative(W, p, v, h=1e-3, richardson=True)
        assert abs(refined[0] - exact) < abs(plain[0] - exact) + 1e-13


class TestAlphaConnection:
    def test_symmetric_cancellation(self, half_half):
        V = constant_field(np.array([1.0, -1.0]))
        out = alpha_connection(V, V, half_half, q=2.0)
        np.testing.assert_allclose(out.comps, 0.0, atol=1e-9)

    def test_skewed_example(self):
        # constant V=W=(1,-1) at p=(1/4,3/4), q=2: correction is
        # (1/2)((4, 4/3) - (16/3)(1/4, 3/4)) = (4/3, -4/3), so result (-4/3, 4/3)
        p = SimplexPoint(np.array([0.25, 0.75]))
        V = constant_field(np.array([1.0, -1.0]))
        out = alpha_connection(V, V, p, q=2.0)
        np.testing.assert_allclose(out.comps, [-4.0 / 3.0, 4.0 / 3.0], rtol=1e-9)

    def test_zero_first_argument(self, rng):
        p = random_simplex_point(rng, 6)
        Z = constant_field(np.zeros(6))
        W = constant_field(random_tangent(rng, p).comps)
        np.testing.assert_allclose(alpha_connection(Z, W, p, q=3.0).comps, 0.0, atol=1e-10)

    def test_output_zero_sum_random_fields(self, rng):
        for _ in range(20):
            dim = int(rng.integers(2, 17))
            p = random_simplex_point(rng, dim)
            const = make_tangent(p, rng.standard_normal(dim)).comps
            V = constant_field(const)

            def poly(pt, c=rng.standard_normal(dim)):
                return make_tangent(pt, c * pt.coords)

            W = VectorField(poly, "coordinate-poly")
            out = alpha_connection(V, W, p, q=float(rng.uniform(1.2, 5.0)))
            assert abs(float(out.comps.sum())) <= 1e-10


class TestEGeodesic:
    def test_exponents_from_velocity(self, half_half):
        v0 = make_tangent(half_half, np.array([0.5, -0.5]))
        geo = make_e_geodesic(half_half, v0)
        np.testing.assert_array_equal(geo.a, [1.0, -1.0])
        assert geo.gauge == 0.0

    def test_zero_velocity_constant(self, half_half):
        geo = make_e_geodesic(half_half, make_tangent(half_half, np.zeros(2)))
        for t in (-3.0, 0.0, 7.5):
            np.testing.assert_allclose(geo(t).coords, half_half.coords, atol=1e-15)

    def test_base_mismatch(self, rng):
        p, r = random_simplex_point(rng, 4), random_simplex_point(rng, 4)
        with pytest.raises(BaseMismatch):
            make_e_geodesic(p, random_tangent(rng, r))

    def test_closed_form_value(self, half_half):
        # with a=(1,-1), p_0(t) = e^{2t}/(e^{2t}+1); e^{2t}=3 at t=ln(3)/2
        geo = EGeodesic(half_half, np.array([1.0, -1.0]))
        t = 0.5 * np.log(3.0)
        np.testing.assert_allclose(geo(t).coords, [0.75, 0.25], rtol=1e-15)

    def test_t_zero_returns_start(self, rng):
        p0 = random_simplex_point(rng, 8)
        geo = make_e_geodesic(p0, random_tangent(rng, p0))
        np.testing.assert_allclose(geo(0.0).coords, p0.coords, rtol=0, atol=1e-15)

    def test_gauge_invariance(self, rng):
        for mu in (-3.0, 5.0):
            p0 = random_simplex_point(rng, 6)
            geo = make_e_geodesic(p0, random_tangent(rng, p0))
            shifted = EGeodesic(p0, geo.a + mu)
            for t in (-1.0, 0.3, 2.0):
                np.testing.assert_allclose(
                    shifted(t).coords, geo(t).coords, rtol=0, atol=1e-14
                )

    def test_completeness_far_times(self, half_half):
        geo = EGeodesic(half_half, np.array([1.0, -1.0]))
        far = geo(1e4)
        assert float(far.coords.sum()) == 1.0
        assert far.coords.min() == np.finfo(float).tiny
        assert far.coords.max() == 1.0
        near = geo(-1e4)
        assert float(near.coords.sum()) == 1.0
        assert near.coords.min() > 0.0

    def test_validity_across_scales(self, rng):
        p0 = random_simplex_point(rng, 8)
        geo = make_e_geodesic(p0, random_tangent(rng, p0, max_ratio=1.0))
        for t in (-1e4, -10.0, -0.1, 0.1, 10.0, 1e4):
            pt = geo(t)
            assert float(pt.coords.sum()) == 1.0
            assert pt.coords.min() > 0.0

    def test_non_finite_time(self, half_half):
        geo = EGeodesic(half_half, np.array([1.0, -1.0]))
        with pytest.raises(NonFiniteInput):
            e_geodesic_eval(geo, np.inf)


class TestEConnectionResidual:
    def test_geodesics_annihilate(self, rng):
        for _ in range(50):
            dim = int(rng.integers(2, 33))
            p0 = random_simplex_point(rng, dim)
            v0 = random_tangent(rng, p0, max_ratio=0.5)
            geo = make_e_geodesic(p0, v0)
            t = float(rng.uniform(-0.5, 0.5))
            assert np.abs(e_connection_residual(geo, t, h=1e-3)).max() <= 1e-6

    def test_fisher_rao_geodesic_is_not_e_geodesic(self, half_half):
        r = SimplexPoint(np.array([0.9, 0.1]))
        residual = e_connection_residual(lambda t: fr_geodesic(half_half, r, t), 0.5, h=1e-3)
        assert np.abs(residual).max() > 1e-2

    def test_constant_curve(self, rng):
        p = random_simplex_point(rng, 5)
        residual = e_connection_residual(lambda t: p, 0.0, h=1e-3)
        np.testing.assert_allclose(residual, 0.0, atol=1e-15)

    def test_curve_domain_error(self, half_half):
        def broken(t):
            if t > 0.1:
                raise RuntimeError("past the edge")
            return half_half

        with pytest.raises(CurveDomain):
            e_connection_residual(broken, 0.1, h=0.05)


class TestLeibnizRule:
    def test_scalar_times_constant_field(self, rng):
        # covariant derivative along the curve of f W splits as
        # (d/dt f) W + f (covariant derivative of W) because W is zero-sum
        for _ in range(5):
            dim = int(rng.integers(2, 9))
            p0 = random_simplex_point(rng, dim)
            geo = make_e_geodesic(p0, random_tangent(rng, p0, max_ratio=0.5))
            w0 = random_tangent(rng, p0).comps
            h, t = 1e-3, 0.2

            def f(s):
                return float(geo(s).coords[0])

            lhs = e_covariant_along_curve(geo, lambda s: f(s) * w0, t, h)
            df = (f(t + h) - f(t - h)) / (2.0 * h)
            nabla_w = e_covariant_along_curve(geo, lambda s: w0, t, h)
            rhs = df * w0 + f(t) * nabla_w
            np.testing.assert_allclose(lhs, rhs, atol=2e-6)
