import numpy as np
import pytest

import conelab as cl
from conelab.bodies import circumradius, fibonacci_directions
from conelab.cones import (
    cone_pair_sweep,
    ellipsoidal_cone_detail,
    ray_graze_defect,
)
from conelab.geometry import Hyperplane, fit_hyperplane, fit_hyperplane_through_origin

BALL = cl.Ellipsoid.ball(1.0)
ORIGIN = np.zeros(3)


class TestSupportCone:
    def test_apex_inside_rejected(self):
        with pytest.raises(cl.ApexInsideBodyError):
            cl.SupportCone(np.array([0.5, 0, 0]), BALL)

    def test_body_inside_cone(self):
        cone = cl.SupportCone(np.array([2.0, 0, 0]), BALL)
        for u in fibonacci_directions(50, 3):
            assert cl.cone_contains(cone, 0.99 * u, 1e-9)


class TestConeContains:
    def test_ball_examples(self):
        cone = cl.SupportCone(np.array([2.0, 0, 0]), BALL)
        assert cl.cone_contains(cone, [0, 0, 0])
        # half-angle is 30 degrees: straight up from the apex misses
        assert not cl.cone_contains(cone, [2, 0, 1])
        # tangency contact point from the 30-degree geometry
        assert cl.cone_contains(cone, [0.5, np.sqrt(3) / 2, 0])
        assert abs(ray_graze_defect(BALL, np.array([2.0, 0, 0]), np.array([0.5, np.sqrt(3) / 2, 0]))) < 1e-12

    def test_quadric_ray_sign_agreement(self):
        e = cl.random_ellipsoid(12, 3, 4.0)
        apex = np.array([2.0, 1.0, -0.5])
        cone = cl.SupportCone(apex, e)
        rng = np.random.default_rng(0)
        pts = rng.uniform(-3, 3, size=(10_000, 3))
        quadric_route = cl.cone_contains(cone, pts, 1e-9)
        mism = 0
        for z, a in zip(pts, quadric_route):
            b = ray_graze_defect(e, apex, z) <= 1e-9
            mism += a != b
        assert mism == 0

    def test_generic_body_route(self):
        body = cl.Superellipsoid(4.0, [1, 1, 1])
        cone = cl.SupportCone(np.array([2.5, 0, 0]), body)
        assert cl.cone_contains(cone, [0, 0, 0])
        assert not cl.cone_contains(cone, [2.5, 0, 1.0])


class TestGraze:
    def test_ball_polar_plane(self):
        cone = cl.SupportCone(np.array([2.0, 0, 0]), BALL)
        g = cl.graze_sample(cone, 64)
        np.testing.assert_allclose(g.points[:, 0], 0.5, atol=1e-10)
        np.testing.assert_allclose(np.linalg.norm(g.points, axis=1), 1.0, atol=1e-10)
        assert g.carrier is not None
        assert g.carrier.same_as(Hyperplane([1, 0, 0], 0.5), tol=1e-9)

    def test_ellipsoid_graze_on_polar_plane(self):
        e = cl.random_ellipsoid(4, 3, 4.0)
        x = np.array([1.8, -0.9, 0.6])
        gamma = cl.polar_hyperplane(e, x)
        g = cl.graze_sample(cl.SupportCone(x, e), 64)
        assert np.abs(gamma.signed_distance(g.points)).max() < 1e-10

    def test_graze_consistency(self):
        # every sample on bd K and its supporting plane passes through the apex
        for body in (cl.random_ellipsoid(5, 3, 4.0), cl.Superellipsoid(4.0, [1.0, 0.8, 1.2]),
                     cl.perturbed_ellipsoid(6, np.eye(3), 0.08)):
            apex = np.array([2.5, 0.7, -0.4])
            g = cl.graze_sample(cl.SupportCone(apex, body), 32)
            for z in g.points:
                assert abs(float(body.gauge(z)) - 1.0) < 1e-9
                n = body.outer_normal(z)
                chord = apex - z
                assert abs(float(n @ chord)) / np.linalg.norm(chord) < 1e-9

    def test_cube_graze_on_visible_edges(self):
        # from (3,0,0) only the face x=1 faces the apex; the silhouette is
        # its 4 edges (brute force over face visibility)
        cube = cl.Polytope.cube(3)
        apex = np.array([3.0, 0, 0])
        visible = [i for i, n in enumerate(cube.facet_normals) if n @ apex + cube.facet_offsets[i] > 0]
        planes = {tuple(np.round(np.append(cube.facet_normals[i], cube.facet_offsets[i]), 9)) for i in visible}
        assert len(planes) == 1  # qhull triangulates the square face in two
        g = cl.graze_sample(cl.SupportCone(apex, cube), 32)
        np.testing.assert_allclose(g.points[:, 0], 1.0, atol=1e-9)
        np.testing.assert_allclose(np.abs(g.points[:, 1:]).max(axis=1), 1.0, atol=1e-9)


class TestPolarHyperplane:
    def test_unit_sphere(self):
        h = cl.polar_hyperplane(BALL, [2, 0, 0])
        assert h.same_as(Hyperplane([1, 0, 0], 0.5), tol=1e-12)

    def test_axis_pole_of_anisotropic(self):
        e = cl.Ellipsoid(np.diag([1.0, 4.0, 9.0]))
        h = cl.polar_hyperplane(e, [2, 0, 0])
        assert h.same_as(Hyperplane([1, 0, 0], 0.5), tol=1e-12)

    def test_collinear_poles_give_parallel_planes(self):
        e = cl.random_ellipsoid(3, 3, 4.0)
        s = cl.random_star_surface(4, 4.0, 0.5)
        for u in fibonacci_directions(20, 3):
            x = s.point(u)
            y = cl.antipode(s, x)
            hx = cl.polar_hyperplane(e, x)
            hy = cl.polar_hyperplane(e, y)
            assert abs(abs(float(hx.normal @ hy.normal)) - 1.0) < 1e-12

    def test_pole_inside_warns(self):
        with pytest.warns(cl.cones.PoleInsideWarning):
            cl.polar_hyperplane(BALL, [0.5, 0, 0])


class TestConePairIntersection:
    def test_ball_symmetric(self):
        pts = cl.cone_pair_intersection(BALL, [2, 0, 0], [-2, 0, 0], planes=32)
        assert pts.shape == (64, 3)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 2 / np.sqrt(3), atol=1e-9)
        np.testing.assert_allclose(pts[:, 0], 0.0, atol=1e-9)

    def test_sqrt2_lands_on_outer_body(self):
        r = np.sqrt(2.0)
        pts = cl.cone_pair_intersection(BALL, [r, 0, 0], [-r, 0, 0], planes=16)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), r, atol=1e-12)
        np.testing.assert_allclose(pts[:, 0], 0.0, atol=1e-12)

    def test_superellipsoid_not_coplanar(self):
        body = cl.Superellipsoid(4.0, [1.0, 1.0, 1.0])
        x = 2.0 * np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
        pts = cl.cone_pair_intersection(body, x, -x, planes=64)
        _, res_origin = fit_hyperplane_through_origin(pts)
        _, res_free = fit_hyperplane(pts)
        assert res_origin > 1e-3
        assert res_free > 1e-3

    def test_collinearity_enforced(self):
        with pytest.raises(cl.CollinearityError):
            cl.cone_pair_intersection(BALL, [2, 0, 0], [-2, 0.5, 0])

    def test_sweep_soundness_both_cones(self):
        for body in (cl.random_ellipsoid(2, 3, 4.0), cl.Superellipsoid(4.0, [1.0, 0.8, 1.2])):
            x = np.array([2.2, 0.6, -0.4])
            pts = cl.cone_pair_intersection(body, x, -x, planes=16)
            for z in pts:
                assert abs(ray_graze_defect(body, x, z)) < 1e-9
                assert abs(ray_graze_defect(body, -x, z)) < 1e-9

    def test_homothetic_pair_planarity(self):
        # two concentric homothetic ellipsoids, collinear apexes at unequal
        # distances: the sampled boundary intersection is flat
        for seed in range(4):
            g1 = cl.random_ellipsoid(seed, 3, 4.0)
            g2 = g1.scaled(0.6)
            u = fibonacci_directions(7, 3)[seed]
            x = 2.4 * u
            y = -3.1 * u
            sweep = cone_pair_sweep(g1, x, g2, y, None, planes=32)
            _, res = fit_hyperplane(sweep.points)
            assert res <= 1e-8 * circumradius(g1)

    def test_star_antipode_pair_coplanar_free_plane(self):
        e = cl.random_ellipsoid(2, 3, 4.0)
        s = cl.random_star_surface(11, 4.0, 0.5)
        scale = circumradius(e)
        for u in fibonacci_directions(10, 3):
            x = s.point(u)
            y = cl.antipode(s, x)
            pts = cl.cone_pair_intersection(e, x, y, planes=32)
            _, res = fit_hyperplane(pts)
            assert res <= 1e-8 * scale

    def test_asymmetric_pair_carrier_misses_origin(self):
        # regression for the carrier-plane analysis: unit ball, apexes at
        # distances 2 and 3, the carrier is exactly {z1 = 0.10102051...}
        pts = cl.cone_pair_intersection(BALL, [2, 0, 0], [-3, 0, 0], planes=32)
        plane, res_free = fit_hyperplane(pts)
        assert res_free < 1e-12
        np.testing.assert_allclose(pts[:, 0], 0.10102051443364417, atol=1e-12)
        _, res_origin = fit_hyperplane_through_origin(pts)
        assert res_origin == pytest.approx(0.10102051443364417, abs=1e-9)

    def test_two_points_per_plane_continuous_sides(self):
        sweep = cone_pair_sweep(BALL, np.array([2.0, 0, 0]), BALL, np.array([-2.0, 0, 0]), None, planes=16)
        up = sweep.points[:16]
        steps = np.linalg.norm(np.diff(up, axis=0), axis=1)
        # consecutive sweep points stay close: one continuous curve
        assert steps.max() < 2 * np.pi * (2 / np.sqrt(3)) / 16 + 1e-9


class TestEllipsoidalCone:
    def test_ball_cone_circle(self):
        cone = cl.SupportCone(np.array([2.0, 0, 0]), BALL)
        ok, res, elliptic = ellipsoidal_cone_detail(cone, Hyperplane([1, 0, 0], 0.0), tol=1e-9)
        assert ok and elliptic and res < 1e-9
        # radius of the section circle from the tangency geometry
        g = cl.graze_sample(cone, 8).points
        t = (0.0 - 2.0) / ((g - np.array([2.0, 0, 0])) @ np.array([1.0, 0, 0]))
        pts = np.array([2.0, 0, 0]) + t[:, None] * (g - np.array([2.0, 0, 0]))
        np.testing.assert_allclose(np.linalg.norm(pts[:, 1:], axis=1), 2 / np.sqrt(3), atol=1e-12)

    def test_cube_cone_not_elliptic(self):
        cone = cl.SupportCone(np.array([3.0, 0, 0]), cl.Polytope.cube(3))
        assert not cl.is_ellipsoidal_cone(cone, Hyperplane([1, 0, 0], 0.0), tol=1e-9)

    def test_any_ellipsoid_cone_elliptic(self):
        rng = np.random.default_rng(7)
        for seed in range(4):
            e = cl.random_ellipsoid(seed, 3, 4.0)
            u = rng.standard_normal(3)
            u = u / np.linalg.norm(u)
            apex = 2.5 * u * float(e.support(u))
            cone = cl.SupportCone(apex, e)
            cut = Hyperplane(u, 0.2)
            assert cl.is_ellipsoidal_cone(cone, cut, tol=1e-8)

    def test_cut_through_apex_rejected(self):
        cone = cl.SupportCone(np.array([2.0, 0, 0]), BALL)
        with pytest.raises(cl.GeometryError):
            ellipsoidal_cone_detail(cone, Hyperplane([0, 0, 1], 0.0))
