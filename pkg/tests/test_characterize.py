import numpy as np
import pytest

import conelab as cl
from conelab.bodies import fibonacci_directions
from conelab.characterize import (
    SipScene,
    central_symmetry_check,
    construct_e3,
    deviation_metric,
    deviation_profile,
    e3_certification_defect,
    hammer_test,
    homothety_ratio,
    kakutani_test,
    omega_identity_check,
    reflection_conjugacy_check,
    shadow_defect,
    sip_check,
    symmetry_defect,
)
from conelab.geometry import fit_hyperplane_through_origin

BALL = cl.Ellipsoid.ball(1.0)
SQRT2 = float(np.sqrt(2.0))


def linear_image(e: cl.Ellipsoid, t: np.ndarray) -> cl.Ellipsoid:
    """Image of an O-centered ellipsoid under the invertible linear map t."""
    ti = np.linalg.inv(t)
    return cl.Ellipsoid(ti.T @ e.shape @ ti)


class TestConstructE3:
    def test_ratio_values(self):
        assert homothety_ratio(SQRT2) == pytest.approx(SQRT2, abs=1e-15)
        assert homothety_ratio(2.0) == pytest.approx(2 / np.sqrt(3.0), abs=1e-15)
        assert homothety_ratio(2.0) == pytest.approx(1.154700, abs=1e-6)
        assert homothety_ratio(1.2) == pytest.approx(1.2 / np.sqrt(0.44), abs=1e-15)
        assert homothety_ratio(1.2) == pytest.approx(1.809068, abs=1e-6)

    def test_regimes(self):
        _, tag = construct_e3(BALL, SQRT2)
        assert tag == "equal"
        e3, tag = construct_e3(BALL, 2.0)
        assert tag == "E3-inside-E2"
        assert 1.0 / np.sqrt(np.linalg.eigvalsh(e3.shape)[0]) < 2.0
        e3, tag = construct_e3(BALL, 1.2)
        assert tag == "E2-inside-E3"
        assert 1.0 / np.sqrt(np.linalg.eigvalsh(e3.shape)[0]) > 1.2

    def test_lambda_at_most_one_rejected(self):
        with pytest.raises(cl.GeometryError):
            construct_e3(BALL, 1.0)
        with pytest.raises(cl.GeometryError):
            construct_e3(BALL, 0.7)

    def test_certified_against_sampling_oracle(self):
        for seed in range(5):
            e1 = cl.random_ellipsoid(seed, 3, 4.0)
            for lam in (1.2, SQRT2, 2.0, 3.0):
                assert e3_certification_defect(e1, lam, apexes=6, planes=16) <= 1e-7


class TestSip:
    def test_sphere_scene_passes(self):
        scene = SipScene(BALL, cl.Ellipsoid.ball(2.0), cl.Ellipsoid.ball(2 / np.sqrt(3.0)))
        rep = sip_check(scene, samples=8, tol=1e-8, planes=48, curve_samples=48)
        assert rep.verdict
        assert rep.max_coplanarity < 1e-9
        assert rep.max_g_match < 1e-9

    def test_wrong_associated_body_fails_with_radius_gap(self):
        scene = SipScene(BALL, cl.Ellipsoid.ball(2.0), cl.Ellipsoid.ball(1.5))
        rep = sip_check(scene, samples=8, tol=1e-8, planes=48, curve_samples=48)
        assert not rep.verdict
        assert rep.max_g_match == pytest.approx(1.5 - 2 / np.sqrt(3.0), abs=1e-9)

    def test_random_ellipsoid_scene_passes(self):
        e1 = cl.random_ellipsoid(4, 3, 4.0)
        lam = 3.0
        scene = SipScene(e1, e1.scaled(lam), e1.scaled(homothety_ratio(lam)))
        rep = sip_check(scene, samples=6, tol=1e-8, planes=48, curve_samples=32)
        assert rep.verdict

    def test_verdict_affine_covariant(self):
        t = cl.random_rotation(5, 3) @ np.diag([1.0, 1.5, 0.7])
        k = linear_image(BALL, t)
        s = linear_image(cl.Ellipsoid.ball(2.0), t)
        g_good = linear_image(cl.Ellipsoid.ball(2 / np.sqrt(3.0)), t)
        g_bad = linear_image(cl.Ellipsoid.ball(1.5), t)
        assert sip_check(SipScene(k, s, g_good), samples=6, tol=1e-8, planes=48, curve_samples=32).verdict
        assert not sip_check(SipScene(k, s, g_bad), samples=6, tol=1e-8, planes=48, curve_samples=32).verdict

    def test_containment_validated(self):
        with pytest.raises(cl.ContainmentError):
            SipScene(BALL, cl.Ellipsoid.ball(2.0), cl.Ellipsoid.ball(0.5)).validate()

    def test_swapped_roles_run(self):
        # role-swapped variant (x on bd G, matched against bd S) is exposed
        # but not required to pass at the strict tolerance
        scene = SipScene(BALL, cl.Ellipsoid.ball(2.0), cl.Ellipsoid.ball(2 / np.sqrt(3.0)))
        rep = sip_check(scene, samples=4, tol=1e-8, planes=32, curve_samples=16, swapped=True)
        assert len(rep.samples) == 4


class TestDeviationMetric:
    def test_zero_on_ellipsoids(self):
        e = cl.random_ellipsoid(5, 3, 4.0)
        s = cl.random_star_surface(6, 4.0, 0.4)
        assert deviation_metric(e, s, samples=10, sweep=32) <= 1e-8

    def test_positive_on_p4_control(self):
        body = cl.Superellipsoid(4.0, [1.0, 1.0, 1.0])
        assert deviation_metric(body, cl.Ellipsoid.ball(3.0), samples=12, sweep=32) >= 1e-3

    def test_epsilon_sweep_monotone(self):
        metrics = []
        for eps in (0.1, 0.05, 0.01):
            body = cl.perturbed_ellipsoid(9, np.eye(3), eps)
            metrics.append(deviation_metric(body, cl.Ellipsoid.ball(3.0), samples=8, sweep=24))
        assert metrics[0] > metrics[1] > metrics[2]

    def test_profile_reports_both_residuals(self):
        e = cl.random_ellipsoid(1, 3, 4.0)
        s = cl.random_star_surface(2, 4.0, 0.4)
        prof = deviation_profile(e, s, samples=6, sweep=24)
        assert all(rec.residual <= 1e-8 for rec in prof)
        # non-symmetric surface: the through-origin residual stays large
        assert max(rec.residual_through_origin for rec in prof) > 1e-4


class TestHammer:
    def test_centered_ellipsoid(self):
        assert hammer_test(cl.random_ellipsoid(0, 3, 4.0), directions=64).passed

    def test_shifted_ball_fails_along_transverse(self):
        rep = hammer_test(cl.Ellipsoid.ball(1.0, center=[0.3, 0, 0]), directions=64)
        assert not rep.passed
        # worst violation transverse to the shift axis
        assert abs(rep.worst_direction[0]) < 0.5
        assert rep.worst_defect > 0.5

    def test_octahedron(self):
        assert hammer_test(cl.Polytope.cross_polytope(3), directions=48, tol=1e-8).passed


class TestCentralSymmetry:
    def test_superellipsoid_about_origin(self):
        rep = central_symmetry_check(cl.perturbed_superellipsoid(3, 4.0, [1, 0.8, 1.2]))
        assert rep.passed

    def test_shifted_ball_defect(self):
        assert symmetry_defect(cl.Ellipsoid.ball(1.0, center=[0.3, 0, 0]), np.zeros(3), [1, 0, 0]) == pytest.approx(
            0.6, abs=1e-12
        )
        rep = central_symmetry_check(cl.Ellipsoid.ball(1.0, center=[0.3, 0, 0]))
        assert not rep.passed
        assert rep.worst_defect == pytest.approx(0.6, abs=1e-9)

    def test_symmetrization_is_symmetric(self):
        base = cl.Ellipsoid.ball(1.0, center=[0.3, 0.1, 0])
        sym = cl.CustomBody(3, lambda u: 0.5 * (base.support(u) + base.support(-u)))
        assert central_symmetry_check(sym, samples=128).passed


class TestShadowBoundary:
    def test_sphere_equator(self):
        assert cl.shadow_boundary_test(BALL, [1, 0, 0], [0, 1, 0], 1e-9)
        assert not cl.shadow_boundary_test(BALL, [1, 0, 0], [1, 0, 0], 1e-9)

    def test_cube_side_face(self):
        cube = cl.Polytope.cube(3)
        assert cl.shadow_boundary_test(cube, [0, 0, 1], [1.0, 0.2, 0.3], 1e-9)

    def test_off_boundary_rejected(self):
        with pytest.raises(cl.GeometryError):
            shadow_defect(BALL, [1, 0, 0], [0.5, 0, 0])


class TestOmegaIdentity:
    def test_concentric_spheres_equator(self):
        scene = SipScene(BALL, cl.Ellipsoid.ball(2.0), cl.Ellipsoid.ball(2 / np.sqrt(3.0)))
        rep = omega_identity_check(scene, [0, 0, 1.0], samples=4, tol=1e-8, planes=24, march_planes=8)
        assert rep.passed
        np.testing.assert_allclose(np.abs(rep.forward_points[:, 2]), 0.0, atol=1e-8)
        np.testing.assert_allclose(np.linalg.norm(rep.forward_points, axis=1), 2.0, atol=1e-8)

    def test_affine_image_preserved(self):
        t = cl.random_rotation(3, 3) @ np.diag([1.0, 1.4, 0.7])
        scene = SipScene(
            linear_image(BALL, t),
            linear_image(cl.Ellipsoid.ball(2.0), t),
            linear_image(cl.Ellipsoid.ball(2 / np.sqrt(3.0)), t),
        )
        rep = omega_identity_check(scene, [0, 0, 1.0], samples=4, tol=1e-8, planes=24, march_planes=8)
        assert rep.passed

    def test_random_ellipsoid_scene(self):
        e1 = cl.random_ellipsoid(8, 3, 3.0)
        lam = 2.5
        scene = SipScene(e1, e1.scaled(lam), e1.scaled(homothety_ratio(lam)))
        for u in fibonacci_directions(5, 3):
            rep = omega_identity_check(scene, u, samples=3, tol=1e-7, planes=24, march_planes=8)
            assert rep.forward_defect <= 1e-7
            assert rep.reverse_defect <= 1e-7


class TestKakutani:
    def test_ellipsoid_conjugate_direction(self):
        e = cl.random_ellipsoid(2, 3, 4.0)
        rep = kakutani_test(e, planes=5, tol=1e-6, seed=0)
        assert rep.passed
        # the found line matches the conjugate direction A^-1 w
        for p in rep.planes:
            conj = e.shape_inv @ p.plane_normal
            conj = conj / np.linalg.norm(conj)
            assert abs(abs(float(p.line @ conj))) == pytest.approx(1.0, abs=1e-6)

    def test_sphere_line_is_normal(self):
        rep = kakutani_test(BALL, planes=3, tol=1e-8, seed=1)
        assert rep.passed
        for p in rep.planes:
            assert abs(abs(float(p.line @ p.plane_normal))) == pytest.approx(1.0, abs=1e-7)

    def test_cube_fails_some_plane(self):
        rep = kakutani_test(cl.Polytope.cube(3), planes=6, tol=1e-6, seed=0)
        assert not rep.passed
        assert max(p.defect for p in rep.planes) >= 1e-2

    def test_superellipsoid_fails(self):
        rep = kakutani_test(cl.perturbed_superellipsoid(3, 4.0, [1, 1, 1]), planes=4, tol=1e-6, seed=0)
        assert not rep.passed


class TestReflectionConjugacy:
    def test_sphere_configuration(self):
        r = 3.0
        rep = reflection_conjugacy_check(
            BALL, [r, 0, 0], [-r, 0, 0], [0, r, 0], [0, -r, 0], tol=1e-9, samples=24, planes=32
        )
        assert rep.graze_ok and rep.line_ok
        assert rep.graze_map_defect < 1e-9
        assert rep.line_in_mirror_defect < 1e-9

    def test_affine_images(self):
        rng = np.random.default_rng(0)
        for _ in range(3):
            t = cl.random_rotation(int(rng.integers(1 << 30)), 3) @ np.diag(rng.uniform(0.6, 1.6, 3))
            k = linear_image(BALL, t)
            p = t @ np.array([3.0, 0, 0])
            x = t @ np.array([0, 3.0, 0])
            rep = reflection_conjugacy_check(k, p, -p, x, -x, tol=1e-8, samples=24, planes=32)
            assert rep.graze_ok and rep.line_ok

    def test_superellipsoid_control_fails(self):
        body = cl.perturbed_superellipsoid(3, 4.0, [1, 1, 1])
        u = np.array([1.0, 0.4, -0.3])
        u = u / np.linalg.norm(u)
        p = 3.0 * u
        plane, _ = fit_hyperplane_through_origin(cl.cone_pair_intersection(body, p, -p, planes=32))
        x = 3.0 * cl.orthonormal_basis(plane)[0]
        rep = reflection_conjugacy_check(body, p, -p, x, -x, tol=1e-8, samples=24, planes=32)
        assert not rep.graze_ok
        assert rep.graze_map_defect >= 1e-3

    def test_non_antipodal_rejected(self):
        with pytest.raises(cl.GeometryError):
            reflection_conjugacy_check(BALL, [3, 0, 0], [-3, 0.2, 0], [0, 3, 0], [0, -3, 0])
