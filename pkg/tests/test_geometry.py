import numpy as np
import pytest
from scipy.optimize import minimize

from conelab.geometry import (
    AffineReflection,
    DegenerateReflectionError,
    GeometryError,
    Hyperplane,
    RankDeficiencyError,
    fit_hyperplane,
    fit_hyperplane_through_origin,
    orthonormal_basis,
    reflect,
)


class TestReflect:
    def test_orthogonal_mirror(self):
        r = AffineReflection(Hyperplane([1, 0, 0], 0.0), [1, 0, 0])
        np.testing.assert_allclose(reflect(r, [1, 2, 3]), [-1, 2, 3], atol=1e-15)

    def test_oblique_direction(self):
        d = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
        r = AffineReflection(Hyperplane([1, 0, 0], 0.0), d)
        out = reflect(r, [1, 0, 0])
        np.testing.assert_allclose(out, [-1, -2, 0], atol=1e-14)
        assert abs(out[0] - (-1.0)) < 1e-14
        np.testing.assert_allclose(reflect(r, out), [1, 0, 0], atol=1e-14)

    def test_mirror_points_fixed(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = rng.standard_normal(3)
            h = Hyperplane(n, rng.uniform(-1, 1))
            d = rng.standard_normal(3)
            if abs(np.dot(h.normal, d / np.linalg.norm(d))) < 1e-3:
                continue
            r = AffineReflection(h, d)
            basis = orthonormal_basis(h)
            z = h.offset * h.normal + rng.standard_normal(2) @ basis
            np.testing.assert_allclose(reflect(r, z), z, atol=1e-12)

    def test_involution_random(self):
        rng = np.random.default_rng(11)
        for dim in (2, 3, 5):
            for _ in range(60):
                h = Hyperplane(rng.standard_normal(dim), rng.uniform(-2, 2))
                d = rng.standard_normal(dim)
                if abs(np.dot(h.normal, d / np.linalg.norm(d))) < 1e-2:
                    continue
                r = AffineReflection(h, d)
                z = rng.standard_normal((4, dim)) * 3
                np.testing.assert_allclose(reflect(r, reflect(r, z)), z, atol=1e-10)

    def test_degenerate_direction_rejected(self):
        with pytest.raises(DegenerateReflectionError):
            AffineReflection(Hyperplane([1, 0, 0], 0.0), [0, 1, 0])


class TestFitThroughOrigin:
    def test_exact_coplanar(self):
        h, res = fit_hyperplane_through_origin([[1, 0, 0], [0, 1, 0], [-1, 0, 0]])
        assert res <= 1e-12
        assert abs(abs(h.normal[2]) - 1.0) < 1e-12
        assert h.offset == 0.0

    def test_perturbed_circle_against_grid_oracle(self):
        # circle of radius 2 in {z3 = 0}, +0.1*e3 added to half the points
        ang = 2 * np.pi * np.arange(20) / 20
        pts = np.column_stack([2 * np.cos(ang), 2 * np.sin(ang), np.zeros(20)])
        pts[:10, 2] += 0.1
        h, res = fit_hyperplane_through_origin(pts)

        def rms(normal):
            normal = normal / np.linalg.norm(normal)
            return np.sqrt(np.mean((pts @ normal) ** 2))

        # brute force over a dense grid of candidate normals, then refine
        k = np.arange(20000) + 0.5
        phi = np.arccos(1 - 2 * k / 20000)
        theta = np.pi * (1 + np.sqrt(5)) * k
        grid = np.column_stack(
            [np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)]
        )
        vals = np.sqrt(np.mean((grid @ pts.T) ** 2, axis=1))
        best = grid[np.argmin(vals)]
        ref = minimize(rms, best, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-16})
        oracle = float(ref.fun)
        assert res <= oracle + 1e-9
        assert abs(res - oracle) <= 1e-6
        # against the fixed normal e3 the residual is the RMS of {0.1, 0};
        # the TLS optimum tilts slightly and can only be at or below that
        assert rms(np.array([0.0, 0.0, 1.0])) == pytest.approx(np.sqrt(0.005), abs=1e-12)
        assert res <= np.sqrt(0.005)
        assert abs(h.normal[2]) > 0.999

    def test_symmetric_cone_pair_samples_with_quadric_elimination_oracle(self):
        # points of S(E,x) ∩ S(E,-x) lie on the plane {<Ax, z> = 0}: the
        # difference of the two tangent-cone quadrics is linear in z.
        from conelab.bodies import circumradius, random_ellipsoid
        from conelab.cones import cone_pair_intersection

        e = random_ellipsoid(17, 3, 4.0)
        x = np.array([2.4, -0.8, 0.5])
        pts = cone_pair_intersection(e, x, -x, planes=100)
        assert pts.shape[0] == 200
        h, res = fit_hyperplane_through_origin(pts)
        assert res < 1e-8 * circumradius(e)
        oracle_normal = e.shape @ x
        oracle_normal = oracle_normal / np.linalg.norm(oracle_normal)
        assert np.abs(pts @ oracle_normal).max() < 1e-8 * circumradius(e)
        assert abs(abs(h.normal @ oracle_normal) - 1.0) < 1e-9

    def test_residual_invariant_under_rotation(self):
        rng = np.random.default_rng(5)
        pts = rng.standard_normal((40, 3))
        _, res = fit_hyperplane_through_origin(pts)
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        _, res_rot = fit_hyperplane_through_origin(pts @ q.T)
        assert res == pytest.approx(res_rot, rel=1e-10)

    def test_rank_deficiency(self):
        with pytest.raises(RankDeficiencyError):
            fit_hyperplane_through_origin([[1, 0, 0], [2, 0, 0], [3, 0, 0]])
        with pytest.raises(RankDeficiencyError):
            fit_hyperplane_through_origin(np.zeros((4, 3)))

    def test_too_few_points(self):
        with pytest.raises(GeometryError):
            fit_hyperplane_through_origin([[1.0, 0.0, 0.0]])


class TestFreeFit:
    def test_offset_plane(self):
        rng = np.random.default_rng(2)
        normal = np.array([0.0, 1.0, 1.0]) / np.sqrt(2)
        basis = orthonormal_basis(Hyperplane(normal, 0.0))
        pts = 0.7 * normal + rng.standard_normal((30, 2)) @ basis
        h, res = fit_hyperplane(pts)
        assert res <= 1e-12
        assert h.same_as(Hyperplane(normal, 0.7), tol=1e-9)


class TestOrthonormalBasis:
    def test_axis_normal(self):
        b = orthonormal_basis(Hyperplane([0, 0, 1], 0.0))
        np.testing.assert_allclose(b, np.eye(3)[:2], atol=1e-14)

    def test_generic_normal_contract(self):
        n = np.array([1.0, 1.0, 1.0]) / np.sqrt(3)
        b = orthonormal_basis(n)
        np.testing.assert_allclose(b @ b.T, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(b @ n, 0, atol=1e-12)

    def test_2d(self):
        b = orthonormal_basis(Hyperplane([0, 1], 0.0))
        assert b.shape == (1, 2)
        np.testing.assert_allclose(np.abs(b[0]), [1, 0], atol=1e-14)

    def test_deterministic(self):
        n = np.array([0.3, -0.5, 0.81])
        b1 = orthonormal_basis(n)
        b2 = orthonormal_basis(n.copy())
        np.testing.assert_array_equal(b1, b2)


class TestHyperplane:
    def test_normalization_and_membership(self):
        h = Hyperplane([0, 0, 2.0], 1.0)
        assert abs(np.linalg.norm(h.normal) - 1) < 1e-12
        assert h.offset == pytest.approx(0.5)
        assert h.contains_point([3.0, 4.0, 0.5], tol=1e-9)

    def test_sign_matched_equality(self):
        a = Hyperplane([0, 0, 1.0], 0.25)
        b = Hyperplane([0, 0, -1.0], -0.25)
        c = Hyperplane([0, 0, 1.0], -0.25)
        assert a.same_as(b)
        assert not a.same_as(c)
