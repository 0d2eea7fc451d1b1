"""Convex bodies presented through support-function oracles, star surfaces,
seeded generators, and hyperplane sections.

Every body exposes the same oracle surface:

* ``support(u)``        h(u) = max_{z in K} <u, z>
* ``support_point(u)``  a maximizer s(u) (so h(u) = <u, s(u)>)
* ``membership(z,tol)`` exact-as-possible inclusion test for the kind
* ``boundary_crossing(o, d)``  the t > 0 with o + t d on the boundary
* ``outer_normal(z)``   unit outward normal at a boundary point (smooth kinds)

Bodies are immutable after construction and their oracles are pure, so they
can be evaluated concurrently.  Generators take explicit seeds; nothing here
touches global RNG state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, linprog
from scipy.spatial import ConvexHull, QhullError

from .geometry import (
    GeometryError,
    Hyperplane,
    MAX_DIM,
    as_vec,
    orthonormal_basis,
    unit,
)

DEFAULT_TOL = 1e-9


class NotOnSurfaceError(GeometryError):
    """Query point does not lie on the star surface."""


class ContainmentError(GeometryError):
    """A required strict containment between bodies fails."""


# ---------------------------------------------------------------------------
# direction sampling


def fibonacci_directions(count: int, dim: int = 3) -> np.ndarray:
    """Deterministic, roughly uniform unit directions.

    Golden-ratio constructions for n = 2, 3; a fixed-seed Gaussian sample for
    higher dimensions (still a pure function of count and dim).
    """
    if count < 1:
        raise GeometryError("need at least one direction")
    if dim == 2:
        golden = (1.0 + np.sqrt(5.0)) / 2.0
        ang = 2.0 * np.pi * np.arange(count) / golden
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        k = np.arange(count) + 0.5
        phi = np.arccos(1.0 - 2.0 * k / count)
        golden = np.pi * (1.0 + np.sqrt(5.0))
        theta = golden * k
        return np.column_stack(
            [np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)]
        )
    rng = np.random.default_rng(202406 + 1000 * dim + count)
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def directions_with_axes(count: int, dim: int = 3) -> np.ndarray:
    """Direction sample guaranteed to include every +-e_i exactly."""
    eye = np.eye(dim)
    return np.vstack([eye, -eye, fibonacci_directions(count, dim)])


# ---------------------------------------------------------------------------
# radial coefficient tables (low-degree polynomial harmonics in u)


@dataclass(frozen=True)
class RadialPoly:
    """Perturbation profile psi(u) = lin.u + u'Qu + sum_i cubic_i u_i^3 on the
    unit sphere.  At most 16 active terms; odd terms make it non-symmetric."""

    lin: np.ndarray
    quad: np.ndarray
    cubic: np.ndarray

    def __post_init__(self):
        lin = np.asarray(self.lin, dtype=float)
        quad = np.asarray(self.quad, dtype=float)
        cubic = np.asarray(self.cubic, dtype=float)
        n = lin.size
        if quad.shape != (n, n) or cubic.size != n:
            raise GeometryError("inconsistent coefficient-table shapes")
        quad = 0.5 * (quad + quad.T)
        for name, arr in (("lin", lin), ("quad", quad), ("cubic", cubic)):
            arr = np.array(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return self.lin.size

    def __call__(self, u) -> np.ndarray | float:
        u = np.asarray(u, dtype=float)
        return u @ self.lin + np.einsum("...i,ij,...j->...", u, self.quad, u) + (u**3) @ self.cubic

    def grad(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.lin + 2.0 * u @ self.quad + 3.0 * self.cubic * u**2

    def scaled(self, factor: float) -> "RadialPoly":
        return RadialPoly(self.lin * factor, self.quad * factor, self.cubic * factor)

    @staticmethod
    def zero(dim: int) -> "RadialPoly":
        return RadialPoly(np.zeros(dim), np.zeros((dim, dim)), np.zeros(dim))


# ---------------------------------------------------------------------------
# bodies


class SupportBody:
    """A convex body presented by its support oracle."""

    kind = "custom"

    def __init__(self, dim: int, interior_point):
        if not (2 <= dim <= MAX_DIM):
            raise GeometryError(f"dimension {dim} outside supported range 2..{MAX_DIM}")
        self._dim = int(dim)
        self._anchor = as_vec(interior_point, dim)

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def anchor(self) -> np.ndarray:
        """An interior point (the gauge center for ray casts)."""
        return self._anchor

    # --- oracles ----------------------------------------------------------
    def support(self, u):
        raise NotImplementedError

    def support_point(self, u):
        raise NotImplementedError

    def membership(self, z, tol: float = DEFAULT_TOL):
        """Kind-exact inclusion test (vectorized over stacked points)."""
        z = np.asarray(z, dtype=float)
        single = z.ndim == 1
        pts = z[None, :] if single else z
        out = np.array([_support_gap(self, q)[0] <= tol for q in pts])
        return bool(out[0]) if single else out

    def boundary_crossing(self, o, d) -> float:
        """t > 0 with o + t d on the boundary; o must be strictly interior."""
        o = as_vec(o, self.dim)
        d = unit(as_vec(d, self.dim))

        def gap(t):
            return _support_gap(self, o + t * d)[0]

        if gap(0.0) >= 0.0:
            raise GeometryError("ray origin is not strictly interior")
        hi = 1.0
        while gap(hi) < 0.0:
            hi *= 2.0
            if hi > 1e9:
                raise GeometryError("boundary crossing not found (unbounded ray?)")
        return float(brentq(gap, 0.0, hi, xtol=1e-14, rtol=8.9e-16))

    def outer_normal(self, z) -> np.ndarray:
        """Unit outward normal at a boundary point."""
        _, u = _support_gap(self, as_vec(z, self.dim))
        return u

    def translate(self, shift) -> "SupportBody":
        return TranslatedBody(self, shift)


class Ellipsoid(SupportBody):
    """{z : (z - c)' A (z - c) <= 1} with A symmetric positive definite.

    Closed forms used throughout: for the O-centered case
    h(u) = sqrt(u' A^-1 u) and s(u) = A^-1 u / h(u).
    """

    kind = "ellipsoid"

    def __init__(self, shape, center=None):
        shape = np.asarray(shape, dtype=float)
        n = shape.shape[0]
        if shape.shape != (n, n):
            raise GeometryError("shape matrix must be square")
        if np.abs(shape - shape.T).max() > 1e-12 * max(1.0, np.abs(shape).max()):
            raise GeometryError("shape matrix must be symmetric to 1e-12")
        shape = 0.5 * (shape + shape.T)
        eigs = np.linalg.eigvalsh(shape)
        if eigs[0] <= 0.0:
            raise GeometryError(f"shape matrix must be positive definite (eigs {eigs})")
        center = np.zeros(n) if center is None else as_vec(center, n)
        super().__init__(n, center)
        self.shape = shape
        self.center = center
        self.shape_inv = np.linalg.inv(shape)
        self._eigs = eigs
        self.shape.setflags(write=False)
        self.center.setflags(write=False)
        self.shape_inv.setflags(write=False)

    def support(self, u):
        u = np.asarray(u, dtype=float)
        quad = np.einsum("...i,ij,...j->...", u, self.shape_inv, u)
        return u @ self.center + np.sqrt(quad)

    def support_point(self, u):
        u = np.asarray(u, dtype=float)
        au = u @ self.shape_inv
        quad = np.sqrt(np.einsum("...i,i...->...", u, au.T) if au.ndim > 1 else u @ au)
        return self.center + au / np.expand_dims(quad, -1) if au.ndim > 1 else self.center + au / quad

    def gauge(self, z):
        z = np.asarray(z, dtype=float) - self.center
        return np.sqrt(np.einsum("...i,ij,...j->...", z, self.shape, z))

    def membership(self, z, tol: float = DEFAULT_TOL):
        return self.gauge(z) <= 1.0 + tol

    def outer_normal(self, z):
        g = self.shape @ (as_vec(z, self.dim) - self.center)
        return unit(g)

    def boundary_crossing(self, o, d) -> float:
        o = as_vec(o, self.dim) - self.center
        d = unit(as_vec(d, self.dim))
        a = d @ self.shape @ d
        b = 2.0 * (d @ self.shape @ o)
        c = o @ self.shape @ o - 1.0
        if c >= 0.0:
            raise GeometryError("ray origin is not strictly interior")
        disc = b * b - 4.0 * a * c
        return float((-b + np.sqrt(disc)) / (2.0 * a))

    def scaled(self, factor: float) -> "Ellipsoid":
        """Homothet factor*E about O (requires an O-centered ellipsoid)."""
        if np.linalg.norm(self.center) > 0:
            raise GeometryError("scaled() expects an O-centered ellipsoid")
        return Ellipsoid(self.shape / factor**2)

    @staticmethod
    def ball(radius: float = 1.0, dim: int = 3, center=None) -> "Ellipsoid":
        return Ellipsoid(np.eye(dim) / radius**2, center)


class Polytope(SupportBody):
    """Bounded convex polytope given by a minimal vertex representation."""

    kind = "polytope"

    def __init__(self, vertices):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2:
            raise GeometryError("vertices must be an (m, n) array")
        n = verts.shape[1]
        try:
            hull = ConvexHull(verts)
        except QhullError as exc:
            raise GeometryError(f"vertex set is not full-dimensional: {exc}") from exc
        keep = np.sort(hull.vertices)
        verts = verts[keep]
        super().__init__(n, verts.mean(axis=0))
        self.vertices = verts
        self.vertices.setflags(write=False)
        hull = ConvexHull(self.vertices)
        # scipy convention: facet_normals @ z + facet_offsets <= 0 inside.
        self.facet_normals = hull.equations[:, :-1].copy()
        self.facet_offsets = hull.equations[:, -1].copy()
        self.facet_normals.setflags(write=False)
        self.facet_offsets.setflags(write=False)
        edges = set()
        for simplex in hull.simplices:
            for i in range(len(simplex)):
                for j in range(i + 1, len(simplex)):
                    a, b = int(simplex[i]), int(simplex[j])
                    edges.add((min(a, b), max(a, b)))
        self.edges = tuple(sorted(edges))

    def support(self, u):
        u = np.asarray(u, dtype=float)
        return (u @ self.vertices.T).max(axis=-1)

    def support_point(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.argmax(u @ self.vertices.T, axis=-1)
        return self.vertices[idx]

    def facet_values(self, z):
        z = np.asarray(z, dtype=float)
        return z @ self.facet_normals.T + self.facet_offsets

    def membership(self, z, tol: float = DEFAULT_TOL):
        vals = self.facet_values(z)
        return vals.max(axis=-1) <= tol

    def boundary_crossing(self, o, d) -> float:
        o = as_vec(o, self.dim)
        d = unit(as_vec(d, self.dim))
        num = -(self.facet_normals @ o + self.facet_offsets)
        if num.min() <= 0.0:
            raise GeometryError("ray origin is not strictly interior")
        den = self.facet_normals @ d
        pos = den > 1e-300
        if not np.any(pos):
            raise GeometryError("ray does not leave the polytope")
        return float((num[pos] / den[pos]).min())

    def normal_generators(self, z, tol: float = 1e-7) -> np.ndarray:
        """Unit normals of the facets active at z (the normal cone generators)."""
        vals = self.facet_values(z)
        active = vals >= vals.max() - tol
        gens = self.facet_normals[active]
        return gens / np.linalg.norm(gens, axis=1, keepdims=True)

    @staticmethod
    def cube(dim: int = 3, half_width: float = 1.0) -> "Polytope":
        corners = np.array(
            [[(half_width if (k >> i) & 1 else -half_width) for i in range(dim)] for k in range(2**dim)]
        )
        return Polytope(corners)

    @staticmethod
    def cross_polytope(dim: int = 3, radius: float = 1.0) -> "Polytope":
        eye = np.eye(dim) * radius
        return Polytope(np.vstack([eye, -eye]))


class Superellipsoid(SupportBody):
    """{z : sum_i |(R z)_i / a_i|^p <= 1}, O-centered, optionally rotated.

    Strictly convex for p in (1, inf); the support function is the dual-norm
    closed form h(u) = || a * (R u) ||_q with 1/p + 1/q = 1.
    """

    kind = "superellipsoid"

    def __init__(self, exponent: float, axes, rotation=None):
        axes = np.asarray(axes, dtype=float)
        n = axes.size
        if not np.isfinite(exponent) or exponent < 2.0:
            raise GeometryError("exponent must be finite and >= 2")
        if np.any(axes <= 0):
            raise GeometryError("semi-axes must be positive")
        if rotation is None:
            rotation = np.eye(n)
        rotation = np.asarray(rotation, dtype=float)
        if rotation.shape != (n, n) or np.abs(rotation @ rotation.T - np.eye(n)).max() > 1e-10:
            raise GeometryError("rotation must be an orthogonal n x n matrix")
        super().__init__(n, np.zeros(n))
        self.exponent = float(exponent)
        self.axes = axes
        self.rotation = rotation
        self.axes.setflags(write=False)
        self.rotation.setflags(write=False)
        self._q = exponent / (exponent - 1.0)

    def gauge(self, z):
        v = np.asarray(z, dtype=float) @ self.rotation.T / self.axes
        return np.linalg.norm(v, ord=self.exponent, axis=-1)

    def gauge_grad(self, z):
        v = np.asarray(z, dtype=float) @ self.rotation.T / self.axes
        g = self.gauge(z)
        w = np.sign(v) * np.abs(v / np.expand_dims(g, -1)) ** (self.exponent - 1.0)
        return (w / self.axes) @ self.rotation

    def support(self, u):
        v = np.asarray(u, dtype=float) @ self.rotation.T * self.axes
        return np.linalg.norm(v, ord=self._q, axis=-1)

    def support_point(self, u):
        v = np.asarray(u, dtype=float) @ self.rotation.T * self.axes
        h = np.linalg.norm(v, ord=self._q, axis=-1)
        w = np.sign(v) * np.abs(v / np.expand_dims(h, -1)) ** (self._q - 1.0)
        return (w * self.axes) @ self.rotation

    def membership(self, z, tol: float = DEFAULT_TOL):
        return self.gauge(z) <= 1.0 + tol

    def outer_normal(self, z):
        return unit(self.gauge_grad(as_vec(z, self.dim)))

    def boundary_crossing(self, o, d) -> float:
        return _gauge_ray_crossing(self, o, d)


class RadialBody(SupportBody):
    """Smooth convex body given radially about O:

        r(u) = (1 + psi(u)) / sqrt(u' A u)

    i.e. an O-centered ellipsoid modulated by a small radial perturbation.
    The constructor verifies convexity on a sampled boundary net.
    """

    kind = "radial"

    def __init__(self, shape, poly: RadialPoly, convexity_check: bool = True):
        shape = np.asarray(shape, dtype=float)
        n = shape.shape[0]
        shape = 0.5 * (shape + shape.T)
        if np.linalg.eigvalsh(shape)[0] <= 0.0:
            raise GeometryError("shape matrix must be positive definite")
        if poly.dim != n:
            raise GeometryError("coefficient table dimension mismatch")
        super().__init__(n, np.zeros(n))
        self.shape = shape
        self.poly = poly
        self.shape.setflags(write=False)
        if convexity_check:
            self._check_convexity()

    def radius(self, u):
        u = np.asarray(u, dtype=float)
        quad = np.einsum("...i,ij,...j->...", u, self.shape, u)
        val = 1.0 + self.poly(u)
        if np.any(val <= 0.0):
            raise GeometryError("radial perturbation exceeds the base radius")
        return val / np.sqrt(quad)

    def gauge(self, z):
        z = np.asarray(z, dtype=float)
        nrm = np.linalg.norm(z, axis=-1)
        u = z / np.expand_dims(np.where(nrm == 0.0, 1.0, nrm), -1)
        quad = np.sqrt(np.einsum("...i,ij,...j->...", z, self.shape, z))
        return quad / (1.0 + self.poly(u))

    def gauge_grad(self, z):
        z = np.asarray(z, dtype=float)
        nrm = np.linalg.norm(z, axis=-1, keepdims=True)
        u = z / nrm
        az = z @ self.shape
        quad = np.sqrt(np.einsum("...i,...i->...", z, az))
        denom = 1.0 + self.poly(u)
        gpoly = self.poly.grad(u)
        gpoly_t = (gpoly - np.expand_dims(np.einsum("...i,...i->...", gpoly, u), -1) * u) / nrm
        quad_e = np.expand_dims(quad, -1)
        denom_e = np.expand_dims(denom, -1)
        return az / (quad_e * denom_e) - quad_e * gpoly_t / denom_e**2

    def membership(self, z, tol: float = DEFAULT_TOL):
        return self.gauge(z) <= 1.0 + tol

    def outer_normal(self, z):
        return unit(self.gauge_grad(as_vec(z, self.dim)))

    def boundary_crossing(self, o, d) -> float:
        o = as_vec(o, self.dim)
        d = unit(as_vec(d, self.dim))
        if np.linalg.norm(o) < 1e-14:
            return float(self.radius(d))
        return _gauge_ray_crossing(self, o, d)

    def support(self, u):
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return float(u @ self._support_point_single(u))
        return np.array([v @ self._support_point_single(v) for v in u])

    def support_point(self, u):
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return self._support_point_single(u)
        return np.array([self._support_point_single(v) for v in u])

    def _support_point_single(self, u):
        # maximize f(d) = r(d) <u, d> over the unit sphere: dense seed, then
        # projected-gradient ascent with backtracking.
        u = unit(u)
        seeds = fibonacci_directions(256, self.dim)
        vals = self.radius(seeds) * (seeds @ u)
        d = seeds[int(np.argmax(vals))]
        f = self.radius(d) * (d @ u)
        step = 0.5
        for _ in range(200):
            z = self.radius(d) * d
            g = u - (u @ self.gauge_grad(z)) / (self.gauge_grad(z) @ self.gauge_grad(z)) * self.gauge_grad(z)
            # ascent direction tangent to the boundary at z
            g = g - (g @ d) * d
            gn = np.linalg.norm(g)
            if gn < 1e-16:
                break
            improved = False
            while step > 1e-18:
                cand = unit(d + step * g)
                fc = self.radius(cand) * (cand @ u)
                if fc > f:
                    d, f = cand, fc
                    improved = True
                    step *= 1.6
                    break
                step *= 0.5
            if not improved:
                break
        return self.radius(d) * d

    def _check_convexity(self):
        dirs = fibonacci_directions(400, self.dim)
        pts = self.radius(dirs)[:, None] * dirs
        normals = self.gauge_grad(pts)
        normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
        viol = np.einsum("ik,jk->ij", normals, pts) - np.einsum("ik,ik->i", normals, pts)[:, None]
        scale = np.linalg.norm(pts, axis=1).max()
        if viol.max() > 1e-7 * scale:
            raise GeometryError(
                f"radial perturbation breaks convexity (sampled violation {viol.max():.3e})"
            )


class TranslatedBody(SupportBody):
    """A body shifted by a fixed vector; oracles delegate to the base body."""

    kind = "translated"

    def __init__(self, base: SupportBody, shift):
        shift = as_vec(shift, base.dim)
        super().__init__(base.dim, base.anchor + shift)
        self.base = base
        self.shift = shift
        self.shift.setflags(write=False)

    def support(self, u):
        u = np.asarray(u, dtype=float)
        return self.base.support(u) + u @ self.shift

    def support_point(self, u):
        return self.base.support_point(u) + self.shift

    def membership(self, z, tol: float = DEFAULT_TOL):
        return self.base.membership(np.asarray(z, dtype=float) - self.shift, tol)

    def boundary_crossing(self, o, d) -> float:
        return self.base.boundary_crossing(as_vec(o, self.dim) - self.shift, d)

    def outer_normal(self, z):
        return self.base.outer_normal(as_vec(z, self.dim) - self.shift)


class CustomBody(SupportBody):
    """A body given by user oracles h(u) (and optionally s(u))."""

    kind = "custom"

    def __init__(self, dim: int, support_fn, support_point_fn=None, interior_point=None):
        ip = np.zeros(dim) if interior_point is None else as_vec(interior_point, dim)
        super().__init__(dim, ip)
        self._h = support_fn
        self._s = support_point_fn

    def support(self, u):
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return float(self._h(u))
        return np.array([float(self._h(v)) for v in u])

    def support_point(self, u):
        if self._s is None:
            raise GeometryError("custom body has no support-point oracle")
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return np.asarray(self._s(u), dtype=float)
        return np.array([np.asarray(self._s(v), dtype=float) for v in u])


class SectionBody(SupportBody):
    """The (n-1)-dimensional section K ∩ H of a support body with a
    hyperplane through O, expressed in orthonormal in-plane coordinates.

    h_section(u) = min_t h_K(M u + t * normal) (infimal convolution over the
    1-dimensional normal direction)."""

    kind = "section"

    def __init__(self, parent: SupportBody, plane: Hyperplane):
        if abs(plane.offset) > 1e-12:
            raise GeometryError("section plane must pass through O")
        basis = orthonormal_basis(plane)
        super().__init__(parent.dim - 1, np.zeros(parent.dim - 1))
        self.parent = parent
        self.plane = plane
        self.basis = basis  # rows: in-plane axes
        self.basis.setflags(write=False)

    def _min_over_normal(self, u2):
        nu = self.plane.normal
        u3 = u2 @ self.basis

        def fval(t):
            return float(self.parent.support(u3 + t * nu))

        t0, t1 = _bracket_minimum(fval)
        t_star, h = _golden_min(fval, t0, t1)
        return t_star, h

    def support(self, u):
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            return self._min_over_normal(u)[1]
        return np.array([self._min_over_normal(v)[1] for v in u])

    def support_point(self, u):
        u = np.asarray(u, dtype=float)
        if u.ndim == 1:
            t_star, _ = self._min_over_normal(u)
            s3 = self.parent.support_point(u @ self.basis + t_star * self.plane.normal)
            return self.basis @ s3
        return np.array([self.support_point(v) for v in u])

    def membership(self, z, tol: float = DEFAULT_TOL):
        z = np.asarray(z, dtype=float)
        return self.parent.membership(z @ self.basis, tol)


# ---------------------------------------------------------------------------
# star surfaces


class StarSurface:
    """Embedded sphere given by a smooth radial function over unit directions:

        r(u) = base_radius * (1 + psi(u))

    An O-star: every ray from O meets the surface exactly once.  Not
    necessarily convex and (with odd coefficients) not O-symmetric.
    """

    kind = "star_surface"

    def __init__(self, base_radius: float, poly: RadialPoly, r_min_factor: float = 0.05):
        if base_radius <= 0:
            raise GeometryError("base radius must be positive")
        self.base_radius = float(base_radius)
        self.poly = poly
        sample = fibonacci_directions(4096, poly.dim)
        rmin = float(self.radius(sample).min())
        if rmin <= r_min_factor * base_radius:
            raise GeometryError("radial function dips too close to zero")

    @property
    def dim(self) -> int:
        return self.poly.dim

    def radius(self, u):
        u = np.asarray(u, dtype=float)
        return self.base_radius * (1.0 + self.poly(u))

    def point(self, u):
        u = np.asarray(u, dtype=float)
        r = self.radius(u)
        return np.expand_dims(r, -1) * u if u.ndim > 1 else r * u

    def surface_points(self, count: int) -> np.ndarray:
        dirs = fibonacci_directions(count, self.dim)
        return self.point(dirs)

    def contains_strictly(self, z, margin: float = 0.0):
        z = np.asarray(z, dtype=float)
        nrm = np.linalg.norm(z, axis=-1)
        u = z / np.expand_dims(np.where(nrm == 0, 1.0, nrm), -1)
        return nrm < self.radius(u) - margin


def antipode(s: StarSurface, x, tol: float = 1e-7) -> np.ndarray:
    """The surface point on the ray opposite to x; requires x on the surface.

    For an O-symmetric surface this is exactly -x, and the map is an
    involution for every surface.
    """
    x = as_vec(x, s.dim)
    nrm = float(np.linalg.norm(x))
    if nrm == 0.0:
        raise NotOnSurfaceError("origin is not a surface point")
    u = x / nrm
    r = float(s.radius(u))
    if abs(nrm - r) > tol * max(1.0, r):
        raise NotOnSurfaceError(f"|x| = {nrm:.12g} but r(x/|x|) = {r:.12g}")
    return -float(s.radius(-u)) * u


def surface_antipode(s, x) -> np.ndarray:
    """Antipode through O on either a StarSurface or a SupportBody boundary."""
    if isinstance(s, StarSurface):
        return antipode(s, x)
    u = unit(as_vec(x, s.dim))
    t = s.boundary_crossing(np.zeros(s.dim), -u)
    return -t * u


def surface_sample(s, count: int) -> np.ndarray:
    """Deterministic boundary sample of a StarSurface or SupportBody."""
    if isinstance(s, StarSurface):
        return s.surface_points(count)
    dirs = fibonacci_directions(count, s.dim)
    o = np.zeros(s.dim)
    return np.array([s.boundary_crossing(o, u) * u for u in dirs])


# ---------------------------------------------------------------------------
# spec operations


def contains(body: SupportBody, z, tol: float = DEFAULT_TOL) -> bool:
    """Support-oracle membership: <u, z> <= h(u) + tol for all u in a dense
    deterministic sample, refined by local maximization of <u,z> - h(u)."""
    gap, _ = _support_gap(body, as_vec(z, body.dim))
    return gap <= tol


def _support_gap(body: SupportBody, z, samples: int = 512, starts: int = 3):
    """max_u <u,z> - h(u) over the unit sphere, with the maximizing u.

    Positive gap = z outside; the maximizer is the separating direction and,
    at boundary points, the outer normal.  Refinement is projected-gradient
    ascent from the best few sampled directions (multi-start: the objective
    has kinks for polytopes).
    """
    dirs = fibonacci_directions(samples, body.dim)
    vals = dirs @ z - body.support(dirs)
    order = np.argsort(vals)[::-1][:starts]
    best_f, best_u = -np.inf, None
    for idx in order:
        f, u = _ascend_gap(body, z, dirs[int(idx)], float(vals[int(idx)]))
        if f > best_f:
            best_f, best_u = f, u
    # derivative-free polish: the objective has kinks for polytopes where
    # gradient ascent stalls
    from scipy.optimize import minimize as _minimize

    chart = orthonormal_basis(best_u)

    def neg(t):
        u = unit(best_u + chart.T @ t)
        return -(float(u @ z) - float(body.support(u)))

    res = _minimize(neg, np.zeros(body.dim - 1), method="Nelder-Mead",
                    options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 800})
    if -res.fun > best_f:
        best_f = float(-res.fun)
        best_u = unit(best_u + chart.T @ res.x)
    return best_f, best_u


def _ascend_gap(body, z, u, f):
    step = 0.5
    for _ in range(120):
        s = body.support_point(u)
        g = z - s
        g = g - (g @ u) * u
        gn = float(np.linalg.norm(g))
        if gn < 1e-16:
            break
        improved = False
        while step > 1e-18:
            cand = unit(u + step * g)
            fc = float(cand @ z - body.support(cand))
            if fc > f + 1e-18:
                u, f = cand, fc
                improved = True
                step *= 1.7
                break
            step *= 0.5
        if not improved:
            break
    return f, u


def section_through_origin(body: SupportBody, h: Hyperplane) -> SupportBody:
    """The (n-1)-dimensional body K ∩ h in orthonormal_basis(h) coordinates.

    Closed form for ellipsoids (restricted quadratic form), edge cuts for
    polytopes, infimal convolution of the support oracle otherwise.
    """
    if abs(h.offset) > 1e-12:
        raise GeometryError("section plane must pass through O (offset 0)")
    if h.dim != body.dim:
        raise GeometryError("dimension mismatch between body and plane")
    basis = orthonormal_basis(h)
    m = basis.T  # columns: in-plane axes
    if isinstance(body, Ellipsoid):
        p = basis @ body.shape @ m
        b = basis @ (body.shape @ body.center)
        w0 = np.linalg.solve(p, b)
        rho2 = 1.0 - body.center @ body.shape @ body.center + w0 @ p @ w0
        if rho2 <= 0.0:
            raise GeometryError("plane does not meet the ellipsoid interior")
        return Ellipsoid(p / rho2, w0)
    if isinstance(body, Polytope):
        pts = _polytope_plane_points(body, h.normal, 0.0)
        if body.dim - 1 == 1:
            w = pts @ m
            return Polytope(np.array([[w.min()], [w.max()]]))  # pragma: no cover
        return Polytope(pts @ m)
    return SectionBody(body, h)


def _polytope_plane_points(body: Polytope, normal, offset, tol: float = 1e-12):
    """All edge/plane crossing points plus vertices on the plane."""
    eta = body.vertices @ normal - offset
    scale = max(1.0, float(np.abs(body.vertices).max()))
    pts = [body.vertices[i] for i in range(len(eta)) if abs(eta[i]) <= tol * scale]
    for i, j in body.edges:
        ei, ej = eta[i], eta[j]
        if ei * ej < -((tol * scale) ** 2):
            t = ei / (ei - ej)
            pts.append(body.vertices[i] + t * (body.vertices[j] - body.vertices[i]))
    if not pts:
        raise GeometryError("plane misses the polytope")
    return np.array(pts)


def diametral_chord_test(body: SupportBody, direction, o, tol: float = DEFAULT_TOL) -> bool:
    """Whether the chord through o along direction admits antiparallel outer
    normals at its endpoints (i.e. is a diametral chord)."""
    return diametral_defect(body, direction, o) <= tol


def diametral_defect(body: SupportBody, direction, o) -> float:
    """Antiparallelism defect of the chord's endpoint normals.

    Smooth bodies: || n_p + n_q || for the unique unit normals.  Polytopes:
    the minimized infinity-norm of a convex combination of the two normal
    cones (zero iff the cones intersect antipodally)."""
    o = as_vec(o, body.dim)
    d = unit(as_vec(direction, body.dim))
    tp = body.boundary_crossing(o, d)
    tq = body.boundary_crossing(o, -d)
    p = o + tp * d
    q = o - tq * d
    base = body.base if isinstance(body, TranslatedBody) else body
    if isinstance(base, Polytope):
        gp = body.normal_generators(p) if hasattr(body, "normal_generators") else base.normal_generators(p - body.shift)
        gq = body.normal_generators(q) if hasattr(body, "normal_generators") else base.normal_generators(q - body.shift)
        return _cone_antipodal_defect(gp, gq)
    np_ = body.outer_normal(p)
    nq_ = body.outer_normal(q)
    return float(np.linalg.norm(np_ + nq_))


def _cone_antipodal_defect(gen_p: np.ndarray, gen_q: np.ndarray) -> float:
    """min || Gp' a + Gq' b ||_inf s.t. a, b >= 0, sum(a) + sum(b) = 1.

    Zero exactly when cone(Gp) and -cone(Gq) share a nonzero ray."""
    n = gen_p.shape[1]
    k = gen_p.shape[0] + gen_q.shape[0]
    mat = np.vstack([gen_p, gen_q]).T  # (n, k)
    # variables: weights (k), t
    c = np.zeros(k + 1)
    c[-1] = 1.0
    a_ub = np.zeros((2 * n, k + 1))
    a_ub[:n, :k] = mat
    a_ub[n:, :k] = -mat
    a_ub[:, -1] = -1.0
    b_ub = np.zeros(2 * n)
    a_eq = np.zeros((1, k + 1))
    a_eq[0, :k] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=[(0, None)] * k + [(None, None)], method="highs")
    if not res.success:
        raise GeometryError(f"normal-cone LP failed: {res.message}")
    return float(res.fun)


def circumradius(body: SupportBody, samples: int = 512) -> float:
    """max ||z|| over the boundary (exact for O-centered ellipsoids, the
    maximum over sampled support points otherwise)."""
    if isinstance(body, Ellipsoid) and np.linalg.norm(body.center) == 0.0:
        return float(1.0 / np.sqrt(body._eigs[0]))
    dirs = fibonacci_directions(samples, body.dim)
    pts = body.support_point(dirs)
    return float(np.linalg.norm(pts, axis=1).max())


def require_within(inner, outer, margin_factor: float = 1e-9, samples: int = 256) -> None:
    """Raise ContainmentError unless inner ⊂ int outer with positive margin.

    outer may be a SupportBody (support dominance) or a StarSurface (radial
    comparison on sampled boundary points of inner)."""
    scale = circumradius(inner)
    if isinstance(outer, StarSurface):
        pts = surface_sample(inner, samples)
        nrm = np.linalg.norm(pts, axis=1)
        u = pts / nrm[:, None]
        gap = outer.radius(u) - nrm
        if gap.min() <= margin_factor * scale:
            raise ContainmentError(f"body is not strictly inside the star surface (margin {gap.min():.3e})")
        return
    dirs = fibonacci_directions(samples, inner.dim)
    gap = outer.support(dirs) - inner.support(dirs)
    if gap.min() <= margin_factor * scale:
        raise ContainmentError(f"containment margin too small ({gap.min():.3e})")


# ---------------------------------------------------------------------------
# seeded generators


def random_rotation(seed_or_rng, n: int = 3) -> np.ndarray:
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else np.random.default_rng(seed_or_rng)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_ellipsoid(seed: int, n: int = 3, cond_cap: float = 4.0) -> Ellipsoid:
    """Deterministic random O-centered ellipsoid Q' D Q with log-uniform
    eigenvalues of spread at most cond_cap (cap 1 gives a sphere)."""
    if cond_cap < 1.0:
        raise GeometryError("condition cap must be >= 1")
    rng = np.random.default_rng(seed)
    q = random_rotation(rng, n)
    eigs = np.exp(rng.uniform(0.0, np.log(cond_cap), size=n))
    return Ellipsoid(q.T @ np.diag(eigs) @ q)


def perturbed_superellipsoid(seed: int, p: float, axes) -> Superellipsoid:
    """Superellipsoid with the given exponent/axes in a seeded random
    orientation (the generic non-ellipsoid control body)."""
    axes = np.asarray(axes, dtype=float)
    rng = np.random.default_rng(seed)
    return Superellipsoid(p, axes, rotation=random_rotation(rng, axes.size))


def _normalized_poly(rng, dim: int, rel_amplitude: float, cubic: bool) -> RadialPoly:
    lin = rng.standard_normal(dim)
    quad = rng.standard_normal((dim, dim))
    quad = 0.5 * (quad + quad.T)
    quad -= np.eye(dim) * np.trace(quad) / dim
    cub = rng.standard_normal(dim) if cubic else np.zeros(dim)
    poly = RadialPoly(lin, quad, cub)
    probe = fibonacci_directions(200_000, dim)
    peak = float(np.abs(poly(probe)).max())
    return poly.scaled(rel_amplitude * (1.0 - 1e-3) / peak)


def random_star_surface(seed: int, base_radius: float, amplitude: float, dim: int = 3) -> StarSurface:
    """Seeded star surface with r(u) in [base - amplitude, base + amplitude]
    (normalized over a dense direction sample).  Odd coefficient terms make
    it non-symmetric."""
    if amplitude < 0 or amplitude >= base_radius:
        raise GeometryError("amplitude must lie in [0, base_radius)")
    rng = np.random.default_rng(seed)
    if amplitude == 0.0:
        return StarSurface(base_radius, RadialPoly.zero(dim))
    poly = _normalized_poly(rng, dim, amplitude / base_radius, cubic=True)
    return StarSurface(base_radius, poly)


def perturbed_ellipsoid(seed: int, shape, amplitude: float) -> RadialBody:
    """O-centered ellipsoid with a seeded radial perturbation of the given
    relative amplitude; linear + quadratic harmonics only so that moderate
    amplitudes keep the body convex (verified at construction)."""
    shape = np.asarray(shape, dtype=float)
    rng = np.random.default_rng(seed)
    if amplitude == 0.0:
        return RadialBody(shape, RadialPoly.zero(shape.shape[0]))
    poly = _normalized_poly(rng, shape.shape[0], amplitude, cubic=False)
    return RadialBody(shape, poly)


# ---------------------------------------------------------------------------
# serialization (the on-disk JSON body descriptors used by the harness)


def body_to_dict(body) -> dict:
    if isinstance(body, Ellipsoid):
        return {
            "kind": "ellipsoid",
            "dimension": body.dim,
            "center": body.center.tolist(),
            "shape": body.shape.tolist(),
        }
    if isinstance(body, Polytope):
        return {"kind": "polytope", "dimension": body.dim, "vertices": body.vertices.tolist()}
    if isinstance(body, Superellipsoid):
        return {
            "kind": "superellipsoid",
            "dimension": body.dim,
            "exponent": body.exponent,
            "axes": body.axes.tolist(),
            "rotation": body.rotation.tolist(),
        }
    if isinstance(body, RadialBody):
        return {
            "kind": "radial",
            "dimension": body.dim,
            "shape": body.shape.tolist(),
            "linear": body.poly.lin.tolist(),
            "quadratic": body.poly.quad.tolist(),
            "cubic": body.poly.cubic.tolist(),
        }
    if isinstance(body, StarSurface):
        return {
            "kind": "star_surface",
            "dimension": body.dim,
            "base_radius": body.base_radius,
            "linear": body.poly.lin.tolist(),
            "quadratic": body.poly.quad.tolist(),
            "cubic": body.poly.cubic.tolist(),
        }
    raise GeometryError(f"cannot serialize body kind {type(body).__name__}")


def body_from_dict(data: dict):
    if not isinstance(data, dict) or "kind" not in data:
        raise GeometryError("body descriptor must be an object with a 'kind' field")
    kind = data["kind"]
    known = {
        "ellipsoid": {"kind", "dimension", "center", "shape"},
        "polytope": {"kind", "dimension", "vertices"},
        "superellipsoid": {"kind", "dimension", "exponent", "axes", "rotation"},
        "radial": {"kind", "dimension", "shape", "linear", "quadratic", "cubic"},
        "star_surface": {"kind", "dimension", "base_radius", "linear", "quadratic", "cubic"},
    }
    if kind not in known:
        raise GeometryError(f"unknown body kind '{kind}'")
    extra = set(data) - known[kind]
    if extra:
        raise GeometryError(f"unknown field '{sorted(extra)[0]}' in {kind} descriptor")
    if kind == "ellipsoid":
        return Ellipsoid(data["shape"], data.get("center"))
    if kind == "polytope":
        return Polytope(data["vertices"])
    if kind == "superellipsoid":
        return Superellipsoid(data["exponent"], data["axes"], data.get("rotation"))
    poly = RadialPoly(data["linear"], data["quadratic"], data["cubic"])
    if kind == "radial":
        return RadialBody(data["shape"], poly)
    return StarSurface(data["base_radius"], poly)


# ---------------------------------------------------------------------------
# small numeric helpers


def _gauge_ray_crossing(body, o, d) -> float:
    o = as_vec(o, body.dim)
    d = unit(as_vec(d, body.dim))

    def g(t):
        return float(body.gauge(o + t * d)) - 1.0

    if g(0.0) >= 0.0:
        raise GeometryError("ray origin is not strictly interior")
    hi = 1.0
    while g(hi) < 0.0:
        hi *= 2.0
        if hi > 1e9:
            raise GeometryError("boundary crossing not found")
    return float(brentq(g, 0.0, hi, xtol=1e-14, rtol=8.9e-16))


def _bracket_minimum(f, t0: float = 0.0, step: float = 1.0):
    """Bracket the minimizer of a 1D convex function."""
    f0 = f(t0)
    if f(t0 + step) < f0:
        lo = t0
        hi = t0 + step
        while f(hi + step) < f(hi):
            step *= 2.0
            hi += step
        return lo - step, hi + step
    lo = t0 - step
    while f(lo - step) < f(lo):
        step *= 2.0
        lo -= step
    return lo - step, t0 + 1.0


def _golden_min(f, lo: float, hi: float, iters: int = 90):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return t, f(t)
