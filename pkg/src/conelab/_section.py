"""Planar (2-flat) sections of bodies and in-plane tangency.

Every sweep-based cone operation reduces to the same 2D picture: a plane
containing the apex axis cuts the body in a 2D convex section, the support
cone cuts the plane in two rays tangent to that section, and everything
(graze points, cone-pair intersections) is assembled from the tangent lines.

A section frame is (base, m2): world point = base + m2 @ w for in-plane
coordinates w, with m2 an (n, 2) matrix of orthonormal columns.  Apexes sit
on the first in-plane axis at (xi, 0).

Closed forms are used per body kind (conic restriction for ellipsoids,
vertex extremes for polytopes); smooth gauge kinds go through the tangency
kernels; everything else falls back to a support-oracle section.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .bodies import (
    Ellipsoid,
    Polytope,
    RadialBody,
    SupportBody,
    Superellipsoid,
    _bracket_minimum,
    _golden_min,
)
from .geometry import GeometryError, orthonormal_basis, unit


class TangencySearchError(GeometryError):
    """In-plane tangency could not be resolved (reported with sweep angle)."""


class TangentBatch:
    """Per-plane tangent data: index [j, side] with side 0 = up (positive
    second in-plane coordinate), side 1 = down."""

    __slots__ = ("normals", "offsets", "touches")

    def __init__(self, normals, offsets, touches):
        self.normals = normals  # (m, 2, 2) unit in-plane normals
        self.offsets = offsets  # (m, 2), oriented so the section origin side is negative
        self.touches = touches  # (m, 2, 2) touch points in-plane

    def __len__(self):
        return self.normals.shape[0]


def _rot90(v):
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def _lines_from_touches(touch, apex2):
    """Tangent line through apex and touch, unit normal, offset > 0."""
    chord = touch - apex2
    n = _rot90(chord)
    nn = np.linalg.norm(n, axis=-1, keepdims=True)
    if np.any(nn < 1e-300):
        raise TangencySearchError("tangent touch point coincides with the apex")
    n = n / nn
    off = np.einsum("...i,...i->...", n, touch)
    flip = off < 0
    n = np.where(flip[..., None], -n, n)
    off = np.where(flip, -off, off)
    return n, off


def sweep_directions(axis_dir, planes: int, dim: int) -> np.ndarray:
    """Deterministic second-axis directions orthogonal to the sweep axis.

    n = 3: uniform angles over half a turn (each plane carries both
    half-planes); n = 2: the single orthogonal direction; n > 3: a fixed
    low-discrepancy sample of the orthogonal sphere.
    """
    basis = orthonormal_basis(unit(axis_dir))
    if dim == 2:
        return basis[0][None, :]
    if dim == 3:
        psi = np.pi * np.arange(planes) / planes
        return np.outer(np.cos(psi), basis[0]) + np.outer(np.sin(psi), basis[1])
    from .bodies import fibonacci_directions

    coeff = fibonacci_directions(planes, dim - 1)
    return coeff @ basis


# ---------------------------------------------------------------------------
# batched sweep tangents


def sweep_tangent_lines(body: SupportBody, base, b1, W, xi: float) -> TangentBatch:
    """Tangent lines from the on-axis apex (xi, 0) to the section of the body
    with each sweep plane span(b1, W[j]) through ``base``."""
    if isinstance(body, Ellipsoid):
        return _conic_sweep(body, base, b1, W, xi)
    if isinstance(body, Superellipsoid) and np.linalg.norm(base) <= 1e-12:
        return _pnorm_sweep(body, b1, W, xi)
    if isinstance(body, RadialBody) and np.linalg.norm(base) <= 1e-12:
        return _radial_sweep(body, b1, W, xi)
    normals = np.empty((len(W), 2, 2))
    offsets = np.empty((len(W), 2))
    touches = np.empty((len(W), 2, 2))
    for j, w in enumerate(W):
        sec = planar_section(body, base, np.column_stack([b1, w]))
        (nu, ou, tu), (nd, od, td) = sec.tangents_from(xi)
        normals[j, 0], offsets[j, 0], touches[j, 0] = nu, ou, tu
        normals[j, 1], offsets[j, 1], touches[j, 1] = nd, od, td
    return TangentBatch(normals, offsets, touches)


def _conic_sweep(body: Ellipsoid, base, b1, W, xi: float) -> TangentBatch:
    a = body.shape
    e = np.asarray(base, dtype=float) - body.center
    m = W.shape[0]
    ab1 = a @ b1
    ae = a @ e
    p11 = float(b1 @ ab1)
    p12 = W @ ab1
    p22 = np.einsum("ji,jk,ki->i", W.T, a, W.T)
    q1 = float(b1 @ ae)
    q2 = W @ ae
    det = p11 * p22 - p12**2
    # center of the section conic: w0 = -P^{-1} q
    w01 = -(p22 * q1 - p12 * q2) / det
    w02 = -(p11 * q2 - p12 * q1) / det
    const = float(e @ ae) - 1.0
    rho2 = (p11 * w01**2 + 2 * p12 * w01 * w02 + p22 * w02**2) - const
    if np.any(rho2 <= 0):
        raise TangencySearchError("sweep plane misses the ellipsoid")
    b11 = p11 / rho2
    b12 = p12 / rho2
    b22 = p22 / rho2
    # 2x2 Cholesky of B = L L'; circle coordinates zeta = L' (w - w0)
    l11 = np.sqrt(b11)
    l21 = b12 / l11
    l22 = np.sqrt(b22 - l21**2)
    d1 = xi - w01
    d2 = -w02
    z1 = l11 * d1 + l21 * d2
    z2 = l22 * d2
    da2 = z1**2 + z2**2
    if np.any(da2 <= 1.0):
        raise TangencySearchError("apex not exterior to a sweep section")
    root = np.sqrt(da2 - 1.0)
    touches = np.empty((m, 2, 2))
    for side, sgn in ((0, 1.0), (1, -1.0)):
        t1 = (z1 + sgn * root * (-z2)) / da2
        t2 = (z2 + sgn * root * z1) / da2
        # back to in-plane coordinates: solve L' (w - w0) = zeta
        w2 = t2 / l22
        w1 = (t1 - l21 * w2) / l11
        touches[:, side, 0] = w01 + w1
        touches[:, side, 1] = w02 + w2
    # sort so side 0 has positive second coordinate
    swap = touches[:, 0, 1] < touches[:, 1, 1]
    tsw = touches[swap][:, ::-1, :]
    touches[swap] = tsw
    apex2 = np.array([xi, 0.0])
    normals, offsets = _lines_from_touches(touches, apex2)
    return TangentBatch(normals, offsets, touches)


def _pnorm_sweep(body: Superellipsoid, b1, W, xi: float) -> TangentBatch:
    m = W.shape[0]
    rb1 = body.rotation @ b1
    rw = W @ body.rotation.T
    c = np.empty((m, body.dim, 2))
    c[:, :, 0] = rb1[None, :] / body.axes
    c[:, :, 1] = rw / body.axes
    ang = _kernels.pnorm_tangent_angles(c, body.exponent, np.full(m, float(xi)))
    touches = np.empty((m, 2, 2))
    for side in (0, 1):
        al = np.ascontiguousarray(ang[:, side])
        g = np.asarray(_kernels.pnorm_gauge(c, body.exponent, al))
        touches[:, side, 0] = np.cos(al) / g
        touches[:, side, 1] = np.sin(al) / g
    normals, offsets = _lines_from_touches(touches, np.array([xi, 0.0]))
    return TangentBatch(normals, offsets, touches)


def radial_plane_params(body: RadialBody, b1, W) -> np.ndarray:
    """Per-plane coefficient rows for the polar-curve tangency kernel."""
    m = W.shape[0]
    a = body.shape
    par = np.empty((m, 13))
    ab1 = a @ b1
    par[:, 0] = float(b1 @ ab1)
    par[:, 1] = W @ ab1
    par[:, 2] = np.einsum("ij,jk,ik->i", W, a, W)
    lin, quad, cub = body.poly.lin, body.poly.quad, body.poly.cubic
    par[:, 3] = float(lin @ b1)
    par[:, 4] = W @ lin
    qb1 = quad @ b1
    par[:, 5] = float(b1 @ qb1)
    par[:, 6] = W @ qb1
    par[:, 7] = np.einsum("ij,jk,ik->i", W, quad, W)
    # sum_i cub_i (b1_i cos + w_i sin)^3 expanded in cos/sin powers
    par[:, 8] = float(cub @ b1**3)
    par[:, 9] = 3.0 * (W * (cub * b1**2)[None, :]).sum(axis=1)
    par[:, 10] = 3.0 * (W**2 * (cub * b1)[None, :]).sum(axis=1)
    par[:, 11] = W**3 @ cub
    par[:, 12] = 1.0
    return par


def _radial_sweep(body: RadialBody, b1, W, xi: float) -> TangentBatch:
    m = W.shape[0]
    par = radial_plane_params(body, b1, W)
    ang = _kernels.radial_tangent_angles(par, np.full(m, float(xi)))
    touches = np.empty((m, 2, 2))
    for side in (0, 1):
        al = np.ascontiguousarray(ang[:, side])
        rho = np.asarray(_kernels.radial_radius(par, al))
        touches[:, side, 0] = np.cos(al) * rho
        touches[:, side, 1] = np.sin(al) * rho
    normals, offsets = _lines_from_touches(touches, np.array([xi, 0.0]))
    return TangentBatch(normals, offsets, touches)


# ---------------------------------------------------------------------------
# single-section objects


def planar_section(body: SupportBody, base, m2):
    """Section of a body with the 2-flat {base + m2 @ w}."""
    base = np.asarray(base, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    if isinstance(body, Ellipsoid):
        return ConicSection(body, base, m2)
    if isinstance(body, Superellipsoid) and np.linalg.norm(base) <= 1e-12:
        return PnormSection(body, base, m2)
    if isinstance(body, RadialBody) and np.linalg.norm(base) <= 1e-12:
        return RadialSection(body, base, m2)
    if isinstance(body, Polytope):
        return PolygonSection(body, base, m2)
    return OracleSection(body, base, m2)


class PlanarSection:
    def __init__(self, body, base, m2):
        self.body = body
        self.base = base
        self.m2 = m2

    def to_world(self, w):
        return self.base + np.asarray(w, dtype=float) @ self.m2.T

    def boundary_radius(self, alphas):
        raise NotImplementedError

    def boundary_points(self, count: int):
        ang = 2.0 * np.pi * np.arange(count) / count
        r = self.boundary_radius(ang)
        return np.column_stack([r * np.cos(ang), r * np.sin(ang)])

    def tangents_from(self, xi: float):
        """((n, off, touch) up, (n, off, touch) down) tangent lines from (xi, 0)."""
        raise NotImplementedError


class ConicSection(PlanarSection):
    def __init__(self, body, base, m2):
        super().__init__(body, base, m2)
        a = body.shape
        e = base - body.center
        p = m2.T @ a @ m2
        q = m2.T @ (a @ e)
        w0 = -np.linalg.solve(p, q)
        rho2 = float(w0 @ p @ w0) - (float(e @ a @ e) - 1.0)
        if rho2 <= 0:
            raise GeometryError("plane misses the ellipsoid interior")
        self.center2 = w0
        self.b2 = p / rho2

    def boundary_radius(self, alphas):
        alphas = np.asarray(alphas, dtype=float)
        d = np.column_stack([np.cos(alphas), np.sin(alphas)])
        a_ = np.einsum("ki,ij,kj->k", d, self.b2, d)
        b_ = -2.0 * d @ (self.b2 @ self.center2)
        c_ = float(self.center2 @ self.b2 @ self.center2) - 1.0
        disc = b_**2 - 4.0 * a_ * c_
        return (-b_ + np.sqrt(disc)) / (2.0 * a_)

    def tangents_from(self, xi: float):
        batch = _conic_sweep_single(self.b2, self.center2, xi)
        return batch


def _conic_sweep_single(b2, w0, xi):
    l11 = np.sqrt(b2[0, 0])
    l21 = b2[0, 1] / l11
    l22 = np.sqrt(b2[1, 1] - l21**2)
    d = np.array([xi, 0.0]) - w0
    z = np.array([l11 * d[0] + l21 * d[1], l22 * d[1]])
    da2 = float(z @ z)
    if da2 <= 1.0:
        raise TangencySearchError("apex not exterior to the section")
    root = np.sqrt(da2 - 1.0)
    out = []
    for sgn in (1.0, -1.0):
        t = (z + sgn * root * np.array([-z[1], z[0]])) / da2
        w2 = t[1] / l22
        w1 = (t[0] - l21 * w2) / l11
        out.append(w0 + np.array([w1, w2]))
    touches = np.array(out)
    if touches[0, 1] < touches[1, 1]:
        touches = touches[::-1]
    n, off = _lines_from_touches(touches, np.array([xi, 0.0]))
    return (n[0], float(off[0]), touches[0]), (n[1], float(off[1]), touches[1])


class PnormSection(PlanarSection):
    def __init__(self, body, base, m2):
        super().__init__(body, base, m2)
        rm = body.rotation @ m2
        self.c = (rm / body.axes[:, None])[None, :, :]
        self.p = body.exponent

    def boundary_radius(self, alphas):
        alphas = np.asarray(alphas, dtype=float)
        c = np.repeat(self.c, alphas.size, axis=0)
        return 1.0 / np.asarray(_kernels.pnorm_gauge(c, self.p, alphas))

    def tangents_from(self, xi: float):
        ang = _kernels.pnorm_tangent_angles(self.c, self.p, np.array([float(xi)]))
        return self._assemble(ang, xi)

    def _assemble(self, ang, xi):
        out = []
        for side in (0, 1):
            al = np.ascontiguousarray(ang[:, side])
            g = float(np.asarray(_kernels.pnorm_gauge(self.c, self.p, al))[0])
            touch = np.array([np.cos(al[0]), np.sin(al[0])]) / g
            n, off = _lines_from_touches(touch[None, :], np.array([xi, 0.0]))
            out.append((n[0], float(off[0]), touch))
        return out[0], out[1]


class RadialSection(PlanarSection):
    def __init__(self, body, base, m2):
        super().__init__(body, base, m2)
        self.par = radial_plane_params(body, m2[:, 0], m2[:, 1][None, :])

    def boundary_radius(self, alphas):
        alphas = np.asarray(alphas, dtype=float)
        par = np.repeat(self.par, alphas.size, axis=0)
        return np.asarray(_kernels.radial_radius(par, alphas))

    def tangents_from(self, xi: float):
        ang = _kernels.radial_tangent_angles(self.par, np.array([float(xi)]))
        out = []
        for side in (0, 1):
            al = np.ascontiguousarray(ang[:, side])
            rho = float(np.asarray(_kernels.radial_radius(self.par, al))[0])
            touch = rho * np.array([np.cos(al[0]), np.sin(al[0])])
            n, off = _lines_from_touches(touch[None, :], np.array([xi, 0.0]))
            out.append((n[0], float(off[0]), touch))
        return out[0], out[1]


class PolygonSection(PlanarSection):
    """Polytope section (exact, n = 3 only: edge/plane cuts)."""

    def __init__(self, body, base, m2):
        super().__init__(body, base, m2)
        if body.dim != 3:
            raise GeometryError("polytope 2-flat sections are implemented for n = 3 only")
        nu = np.cross(m2[:, 0], m2[:, 1])
        nu = unit(nu)
        from .bodies import _polytope_plane_points

        pts = _polytope_plane_points(body, nu, float(nu @ base))
        w = (pts - base) @ m2
        from scipy.spatial import ConvexHull

        hull = ConvexHull(w)
        self.verts2 = w[hull.vertices]
        self.eq_n = hull.equations[:, :2]
        self.eq_b = hull.equations[:, 2]

    def boundary_radius(self, alphas):
        alphas = np.asarray(alphas, dtype=float)
        d = np.column_stack([np.cos(alphas), np.sin(alphas)])
        num = -(self.eq_b + 0.0)
        den = d @ self.eq_n.T
        with np.errstate(divide="ignore"):
            t = np.where(den > 1e-300, num[None, :] / den, np.inf)
        return t.min(axis=1)

    def tangents_from(self, xi: float):
        apex = np.array([xi, 0.0])
        rel = self.verts2 - apex
        ref = np.pi if xi > 0 else 0.0
        phi = np.arctan2(rel[:, 1], rel[:, 0])
        delta = np.mod(phi - ref + np.pi, 2.0 * np.pi) - np.pi
        i_lo = int(np.argmin(delta))
        i_hi = int(np.argmax(delta))
        # the touch with larger in-plane second coordinate is the up side
        t_lo, t_hi = self.verts2[i_lo], self.verts2[i_hi]
        up, dn = (t_lo, t_hi) if t_lo[1] >= t_hi[1] else (t_hi, t_lo)
        nu_, ou_ = _lines_from_touches(up[None, :], apex)
        nd_, od_ = _lines_from_touches(dn[None, :], apex)
        return (nu_[0], float(ou_[0]), up), (nd_[0], float(od_[0]), dn)


class OracleSection(PlanarSection):
    """Support-oracle section: h_sec(u) = inf over the orthogonal complement
    of the plane of the shifted support function.  Robust generic fallback;
    tangency by coarse scan plus bisection on the support-line gap."""

    def __init__(self, body, base, m2):
        super().__init__(body, base, m2)
        full = np.eye(body.dim)
        proj = full - m2 @ m2.T
        # orthonormal basis of the complement
        q, r = np.linalg.qr(proj)
        cols = [q[:, i] for i in range(body.dim) if abs(r[i, i]) > 1e-9]
        self.complement = np.column_stack(cols) if cols else np.zeros((body.dim, 0))

    def support2(self, u2):
        u3 = self.m2 @ np.asarray(u2, dtype=float)
        nc = self.complement.shape[1]
        if nc == 0:
            return float(self.body.support(u3)) - float(u3 @ self.base)
        if nc == 1:
            nu = self.complement[:, 0]
            shift = float(nu @ self.base)

            def f(t):
                return float(self.body.support(u3 + t * nu)) - t * shift

            lo, hi = _bracket_minimum(f)
            _, val = _golden_min(f, lo, hi)
            return val - float(u3 @ self.base)
        from scipy.optimize import minimize

        def fm(t):
            v = u3 + self.complement @ t
            return float(self.body.support(v)) - float(v @ self.base)

        res = minimize(fm, np.zeros(nc), method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        return float(res.fun)

    def boundary_radius(self, alphas):
        alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
        out = np.empty(alphas.size)
        from scipy.optimize import brentq

        for i, al in enumerate(alphas):
            d3 = self.m2 @ np.array([np.cos(al), np.sin(al)])

            def g(t):
                return 1.0 if self.body.membership(self.base + t * d3, 0.0) else -1.0

            # membership is a step function; bisect on the indicator
            lo, hi = 0.0, 1.0
            while self.body.membership(self.base + hi * d3, 0.0):
                hi *= 2.0
                if hi > 1e9:
                    raise GeometryError("section ray does not exit the body")
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                if self.body.membership(self.base + mid * d3, 0.0):
                    lo = mid
                else:
                    hi = mid
            out[i] = 0.5 * (lo + hi)
        return out

    def tangents_from(self, xi: float):
        apex = np.array([xi, 0.0])

        def gap(theta):
            u = np.array([np.cos(theta), np.sin(theta)])
            return self.support2(u) - float(u @ apex)

        grid = np.linspace(-np.pi, np.pi, 129)
        vals = np.array([gap(t) for t in grid])
        roots = []
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                roots.append(grid[i])
            elif vals[i] * vals[i + 1] < 0:
                lo, hi = grid[i], grid[i + 1]
                flo = vals[i]
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    fm = gap(mid)
                    if (fm > 0) == (flo > 0):
                        lo, flo = mid, fm
                    else:
                        hi = mid
                roots.append(0.5 * (lo + hi))
        if len(roots) < 2:
            raise TangencySearchError(f"expected two tangency angles, found {len(roots)}")
        lines = []
        for theta in roots[:2]:
            u = np.array([np.cos(theta), np.sin(theta)])
            off = self.support2(u)
            # touch: intersection of the support line with a nearby second
            # support line (numerical support point of the section)
            eps = 1e-7
            u2 = np.array([np.cos(theta + eps), np.sin(theta + eps)])
            off2 = self.support2(u2)
            mat = np.array([u, u2])
            touch = np.linalg.solve(mat, np.array([off, off2]))
            lines.append((u, off, touch))
        lines.sort(key=lambda rec: -rec[2][1])
        up, dn = lines[0], lines[1]
        return up, dn
