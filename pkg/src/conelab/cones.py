"""Support cones from exterior points, graze sets, polar hyperplanes and the
cone-pair intersection sampler.

The central reduction: every 2-flat through the apex axis cuts a support
cone in two tangent rays of the in-plane section, so intersections of two
cones with collinear apexes are sampled plane by plane as intersections of
same-side tangent lines (two points per sweep plane, forming two continuous
closed curves as the plane sweeps around the axis).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._section import TangencySearchError, sweep_directions, sweep_tangent_lines
from .bodies import (
    Ellipsoid,
    Polytope,
    RadialBody,
    SupportBody,
    Superellipsoid,
    _golden_min,
    _support_gap,
)
from .geometry import (
    GeometryError,
    Hyperplane,
    as_vec,
    fit_hyperplane,
    unit,
)

__all__ = [
    "ApexInsideBodyError",
    "CollinearityError",
    "GrazeSet",
    "PairSweep",
    "PoleInsideWarning",
    "SupportCone",
    "TangencySearchError",
    "cone_contains",
    "cone_pair_intersection",
    "cone_pair_sweep",
    "graze_sample",
    "is_ellipsoidal_cone",
    "pair_point_in_halfplane",
    "polar_hyperplane",
    "ray_graze_defect",
]


class ApexInsideBodyError(GeometryError):
    """Cone apex is not strictly exterior to the body."""


class CollinearityError(GeometryError):
    """x, o, y are not collinear with o between the apexes."""


class PoleInsideWarning(UserWarning):
    """Polar hyperplane requested for a pole that is not exterior."""


@dataclass(frozen=True)
class SupportCone:
    """C(K, x): all rays from the exterior apex x through the body."""

    apex: np.ndarray
    body: SupportBody

    def __post_init__(self):
        apex = as_vec(self.apex, self.body.dim)
        apex = np.array(apex)
        apex.setflags(write=False)
        object.__setattr__(self, "apex", apex)
        if _is_inside(self.body, apex):
            raise ApexInsideBodyError("cone apex must be strictly outside the body")

    def quadric(self, z):
        """Tangent-cone quadric for ellipsoid bodies, normalized so that the
        value is comparable to the squared body gauge.  Zero on the cone
        boundary, positive inside the double cone."""
        body = self.body
        if not isinstance(body, Ellipsoid):
            raise GeometryError("the tangent quadric exists only for ellipsoid bodies")
        z = np.asarray(z, dtype=float)
        zc = z - body.center
        g = body.shape @ (self.apex - body.center)
        m = float((self.apex - body.center) @ g)
        lin = zc @ g - 1.0
        quad = np.einsum("...i,ij,...j->...", zc, body.shape, zc) - 1.0
        return lin**2 / (m - 1.0) - quad


def _is_inside(body: SupportBody, z, tol: float = 1e-12) -> bool:
    if hasattr(body, "gauge"):
        return bool(body.gauge(z) <= 1.0 + tol)
    if isinstance(body, Polytope):
        return bool(body.membership(z, tol))
    return _support_gap(body, z)[0] <= tol


def cone_contains(cone: SupportCone, z, tol: float = 1e-9):
    """Whether z lies in C(K, apex): the ray from the apex through z meets
    the body (to within tol).  Ellipsoid bodies use the quadric sign test;
    other kinds minimize the gauge along the ray."""
    body = cone.body
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = z[None, :] if single else z
    if isinstance(body, Ellipsoid):
        out = _ellipsoid_cone_contains(cone, pts, tol)
    elif isinstance(body, Polytope):
        out = _polytope_cone_contains(cone, pts, tol)
    else:
        out = np.array([ray_graze_defect(body, cone.apex, p) <= tol for p in pts])
    return bool(out[0]) if single else out


def _ellipsoid_cone_contains(cone: SupportCone, pts, tol):
    body = cone.body
    q = cone.quadric(pts)
    zc = pts - body.center
    quad = np.einsum("mi,ij,mj->m", zc, body.shape, zc)
    ok_quadric = q >= -tol * (1.0 + np.abs(quad))
    g = body.shape @ (cone.apex - body.center)
    side = (pts - cone.apex) @ g
    scale = np.linalg.norm(g) * (np.linalg.norm(pts - cone.apex, axis=1) + 1.0)
    ok_side = side <= tol * scale
    return ok_quadric & ok_side


def _polytope_cone_contains(cone: SupportCone, pts, tol):
    body = cone.body
    x = cone.apex
    d = pts - x
    a = d @ body.facet_normals.T  # (m, f)
    b = -(body.facet_normals @ x + body.facet_offsets)  # (f,)
    scale = max(1.0, float(np.abs(body.vertices).max()))
    slack = tol * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        upper = np.where(a > 0, (b + slack) / a, np.inf)
        lower = np.where(a < 0, (b + slack) / a, -np.inf)
    hi = upper.min(axis=1)
    lo = np.maximum(lower.max(axis=1), 0.0)
    flat_bad = ((np.abs(a) <= 1e-300) & (b[None, :] < -slack)).any(axis=1)
    return (~flat_bad) & (lo <= hi)


def ray_graze_defect(body: SupportBody, apex, z) -> float:
    """min_{t >= 0} gauge(apex + t (z - apex)) - 1.

    Zero when the ray from the apex through z grazes the body boundary, i.e.
    when z lies on the support-cone boundary; positive when the ray misses,
    negative when it passes through the interior."""
    apex = np.asarray(apex, dtype=float)
    d = np.asarray(z, dtype=float) - apex
    nd = float(np.linalg.norm(d))
    if nd < 1e-300:
        raise GeometryError("query point coincides with the apex")
    d = d / nd
    if isinstance(body, Ellipsoid):
        # gauge^2 is an exact quadratic along the ray
        o = apex - body.center
        a = float(d @ body.shape @ d)
        b = 2.0 * float(d @ body.shape @ o)
        c = float(o @ body.shape @ o)
        t_star = max(0.0, -b / (2.0 * a))
        val = c + b * t_star + a * t_star**2
        return float(np.sqrt(max(val, 0.0))) - 1.0
    if hasattr(body, "gauge"):
        gf = lambda p: float(body.gauge(p))
    elif isinstance(body, Polytope):
        anchor = body.anchor
        num = -(body.facet_normals @ anchor + body.facet_offsets)
        gf = lambda p: float(((body.facet_normals @ (p - anchor)) / num).max())
    else:
        # support-gap pseudo-gauge: convex in z, crosses 1 on the boundary
        gf = lambda p: _support_gap(body, p)[0] + 1.0

    def fn(t):
        return gf(apex + t * d)

    f0 = fn(0.0)
    hi = 1.0
    while fn(2.0 * hi) < fn(hi) and hi < 1e12:
        hi *= 2.0
    _, val = _golden_min(fn, 0.0, 2.0 * hi, iters=120)
    return float(min(val, f0)) - 1.0


@dataclass(frozen=True)
class GrazeSet:
    """Sampled graze points (tangency contacts) with the carrier plane of
    the sample when one exists."""

    points: np.ndarray
    carrier: Hyperplane | None
    carrier_residual: float


def graze_sample(cone: SupportCone, count: int = 64) -> GrazeSet:
    """Sample the graze: tangency touch points in planes through the
    apex-anchor axis (two per sweep plane)."""
    body = cone.body
    apex = cone.apex
    b1 = unit(apex - body.anchor)
    planes = max(1, (count + 1) // 2)
    w = sweep_directions(b1, planes, body.dim)
    xi = float(np.linalg.norm(apex - body.anchor))
    batch = sweep_tangent_lines(body, body.anchor, b1, w, xi)
    pts = _sweep_points_to_world(body.anchor, b1, w, batch.touches)
    pts = pts[:count] if count < len(pts) else pts
    carrier = None
    residual = np.inf
    try:
        carrier, residual = fit_hyperplane(pts)
    except GeometryError:
        pass
    scale = float(np.linalg.norm(pts, axis=1).max())
    if carrier is not None and residual > 1e-8 * scale:
        carrier = None
    return GrazeSet(pts, carrier, float(residual))


def _sweep_points_to_world(base, b1, w, coords):
    """coords: (m, 2, 2) in-plane points per plane/side -> (2m, n) stacked
    up-curve then down-curve, in sweep order."""
    up = base + np.outer(coords[:, 0, 0], b1) + coords[:, 0, 1][:, None] * w
    dn = base + np.outer(coords[:, 1, 0], b1) + coords[:, 1, 1][:, None] * w
    return np.vstack([up, dn])


def polar_hyperplane(e: Ellipsoid, x) -> Hyperplane:
    """Polar hyperplane {z : <A x, z> = 1} of an O-centered ellipsoid for the
    pole x, in unit-normal form.  Warns (and still returns the plane) when
    the pole is not exterior."""
    if np.linalg.norm(e.center) > 1e-12:
        raise GeometryError("polar hyperplane requires an O-centered ellipsoid")
    x = as_vec(x, e.dim)
    g = e.shape @ x
    nn = float(np.linalg.norm(g))
    if nn == 0.0:
        raise GeometryError("pole at the center has no polar hyperplane")
    if e.gauge(x) <= 1.0:
        warnings.warn("pole lies inside the ellipsoid; polar plane does not separate", PoleInsideWarning)
    return Hyperplane(g / nn, 1.0 / nn)


@dataclass(frozen=True)
class PairSweep:
    """Full sweep record of a cone-pair intersection sample."""

    points: np.ndarray  # (2m, n): up curve then down curve, sweep order
    base: np.ndarray
    b1: np.ndarray
    w: np.ndarray  # (m, n) sweep directions
    coords: np.ndarray  # (m, 2, 2) in-plane intersection points
    interior_dropped: int


def cone_pair_sweep(
    body_x: SupportBody,
    x,
    body_y: SupportBody,
    y,
    o=None,
    planes: int = 64,
    tol: float = 1e-9,
) -> PairSweep:
    """Sample S(Kx, x) ∩ S(Ky, y) for collinear apexes with o between them.

    Per sweep plane through the axis L(x, y) the two same-side tangent-line
    intersections are returned (sides carried continuously around the
    sweep).  The two-body form also serves homothetic-pair checks; the
    single-body operation is cone_pair_intersection."""
    dim = body_x.dim
    x = as_vec(x, dim)
    y = as_vec(y, dim)
    o = np.zeros(dim) if o is None else as_vec(o, dim)
    ux = x - o
    uy = y - o
    nx, ny = np.linalg.norm(ux), np.linalg.norm(uy)
    if nx < 1e-14 or ny < 1e-14:
        raise CollinearityError("apexes must differ from o")
    coll = float(np.linalg.norm(ux / nx + uy / ny))
    if coll > max(tol, 1e-12) * 10 + 1e-8:
        raise CollinearityError(f"o is not on the segment [x, y] (defect {coll:.3e})")
    for body, apex in ((body_x, x), (body_y, y)):
        if _is_inside(body, apex):
            raise ApexInsideBodyError("apexes must be strictly outside the bodies")
        if not _is_inside(body, o, tol=-1e-12):
            raise GeometryError("o must be strictly inside the bodies")
    b1 = ux / nx
    w = sweep_directions(b1, planes, dim)
    tx = sweep_tangent_lines(body_x, o, b1, w, float(nx))
    ty = sweep_tangent_lines(body_y, o, b1, w, float(-ny))
    coords = np.empty((len(w), 2, 2))
    for side in (0, 1):
        n1, c1 = tx.normals[:, side, :], tx.offsets[:, side]
        n2, c2 = ty.normals[:, side, :], ty.offsets[:, side]
        det = n1[:, 0] * n2[:, 1] - n1[:, 1] * n2[:, 0]
        bad = np.abs(det) < 1e-13
        if np.any(bad):
            j = int(np.nonzero(bad)[0][0])
            raise TangencySearchError(
                f"parallel same-side tangents at sweep plane {j} (direction {w[j]})"
            )
        coords[:, side, 0] = (c1 * n2[:, 1] - c2 * n1[:, 1]) / det
        coords[:, side, 1] = (n1[:, 0] * c2 - n2[:, 0] * c1) / det
    pts = _sweep_points_to_world(o, b1, w, coords)
    inside = np.array([_is_inside(body_x, p, tol=-1e-9) and _is_inside(body_y, p, tol=-1e-9) for p in pts])
    dropped = int(inside.sum())
    if dropped:
        pts = pts[~inside]
    return PairSweep(pts, o, b1, w, coords, dropped)


def cone_pair_intersection(
    body: SupportBody, x, y, o=None, planes: int = 64, tol: float = 1e-9
) -> np.ndarray:
    """Sampled S(K, x) ∩ S(K, y) boundary points (2 per sweep plane)."""
    return cone_pair_sweep(body, x, body, y, o, planes, tol).points


def pair_point_in_halfplane(body_x, x, body_y, y, o, w_dir) -> np.ndarray:
    """The intersection point of the pair S(Kx,x) ∩ S(Ky,y) lying in the
    half-plane spanned by the axis and the direction w_dir (w-component
    positive).  Used to evaluate the intersection curve at a prescribed
    sweep parameter."""
    dim = body_x.dim
    x = as_vec(x, dim)
    y = as_vec(y, dim)
    o = np.zeros(dim) if o is None else as_vec(o, dim)
    b1 = unit(x - o)
    w_dir = np.asarray(w_dir, dtype=float)
    w_dir = w_dir - (w_dir @ b1) * b1
    w_dir = unit(w_dir)
    tx = sweep_tangent_lines(body_x, o, b1, w_dir[None, :], float(np.linalg.norm(x - o)))
    ty = sweep_tangent_lines(body_y, o, b1, w_dir[None, :], float(-np.linalg.norm(y - o)))
    n1, c1 = tx.normals[0, 0], tx.offsets[0, 0]
    n2, c2 = ty.normals[0, 0], ty.offsets[0, 0]
    det = n1[0] * n2[1] - n1[1] * n2[0]
    if abs(det) < 1e-13:
        raise TangencySearchError("parallel same-side tangents in requested half-plane")
    w1 = (c1 * n2[1] - c2 * n1[1]) / det
    w2 = (n1[0] * c2 - n2[0] * c1) / det
    return o + w1 * b1 + w2 * w_dir


def is_ellipsoidal_cone(cone: SupportCone, cut: Hyperplane, tol: float = 1e-9, samples: int = 96) -> bool:
    """Whether the cone section in the cut hyperplane is an ellipse(oid):
    least-squares quadric fit of sampled boundary-curve points, accepted when
    the fit is elliptic with relative geometric residual at most tol."""
    ok, _, _ = ellipsoidal_cone_detail(cone, cut, tol, samples)
    return ok


def ellipsoidal_cone_detail(cone: SupportCone, cut: Hyperplane, tol: float = 1e-9, samples: int = 96):
    apex_side = float(cut.signed_distance(cone.apex))
    if abs(apex_side) < 1e-12:
        raise GeometryError("cut plane passes through the apex")
    graze = graze_sample(cone, samples).points
    den = (graze - cone.apex) @ cut.normal
    if np.any(np.abs(den) < 1e-14):
        raise GeometryError("insufficient samples: a graze ray is parallel to the cut")
    t = -apex_side / den
    if np.any(t <= 0):
        # some boundary ray never reaches the cut: the plane does not
        # separate the apex from the body across the whole cone
        raise GeometryError("cut plane must separate the apex from the body")
    pts = cone.apex + t[:, None] * (graze - cone.apex)
    from .geometry import orthonormal_basis

    basis = orthonormal_basis(cut)
    base = cut.offset * cut.normal
    w = (pts - base) @ basis.T
    d = w.shape[1]
    scale = float(np.abs(w).max())
    wn = w / scale
    cols = [wn[:, i] * wn[:, j] for i in range(d) for j in range(i, d)]
    cols += [wn[:, i] for i in range(d)] + [np.ones(len(wn))]
    design = np.column_stack(cols)
    _, _, vh = np.linalg.svd(design, full_matrices=False)
    coef = vh[-1]
    # gradient of the fitted quadric at the samples, for a geometric residual
    quad_terms = [(i, j) for i in range(d) for j in range(i, d)]
    grad = np.zeros_like(wn)
    for k, (i, j) in enumerate(quad_terms):
        grad[:, i] += coef[k] * wn[:, j]
        grad[:, j] += coef[k] * wn[:, i]
    grad += coef[len(quad_terms) : len(quad_terms) + d]
    vals = design @ coef
    residual = float(np.max(np.abs(vals) / np.maximum(np.linalg.norm(grad, axis=1), 1e-12)))
    q2 = np.zeros((d, d))
    for k, (i, j) in enumerate(quad_terms):
        q2[i, j] += 0.5 * coef[k]
        q2[j, i] += 0.5 * coef[k]
    eigs = np.linalg.eigvalsh(q2)
    elliptic = bool(eigs[0] * eigs[-1] > 0 and np.abs(eigs).min() > 1e-8 * np.abs(eigs).max())
    return (residual <= tol) and elliptic, residual, elliptic
