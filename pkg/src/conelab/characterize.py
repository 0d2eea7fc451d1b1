"""Characterization checks built on the cone machinery: the scaled-copy
construction for symmetric cone-pair intersections (with its sqrt(2)
trichotomy), strong-intersection-property verification, a coplanarity
deviation metric for conjecture exploration, and the symmetry / shadow
oracles (diametral chords, central symmetry, shadow boundaries, section
illumination, reflection conjugacy).

All checks are pure functions of (scene, seed, tolerances); per-sample work
items are independent and results are assembled in deterministic sample
order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._section import planar_section
from .bodies import (
    ContainmentError,
    Ellipsoid,
    Polytope,
    StarSurface,
    SupportBody,
    circumradius,
    diametral_defect,
    fibonacci_directions,
    directions_with_axes,
    require_within,
    surface_antipode,
)
from .cones import (
    SupportCone,
    cone_pair_sweep,
    graze_sample,
    pair_point_in_halfplane,
)
from .geometry import (
    AffineReflection,
    GeometryError,
    Hyperplane,
    as_vec,
    fit_hyperplane,
    fit_hyperplane_through_origin,
    orthonormal_basis,
    reflect,
    unit,
)

SQRT2 = float(np.sqrt(2.0))


# ---------------------------------------------------------------------------
# scaled-copy construction for symmetric apex pairs


def homothety_ratio(lam: float) -> float:
    """mu(lambda) = lambda / sqrt(lambda^2 - 1).

    For an O-centered body E and apexes +-x on the boundary of lambda*E, the
    symmetric cone-pair intersection lies on the boundary of mu(lambda)*E
    (right-triangle tangent geometry, certified against sampled cone
    intersections by the test suite)."""
    if lam <= 1.0:
        raise GeometryError("scaling factor must exceed 1 (inner body must be strictly inside)")
    return lam / np.sqrt(lam * lam - 1.0)


def construct_e3(e1: Ellipsoid, lam: float):
    """The O-symmetric homothet E3 = mu(lam) * E1 carrying the intersections
    S(E1, x) ∩ S(E1, -x) for x on bd(lam * E1), with its regime tag:
    'equal' at lam = sqrt(2), 'E3-inside-E2' for lam > sqrt(2),
    'E2-inside-E3' for lam < sqrt(2)."""
    if np.linalg.norm(e1.center) > 1e-12:
        raise GeometryError("construct_e3 expects an O-centered ellipsoid")
    mu = homothety_ratio(float(lam))
    e3 = e1.scaled(mu)
    if abs(lam - SQRT2) <= 1e-12:
        tag = "equal"
    elif lam > SQRT2:
        tag = "E3-inside-E2"
    else:
        tag = "E2-inside-E3"
    return e3, tag


def e3_certification_defect(e1: Ellipsoid, lam: float, apexes: int = 12, planes: int = 32) -> float:
    """Max relative gauge defect of sampled cone-pair intersection points
    against bd(mu(lam) E1): the sampling oracle certifying homothety_ratio."""
    e2 = e1.scaled(float(lam))
    e3, _ = construct_e3(e1, lam)
    worst = 0.0
    for u in fibonacci_directions(apexes, e1.dim):
        x = e2.boundary_crossing(np.zeros(e1.dim), u) * u
        pts = cone_pair_sweep(e1, x, e1, -x, None, planes).points
        worst = max(worst, float(np.abs(e3.gauge(pts) - 1.0).max()))
    return worst


# ---------------------------------------------------------------------------
# pair-plane residuals (coplanarity measurements)


@dataclass(frozen=True)
class PairPlaneResult:
    points: np.ndarray
    plane_through_origin: Hyperplane
    residual_through_origin: float
    plane_free: Hyperplane
    residual_free: float


def pair_plane_residuals(k: SupportBody, x, y, o=None, planes: int = 64) -> PairPlaneResult:
    """Sample S(K,x) ∩ S(K,y) and fit carrier planes two ways: constrained
    through O, and free.  The intersection of cones with collinear apexes is
    always (numerically) flat; the free plane passes through O only for
    balanced apex configurations."""
    sweep = cone_pair_sweep(k, x, k, y, o, planes)
    plane_o, res_o = fit_hyperplane_through_origin(sweep.points)
    plane_f, res_f = fit_hyperplane(sweep.points)
    return PairPlaneResult(sweep.points, plane_o, res_o, plane_f, res_f)


def deviation_metric(k: SupportBody, s, o=None, samples: int = 32, sweep: int = 64) -> float:
    """Max over sampled x on s of the coplanarity residual of
    S(K, x) ∩ S(K, phi(x)), normalized by the circumradius of K.

    Values at numerical zero (<= 1e-8) are consistent with the flat
    cone-pair intersection property; strictly positive values quantify the
    deviation for non-ellipsoidal bodies."""
    return max(rec.residual for rec in deviation_profile(k, s, o, samples, sweep))


@dataclass(frozen=True)
class DeviationSample:
    x: np.ndarray
    residual: float
    residual_through_origin: float


def deviation_profile(k: SupportBody, s, o=None, samples: int = 32, sweep: int = 64):
    o = np.zeros(k.dim) if o is None else as_vec(o, k.dim)
    require_within(k, s)
    scale = circumradius(k)
    out = []
    for u in fibonacci_directions(samples, k.dim):
        x = _surface_point(s, u)
        y = surface_antipode(s, x)
        res = pair_plane_residuals(k, x, y, o, sweep)
        out.append(
            DeviationSample(x, res.residual_free / scale, res.residual_through_origin / scale)
        )
    return out


def _surface_point(s, u):
    if isinstance(s, StarSurface):
        return s.point(u)
    return s.boundary_crossing(np.zeros(s.dim), u) * u


# ---------------------------------------------------------------------------
# strong intersection property


@dataclass(frozen=True)
class SipScene:
    """Scene for the strong intersection property: inner body K, enclosing
    surface S (star surface or convex body boundary), associated body G,
    with O interior to K and K ⊂ int G ⊂ int S."""

    k: SupportBody
    s: object
    g: SupportBody
    origin: np.ndarray = None

    def __post_init__(self):
        origin = np.zeros(self.k.dim) if self.origin is None else as_vec(self.origin, self.k.dim)
        object.__setattr__(self, "origin", origin)

    def validate(self):
        if not self.k.membership(self.origin, -1e-12):
            raise ContainmentError("origin must be strictly interior to K")
        require_within(self.k, self.g)
        require_within(self.g, self.s)


@dataclass(frozen=True)
class SipSample:
    x: np.ndarray
    y: np.ndarray
    plane: Hyperplane
    coplanarity_residual: float
    g_match_residual: float


@dataclass
class SipReport:
    samples: list = field(default_factory=list)
    scale: float = 1.0
    max_coplanarity: float = np.inf
    mean_coplanarity: float = np.inf
    max_g_match: float = np.inf
    mean_g_match: float = np.inf
    coplanar_ok: bool = False
    g_match_ok: bool = False
    verdict: bool = False


def sip_check(
    scene: SipScene,
    samples: int = 32,
    tol: float = 1e-8,
    planes: int = 64,
    curve_samples: int = 64,
    swapped: bool = False,
) -> SipReport:
    """Verify S(K,x) ∩ S(K,y) = Pi(x) ∩ bd G over sampled x on bd S.

    Per sample: y is the antipode of x through O, Pi(x) is the TLS plane
    through O of the sampled intersection, the coplanarity residual is the
    fit RMS, and the G-match residual is the larger of the two directed set
    defects (intersection points off bd G measured radially; plane-section
    boundary points off the intersection curve measured against the matched
    sweep half-plane point).  Verdict: both aggregates <= tol * scale.

    swapped=True runs the role-swapped variant (x on bd G, matched against
    bd S) without the containment-order validation."""
    if swapped:
        scene = SipScene(scene.k, scene.g, scene.s, scene.origin)
    else:
        scene.validate()
    o = scene.origin
    scale = circumradius(scene.k)
    report = SipReport(scale=scale)
    for u in fibonacci_directions(samples, scene.k.dim):
        x = _surface_point(scene.s, u)
        y = surface_antipode(scene.s, x)
        sweep = cone_pair_sweep(scene.k, x, scene.k, y, o, planes)
        plane, res_cop = fit_hyperplane_through_origin(sweep.points)
        g_match = _g_match_residual(scene, x, y, plane, sweep.points, curve_samples)
        report.samples.append(SipSample(x, y, plane, float(res_cop), float(g_match)))
    cop = np.array([s.coplanarity_residual for s in report.samples])
    gm = np.array([s.g_match_residual for s in report.samples])
    report.max_coplanarity = float(cop.max())
    report.mean_coplanarity = float(cop.mean())
    report.max_g_match = float(gm.max())
    report.mean_g_match = float(gm.mean())
    report.coplanar_ok = bool(report.max_coplanarity <= tol * scale)
    report.g_match_ok = bool(report.max_g_match <= tol * scale)
    report.verdict = report.coplanar_ok and report.g_match_ok
    return report


def _g_match_residual(scene: SipScene, x, y, plane: Hyperplane, pts, curve_samples: int) -> float:
    o = scene.origin
    g = scene.g
    # directed defect A: intersection points against bd G, radially from o
    rel = pts - o
    dists = np.linalg.norm(rel, axis=1)
    defect_a = 0.0
    for p, dist in zip(rel, dists):
        t = g.boundary_crossing(o, p / dist)
        defect_a = max(defect_a, abs(dist - t))
    # directed defect B: Pi(x) ∩ bd G against the intersection curve,
    # evaluated at the matched sweep half-plane
    basis = orthonormal_basis(plane)
    b1 = unit(np.asarray(x, dtype=float) - o)
    defect_b = 0.0
    for ang in 2.0 * np.pi * np.arange(curve_samples) / curve_samples:
        v = np.cos(ang) * basis[0] + np.sin(ang) * basis[1] if basis.shape[0] >= 2 else basis[0]
        q = o + g.boundary_crossing(o, v) * v
        w_perp = (q - o) - ((q - o) @ b1) * b1
        if np.linalg.norm(w_perp) < 1e-9 * np.linalg.norm(q - o):
            continue
        p_match = pair_point_in_halfplane(scene.k, x, scene.k, y, o, w_perp)
        defect_b = max(defect_b, float(np.linalg.norm(q - p_match)))
    return max(defect_a, defect_b)


# ---------------------------------------------------------------------------
# symmetry oracles


@dataclass(frozen=True)
class HammerReport:
    passed: bool
    worst_direction: np.ndarray
    worst_defect: float


def hammer_test(k: SupportBody, o=None, directions: int = 256, tol: float = 1e-9) -> HammerReport:
    """Whether every sampled chord through o is a diametral chord (endpoint
    normal cones intersect antipodally)."""
    o = np.zeros(k.dim) if o is None else as_vec(o, k.dim)
    worst_d = None
    worst = -1.0
    for d in fibonacci_directions(directions, k.dim):
        defect = diametral_defect(k, d, o)
        if defect > worst:
            worst, worst_d = defect, d
    return HammerReport(bool(worst <= tol), worst_d, float(worst))


def symmetry_defect(k: SupportBody, o, u) -> float:
    """|h(u) - <u,o> - (h(-u) + <u,o>)| for one direction."""
    u = as_vec(u, k.dim)
    o = as_vec(o, k.dim)
    return float(abs(k.support(u) - k.support(-u) - 2.0 * (u @ o)))


@dataclass(frozen=True)
class SymmetryReport:
    passed: bool
    worst_direction: np.ndarray
    worst_defect: float


def central_symmetry_check(k: SupportBody, o=None, tol: float = 1e-9, samples: int = 512) -> SymmetryReport:
    """Direct support-function check that k is symmetric about o:
    h(u) - <u,o> = h(-u) + <u,o> on sampled directions (axes included)."""
    o = np.zeros(k.dim) if o is None else as_vec(o, k.dim)
    dirs = directions_with_axes(samples, k.dim)
    defects = np.abs(k.support(dirs) - k.support(-dirs) - 2.0 * dirs @ o)
    i = int(np.argmax(defects))
    return SymmetryReport(bool(defects[i] <= tol), dirs[i], float(defects[i]))


# ---------------------------------------------------------------------------
# shadow boundaries


def shadow_defect(k: SupportBody, line_dir, z, boundary_tol: float = 1e-7) -> float:
    """min |<u, dir>| over unit outer normals u supporting k at z (smooth
    bodies have a unique normal; polytopes minimize over the normal cone)."""
    z = as_vec(z, k.dim)
    d = unit(as_vec(line_dir, k.dim))
    if not _on_boundary(k, z, boundary_tol):
        raise GeometryError("query point is not on the body boundary")
    base = k
    if isinstance(base, Polytope):
        gens = base.normal_generators(z)
        dots = gens @ d
        if np.any(dots >= 0) and np.any(dots <= 0):
            return 0.0
        if len(gens) == 1:
            return float(abs(dots[0]))
        best = float(np.abs(dots).min())
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                best = min(best, _arc_min_abs_dot(gens[i], gens[j], d))
        return best
    return float(abs(k.outer_normal(z) @ d))


def _arc_min_abs_dot(a, b, d, iters: int = 60) -> float:
    lo, hi = 0.0, 1.0

    def f(t):
        v = unit((1 - t) * a + t * b)
        return abs(float(v @ d))

    phi = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - phi * (hi - lo)
    e = lo + phi * (hi - lo)
    fc, fe = f(c), f(e)
    for _ in range(iters):
        if fc < fe:
            hi, e, fe = e, c, fc
            c = hi - phi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, e, fe
            e = lo + phi * (hi - lo)
            fe = f(e)
    return f(0.5 * (lo + hi))


def _on_boundary(k: SupportBody, z, tol: float) -> bool:
    if hasattr(k, "gauge"):
        return bool(abs(float(k.gauge(z)) - 1.0) <= tol)
    if isinstance(k, Polytope):
        return bool(abs(k.facet_values(z).max()) <= tol)
    from .bodies import _support_gap

    return bool(abs(_support_gap(k, z)[0]) <= tol)


def shadow_boundary_test(k: SupportBody, line_dir, z, tol: float = 1e-9) -> bool:
    """Whether some supporting hyperplane at the boundary point z is parallel
    to the line direction."""
    return shadow_defect(k, line_dir, z) <= tol


# ---------------------------------------------------------------------------
# section-plane family vs shadow boundary (Omega identity)


@dataclass(frozen=True)
class OmegaReport:
    forward_defect: float
    reverse_defect: float
    forward_points: np.ndarray
    passed: bool


def omega_identity_check(
    scene: SipScene,
    u,
    samples: int = 8,
    tol: float = 1e-7,
    planes: int = 48,
    march_planes: int = 12,
) -> OmegaReport:
    """Two-sided check that {z on bd S : the axis line of u lies in Pi_z}
    equals the shadow boundary of S for illumination direction u.

    Forward: points with u contained in the fitted plane are located by a
    meridian bisection march and must pass the shadow-boundary test.
    Reverse: exact shadow-boundary points (support points in directions
    orthogonal to u) must have fitted planes containing the u-axis."""
    s = scene.s
    if not isinstance(s, SupportBody):
        raise GeometryError("omega identity requires a strictly convex body surface")
    u = unit(as_vec(u, s.dim))
    o = scene.origin

    def plane_normal(z, n_planes, prev=None):
        y = surface_antipode(s, z)
        sweep = cone_pair_sweep(scene.k, z, scene.k, y, o, n_planes)
        plane, _ = fit_hyperplane_through_origin(sweep.points)
        n = plane.normal
        if prev is not None and float(n @ prev) < 0:
            n = -n
        return n

    basis = orthonormal_basis(u)
    fwd_defect = 0.0
    fwd_points = []
    for ang in np.pi * np.arange(samples) / samples:
        v = np.cos(ang) * basis[0] + np.sin(ang) * basis[1] if basis.shape[0] >= 2 else basis[0]

        def bd_point(theta):
            d = np.cos(theta) * u + np.sin(theta) * v
            return _surface_point(s, unit(d))

        # coarse march with orientation carried step to step (plane normals
        # are defined up to sign; only short steps keep the sign coherent)
        thetas = np.linspace(0.05, np.pi - 0.05, 25)
        n_prev = None
        gs = []
        for th in thetas:
            n_prev = plane_normal(bd_point(th), march_planes, n_prev)
            gs.append(float(n_prev @ u))
        crossings = [i for i in range(len(gs) - 1) if gs[i] * gs[i + 1] <= 0]
        if not crossings:
            raise GeometryError("meridian march found no sign change for the plane family")
        i0 = crossings[0]
        lo, hi = float(thetas[i0]), float(thetas[i0 + 1])
        g_lo = gs[i0]
        n_prev = plane_normal(bd_point(lo), march_planes)
        if float(n_prev @ u) * g_lo < 0:
            n_prev = -n_prev
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            n_mid = plane_normal(bd_point(mid), march_planes, n_prev)
            n_prev = n_mid
            if float(n_mid @ u) * g_lo > 0:
                lo = mid
            else:
                hi = mid
        z_star = bd_point(0.5 * (lo + hi))
        fwd_points.append(z_star)
        n_final = plane_normal(z_star, planes)
        fwd_defect = max(fwd_defect, abs(float(n_final @ u)))
        fwd_defect = max(fwd_defect, shadow_defect(s, u, z_star, boundary_tol=1e-6))
    rev_defect = 0.0
    for ang in 2.0 * np.pi * np.arange(max(samples, 4)) / max(samples, 4):
        v = np.cos(ang) * basis[0] + np.sin(ang) * basis[1] if basis.shape[0] >= 2 else basis[0]
        z = s.support_point(v)
        n = plane_normal(z, planes)
        rev_defect = max(rev_defect, abs(float(n @ u)))
    return OmegaReport(
        float(fwd_defect), float(rev_defect), np.array(fwd_points), bool(max(fwd_defect, rev_defect) <= tol)
    )


# ---------------------------------------------------------------------------
# Kakutani-style section illumination test


@dataclass(frozen=True)
class KakutaniPlaneResult:
    plane_normal: np.ndarray
    line: np.ndarray
    defect: float
    passed: bool


@dataclass(frozen=True)
class KakutaniReport:
    passed: bool
    planes: tuple


def kakutani_test(
    k: SupportBody,
    o=None,
    planes: int = 10,
    tol: float = 1e-6,
    seed: int = 0,
    section_samples: int = 64,
    starts: int = 16,
) -> KakutaniReport:
    """For each sampled plane through o, search for a line direction whose
    shadow boundary contains the plane section of the body boundary.

    Line search: smallest-singular-direction of the section normals, an
    ellipsoid conjugate-direction warm start (A^-1 w), and a Fibonacci
    multi-start, each polished by Nelder-Mead on the max-defect objective."""
    o = np.zeros(k.dim) if o is None else as_vec(o, k.dim)
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(planes):
        w = rng.standard_normal(k.dim)
        w = unit(w)
        results.append(_kakutani_plane(k, o, w, tol, section_samples, starts))
    return KakutaniReport(bool(all(r.passed for r in results)), tuple(results))


def _kakutani_plane(k, o, w, tol, section_samples, starts) -> KakutaniPlaneResult:
    basis = orthonormal_basis(w)
    sec = planar_section(k, o, basis.T)
    w2 = sec.boundary_points(section_samples)
    pts = sec.to_world(w2)
    normals = np.array([_boundary_normal(k, z) for z in pts])

    def defect(ell):
        return float(np.abs(normals @ ell).max())

    _, _, vh = np.linalg.svd(normals, full_matrices=True)
    candidates = [vh[-1]]
    if isinstance(k, Ellipsoid):
        candidates.append(unit(k.shape_inv @ w))
    candidates.extend(fibonacci_directions(starts, k.dim))
    best_ell = None
    best = np.inf
    for cand in candidates:
        ell, val = _polish_minimax(defect, unit(cand), k.dim)
        if val < best:
            best, best_ell = val, ell
    return KakutaniPlaneResult(w, best_ell, float(best), bool(best <= tol))


def _boundary_normal(k: SupportBody, z) -> np.ndarray:
    if isinstance(k, Polytope):
        gens = k.normal_generators(z)
        return gens[0]
    return k.outer_normal(z)


def _polish_minimax(fn, ell0, dim):
    chart = orthonormal_basis(ell0)

    def obj(t):
        return fn(unit(ell0 + chart.T @ t))

    res = minimize(
        obj,
        np.zeros(dim - 1),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 600},
    )
    ell = unit(ell0 + chart.T @ res.x)
    return ell, float(res.fun)


# ---------------------------------------------------------------------------
# reflection conjugacy


@dataclass(frozen=True)
class ReflectionReport:
    graze_map_defect: float
    line_in_mirror_defect: float
    graze_ok: bool
    line_ok: bool
    mirror_pq: Hyperplane
    mirror_xy: Hyperplane


def reflection_conjugacy_check(
    k: SupportBody,
    p,
    q,
    x,
    y,
    tol: float = 1e-8,
    samples: int = 48,
    planes: int = 64,
    surface=None,
) -> ReflectionReport:
    """Build the affine reflections swapping the cone pairs at (p, q) and
    (x, y) from their fitted intersection planes and verify

    (i)  the (p,q)-reflection maps sampled graze points of p onto the graze
         of q and vice versa (membership defect, both directions), and
    (ii) the line L(p,q) lies in the fitted mirror of (x, y).

    Preconditions: O on both chords and L(x,y) inside the (p,q)-mirror."""
    dim = k.dim
    p, q, x, y = (as_vec(v, dim) for v in (p, q, x, y))
    for a, b in ((p, q), (x, y)):
        if float(np.linalg.norm(unit(a) + unit(b))) > 1e-7:
            raise GeometryError("chord endpoints must be antipodal through O")
    if surface is not None:
        for z in (p, q, x, y):
            if isinstance(surface, StarSurface):
                r = float(surface.radius(unit(z)))
                if abs(np.linalg.norm(z) - r) > 1e-7 * r:
                    raise GeometryError("chord endpoint is not on the enclosing surface")
    lam_plane, _ = fit_hyperplane_through_origin(cone_pair_sweep(k, p, k, q, None, planes).points)
    pre = abs(float(lam_plane.normal @ unit(x)))
    if pre > 1e-6:
        raise GeometryError(f"L(x,y) is not contained in the (p,q) mirror (defect {pre:.3e})")
    h_plane, _ = fit_hyperplane_through_origin(cone_pair_sweep(k, x, k, y, None, planes).points)
    r_pq = AffineReflection(lam_plane, unit(p - q))
    graze_defect = 0.0
    for apex, target in ((p, q), (q, p)):
        pts = graze_sample(SupportCone(apex, k), samples).points
        mapped = reflect(r_pq, pts)
        for z in mapped:
            graze_defect = max(graze_defect, _graze_membership_defect(k, z, target))
    line_defect = max(abs(float(h_plane.normal @ unit(p))), abs(float(h_plane.normal @ unit(q))))
    return ReflectionReport(
        float(graze_defect),
        float(line_defect),
        bool(graze_defect <= tol),
        bool(line_defect <= tol),
        lam_plane,
        h_plane,
    )


def _graze_membership_defect(k: SupportBody, z, apex) -> float:
    """How far z is from the graze of K seen from apex: radial distance to
    bd K (relative) plus the angle defect between the chord to the apex and
    the tangent plane at the radial projection."""
    scale = circumradius(k)
    zn = np.linalg.norm(z)
    t = k.boundary_crossing(np.zeros(k.dim), z / zn)
    z_bd = t * z / zn
    d_bd = abs(zn - t) / scale
    u = k.outer_normal(z_bd)
    chord = apex - z_bd
    d_ang = abs(float(u @ chord)) / float(np.linalg.norm(chord))
    return max(d_bd, d_ang)
