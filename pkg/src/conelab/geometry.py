"""Dimension-generic vector primitives, hyperplanes, affine reflections and
total-least-squares hyperplane fitting.

Everything here works for dense float vectors of length 2 <= n <= 8.  All
values are immutable after construction and all functions are pure, so they
are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DIM = 8
DEFAULT_TOL = 1e-9


class GeometryError(ValueError):
    """Base class for geometric precondition violations."""


class DegenerateReflectionError(GeometryError):
    """Reflection direction is (nearly) parallel to its mirror."""


class RankDeficiencyError(GeometryError):
    """Point set spans fewer than n-1 dimensions; the fitted plane is ambiguous."""


def as_vec(x, dim: int | None = None) -> np.ndarray:
    """Validate and return ``x`` as a finite float vector."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise GeometryError(f"expected a vector, got shape {v.shape}")
    if not (2 <= v.size <= MAX_DIM):
        raise GeometryError(f"dimension {v.size} outside supported range 2..{MAX_DIM}")
    if dim is not None and v.size != dim:
        raise GeometryError(f"expected dimension {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise GeometryError("vector has non-finite coordinates")
    return v


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise GeometryError("cannot normalize the zero vector")
    return v / n


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Hyperplane:
    """Hyperplane {z : <normal, z> = offset} with a unit normal.

    offset is the signed distance of the plane from the origin; offset 0
    encodes a plane through O.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_vec(self.normal)
        nn = float(np.linalg.norm(n))
        if not np.isfinite(self.offset):
            raise GeometryError("offset must be finite")
        if abs(nn - 1.0) > 1e-12:
            if nn == 0.0:
                raise GeometryError("hyperplane normal cannot be zero")
            object.__setattr__(self, "normal", _frozen(n / nn))
            object.__setattr__(self, "offset", float(self.offset) / nn)
        else:
            object.__setattr__(self, "normal", _frozen(n))
            object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.normal.size

    def signed_distance(self, z) -> np.ndarray | float:
        z = np.asarray(z, dtype=float)
        return z @ self.normal - self.offset

    def contains_point(self, z, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.abs(self.signed_distance(z)) <= tol)

    def same_as(self, other: "Hyperplane", tol: float = 1e-9) -> bool:
        # Normals are defined up to sign; compare sign-matched.
        c = float(self.normal @ other.normal)
        if abs(c) < 1.0 - tol:
            return False
        s = 1.0 if c >= 0.0 else -1.0
        return abs(self.offset - s * other.offset) <= tol


@dataclass(frozen=True)
class AffineReflection:
    """Involutive affine map fixing ``mirror`` pointwise and translating
    points parallel to ``direction``."""

    mirror: Hyperplane
    direction: np.ndarray

    def __post_init__(self):
        d = unit(as_vec(self.direction, self.mirror.dim))
        slope = float(self.mirror.normal @ d)
        if abs(slope) <= 1e-10:
            raise DegenerateReflectionError(
                f"reflection direction nearly parallel to mirror (|<n,d>| = {abs(slope):.3e})"
            )
        object.__setattr__(self, "direction", _frozen(d))

    @property
    def slope(self) -> float:
        return float(self.mirror.normal @ self.direction)


def reflect(r: AffineReflection, z) -> np.ndarray:
    """Apply the affine reflection to a point (or an (m, n) stack of points).

    z maps to z - 2 * ((<n, z> - offset) / <n, d>) * d, which fixes the
    mirror pointwise and is an involution.
    """
    z = np.asarray(z, dtype=float)
    h = r.mirror
    coef = 2.0 * (z @ h.normal - h.offset) / r.slope
    return z - np.multiply.outer(coef, r.direction)


def fit_hyperplane_through_origin(points, tol: float = DEFAULT_TOL):
    """Total-least-squares hyperplane through O.

    Returns the offset-0 hyperplane minimizing the root-mean-square
    orthogonal distance to the points (smallest singular direction of the
    raw, uncentered point matrix) together with that RMS residual.

    Raises RankDeficiencyError when the points span fewer than n-1
    dimensions, in which case the minimizing plane is not unique.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2:
        raise GeometryError(f"expected an (m, n) point array, got shape {p.shape}")
    m, n = p.shape
    if not (2 <= n <= MAX_DIM):
        raise GeometryError(f"dimension {n} outside supported range 2..{MAX_DIM}")
    if m < n - 1:
        raise GeometryError(f"need at least {n - 1} points in dimension {n}, got {m}")
    if not np.all(np.isfinite(p)):
        raise GeometryError("points contain non-finite coordinates")
    scale = float(np.abs(p).max())
    if scale == 0.0:
        raise RankDeficiencyError("all points are zero")
    _, s, vh = np.linalg.svd(p, full_matrices=True)
    sigma = np.zeros(n)
    sigma[: s.size] = s
    # Points must span at least n-1 directions for the normal to be defined.
    if sigma[n - 2] <= max(tol, 1e-13) * sigma[0]:
        raise RankDeficiencyError(
            f"points span fewer than {n - 1} dimensions "
            f"(singular values {np.array2string(sigma, precision=3)})"
        )
    normal = _canonical_sign(vh[n - 1])
    residual = float(sigma[n - 1]) / np.sqrt(m)
    return Hyperplane(normal, 0.0), residual


def fit_hyperplane(points, tol: float = DEFAULT_TOL):
    """Free total-least-squares hyperplane (through the centroid).

    Same contract as fit_hyperplane_through_origin but without the O
    constraint; used where a carrier plane is expected to exist but is not
    pinned to the origin.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2:
        raise GeometryError(f"expected an (m, n) point array, got shape {p.shape}")
    m, n = p.shape
    if m < n:
        raise GeometryError(f"need at least {n} points in dimension {n}, got {m}")
    c = p.mean(axis=0)
    q = p - c
    _, s, vh = np.linalg.svd(q, full_matrices=True)
    sigma = np.zeros(n)
    sigma[: s.size] = s
    if sigma[n - 2] <= max(tol, 1e-13) * max(sigma[0], 1e-300):
        raise RankDeficiencyError("centered points span fewer than n-1 dimensions")
    normal = _canonical_sign(vh[n - 1])
    residual = float(sigma[n - 1]) / np.sqrt(m)
    return Hyperplane(normal, float(normal @ c)), residual


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: largest-magnitude entry is positive."""
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v.copy()


def orthonormal_basis(h) -> np.ndarray:
    """n-1 mutually orthonormal vectors orthogonal to a hyperplane normal.

    Accepts a Hyperplane or a bare normal vector; returns an (n-1, n) array
    of rows.  The result is deterministic for a fixed normal: the canonical
    axis most aligned with the normal is dropped and the remaining axes are
    orthonormalized against it in index order.
    """
    normal = h.normal if isinstance(h, Hyperplane) else unit(as_vec(h))
    n = normal.size
    k = int(np.argmax(np.abs(normal)))
    cols = [normal] + [np.eye(n)[i] for i in range(n) if i != k]
    q, r = np.linalg.qr(np.column_stack(cols))
    # Fix QR sign ambiguity so the basis is a pure function of the normal.
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    return q[:, 1:].T.copy()
