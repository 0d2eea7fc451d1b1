"""Pure-numpy implementation of the hot in-plane tangency kernels.

A 2D section of a smooth O-anchored body is described either as a scaled
p-norm gauge  gamma(w) = || C w ||_p  (superellipsoids, C = D R M), or as a
polar curve  rho(alpha) = base * N(alpha) / sqrt(Q(alpha))  with N a cubic
and Q a quadratic trigonometric polynomial (radially perturbed ellipsoids).

For an apex at (xi, 0) outside the section, the two tangency touch points
are bracketed by sign structure and found by fixed-budget bisection:

* p-norm:  psi(alpha) = xi * d gamma/d w1 (d(alpha)) - 1  changes sign
  exactly at the touch angles (psi > 0 at the apex direction).
* polar:   F(alpha) = rho^2 - xi * (rho' sin + rho cos)   (tangent-chord
  cross product; F < 0 at the apex direction).

Both functions are evaluated in lockstep over all sweep planes at once.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _pnorm_psi(C, p, xi, alpha):
    c = np.cos(alpha)
    s = np.sin(alpha)
    v = C[:, :, 0] * c[:, None] + C[:, :, 1] * s[:, None]
    t = np.sum(np.abs(v) ** p, axis=1) ** (1.0 / p)
    w = np.sign(v) * (np.abs(v) / t[:, None]) ** (p - 1.0)
    d1 = np.sum(w * C[:, :, 0], axis=1)
    return xi * d1 - 1.0


def pnorm_gauge(C, p, alpha):
    """gamma(d(alpha)) for unit in-plane directions, batched per plane."""
    C = np.asarray(C, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    c = np.cos(alpha)
    s = np.sin(alpha)
    v = C[:, :, 0] * c[:, None] + C[:, :, 1] * s[:, None]
    return np.sum(np.abs(v) ** p, axis=1) ** (1.0 / p)


def _bisect(fn, lo, hi, lo_sign, iters):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = fn(mid)
        same = (val > 0) == (lo_sign > 0)
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def pnorm_tangent_angles(C, p, xi, iters: int = 80):
    """Touch angles of the two tangent lines from (xi, 0) to {||Cw||_p <= 1}.

    Returns an (m, 2) array [upper, lower] where upper has sin(alpha) > 0.
    """
    C = np.asarray(C, dtype=float)
    xi = np.asarray(xi, dtype=float)
    m = C.shape[0]
    a_ap = np.where(xi > 0, 0.0, np.pi)

    def psi(alpha):
        return _pnorm_psi(C, p, xi, alpha)

    r1 = _bisect(psi, a_ap.copy(), a_ap + np.pi, +1, iters)
    r2 = _bisect(psi, a_ap - np.pi, a_ap.copy(), -1, iters)
    # _bisect keeps lo on the positive side; for r2 the positive end is hi.
    out = np.empty((m, 2))
    up_first = np.sin(r1) >= 0
    out[:, 0] = np.where(up_first, r1, r2)
    out[:, 1] = np.where(up_first, r2, r1)
    return out


def _radial_eval(par, alpha):
    c = np.cos(alpha)
    s = np.sin(alpha)
    b11, b12, b22 = par[:, 0], par[:, 1], par[:, 2]
    l1, l2 = par[:, 3], par[:, 4]
    q11, q12, q22 = par[:, 5], par[:, 6], par[:, 7]
    u30, u21, u12, u03 = par[:, 8], par[:, 9], par[:, 10], par[:, 11]
    base = par[:, 12]
    n = (
        1.0
        + l1 * c
        + l2 * s
        + q11 * c * c
        + 2.0 * q12 * c * s
        + q22 * s * s
        + u30 * c**3
        + u21 * c * c * s
        + u12 * c * s * s
        + u03 * s**3
    )
    nd = (
        -l1 * s
        + l2 * c
        - 2.0 * q11 * c * s
        + 2.0 * q12 * (c * c - s * s)
        + 2.0 * q22 * c * s
        - 3.0 * u30 * c * c * s
        + u21 * (c**3 - 2.0 * c * s * s)
        + u12 * (2.0 * c * c * s - s**3)
        + 3.0 * u03 * s * s * c
    )
    q = b11 * c * c + 2.0 * b12 * c * s + b22 * s * s
    qd = -2.0 * b11 * c * s + 2.0 * b12 * (c * c - s * s) + 2.0 * b22 * c * s
    sq = np.sqrt(q)
    rho = base * n / sq
    rhod = base * (nd * q - 0.5 * n * qd) / (q * sq)
    return rho, rhod


def radial_radius(par, alpha):
    par = np.asarray(par, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    return _radial_eval(par, alpha)[0]


def radial_tangent_angles(par, xi, iters: int = 80):
    """Touch angles for polar-curve sections (same layout as the p-norm case).

    par rows: [b11, b12, b22, l1, l2, q11, q12, q22, u30, u21, u12, u03, base].
    """
    par = np.asarray(par, dtype=float)
    xi = np.asarray(xi, dtype=float)
    m = par.shape[0]
    a_ap = np.where(xi > 0, 0.0, np.pi)

    def f(alpha):
        rho, rhod = _radial_eval(par, alpha)
        return rho * rho - xi * (rhod * np.sin(alpha) + rho * np.cos(alpha))

    r1 = _bisect(f, a_ap.copy(), a_ap + np.pi, -1, iters)
    r2 = _bisect(f, a_ap - np.pi, a_ap.copy(), +1, iters)
    out = np.empty((m, 2))
    up_first = np.sin(r1) >= 0
    out[:, 0] = np.where(up_first, r1, r2)
    out[:, 1] = np.where(up_first, r2, r1)
    return out
