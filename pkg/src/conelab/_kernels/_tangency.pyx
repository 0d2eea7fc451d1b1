# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of _tangency_py: fixed-budget bisection for in-plane
tangency touch angles on p-norm and polar-curve sections.

The function contracts (signatures, bracketing, sign conventions, output
layout) match the pure-numpy module exactly; tests assert agreement to
machine precision.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cos, fabs, pow, sin, sqrt

cnp.import_array()

BACKEND_NAME = "compiled"


cdef double _psi_one(const double[:, :, ::1] C, Py_ssize_t j, double p,
                     double xi, double alpha) noexcept nogil:
    cdef double c = cos(alpha)
    cdef double s = sin(alpha)
    cdef Py_ssize_t k = C.shape[1]
    cdef Py_ssize_t i
    cdef double v, vt, t = 0.0, d1 = 0.0, av
    if p == 2.0:
        for i in range(k):
            v = C[j, i, 0] * c + C[j, i, 1] * s
            t += v * v
        t = sqrt(t)
        for i in range(k):
            v = C[j, i, 0] * c + C[j, i, 1] * s
            d1 += (v / t) * C[j, i, 0]
        return xi * d1 - 1.0
    if p == 4.0:
        for i in range(k):
            v = C[j, i, 0] * c + C[j, i, 1] * s
            t += (v * v) * (v * v)
        t = sqrt(sqrt(t))
        for i in range(k):
            v = C[j, i, 0] * c + C[j, i, 1] * s
            vt = v / t
            d1 += vt * vt * vt * C[j, i, 0]
        return xi * d1 - 1.0
    for i in range(k):
        v = C[j, i, 0] * c + C[j, i, 1] * s
        t += pow(fabs(v), p)
    t = pow(t, 1.0 / p)
    for i in range(k):
        v = C[j, i, 0] * c + C[j, i, 1] * s
        av = pow(fabs(v) / t, p - 1.0)
        if v < 0:
            av = -av
        d1 += av * C[j, i, 0]
    return xi * d1 - 1.0


def pnorm_gauge(C, double p, alpha):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] Ca = np.ascontiguousarray(C, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] aa = np.ascontiguousarray(alpha, dtype=np.float64)
    cdef Py_ssize_t m = Ca.shape[0], k = Ca.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t j, i
    cdef double c, s, v, t
    for j in range(m):
        c = cos(aa[j])
        s = sin(aa[j])
        t = 0.0
        for i in range(k):
            v = Ca[j, i, 0] * c + Ca[j, i, 1] * s
            t += pow(fabs(v), p)
        out[j] = pow(t, 1.0 / p)
    return out


def pnorm_tangent_angles(C, double p, xi, int iters=80):
    cdef cnp.ndarray[cnp.float64_t, ndim=3] Ca = np.ascontiguousarray(C, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(xi, dtype=np.float64)
    cdef Py_ssize_t m = Ca.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((m, 2), dtype=np.float64)
    cdef Py_ssize_t j
    cdef int it
    cdef double a_ap, lo, hi, mid, val, r1, r2, x
    cdef const double[:, :, ::1] Cv = Ca
    for j in range(m):
        x = xa[j]
        a_ap = 0.0 if x > 0 else M_PI
        # root 1 in (a_ap, a_ap + pi): psi(lo) > 0
        lo = a_ap
        hi = a_ap + M_PI
        for it in range(iters):
            mid = 0.5 * (lo + hi)
            val = _psi_one(Cv, j, p, x, mid)
            if val > 0:
                lo = mid
            else:
                hi = mid
        r1 = 0.5 * (lo + hi)
        # root 2 in (a_ap - pi, a_ap): psi(hi) > 0
        lo = a_ap - M_PI
        hi = a_ap
        for it in range(iters):
            mid = 0.5 * (lo + hi)
            val = _psi_one(Cv, j, p, x, mid)
            if val > 0:
                hi = mid
            else:
                lo = mid
        r2 = 0.5 * (lo + hi)
        if sin(r1) >= 0:
            out[j, 0] = r1
            out[j, 1] = r2
        else:
            out[j, 0] = r2
            out[j, 1] = r1
    return out


cdef void _radial_one(const double[:, ::1] par, Py_ssize_t j, double alpha,
                      double* rho, double* rhod) noexcept nogil:
    cdef double c = cos(alpha)
    cdef double s = sin(alpha)
    cdef double b11 = par[j, 0], b12 = par[j, 1], b22 = par[j, 2]
    cdef double l1 = par[j, 3], l2 = par[j, 4]
    cdef double q11 = par[j, 5], q12 = par[j, 6], q22 = par[j, 7]
    cdef double u30 = par[j, 8], u21 = par[j, 9], u12 = par[j, 10], u03 = par[j, 11]
    cdef double base = par[j, 12]
    cdef double n, nd, q, qd, sq
    n = (1.0 + l1 * c + l2 * s + q11 * c * c + 2.0 * q12 * c * s + q22 * s * s
         + u30 * c * c * c + u21 * c * c * s + u12 * c * s * s + u03 * s * s * s)
    nd = (-l1 * s + l2 * c - 2.0 * q11 * c * s + 2.0 * q12 * (c * c - s * s)
          + 2.0 * q22 * c * s - 3.0 * u30 * c * c * s
          + u21 * (c * c * c - 2.0 * c * s * s)
          + u12 * (2.0 * c * c * s - s * s * s) + 3.0 * u03 * s * s * c)
    q = b11 * c * c + 2.0 * b12 * c * s + b22 * s * s
    qd = -2.0 * b11 * c * s + 2.0 * b12 * (c * c - s * s) + 2.0 * b22 * c * s
    sq = sqrt(q)
    rho[0] = base * n / sq
    rhod[0] = base * (nd * q - 0.5 * n * qd) / (q * sq)


def radial_radius(par, alpha):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pa = np.ascontiguousarray(par, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] aa = np.ascontiguousarray(alpha, dtype=np.float64)
    cdef Py_ssize_t m = pa.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t j
    cdef double rho, rhod
    cdef const double[:, ::1] pv = pa
    for j in range(m):
        _radial_one(pv, j, aa[j], &rho, &rhod)
        out[j] = rho
    return out


def radial_tangent_angles(par, xi, int iters=80):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pa = np.ascontiguousarray(par, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(xi, dtype=np.float64)
    cdef Py_ssize_t m = pa.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((m, 2), dtype=np.float64)
    cdef const double[:, ::1] pv = pa
    cdef Py_ssize_t j
    cdef int it
    cdef double a_ap, lo, hi, mid, val, r1, r2, x, rho, rhod
    for j in range(m):
        x = xa[j]
        a_ap = 0.0 if x > 0 else M_PI
        # root 1 in (a_ap, a_ap + pi): F(lo) < 0
        lo = a_ap
        hi = a_ap + M_PI
        for it in range(iters):
            mid = 0.5 * (lo + hi)
            _radial_one(pv, j, mid, &rho, &rhod)
            val = rho * rho - x * (rhod * sin(mid) + rho * cos(mid))
            if val < 0:
                lo = mid
            else:
                hi = mid
        r1 = 0.5 * (lo + hi)
        lo = a_ap - M_PI
        hi = a_ap
        for it in range(iters):
            mid = 0.5 * (lo + hi)
            _radial_one(pv, j, mid, &rho, &rhod)
            val = rho * rho - x * (rhod * sin(mid) + rho * cos(mid))
            if val < 0:
                hi = mid
            else:
                lo = mid
        r2 = 0.5 * (lo + hi)
        if sin(r1) >= 0:
            out[j, 0] = r1
            out[j, 1] = r2
        else:
            out[j, 0] = r2
            out[j, 1] = r1
    return out
